import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from pyairls.cli import (
    benchmark,
    cli,
    generate_cmd,
    list_generators,
    list_suites,
    solve,
    validate,
    variance,
)
from pyairls.densities import StandardGND
from pyairls.model import BlockLayout, MultiaffineExpr, MultiaffineModel, dump_problem


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def problem_file(runner: CliRunner, tmp_path: Path) -> Path:
    path = tmp_path / "sd.json"
    result = runner.invoke(generate_cmd, [
        "supply_demand",
        "-p", "T=2",
        "-p", "noise_ratio=0.01",
        "--seed", "1",
        "--out", str(path),
    ])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def plain_problem(tmp_path: Path) -> Path:
    """A hand-written problem with no generator record."""
    layout = BlockLayout([("x", 1), ("y", 1)])
    x = MultiaffineExpr.unit(0, 0, 1)
    y = MultiaffineExpr.unit(1, 0, 1)
    model = MultiaffineModel(
        layout,
        [(x - 1.0, StandardGND(2.0)), (x * y - 2.0, StandardGND(1.0)), (y - 2.0, StandardGND(2.0))],
    )
    path = tmp_path / "plain.json"
    dump_problem(model, path)
    return path


def test_generate(runner: CliRunner, problem_file: Path) -> None:
    assert problem_file.exists()
    assert (problem_file.parent / "sd.truth.json").exists()
    data = json.loads(problem_file.read_text())
    assert data["generator"]["name"] == "supply_demand"
    params = data["generator"]["params"]
    assert params["T"] == 2
    assert params["noise_ratio"] == 0.01
    assert data["generator"]["seed"] == 1


def test_generate_output_message(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(generate_cmd, ["water", "-p", "T=3", "--out", str(tmp_path / "w.json")])
    assert result.exit_code == 0
    assert "(6 unknowns, 18 factors)" in result.output
    assert "Ground truth:" in result.output


def test_generate_bad_params(runner: CliRunner, tmp_path: Path) -> None:
    out = str(tmp_path / "p.json")
    result = runner.invoke(generate_cmd, ["water", "-p", "depth=3", "--out", out])
    assert result.exit_code == 2
    assert "unknown parameter(s) for water: depth" in result.output
    result = runner.invoke(generate_cmd, ["water", "-p", "T", "--out", out])
    assert result.exit_code == 2
    result = runner.invoke(generate_cmd, ["nope", "--out", out])
    assert result.exit_code == 2
    assert "unknown generator" in result.output


def test_solve_writes_report_and_trace(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    out = tmp_path / "run"
    result = runner.invoke(solve, [str(problem_file), "--out", str(out), "--format", "json"])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "solve"
    assert report["status"] in ("converged", "stalled")
    assert len(report["solve"]["x_hat"]) == 3
    assert json.loads(result.output)["solve"]["sweeps"] == report["solve"]["sweeps"]
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0] == "sweep,L,Ghat,G,max_block_delta,elapsed_s"
    assert len(lines) == 1 + report["solve"]["sweeps"]


def test_solve_is_reproducible_without_timing(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(solve, [str(problem_file), "--out", str(out), "--no-timing"])
        assert result.exit_code == 0
        outputs.append((out / "trace.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_solve_max_sweeps_still_succeeds(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    out = tmp_path / "run"
    result = runner.invoke(solve, [str(problem_file), "--max-sweeps", "1", "--out", str(out)])
    assert result.exit_code == 0
    assert "solve: max_sweeps" in result.output
    assert len((out / "trace.csv").read_text().splitlines()) == 2


def test_solve_rejects_zero_alpha(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    result = runner.invoke(solve, [str(problem_file), "--alpha", "0", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "alpha must be > 0" in result.output


def test_solve_from_init_file(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    first = tmp_path / "first"
    runner.invoke(solve, [str(problem_file), "--out", str(first)])
    result = runner.invoke(solve, [
        str(problem_file),
        "--init-file", str(first / "report.json"),
        "--out", str(tmp_path / "second"),
        "--format", "json",
    ])
    assert result.exit_code == 0
    # already at the optimum: one sweep confirms convergence
    assert json.loads(result.output)["solve"]["sweeps"] <= 2


def test_solve_malformed_problem(runner: CliRunner, tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    result = runner.invoke(solve, [str(path), "--out", str(tmp_path / "run")])
    assert result.exit_code == 2
    assert "invalid JSON" in result.output


def test_variance_prop1(runner: CliRunner, problem_file: Path, tmp_path: Path) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(problem_file), "--out", str(run)])
    out = tmp_path / "var"
    result = runner.invoke(variance, [
        str(problem_file), str(run / "report.json"),
        "--block", "tau",
        "--samples", "50",
        "--out", str(out),
        "--format", "json",
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "variance.json").read_text())
    assert report["covariance"]["method"] == "prop1"
    assert report["covariance"]["block"] == 2
    assert report["covariance"]["N_S"] == 50
    assert (out / "sigma.csv").read_text().count("\n") == 1


def test_variance_block_by_position(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(problem_file), "--out", str(run)])
    result = runner.invoke(variance, [
        str(problem_file), str(run / "report.json"),
        "-b", "0", "--method", "fast", "--samples", "20", "--out", str(tmp_path / "var"),
    ])
    assert result.exit_code == 0, result.output
    assert "covariance (fast, block 0, N_S=20)" in result.output


def test_variance_needs_two_samples(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(problem_file), "--out", str(run)])
    result = runner.invoke(variance, [
        str(problem_file), str(run / "report.json"), "--block", "tau", "--samples", "1",
    ])
    assert result.exit_code == 2
    assert "N_S ≥ 2 required" in result.output


def test_variance_resampling(runner: CliRunner, problem_file: Path, tmp_path: Path) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(problem_file), "--out", str(run)])
    out = tmp_path / "var"
    result = runner.invoke(variance, [
        str(problem_file), str(run / "report.json"),
        "--block", "tau", "--method", "resampling", "--samples", "3", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "variance.json").read_text())
    assert report["covariance"]["method"] == "resampling"


def test_resampling_needs_generator_record(
    runner: CliRunner, plain_problem: Path, tmp_path: Path
) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(plain_problem), "--out", str(run)])
    result = runner.invoke(variance, [
        str(plain_problem), str(run / "report.json"),
        "--block", "x", "--method", "resampling",
    ])
    assert result.exit_code == 2
    assert "no generator record" in result.output


def test_variance_unknown_block(
    runner: CliRunner, plain_problem: Path, tmp_path: Path
) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(plain_problem), "--out", str(run)])
    result = runner.invoke(variance, [
        str(plain_problem), str(run / "report.json"), "--block", "z",
    ])
    assert result.exit_code == 2
    assert "unknown block 'z'" in result.output


def test_proposal_too_wide_exits_3(
    runner: CliRunner, problem_file: Path, tmp_path: Path
) -> None:
    run = tmp_path / "run"
    runner.invoke(solve, [str(problem_file), "--out", str(run)])
    result = runner.invoke(variance, [
        str(problem_file), str(run / "report.json"),
        "--block", "tau", "--samples", "10", "--scale", "1e6", "--out", str(tmp_path / "v"),
    ])
    assert result.exit_code == 3
    assert "proposal too wide" in result.output


def test_validate(runner: CliRunner, plain_problem: Path) -> None:
    result = runner.invoke(validate, [str(plain_problem)])
    assert result.exit_code == 0
    assert result.output == "model is valid\n"


def test_validate_rejects_degree_two(runner: CliRunner, tmp_path: Path) -> None:
    path = tmp_path / "square.json"
    path.write_text(json.dumps({
        "blocks": [{"name": "x", "size": 1}],
        "factors": [{
            "terms": [{"coeff": 1.0, "factors": [
                {"block": "x", "vector": [1.0]},
                {"block": "x", "vector": [1.0]},
            ]}],
            "density": {"type": "gnd", "q": 2},
        }],
    }))
    result = runner.invoke(validate, [str(path), "--format", "json"])
    assert result.exit_code == 2
    data = json.loads(result.output)
    assert data["ok"] is False
    assert data["violations"][0]["check_id"] == "multiaffinity"


def test_list_generators(runner: CliRunner) -> None:
    result = runner.invoke(list_generators)
    assert result.exit_code == 0
    assert "Generators" in result.output
    assert "supply_demand" in result.output


def test_list_suites(runner: CliRunner) -> None:
    result = runner.invoke(list_suites)
    assert result.exit_code == 0
    assert "Available Suites:" in result.output
    assert "fig8" in result.output


def test_benchmark_quick(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(benchmark, [
        "fig6", "--quick", "--no-timing", "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    suite_dir = tmp_path / "fig6"
    assert (suite_dir / "airls_by_sweep.csv").exists()
    assert (suite_dir / "envelope.csv").exists()
    assert json.loads((suite_dir / "metadata.json").read_text())["suite"] == "fig6"


def test_benchmark_unknown_suite(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(benchmark, ["fig3", "--out-dir", str(tmp_path)])
    assert result.exit_code == 2
    assert "unknown suite" in result.output


def test_group_verbose_flag(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["--verbose", "list-suites"])
    assert result.exit_code == 0
    assert "fig1" in result.output
