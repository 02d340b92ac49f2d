import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, TypeVar, cast

import click
import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from .config import Config
from .exceptions import ModelError, NumericalError, SamplingError
from .experiments import SUITES, get_suite, write_suite
from .model import BlockId, MultiaffineModel, load_problem
from .problems import GENERATORS, generate, generator_params, regenerator
from .reports.generator import (
    ReportGenerator,
    RunReport,
    read_solution,
    spectral_norm,
    write_matrix_csv,
    write_trace_csv,
)
from .solver import SolverConfig, airls_solve
from .validator import validate_model
from .variance import (
    SamplerConfig,
    estimate_covariance,
    estimate_covariance_fast,
    resampling_covariance,
)

console = Console()
logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_NUMERICAL = 3

F = TypeVar("F", bound=Callable[..., Any])


def _error(message: str) -> None:
    console.print(f"[red]Error:[/red] {escape(message)}", soft_wrap=True)


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in item['loc'])}: {item['msg']}"
        if item["loc"]
        else item["msg"]
        for item in error.errors()
    )


def guarded(func: F) -> F:
    """Map library errors to the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (NumericalError, SamplingError) as e:
            _error(str(e))
            sys.exit(EXIT_NUMERICAL)
        except ValidationError as e:
            _error(_validation_message(e))
            sys.exit(EXIT_INVALID)
        except ValueError as e:
            # ModelError, DensityError and GridBudgetError are ValueErrors
            _error(str(e))
            sys.exit(EXIT_INVALID)
        except OSError as e:
            _error(str(e))
            sys.exit(1)

    return cast(F, wrapper)


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else Config.LOG_LEVEL
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _block_id(model: MultiaffineModel, value: str) -> BlockId:
    """Block names take precedence; a bare integer selects by position."""
    if value in model.layout.names:
        return value
    try:
        return int(value)
    except ValueError:
        return value


def _x_init(
    model: MultiaffineModel, spec_init: Optional[Any], init_file: Optional[str]
) -> np.ndarray:
    if init_file:
        return model.layout.check_vector(read_solution(init_file))
    if spec_init is not None:
        return model.layout.check_vector(spec_init)
    return np.zeros(model.layout.n)


def _emit(text: str) -> None:
    click.echo(text, nl=not text.endswith("\n"))


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level")
def cli(verbose: bool) -> None:
    """pyairls - maximum likelihood for multiaffine models

    Exit codes: 0 success (a run that hits --max-sweeps still succeeds and
    says so in its status), 2 invalid input or parameters, 3 numerical or
    sampling failure.
    """
    _setup_logging(verbose)


@cli.command()
@click.argument("problem_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, default=1e-3, show_default=True,
              help="Smoothing parameter, > 0")
@click.option("--tol", type=float, default=1e-8, show_default=True,
              help="Relative decrease of L below which the run stops")
@click.option("--max-sweeps", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for random block order")
@click.option("--block-order", type=click.Choice(["ascending", "random"]),
              default="ascending", show_default=True)
@click.option("--init-file", type=click.Path(exists=True, dir_okay=False),
              help="JSON with x_hat (e.g. an earlier report) to start from")
@click.option("--out", "-o", type=click.Path(file_okay=False),
              default="pyairls-out", show_default=True,
              help="Directory for report.json and trace.csv")
@click.option("--format", "-f", "output_format",
              type=click.Choice(["text", "json", "html"]), default="text",
              help="Format of the report printed to stdout")
@click.option("--no-timing", is_flag=True,
              help="Zero wall-clock fields so reruns are byte-identical")
@guarded
def solve(
    problem_file: str,
    alpha: float,
    tol: float,
    max_sweeps: int,
    seed: int,
    block_order: str,
    init_file: Optional[str],
    out: str,
    output_format: str,
    no_timing: bool,
) -> None:
    """Solve a problem file with AIRLS."""
    cfg = SolverConfig(
        alpha=alpha, tol=tol, max_sweeps=max_sweeps, seed=seed,
        block_order=block_order,
    )
    model, spec = load_problem(problem_file)
    x_init = _x_init(model, spec.x_init, init_file)
    result = airls_solve(model, x_init, cfg)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    trace_path = out_dir / "trace.csv"
    write_trace_csv(trace_path, result.trace, include_timing=not no_timing)

    report = RunReport(
        command="solve",
        problem_file=str(problem_file),
        config={**cfg.model_dump(), "init_file": init_file},
        result=result,
        outputs={"report": str(report_path), "trace": str(trace_path)},
        include_timing=not no_timing,
    )
    generator = ReportGenerator()
    report_path.write_text(generator.generate_report(report, "json"), encoding="utf-8")
    _emit(generator.generate_report(report, output_format))


@cli.command()
@click.argument("problem_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("solution_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--block", "-b", required=True, help="Block name or position")
@click.option("--method", type=click.Choice(["prop1", "fast", "resampling"]),
              default="prop1", show_default=True)
@click.option("--samples", type=int,
              help="N_S [default: 1000, or 10 for resampling]")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale", type=float,
              help="Proposal standard deviation for the other blocks "
                   "[default: conditional std at the estimate]")
@click.option("--alpha", type=float, default=1e-3, show_default=True)
@click.option("--out", "-o", type=click.Path(file_okay=False),
              default="pyairls-out", show_default=True,
              help="Directory for sigma.csv and variance.json")
@click.option("--format", "-f", "output_format",
              type=click.Choice(["text", "json", "html"]), default="text")
@click.option("--no-timing", is_flag=True)
@guarded
def variance(
    problem_file: str,
    solution_file: str,
    block: str,
    method: str,
    samples: Optional[int],
    seed: int,
    scale: Optional[float],
    alpha: float,
    out: str,
    output_format: str,
    no_timing: bool,
) -> None:
    """Estimate the covariance of one block of a solution."""
    n_samples = samples if samples is not None else (
        10 if method == "resampling" else 1000
    )
    sampler = SamplerConfig(n_samples=n_samples, scale=scale, seed=seed)
    cfg = SolverConfig(alpha=alpha, seed=seed)
    model, spec = load_problem(problem_file)
    block_id = _block_id(model, block)
    model.layout.index(block_id)

    if method == "resampling":
        if spec.generator is None:
            raise ModelError(
                f"{problem_file} has no generator record; resampling needs a "
                "file written by 'pyairls generate'"
            )
        factory = regenerator(spec.generator.model_dump())
        cov = resampling_covariance(factory, block_id, n_samples, seed, cfg)
    else:
        x_hat = model.layout.check_vector(read_solution(solution_file))
        estimator = estimate_covariance_fast if method == "fast" else estimate_covariance
        cov = estimator(model, x_hat, block_id, sampler, alpha)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sigma_path = out_dir / "sigma.csv"
    report_path = out_dir / "variance.json"
    write_matrix_csv(sigma_path, cov.Sigma)
    report = RunReport(
        command="variance",
        problem_file=str(problem_file),
        config={
            "solution_file": solution_file,
            "block": block,
            "method": method,
            "sampler": sampler.model_dump(),
            "alpha": alpha,
        },
        covariance=cov,
        outputs={"sigma": str(sigma_path), "report": str(report_path)},
        include_timing=not no_timing,
    )
    generator = ReportGenerator()
    report_path.write_text(generator.generate_report(report, "json"), encoding="utf-8")
    _emit(generator.generate_report(report, output_format))
    logger.info("spectral norm %.6g", spectral_norm(cov.Sigma))


@cli.command()
@click.argument("suite")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", "-o", type=click.Path(file_okay=False),
              default="pyairls-bench", show_default=True,
              help="Parent directory; curves go to OUT_DIR/SUITE")
@click.option("--quick", is_flag=True, help="Smallest sizes, for smoke runs")
@click.option("--no-timing", is_flag=True)
@guarded
def benchmark(
    suite: str, seed: int, out_dir: str, quick: bool, no_timing: bool
) -> None:
    """Run a benchmark suite and write one CSV per curve."""
    func = get_suite(suite)
    with console.status(f"running {suite}..."):
        result = func(seed=seed, include_timing=not no_timing, quick=quick)
    paths = write_suite(result, Path(out_dir) / suite)
    for path in paths:
        click.echo(str(path))


def _parse_param(item: str) -> Tuple[str, Any]:
    if "=" not in item:
        raise click.BadParameter(f"expected key=value, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


@cli.command("generate")
@click.argument("name")
@click.option("--param", "-p", "params", multiple=True,
              help="Generator parameter as key=value (value parsed as JSON)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True,
              help="Problem file; the ground truth goes next to it")
@guarded
def generate_cmd(name: str, params: Tuple[str, ...], seed: int, out: str) -> None:
    """Write a synthetic problem file and its ground-truth sidecar."""
    parsed: Dict[str, Any] = dict(_parse_param(p) for p in params)
    instance = generate(name, parsed, seed=seed)
    sidecar = instance.write(out)
    console.print(
        f"[green]Wrote[/green] {escape(out)} "
        f"({instance.model.layout.n} unknowns, {len(instance.model.factors)} factors)",
        soft_wrap=True,
    )
    console.print(f"[green]Ground truth:[/green] {escape(str(sidecar))}", soft_wrap=True)


@cli.command()
@click.argument("problem_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "-f", "output_format",
              type=click.Choice(["text", "json"]), default="text")
@guarded
def validate(problem_file: str, output_format: str) -> None:
    """Check a problem file before solving it."""
    model, _ = load_problem(problem_file)
    result = validate_model(model)
    click.echo(ReportGenerator().validation_report(result, output_format), nl=False)
    if not result.ok:
        sys.exit(EXIT_INVALID)


@cli.command("list-generators")
def list_generators() -> None:
    """List problem generators and their parameters."""
    table = Table(title="Generators")
    table.add_column("Name")
    table.add_column("Parameters")
    for name in GENERATORS:
        params = ", ".join(
            f"{key}={value!r}" for key, value in generator_params(name).items()
            if key != "seed"
        )
        table.add_row(name, params)
    console.print(table)


@cli.command("list-suites")
def list_suites() -> None:
    """List benchmark suites."""
    console.print("\n[bold]Available Suites:[/bold]")
    console.print("-" * 50)
    for name, (_, description) in SUITES.items():
        console.print(f"  {name:<8} {description}")


if __name__ == "__main__":
    cli()
