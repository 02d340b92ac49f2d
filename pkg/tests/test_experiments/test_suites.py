import json
from pathlib import Path
from typing import Dict, List

import numpy as np
import pytest

from pyairls.experiments import SUITES, Curve, SuiteResult, get_suite, write_suite
from pyairls.experiments.base import Clock, run_seeds, summarize
from pyairls.experiments.convergence import ENVELOPE_RATE
from pyairls.problems import (
    gen_admittance,
    gen_eiv_sysid,
    gen_water,
    relative_frobenius_error,
    rrms_error,
)
from pyairls.problems.admittance import admittance_of
from pyairls.problems.sysid import ols_theta, theta_of
from pyairls.solver import SolverConfig, airls_solve


def test_suite_registry() -> None:
    assert list(SUITES) == ["fig1", "fig2", "fig4", "fig5", "fig6", "fig8", "fig10"]
    with pytest.raises(ValueError, match="unknown suite 'fig3'"):
        get_suite("fig3")


def test_helpers() -> None:
    assert run_seeds(0, 3) == run_seeds(0, 3)
    assert len(set(run_seeds(0, 3))) == 3
    assert summarize([1.0, 2.0, 6.0]) == [3.0, 1.0, 6.0]
    assert Clock(enabled=False)() == 0.0


def test_write_suite(tmp_path: Path) -> None:
    curve = Curve("errors", ["sweep", "rrms_error"])
    curve.add(0, 1.0)
    curve.add(1, 0.5)
    result = SuiteResult("demo", [curve], {"seed": 3})
    paths = write_suite(result, tmp_path / "demo")
    assert [p.name for p in paths] == ["errors.csv", "metadata.json"]
    assert paths[0].read_text() == "sweep,rrms_error\n0,1.0\n1,0.5\n"
    meta = json.loads(paths[1].read_text())
    assert meta == {"seed": 3, "suite": "demo", "curves": {"errors": ["sweep", "rrms_error"]}}
    with pytest.raises(KeyError):
        result.curve("missing")


def test_fig4_quick() -> None:
    result = get_suite("fig4")(seed=0, include_timing=False, quick=True)
    assert [c.name for c in result.curves] == ["airls", "zogd", "grid_search"]
    airls = result.curve("airls")
    assert airls.header == ["elapsed_s", "rrms_error"]
    assert airls.rows[-1][1] < 1e-3
    assert all(row[0] == 0.0 for c in result.curves for row in c.rows)
    assert len(result.curve("grid_search").rows) == 2
    assert len(result.curve("zogd").rows) == 51
    assert "omitted" in result.metadata


def test_fig6_quick_envelope() -> None:
    result = get_suite("fig6")(seed=0, include_timing=False, quick=True)
    by_sweep = result.curve("airls_by_sweep")
    envelope = result.curve("envelope")
    e0 = by_sweep.rows[0][1]
    assert len(by_sweep.rows) == result.metadata["sweeps"] + 1
    for (k, _), (j, bound) in zip(by_sweep.rows, envelope.rows):
        assert k == j
        assert bound == pytest.approx(e0 * ENVELOPE_RATE**k)
    assert result.metadata["termination"] == "converged"
    assert by_sweep.rows[-1][1] < 1e-3


@pytest.mark.slow
def test_fig1_quick() -> None:
    result = get_suite("fig1")(seed=0, include_timing=False, quick=True)
    airls, ols = result.curve("airls"), result.curve("ols")
    assert airls.header[0] == "outlier_ratio_pct"
    assert [row[0] for row in airls.rows] == [0.0, 1.0]
    assert result.metadata["problem"]["n_u"] == 0
    # without outliers both recover the dynamics
    assert airls.rows[0][1] < 5.0
    assert ols.rows[0][1] < 1e-3


@pytest.mark.slow
def test_fig2_quick() -> None:
    result = get_suite("fig2")(seed=0, include_timing=False, quick=True)
    assert [c.name for c in result.curves] == ["ols", "mle", "map"]
    for curve in result.curves:
        assert len(curve.rows) == 1
        assert curve.rows[0][0] == 1e-3
        assert curve.rows[0][1] >= 0


@pytest.mark.slow
def test_fig5_quick() -> None:
    result = get_suite("fig5")(seed=0, include_timing=False, quick=True)
    scaling = result.curve("scaling_airls")
    assert [row[0] for row in scaling.rows] == [6, 10]
    robust = result.curve("robustness_airls")
    assert robust.rows[0][0] == 0.0
    assert robust.rows[0][1] < 1e-3


@pytest.mark.slow
def test_fig8_quick() -> None:
    result = get_suite("fig8")(seed=0, include_timing=False, quick=True)
    resampling, prop1, fast = (result.curve(n) for n in ("resampling", "prop1", "fast"))
    assert resampling.header == ["noise_ratio", "spectral_norm", "elapsed_s"]
    assert result.metadata["skipped"] == []
    for curve in (resampling, prop1, fast):
        assert [row[0] for row in curve.rows] == [1e-3, 1e-2]
        # same noise draw scaled up tenfold
        assert 0 < curve.rows[0][1] < curve.rows[1][1]
    # tax rows have fixed weights, so the shared pseudoinverse is exact
    for a, b in zip(prop1.rows, fast.rows):
        assert b[1] == pytest.approx(a[1], rel=1e-9)


@pytest.mark.slow
def test_fig10_quick() -> None:
    result = get_suite("fig10")(seed=0, include_timing=False, quick=True)
    assert [row[0] for row in result.curve("scaling_airls").rows] == [10, 20]
    robust = result.curve("robustness_airls")
    assert [row[0] for row in robust.rows] == [0.0, 1e-2]
    assert robust.rows[0][1] < 1e-3
    assert robust.rows[0][1] < robust.rows[1][1] < 1.0


@pytest.mark.slow
@pytest.mark.parametrize("ratio", [0.001, 0.01, 0.05])
def test_laplace_sysid_beats_least_squares(ratio: float) -> None:
    cfg = SolverConfig(max_sweeps=1000)
    airls: List[float] = []
    ols: List[float] = []
    for seed in range(10):
        instance = gen_eiv_sysid(n_u=0, T=2000, outlier_ratio=ratio, seed=seed, noise_seed=seed)
        theta = instance.observations["theta"]
        x_hat = airls_solve(instance.model, instance.x_init, cfg).x_hat
        airls.append(relative_frobenius_error(theta_of(instance, x_hat), theta))
        ols.append(relative_frobenius_error(ols_theta(instance), theta))
    assert np.median(airls) < np.median(ols)
    if ratio == 0.01:
        assert np.median(airls) < 0.05


@pytest.mark.slow
def test_sparsity_prior_improves_admittance() -> None:
    errors: Dict[float, List[float]] = {0.0: [], 1.0: []}
    for seed in range(5):
        for weight, errs in errors.items():
            instance = gen_admittance(
                M_nodes=9,
                N_samples=400,
                noise_level=1e-4,
                seed=seed,
                noise_seed=seed,
                prior_weight=weight,
            )
            x_hat = airls_solve(instance.model, instance.x_init).x_hat
            Y = instance.observations["Y"]
            errs.append(relative_frobenius_error(admittance_of(instance, x_hat), Y))
    assert np.median(errors[1.0]) < np.median(errors[0.0])


@pytest.mark.slow
@pytest.mark.parametrize("noise_ratio", [0.0, 1e-4, 1e-3, 1e-2, 1e-1])
def test_water_error_follows_noise(noise_ratio: float) -> None:
    cfg = SolverConfig(tol=1e-15, max_sweeps=20000)
    errors: List[float] = []
    for seed in range(3):
        instance = gen_water(T=50, noise_ratio=noise_ratio, seed=seed, noise_seed=seed)
        x_hat = airls_solve(instance.model, instance.x_init, cfg).x_hat
        errors.append(rrms_error(x_hat, instance.x_true))
    if noise_ratio == 0.0:
        assert max(errors) <= 1e-8
    else:
        assert np.median(errors) <= 10.0 * noise_ratio
