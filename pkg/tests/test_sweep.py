"""Power-law fitting and the sweep driver."""
import numpy as np
import pytest

from fracblow.blowup import compute_constants
from fracblow.evolution import ProblemParams
from fracblow.grid import GridSpec
from fracblow.sweep import (SweepPlan, fit_power_law, in_regime_amplitude, run_sweep,
                            write_sweep_outputs)


class TestFitPowerLaw:
    def test_exact_synthetic(self):
        mu = np.geomspace(1.0, 10.0, 6)
        expo, intercept, resid = fit_power_law(list(zip(mu, 3.0 * mu**-2)))
        assert expo == pytest.approx(-2.0, abs=1e-12)
        assert np.exp(intercept) == pytest.approx(3.0, rel=1e-12)
        assert resid < 1e-12

    def test_noisy_recovery(self):
        rng = np.random.default_rng(42)
        mu = np.geomspace(1.0, 10.0, 8)
        t = 3.0 * mu**-2 * (1.0 + 0.05 * rng.standard_normal(8))
        expo, _, _ = fit_power_law(list(zip(mu, t)))
        assert expo == pytest.approx(-2.0, abs=0.1)

    def test_constant_series(self):
        mu = np.geomspace(1.0, 10.0, 5)
        expo, _, _ = fit_power_law([(m, 7.0) for m in mu])
        assert expo == pytest.approx(0.0, abs=1e-12)

    def test_refusals(self):
        with pytest.raises(ValueError):
            fit_power_law([(1.0, 1.0), (2.0, 0.5), (3.0, 0.3)])
        with pytest.raises(ValueError):
            fit_power_law([(1.0, 1.0), (1.0, 0.5), (2.0, 0.3), (3.0, 0.2)])
        # non-finite entries are dropped before the count check
        with pytest.raises(ValueError):
            fit_power_law([(1.0, np.inf), (2.0, 0.5), (3.0, 0.3), (4.0, 0.2)])


@pytest.fixture(scope="module")
def inner_setup(quad):
    params = ProblemParams(n=1, p=2.0, lam=1j)
    constants = compute_constants(params, 1.2, quad)
    grid = GridSpec(1, 40.0, 8192)
    return params, constants, grid


class TestRunSweep:
    def test_short_sweep_rows_and_fit(self, inner_setup):
        params, constants, grid = inner_setup
        edge = in_regime_amplitude("inner-singular", 0.25, params, constants, 0.45)
        plan = SweepPlan(params=params, kind="inner-singular", k=0.25,
                         mu_values=tuple(np.geomspace(edge, 10 * edge, 4)),
                         grid=grid)
        result = run_sweep(plan, constants)
        assert len(result.rows) == 4
        assert all(r.blew_up and r.in_regime for r in result.rows)
        assert result.fitted_exponent_bound == pytest.approx(
            result.predicted_exponent, rel=1e-10)
        assert result.fitted_exponent_num == pytest.approx(
            result.predicted_exponent, rel=0.2)
        for r in result.rows:
            assert r.t_num <= 1.1 * r.t_prop

    def test_single_row_skips_fit(self, inner_setup, recwarn):
        params, constants, grid = inner_setup
        plan = SweepPlan(params=params, kind="inner-singular", k=0.25,
                         mu_values=(30.0,), grid=grid)
        result = run_sweep(plan, constants)
        assert result.fitted_exponent_num is None
        assert any("usable rows" in w for w in result.warnings)

    def test_failed_row_is_isolated(self, inner_setup):
        params, constants, grid = inner_setup
        # an amplitude far below the regime cannot build a conclusive bound
        # but must not raise out of the sweep
        plan = SweepPlan(params=params, kind="inner-singular", k=0.25,
                         mu_values=(0.001, 30.0), grid=grid)
        result = run_sweep(plan, constants)
        assert len(result.rows) == 2
        assert not result.rows[0].blew_up
        assert result.rows[1].blew_up

    def test_plan_validation(self, inner_setup):
        params, _, grid = inner_setup
        with pytest.raises(ValueError):
            SweepPlan(params=params, kind="gaussian", k=0.25,
                      mu_values=(1.0,), grid=grid)
        with pytest.raises(ValueError):
            SweepPlan(params=params, kind="inner-singular", k=0.25,
                      mu_values=(2.0, 1.0), grid=grid)

    def test_workers_match_serial(self, inner_setup):
        params, constants, grid = inner_setup
        mus = tuple(np.geomspace(25.0, 60.0, 3))
        serial = run_sweep(SweepPlan(params=params, kind="inner-singular", k=0.25,
                                     mu_values=mus, grid=grid), constants)
        threaded = run_sweep(SweepPlan(params=params, kind="inner-singular", k=0.25,
                                       mu_values=mus, grid=grid, workers=3), constants)
        for a, b in zip(serial.rows, threaded.rows):
            assert a.t_num == b.t_num and a.r_star == b.r_star

    def test_outputs_deterministic(self, inner_setup, tmp_path):
        params, constants, grid = inner_setup
        plan = SweepPlan(params=params, kind="inner-singular", k=0.25,
                         mu_values=(25.0, 40.0), grid=grid)
        result = run_sweep(plan, constants)
        d1, d2 = tmp_path / "a", tmp_path / "b"
        write_sweep_outputs(result, d1)
        write_sweep_outputs(run_sweep(plan, constants), d2)
        assert (d1 / "sweep_rows.csv").read_bytes() == (d2 / "sweep_rows.csv").read_bytes()
        assert (d1 / "sweep_result.json").read_bytes() == (d2 / "sweep_result.json").read_bytes()
