"""Amplitude sweeps: build data, bound, evolve, fit the lifespan power law."""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blowup import BlowupConstants, InitialDataSpec, blowup_radius, make_initial_data
from .evolution import EvolutionConfig, ProblemParams, evolve
from .grid import GridSpec
from .profiles import WeightProfile

__all__ = ["SweepPlan", "SweepRow", "SweepResult", "fit_power_law", "run_sweep",
           "in_regime_amplitude", "write_sweep_outputs"]


def fit_power_law(pairs) -> tuple[float, float, float]:
    """Least squares of log T against log mu: (exponent, intercept, rms residual).

    Refuses fewer than 4 finite pairs or repeated amplitudes.
    """
    clean = [(m, t) for m, t in pairs if math.isfinite(m) and math.isfinite(t)
             and m > 0 and t > 0]
    if len(clean) < 4:
        raise ValueError(f"power-law fit needs >= 4 finite pairs, got {len(clean)}")
    mu = np.array([c[0] for c in clean])
    if np.unique(mu).size != mu.size:
        raise ValueError("amplitudes must be distinct")
    t = np.array([c[1] for c in clean])
    expo, intercept = np.polyfit(np.log(mu), np.log(t), 1)
    resid = float(np.sqrt(np.mean((np.log(t) - (expo * np.log(mu) + intercept)) ** 2)))
    return float(expo), float(intercept), resid


@dataclass(frozen=True)
class SweepPlan:
    """One amplitude sweep over a fixed data family.

    ``cap_fraction`` scales the inner-singularity cap with the adapted
    radius R*(mu) so the capped family stays self-similar across the sweep
    (a fixed grid-scale cap would pin the lifespan to the cap scale
    instead of the amplitude law).  dt is chosen per run as
    dt_factor / sup|u0| for inner data and dt_base for outer data.
    """

    params: ProblemParams
    kind: str                         # "inner-singular" | "outer-decay"
    k: float
    mu_values: tuple[float, ...]
    grid: GridSpec
    dt_factor: float = 0.02
    dt_base: float = 0.05
    threshold_factor: float = 25.0
    horizon_factor: float = 1.3
    cap_fraction: float = 0.15
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("inner-singular", "outer-decay"):
            raise ValueError(f"sweep kind must be a scaled family, got {self.kind!r}")
        mu = np.array(self.mu_values, dtype=float)
        if mu.size < 1 or np.any(mu <= 0) or np.any(np.diff(mu) <= 0):
            raise ValueError("mu values must be positive and strictly increasing")
        if mu.size >= 4 and mu[-1] / mu[0] < 9.999:
            warnings.warn("amplitude range below one decade; exponent fit will be weak")

    @property
    def predicted_exponent(self) -> float:
        kk = self.k if self.kind == "inner-singular" else min(float(self.params.n), self.k)
        return -1.0 / (1.0 / (self.params.p - 1.0) - kk)


@dataclass
class SweepRow:
    mu: float
    r_star: float = math.nan
    t_bound: float = math.nan         # closed-form family bound (power law in mu)
    t_prop: float = math.nan          # bound from the lattice functional at R*
    t_num: float | None = None
    m0: float = math.nan
    condition_holds: bool = False
    in_regime: bool = False
    blew_up: bool = False
    failed: bool = False
    note: str = ""


@dataclass
class SweepResult:
    plan: SweepPlan
    rows: list[SweepRow]
    fitted_exponent_num: float | None
    fitted_exponent_bound: float | None
    predicted_exponent: float
    fit_residual_num: float | None
    warnings: list[str]


def in_regime_amplitude(kind: str, k: float, params: ProblemParams,
                        constants: BlowupConstants, r_target: float) -> float:
    """Amplitude mu at which the adapted radius equals r_target."""
    from .blowup import family_i_const

    i_const = family_i_const(InitialDataSpec(kind=kind, mu=1.0, k=k), params.n)
    kk = k if kind == "inner-singular" else min(float(params.n), k)
    expo = 1.0 / (params.p - 1.0) - kk
    return 2.0 * constants.c_threshold / i_const * r_target ** (-expo)


def _run_one(plan: SweepPlan, constants: BlowupConstants, mu: float) -> SweepRow:
    row = SweepRow(mu=mu)
    try:
        base = InitialDataSpec(kind=plan.kind, mu=mu, k=plan.k)
        probe = blowup_radius(base, constants, plan.params, plan.grid)
        spec = base
        if plan.kind == "inner-singular":
            cap = max(plan.cap_fraction * probe.r_star, 0.75 * plan.grid.dx)
            spec = dataclasses.replace(base, cap_radius=cap)
        rr = blowup_radius(spec, constants, plan.params, plan.grid)
        row.r_star = rr.r_star
        row.t_bound = rr.t_bound_formula
        row.t_prop = rr.report.t_bound
        row.m0 = rr.report.m0
        row.condition_holds = rr.report.condition_holds
        row.in_regime = rr.in_regime_strict and rr.report.condition_holds
        if not rr.regime_ok:
            row.note = rr.boundary
            return row

        u0 = make_initial_data(spec, plan.grid, plan.params.alpha)
        sup0 = u0.sup_norm()
        dt = plan.dt_factor / sup0 if plan.kind == "inner-singular" else plan.dt_base
        horizon = plan.horizon_factor * min(rr.report.t_bound, rr.t_bound_formula)
        cfg = EvolutionConfig(grid=plan.grid, dt=dt, t_max=horizon,
                              blowup_threshold=plan.threshold_factor * sup0)
        rec = evolve(u0, plan.params, cfg,
                     WeightProfile(q=plan.params.n + 1, R=rr.r_star))
        row.blew_up = rec.blew_up
        row.t_num = rec.t_num
        if not rec.blew_up:
            row.note = f"no blow-up before horizon {horizon:.4g}"
    except Exception as exc:  # crash isolation: one bad row must not kill the sweep
        row.failed = True
        row.note = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(plan: SweepPlan, constants: BlowupConstants) -> SweepResult:
    """Execute every amplitude, then fit the observed and bound power laws.

    Rows run independently (optionally on a small thread pool) and a
    failure is recorded on its row without disturbing the others.  Fits
    use only rows that blew up inside the strict scaling regime.
    """
    notes: list[str] = []
    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            rows = list(pool.map(lambda m: _run_one(plan, constants, m), plan.mu_values))
    else:
        rows = [_run_one(plan, constants, mu) for mu in plan.mu_values]

    usable = [r for r in rows if r.in_regime and r.blew_up and not r.failed]
    fit_num = fit_bound = resid = None
    if len(usable) >= 4:
        fit_num, _, resid = fit_power_law([(r.mu, r.t_num) for r in usable])
        fit_bound, _, _ = fit_power_law([(r.mu, r.t_bound) for r in usable])
    else:
        notes.append(f"only {len(usable)} usable rows; skipping exponent fits")
    skipped = [r.mu for r in rows if not r.in_regime]
    if skipped:
        notes.append(f"amplitudes outside the strict regime excluded from fits: {skipped}")
    return SweepResult(plan=plan, rows=rows, fitted_exponent_num=fit_num,
                       fitted_exponent_bound=fit_bound,
                       predicted_exponent=plan.predicted_exponent,
                       fit_residual_num=resid, warnings=notes)


def write_sweep_outputs(result: SweepResult, out_dir: str | Path,
                        manifest_extra: dict | None = None) -> list[Path]:
    """rows CSV plus a JSON summary; formatting is fixed for reproducibility."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows_path = out / "sweep_rows.csv"
    with open(rows_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu", "r_star", "t_bound", "t_prop", "t_num", "m0",
                    "condition_holds", "in_regime", "blew_up", "failed", "note"])
        for r in result.rows:
            w.writerow([f"{r.mu:.12g}", f"{r.r_star:.12g}", f"{r.t_bound:.12g}",
                        f"{r.t_prop:.12g}",
                        "" if r.t_num is None else f"{r.t_num:.12g}",
                        f"{r.m0:.12g}", int(r.condition_holds), int(r.in_regime),
                        int(r.blew_up), int(r.failed), r.note])
    summary = {
        "schema": "fracblow/1",
        "kind": "sweep",
        "family": result.plan.kind,
        "k": result.plan.k,
        "seed": result.plan.seed,
        "plan": {
            "mu_values": list(result.plan.mu_values),
            "dt_factor": result.plan.dt_factor,
            "dt_base": result.plan.dt_base,
            "threshold_factor": result.plan.threshold_factor,
            "horizon_factor": result.plan.horizon_factor,
            "cap_fraction": result.plan.cap_fraction,
            "workers": result.plan.workers,
        },
        "predicted_exponent": result.predicted_exponent,
        "fitted_exponent_t_num": result.fitted_exponent_num,
        "fitted_exponent_t_bound": result.fitted_exponent_bound,
        "fit_residual": result.fit_residual_num,
        "warnings": result.warnings,
        "rows_csv": rows_path.name,
    }
    if manifest_extra:
        summary.update(manifest_extra)
    from .reporting import _jsonify

    summary_path = out / "sweep_result.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=_jsonify))
    return [rows_path, summary_path]
