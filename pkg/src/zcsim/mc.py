"""Monte-Carlo experiment engine.

Four experiment kinds share one trial fabric: expectation of normalized
pairings with a kernel-route cross-check, variance decay with log-log
slope fits, single-sequence trajectories against a limit measure, and
polytope concentration in moment-map coordinates.

Determinism contract: every random quantity derives from keyed counter
streams (seed, trial); trials may execute on any number of workers but
reduction happens in fixed trial order, so reports are byte-identical
across schedules and reruns.  Failed trials (solver breakdown, flagged
multiple roots) are resampled at fresh trial indices and the count is
reported, never hidden.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__ as _pkg_version
from .currents import bump_dictionary, ddbar_norms, pair_points
from .ensemble import build_ensemble, parse_spec, sample
from .errors import ConfigError, NumericalError, SolverError
from .reference import REFERENCES, discrepancy
from .rootfind import zeros_of_pair, zeros_of_sample
from .szego import expected_density, kernel_on_grid, square_grid

_KINDS = ("expectation", "variance", "trajectory", "polytope")
_FAILURE_BUDGET = 0.01          # abort when solver failures exceed this rate
_RESIDUAL_GATE = 1e-8
ZETA3 = 1.2020569031595942854


def worker_count() -> int:
    val = os.environ.get("ZC_THREADS")
    if val:
        return max(1, int(val))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run.

    ``ensemble`` is the canonical ensemble text; its degree field is
    overridden by each entry of ``degrees``.  ``dictionary`` selects bump
    indices.  ``reference`` names the limit measure (trajectory and
    cross-checks).  ``window`` is the per-coordinate radial window of the
    polytope concentration statistic.
    """

    kind: str
    ensemble: str
    degrees: tuple
    trials: int
    seed: int
    dictionary: tuple = (0, 1, 2, 3, 4)
    grid_half_width: float = 2.0
    grid_nodes: int = 201
    cells_per_axis: int = 20
    reference: str = ""
    epsilon: float = 0.05
    window: tuple = (0.7, 1.4)
    out_dir: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        parse_spec(self.ensemble)
        degs = tuple(int(n) for n in self.degrees)
        if not degs:
            raise ConfigError("degree list must be nonempty")
        if any(b <= a for a, b in zip(degs, degs[1:])):
            raise ConfigError("degree list must be strictly increasing")
        object.__setattr__(self, "degrees", degs)
        object.__setattr__(self, "dictionary", tuple(int(i) for i in self.dictionary))
        object.__setattr__(self, "window", tuple(float(w) for w in self.window))
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.kind == "variance":
            if self.trials < 2:
                raise ConfigError("variance needs at least 2 trials")
            if len(degs) >= 2 and self.trials < 500:
                raise ConfigError("slope runs need at least 500 trials per degree")
        if self.kind == "trajectory":
            if len(degs) < 20:
                raise ConfigError("trajectory needs a degree ladder of length >= 20")
            if self.reference not in REFERENCES:
                raise ConfigError(f"unknown reference measure {self.reference!r}")
        if self.reference and self.reference not in REFERENCES:
            raise ConfigError(f"unknown reference measure {self.reference!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "ensemble": self.ensemble,
            "degrees": list(self.degrees), "trials": self.trials,
            "seed": self.seed, "dictionary": list(self.dictionary),
            "grid_half_width": self.grid_half_width,
            "grid_nodes": self.grid_nodes,
            "cells_per_axis": self.cells_per_axis,
            "reference": self.reference, "epsilon": self.epsilon,
            "window": list(self.window), "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"kind", "ensemble", "degrees", "trials", "seed"} - set(d)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        kwargs = dict(d)
        kwargs["degrees"] = tuple(kwargs["degrees"])
        if "dictionary" in kwargs:
            kwargs["dictionary"] = tuple(kwargs["dictionary"])
        if "window" in kwargs:
            kwargs["window"] = tuple(kwargs["window"])
        return cls(**kwargs)


@dataclass
class ExperimentReport:
    """Self-describing result of one experiment.

    ``wall_time_s`` is deliberately excluded from serialization so that
    reruns with identical config and seed produce byte-identical files;
    the CLI records timing in its run manifest instead.
    """

    kind: str
    config: dict
    rows: list
    summary: dict
    failures: dict
    meta: dict
    wall_time_s: float = 0.0

    def to_json(self) -> str:
        payload = {
            "kind": self.kind, "config": self.config, "rows": self.rows,
            "summary": self.summary, "failures": self.failures,
            "meta": self.meta,
        }
        return json.dumps(_jsonable(payload), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        cols = sorted({k for row in self.rows for k in row})
        lines = [",".join(cols)]
        for row in self.rows:
            lines.append(",".join(_csv_cell(row.get(c)) for c in cols))
        return "\n".join(lines) + "\n"


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return '"' + ";".join(_csv_cell(x) for x in v) + '"'
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _meta() -> dict:
    import scipy
    return {
        "package_version": _pkg_version,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "python_version": "%d.%d" % sys.version_info[:2],
    }


# ---------------------------------------------------------------------------
# trial fabric

_BASIS_CACHE: dict = {}


def _get_basis(text: str):
    basis = _BASIS_CACHE.get(text)
    if basis is None:
        basis = build_ensemble(text)
        _BASIS_CACHE[text] = basis
    return basis


def _spec_with_degree(text: str, degree: int) -> str:
    spec = parse_spec(text)
    return dataclasses.replace(spec, degree=int(degree)).to_text()


def _bumps(dimension: int, indices) -> list:
    full = bump_dictionary(dimension)
    try:
        return [full[i] for i in indices]
    except IndexError:
        raise ConfigError(f"dictionary index out of range (have {len(full)})")


def _trial_1d(args):
    """One univariate trial: returns normalized pairings or None on failure."""
    text, seed, trial, indices = args
    basis = _get_basis(text)
    try:
        smp = sample(basis, seed, trial)
        zs = zeros_of_sample(smp)
    except (SolverError, NumericalError):
        return None
    if not zs.converged or np.any(zs.multiplicities > 1):
        return None
    if np.any(zs.residuals > _RESIDUAL_GATE):
        return None
    n = basis.degree
    vals = [pair_points(zs, phi, n, 1).normalized
            for phi in _bumps(1, indices)]
    return {"pairings": vals}


def _trial_2d(args):
    """One bivariate trial: pairings plus count and window statistics."""
    text, seed, trial, indices, window = args
    basis = _get_basis(text)
    try:
        s1 = sample(basis, seed, 2 * trial)
        s2 = sample(basis, seed, 2 * trial + 1)
        zs = zeros_of_pair(s1, s2)
    except (SolverError, NumericalError):
        return None
    if np.any(zs.multiplicities > 1):
        return None
    n = basis.degree
    vals = [pair_points(zs, phi, n, 2).normalized
            for phi in _bumps(2, indices)]
    pts = zs.points
    az = np.abs(pts[:, 0])
    aw = np.abs(pts[:, 1])
    lo, hi = window
    inside = int(np.sum((az >= lo) & (az <= hi) & (aw >= lo) & (aw <= hi)))
    return {
        "pairings": vals,
        "count": zs.total_count,
        "inside": inside,
        "bezout_bound": zs.diagnostics.get("bezout_bound"),
    }


def _run_trials(worker, static_args, trials: int, threads: int):
    """Run `trials` independent trials, resampling failures at fresh
    indices; returns (ordered results, failed trial indices)."""
    def batch(idx_list):
        args = [static_args[:2] + (t,) + static_args[2:] for t in idx_list]
        if threads <= 1 or len(args) < 4:
            return [worker(a) for a in args]
        chunk = max(1, len(args) // (8 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, args, chunksize=chunk))

    results = {}
    failed = []
    pending = list(range(trials))
    next_fresh = trials
    slot_of = {t: t for t in pending}
    while pending:
        out = batch(pending)
        retry = []
        for t, res in zip(pending, out):
            if res is None:
                failed.append(t)
                fresh = next_fresh
                next_fresh += 1
                slot_of[fresh] = slot_of.pop(t)
                retry.append(fresh)
            else:
                results[slot_of.pop(t)] = res
        total_attempts = trials + len(failed)
        if len(failed) > max(2.0, _FAILURE_BUDGET * total_attempts):
            raise NumericalError(
                f"solver failure rate {len(failed)}/{total_attempts} exceeds "
                f"the {_FAILURE_BUDGET:.0%} budget")
        pending = retry
    return [results[i] for i in range(trials)], sorted(failed)


def _mean_var(values: np.ndarray):
    t = values.shape[0]
    mean = float(np.mean(values))
    if t > 1:
        var = float(np.var(values, ddof=1))
        se_mean = math.sqrt(var / t)
        se_var = var * math.sqrt(2.0 / (t - 1))
    else:
        var, se_mean, se_var = 0.0, 0.0, 0.0
    return mean, var, se_mean, se_var


def _fit_loglog(ns, ys, y_ses):
    """Weighted least squares of log y on log N; weights are inverse
    delta-method variances (se/y)^-2.  Returns slope, intercept and their
    standard errors."""
    ys = np.asarray(ys, dtype=float)
    if np.any(ys <= 0):
        raise NumericalError("log-log fit needs strictly positive values")
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(ys)
    rel = np.asarray(y_ses, dtype=float) / ys
    w = 1.0 / np.maximum(rel ** 2, 1e-12)
    sw = w.sum()
    xbar = np.sum(w * x) / sw
    ybar = np.sum(w * y) / sw
    sxx = np.sum(w * (x - xbar) ** 2)
    slope = float(np.sum(w * (x - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    slope_se = float(math.sqrt(1.0 / sxx))
    intercept_se = float(math.sqrt(1.0 / sw + xbar ** 2 / sxx))
    return slope, intercept, slope_se, intercept_se


# ---------------------------------------------------------------------------
# experiments

def run_expectation(config: ExperimentConfig) -> ExperimentReport:
    """MC mean of (normalized Z, phi) per (N, phi) with standard errors,
    cross-validated against the kernel-route prediction in dimension 1."""
    t0 = time.perf_counter()
    base = parse_spec(config.ensemble)
    dim = base.dimension
    threads = worker_count()
    rows = []
    failures = {"resampled": 0, "failed_trials": {}}
    for n in config.degrees:
        text = _spec_with_degree(config.ensemble, n)
        basis = _get_basis(text)
        if dim == 1:
            out, failed = _run_trials(
                _trial_1d, (text, config.seed, tuple(config.dictionary)),
                config.trials, threads)
        else:
            out, failed = _run_trials(
                _trial_2d, (text, config.seed, tuple(config.dictionary),
                            tuple(config.window)),
                config.trials, threads)
        failures["resampled"] += len(failed)
        if failed:
            failures["failed_trials"][str(n)] = failed
        pair_mat = np.array([r["pairings"] for r in out])  # (T, n_phi)
        preds = _kernel_predictions(basis, config) if dim == 1 else None
        for j, phi_idx in enumerate(config.dictionary):
            mean, var, se_mean, se_var = _mean_var(pair_mat[:, j])
            row = {
                "N": int(n), "phi": int(phi_idx), "mean": mean,
                "variance": var, "se_mean": se_mean, "se_var": se_var,
            }
            if preds is not None:
                pred, bound = preds[j]
                row["kernel_prediction"] = pred
                row["stencil_bound"] = bound
                row["flagged"] = bool(abs(mean - pred) > 3 * se_mean + bound)
            rows.append(row)
    flagged = [r for r in rows if r.get("flagged")]
    report = ExperimentReport(
        kind=config.kind, config=config.to_dict(), rows=rows,
        summary={"flagged_count": len(flagged)},
        failures=failures, meta=_meta(),
        wall_time_s=time.perf_counter() - t0)
    return report


def _kernel_predictions(basis, config):
    """Per-bump (prediction, error bound): integral of the expected
    density against phi over the grid, normalized by the degree."""
    grid = square_grid(config.grid_half_width, config.grid_nodes)
    dens = expected_density(kernel_on_grid(basis, grid))
    pts = grid.points()
    vol = grid.cell_volume()
    n = basis.degree
    preds = []
    for phi in _bumps(1, config.dictionary):
        v = phi.value(pts)
        pred = float(np.sum(dens.values * v) * vol) / n
        bound = float(np.sum(dens.bound_values * np.abs(v)) * vol) / n
        preds.append((pred, bound))
    return preds


def run_variance(config: ExperimentConfig) -> ExperimentReport:
    """Per-(N, phi) sample variance of the normalized pairing, log-log
    slope fits (per bump and pooled), and the informational constant
    check for the invariant-metric ensemble."""
    t0 = time.perf_counter()
    base = parse_spec(config.ensemble)
    if base.dimension != 1:
        raise ConfigError("variance experiments are dimension-1")
    threads = worker_count()
    rows = []
    failures = {"resampled": 0, "failed_trials": {}}
    var_table = np.zeros((len(config.degrees), len(config.dictionary)))
    se_table = np.zeros_like(var_table)
    su2_constant = base.family == "su2"
    norms = [ddbar_norms(phi) for phi in _bumps(1, config.dictionary)]
    for i, n in enumerate(config.degrees):
        text = _spec_with_degree(config.ensemble, n)
        out, failed = _run_trials(
            _trial_1d, (text, config.seed, tuple(config.dictionary)),
            config.trials, threads)
        failures["resampled"] += len(failed)
        if failed:
            failures["failed_trials"][str(n)] = failed
        pair_mat = np.array([r["pairings"] for r in out])
        for j, phi_idx in enumerate(config.dictionary):
            mean, var, se_mean, se_var = _mean_var(pair_mat[:, j])
            var_table[i, j] = var
            se_table[i, j] = se_var
            row = {
                "N": int(n), "phi": int(phi_idx), "mean": mean,
                "variance": var, "se_mean": se_mean, "se_var": se_var,
            }
            if su2_constant:
                target = ZETA3 / (4.0 * np.pi) * norms[j]["l2_squared"]
                ratio = var * n ** 3 / target
                row["constant_ratio_declared"] = float(ratio)
                # the same ratio under the curvature-form normalization of
                # the Hessian L2 norm (the two conventions differ by pi)
                row["constant_ratio_curvature"] = float(ratio * np.pi)
            rows.append(row)
    summary = {}
    if len(config.degrees) >= 2:
        per_phi = []
        for j, phi_idx in enumerate(config.dictionary):
            s, b, s_se, b_se = _fit_loglog(config.degrees, var_table[:, j],
                                           se_table[:, j])
            per_phi.append({"phi": int(phi_idx), "slope": s, "intercept": b,
                            "slope_se": s_se, "intercept_se": b_se,
                            "slope_band": [s - 2 * s_se, s + 2 * s_se]})
        # headline fit treats every (N, phi) log-variance point as one
        # observation; bumps whose variance is orders of magnitude smaller
        # still contribute their own decay rate instead of being drowned by
        # the largest bump in a per-N average
        ns_flat = np.repeat(np.asarray(config.degrees, dtype=float),
                            len(config.dictionary))
        s, b, s_se, b_se = _fit_loglog(ns_flat, var_table.ravel(),
                                       se_table.ravel())
        summary = {
            "per_phi_fits": per_phi,
            "slope": s, "intercept": b, "slope_se": s_se,
            "slope_band": [s - 2 * s_se, s + 2 * s_se],
        }
    return ExperimentReport(
        kind=config.kind, config=config.to_dict(), rows=rows,
        summary=summary, failures=failures, meta=_meta(),
        wall_time_s=time.perf_counter() - t0)


def run_trajectory(config: ExperimentConfig) -> ExperimentReport:
    """One seeded section sequence; per-N dictionary discrepancy against
    the configured limit, its running sup tail, and the exceedance count."""
    t0 = time.perf_counter()
    base = parse_spec(config.ensemble)
    if base.dimension != 1:
        raise ConfigError("trajectory experiments are dimension-1")
    ref = REFERENCES[config.reference]
    bumps = _bumps(1, config.dictionary)
    threads = worker_count()
    args = []
    for n in config.degrees:
        text = _spec_with_degree(config.ensemble, n)
        args.append((text, config.seed, n, tuple(config.dictionary)))
    if threads <= 1 or len(args) < 4:
        out = [_trial_1d(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(_trial_1d, args, chunksize=1))
    rows = []
    failures = {"resampled": 0, "failed_trials": {}}
    ds = []
    for n, res in zip(config.degrees, out):
        trial = int(n)
        while res is None:
            # a failed sequence element is redrawn at a shifted stream
            failures["resampled"] += 1
            failures["failed_trials"].setdefault(str(n), []).append(trial)
            trial += 1_000_003
            text = _spec_with_degree(config.ensemble, n)
            res = _trial_1d((text, config.seed, trial, tuple(config.dictionary)))
        d = discrepancy(res["pairings"], ref, bumps)
        ds.append(d)
        rows.append({"N": int(n), "discrepancy": d,
                     "pairings": [float(p) for p in res["pairings"]]})
    ds = np.array(ds)
    sup_tail = np.flip(np.maximum.accumulate(np.flip(ds))).tolist()
    for row, sup in zip(rows, sup_tail):
        row["sup_tail"] = float(sup)
    exceed = int(np.sum(ds > config.epsilon))
    return ExperimentReport(
        kind=config.kind, config=config.to_dict(), rows=rows,
        summary={"epsilon": config.epsilon, "exceed_count": exceed,
                 "final_sup_tail": float(sup_tail[-1]) if rows else 0.0},
        failures=failures, meta=_meta(),
        wall_time_s=time.perf_counter() - t0)


def run_polytope_concentration(config: ExperimentConfig) -> ExperimentReport:
    """Moment-map concentration of simultaneous zeros for dimension-2
    ensembles, with the radial window statistic per degree and the
    uniformity cross-check against the invariant reference."""
    t0 = time.perf_counter()
    base = parse_spec(config.ensemble)
    if base.dimension != 2:
        raise ConfigError("polytope concentration needs a dimension-2 ensemble")
    threads = worker_count()
    rows = []
    failures = {"resampled": 0, "failed_trials": {}}
    masses = []
    for n in config.degrees:
        text = _spec_with_degree(config.ensemble, n)
        out, failed = _run_trials(
            _trial_2d, (text, config.seed, tuple(config.dictionary),
                        tuple(config.window)),
            config.trials, threads)
        failures["resampled"] += len(failed)
        if failed:
            failures["failed_trials"][str(n)] = failed
        counts = np.array([r["count"] for r in out], dtype=float)
        inside = np.array([r["inside"] for r in out], dtype=float)
        pair_mat = np.array([r["pairings"] for r in out])
        bez = out[0]["bezout_bound"]
        modal = int(np.max(counts))
        inside_mass = float(inside.sum() / counts.sum())
        masses.append(inside_mass)
        row = {
            "N": int(n), "inside_mass": inside_mass,
            "outside_mass": 1.0 - inside_mass,
            "mean_count": float(counts.mean()),
            "modal_count": modal,
            "modal_rate": float(np.mean(counts == modal)),
            "bezout_bound": int(bez) if bez is not None else None,
        }
        for j, phi_idx in enumerate(config.dictionary):
            mean, var, se_mean, _ = _mean_var(pair_mat[:, j])
            row[f"pairing_mean_{phi_idx}"] = mean
            row[f"pairing_se_{phi_idx}"] = se_mean
        rows.append(row)
    summary = {
        "window": list(config.window),
        "inside_masses": masses,
        "outside_nonincreasing": bool(all(
            b <= a + 1e-12 for a, b in zip(
                [1 - m for m in masses], [1 - m for m in masses][1:]))),
    }
    if config.reference:
        ref = REFERENCES[config.reference]
        summary["reference_pairings"] = [
            float(ref.pairing(phi)) for phi in _bumps(2, config.dictionary)]
    return ExperimentReport(
        kind=config.kind, config=config.to_dict(), rows=rows,
        summary=summary, failures=failures, meta=_meta(),
        wall_time_s=time.perf_counter() - t0)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    if config.kind == "expectation":
        return run_expectation(config)
    if config.kind == "variance":
        return run_variance(config)
    if config.kind == "trajectory":
        return run_trajectory(config)
    return run_polytope_concentration(config)


# ---------------------------------------------------------------------------
# density oracle comparison (grid cells vs binned zeros)

def _trial_cells(args):
    text, seed, trial, half_width, cells = args
    basis = _get_basis(text)
    try:
        smp = sample(basis, seed, trial)
        zs = zeros_of_sample(smp)
    except (SolverError, NumericalError):
        return None
    if not zs.converged or np.any(zs.multiplicities > 1):
        return None
    pts = np.repeat(zs.points, zs.multiplicities)
    edges = np.linspace(-half_width, half_width, cells + 1)
    hist, _, _ = np.histogram2d(pts.real, pts.imag, bins=(edges, edges))
    return {"pairings": hist.ravel()}


def density_cell_comparison(ensemble: str, degree: int, trials: int, seed: int,
                            half_width: float = 2.0, nodes: int = 201,
                            cells: int = 20) -> dict:
    """Cross-validation of the expected-density formula: MC cell masses of
    binned zeros vs the stencil density integrated per cell.

    The grid must tile exactly into cells ((nodes-1) divisible by cells).
    Returns per-cell arrays and the fraction of interior cells whose
    difference is within 3 empirical SE + the aggregated stencil bound.
    """
    if (nodes - 1) % cells:
        raise ConfigError("(nodes - 1) must be divisible by cells")
    text = _spec_with_degree(ensemble, degree)
    basis = _get_basis(text)
    if basis.dimension != 1:
        raise ConfigError("cell comparison is dimension-1")
    threads = worker_count()
    out, failed = _run_trials(
        _trial_cells, (text, seed, float(half_width), int(cells)),
        trials, threads)
    counts = np.stack([r["pairings"] for r in out]).reshape(trials, cells, cells)
    mc_mean = counts.mean(axis=0)
    mc_se = counts.std(axis=0, ddof=1) / math.sqrt(trials)
    grid = square_grid(half_width, nodes)
    dens = expected_density(kernel_on_grid(basis, grid))
    per = (nodes - 1) // cells
    vals = dens.values.reshape(nodes, nodes)
    bnds = dens.bound_values.reshape(nodes, nodes)
    interior = dens.interior.reshape(nodes, nodes)
    vol = grid.cell_volume()
    pred = np.zeros((cells, cells))
    bound = np.zeros((cells, cells))
    whole = np.zeros((cells, cells), dtype=bool)
    w1 = np.ones(per + 1)
    w1[0] = w1[-1] = 0.5
    w2 = np.outer(w1, w1)
    for i in range(cells):
        for j in range(cells):
            sl = (slice(i * per, i * per + per + 1),
                  slice(j * per, j * per + per + 1))
            pred[i, j] = float(np.sum(vals[sl] * w2) * vol)
            bound[i, j] = float(np.sum(bnds[sl] * w2) * vol)
            whole[i, j] = bool(np.all(interior[sl]))
    diff = np.abs(mc_mean - pred)
    ok = diff <= 3 * mc_se + bound
    n_int = int(whole.sum())
    frac = float(np.sum(ok & whole) / n_int) if n_int else 0.0
    return {
        "mc_mean": mc_mean, "mc_se": mc_se, "prediction": pred,
        "stencil_bound": bound, "interior": whole,
        "pass_fraction": frac, "interior_cells": n_int,
        "failed_trials": failed,
    }
