"""Doubling search for the number of slice steps per iteration.

For one method, problems are visited in order of increasing dimension.  On
each problem ``n_steps`` starts from the value accepted on the previous
problem (1 for the first) and is doubled until the shrinkage test accepts.
Because a practical ``n_steps(d)`` must be non-decreasing, values that
already failed a lower-dimensional problem are never retried.
"""

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .geometry import SETUPS, get_geometry
from .runner import RunConfig, run_shrinkage
from .shrinkage import verdict_for

__all__ = [
    "CalibrationRow",
    "ScalingSummary",
    "SUITES",
    "suite_problems",
    "sort_problems",
    "calibrate_method",
    "calibrate_methods",
    "accepted_steps",
    "summarize_scaling",
    "default_jobs",
]

DEFAULT_CAP = 1024

SUITES = {
    "full": dict(problems=SETUPS, K=400, n_collect=None, warmup=None),
    "desk": dict(problems=("pyramid4", "gauss16", "shell2"), K=200, n_collect=2500, warmup=600),
    "desk32": dict(problems=("pyramid4", "gauss16", "shell2", "gauss32"),
                   K=200, n_collect=2500, warmup=600),
    "desk100": dict(problems=("pyramid4", "gauss16", "shell2", "gauss100"),
                    K=200, n_collect=2500, warmup=600),
    "scaling": dict(problems=("gauss4", "gauss16", "gauss64"), K=400, n_collect=None, warmup=None),
}


def sort_problems(problems):
    """Order geometry ids by (dimension, id)."""
    return sorted(problems, key=lambda p: (get_geometry(p).d, p))


def suite_problems(name):
    try:
        return sort_problems(SUITES[name]["problems"])
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}") from None


@dataclass
class CalibrationRow:
    method: str
    geometry: str
    d: int
    K: int
    n_steps: int
    n_collected: int
    ks_stat: float
    p_value: float
    stuck_count: int
    mean_evals_per_iter: float
    accepted: bool
    seed: int
    wall_seconds: float = None

    FIELDS = ("method", "geometry", "d", "K", "n_steps", "n_collected", "ks_stat", "p_value",
              "stuck_count", "mean_evals_per_iter", "accepted", "seed", "wall_seconds")


@dataclass
class ScalingSummary:
    method: str
    k: int = None
    k_lower: int = None
    min_efficiency_d_percent: float = None
    accepted: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.k is not None

    @property
    def k_label(self):
        if self.k is not None:
            return str(self.k)
        return f">{self.k_lower}" if self.k_lower is not None else "--"


def evaluate_config(cfg, timing=False):
    """Run one configuration and turn it into a CalibrationRow."""
    t0 = time.perf_counter()
    rec = run_shrinkage(cfg)
    v = verdict_for(rec)
    return CalibrationRow(
        method=cfg.method, geometry=cfg.geometry, d=get_geometry(cfg.geometry).d, K=cfg.K,
        n_steps=cfg.n_steps, n_collected=rec.n, ks_stat=v.ks_statistic, p_value=v.p_value,
        stuck_count=v.stuck_count, mean_evals_per_iter=rec.mean_evals_per_iter,
        accepted=v.accepted, seed=cfg.seed,
        wall_seconds=(time.perf_counter() - t0) if timing else None,
    )


def calibrate_method(method, problems, K=400, n_collect=None, warmup=None, cap=DEFAULT_CAP,
                     seed=0, start=1, repeats=0, evaluate=None, timing=False, on_row=None):
    """Doubling search over ``problems`` for one method.

    Every tested configuration becomes a row.  With ``repeats`` > 0 an
    accepted configuration is rerun with seeds ``seed+1 .. seed+repeats``
    and demoted if any rerun rejects.  When doubling would exceed ``cap`` the
    problem is left unconverged and the cap is carried to the next problem.

    ``evaluate(cfg)`` may replace the real shrinkage run (it must return a
    CalibrationRow); ``on_row`` is called with each row as it is produced.
    """
    if evaluate is None:
        def evaluate(cfg):
            return evaluate_config(cfg, timing=timing)
    rows = []

    def record(row):
        rows.append(row)
        if on_row is not None:
            on_row(row)
        return row.accepted

    n = start
    for geo in sort_problems(problems):
        while True:
            if n > cap:
                n = cap
                break
            cfg = RunConfig(geo, method, n, K=K, n_collect=n_collect, warmup=warmup, seed=seed)
            ok = record(evaluate(cfg))
            for r in range(1, repeats + 1):
                if not ok:
                    break
                ok = record(evaluate(RunConfig(geo, method, n, K=K, n_collect=n_collect,
                                               warmup=warmup, seed=seed + r)))
            if ok:
                break
            n *= 2
    return rows


def _calibrate_job(args):
    method, kwargs = args
    return calibrate_method(method, **kwargs)


def default_jobs():
    env = os.environ.get("LRPSLAB_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def calibrate_methods(methods, problems, jobs=1, **kwargs):
    """Calibrate several methods, possibly in parallel processes.

    Returns ``{method: rows}`` in the order of ``methods``; the content does
    not depend on ``jobs``.
    """
    methods = list(methods)
    if jobs <= 1 or len(methods) == 1:
        return {m: calibrate_method(m, problems, **kwargs) for m in methods}
    work = [(m, dict(problems=problems, **kwargs)) for m in methods]
    with ProcessPoolExecutor(max_workers=min(jobs, len(methods))) as pool:
        results = list(pool.map(_calibrate_job, work))
    return dict(zip(methods, results))


def accepted_steps(rows):
    """Accepted configuration per geometry: ``{geometry: (d, n_steps, mean_evals)}``.

    A configuration (geometry, n_steps) counts as accepted only if all its
    rows accepted; the smallest such n_steps is reported.  Unconverged
    geometries map to ``(d, None, None)``.
    """
    groups = {}
    dims = {}
    for r in rows:
        dims[r.geometry] = r.d
        groups.setdefault((r.geometry, r.n_steps), []).append(r)
    out = {}
    for geo, d in dims.items():
        ok = sorted(
            n for (g, n), rs in groups.items() if g == geo and all(r.accepted for r in rs)
        )
        if ok:
            rs = groups[(geo, ok[0])]
            out[geo] = (d, ok[0], sum(r.mean_evals_per_iter for r in rs) / len(rs))
        else:
            out[geo] = (d, None, None)
    return out


def summarize_scaling(rows, method=None):
    """Linear scaling factor k with n_steps = k d, and the lowest efficiency x d.

    k is the smallest integer with k d >= accepted n_steps on every problem.
    If some problem did not converge, ``k`` is None and ``k_lower`` is the
    factor implied by the largest n_steps tried there.
    """
    if method is None:
        method = rows[0].method if rows else ""
    rows = [r for r in rows if r.method == method]
    acc = accepted_steps(rows)
    summary = ScalingSummary(method, accepted={g: n for g, (d, n, e) in acc.items()})
    if not acc:
        return summary
    factors = [math.ceil(n / d) for d, n, e in acc.values() if n is not None]
    effs = [100.0 * d / e for d, n, e in acc.values() if n is not None and e > 0]
    unconverged = [g for g, (d, n, e) in acc.items() if n is None]
    if unconverged:
        tried = [math.ceil(max(r.n_steps for r in rows if r.geometry == g) / acc[g][0])
                 for g in unconverged]
        summary.k_lower = max(factors + tried)
        return summary
    summary.k = max(factors)
    summary.min_efficiency_d_percent = min(effs) if effs else None
    return summary
