"""Nested-sampling shrinkage harness.

A run keeps K live points, repeatedly discards the worst one, and replaces
it with the end point of a slice chain started from one of the others
under the discarded likelihood as threshold.  The enclosed log-volume at
each discarded threshold is recorded once the warm-up is over, together
with the number of model evaluations spent on that iteration.
"""

import json
import math
import time
import zlib
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .geometry import get_geometry
from .proposals import DIFFERENTIAL, METHODS, LiveSet, ProposalState
from .slice_engine import AdaptiveLength, fast_slice_step, run_chain, slice_step

__all__ = [
    "RunConfig",
    "ShrinkageRecord",
    "ConfigError",
    "run_shrinkage",
    "run_shrinkage_oracle",
    "default_restart_length",
    "config_stream",
]


class ConfigError(ValueError):
    pass


def default_restart_length(geometry_id, K):
    """Short-run length for shell geometries: 7.5 K iterations for d <= 2 and
    15 K above (3000 and 6000 at K = 400); ``None`` for other families."""
    g = get_geometry(geometry_id)
    if g.kind != "gaussian-shell":
        return None
    return int(round((7.5 if g.d <= 2 else 15.0) * K))


@dataclass(frozen=True)
class RunConfig:
    """One shrinkage-test configuration.

    ``n_collect`` and ``warmup`` default to 25 K and 3 K.  ``restart_length``
    defaults to the short-run length for shell geometries and ``None``
    (never restart) otherwise; pass 0 to disable restarts explicitly.
    """

    geometry: str
    method: str = "cube-slice"
    n_steps: int = 1
    K: int = 400
    n_collect: int = None
    warmup: int = None
    seed: int = 0
    restart_length: int = None
    engine: str = "compiled"

    def __post_init__(self):
        get_geometry(self.geometry)
        if self.method not in METHODS:
            raise ConfigError(
                f"unknown method {self.method!r}; expected one of: {', '.join(METHODS)}"
            )
        if self.K < 2:
            raise ConfigError("K must be at least 2")
        if self.method in DIFFERENTIAL and self.K < 3:
            raise ConfigError("differential proposals need K >= 3")
        if self.n_collect is None:
            object.__setattr__(self, "n_collect", 25 * self.K)
        if self.warmup is None:
            object.__setattr__(self, "warmup", 3 * self.K)
        if self.restart_length is None:
            object.__setattr__(self, "restart_length", default_restart_length(self.geometry, self.K))
        if self.n_collect < 1:
            raise ConfigError("n_collect must be at least 1")
        if self.warmup < 0:
            raise ConfigError("warmup must be non-negative")
        if self.n_steps < 1:
            raise ConfigError("n_steps must be at least 1")
        if self.restart_length is not None and self.restart_length < 0:
            raise ConfigError("restart_length must be non-negative")
        if self.restart_length and self.restart_length <= self.warmup + 1:
            raise ConfigError("restart_length must exceed the warm-up")
        if self.engine not in ("compiled", "python"):
            raise ConfigError(f"unknown engine {self.engine!r}")

    @property
    def key(self):
        return (f"{self.geometry}|{self.method}|{self.n_steps}|{self.K}|"
                f"{self.n_collect}|{self.warmup}|{self.restart_length}")

    def to_dict(self):
        return asdict(self)


def config_stream(cfg, oracle=False):
    """Random stream for a configuration, derived from its seed and identity.

    Independent configurations get independent streams, so results do not
    depend on the order or process in which they run.
    """
    key = cfg.key + ("|oracle" if oracle else "")
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, zlib.crc32(key.encode())]))


@dataclass
class ShrinkageRecord:
    """Recorded log-volumes of discarded points and per-iteration costs.

    ``segments`` labels each record with the short run (restart) it came
    from; no volume ratio is formed across segments.
    """

    log_volumes: np.ndarray
    evals_per_iter: np.ndarray
    segments: np.ndarray
    stuck_count: int = 0
    iterations_run: int = 0
    K: int = 0
    config: dict = field(default_factory=dict)
    wall_seconds: float = None

    @property
    def n(self):
        return len(self.log_volumes)

    @property
    def mean_evals_per_iter(self):
        return float(np.mean(self.evals_per_iter)) if len(self.evals_per_iter) else math.nan

    def to_dict(self):
        return {
            "config": self.config,
            "K": self.K,
            "iterations_run": self.iterations_run,
            "stuck_count": self.stuck_count,
            "log_volumes": [float(x) for x in self.log_volumes],
            "evals_per_iter": [int(x) for x in self.evals_per_iter],
            "segments": [int(x) for x in self.segments],
            "wall_seconds": self.wall_seconds,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        return cls(
            log_volumes=np.asarray(data["log_volumes"], dtype=float),
            evals_per_iter=np.asarray(data["evals_per_iter"], dtype=int),
            segments=np.asarray(data["segments"], dtype=int),
            stuck_count=int(data["stuck_count"]),
            iterations_run=int(data["iterations_run"]),
            K=int(data["K"]),
            config=dict(data.get("config", {})),
            wall_seconds=data.get("wall_seconds"),
        )


def _init_live(g, K, rng):
    points = np.array([g.sample_prior(rng) for _ in range(K)])
    loglikes = np.array([g.log_likelihood(p) for p in points])
    return LiveSet(points, loglikes)


def _run(cfg, rng, replace_worst, timing):
    g = get_geometry(cfg.geometry)
    K = cfg.K
    floor = g.recordable_threshold
    log_volumes, evals, segments = [], [], []
    stuck = 0
    iterations = 0
    segment = 0
    t0 = time.perf_counter()

    while len(log_volumes) < cfg.n_collect:
        live = _init_live(g, K, rng)
        state = replace_worst.start(g, live)
        it = 0
        while len(log_volumes) < cfg.n_collect:
            if cfg.restart_length and it >= cfg.restart_length:
                break
            worst = int(np.argmin(live.loglikes))
            threshold = live.loglikes[worst]
            moved, cost = replace_worst(state, g, live, worst, threshold, it, rng)
            if not moved:
                stuck += 1
            if it >= cfg.warmup and threshold >= floor:
                log_volumes.append(g.log_enclosed_volume(threshold))
                evals.append(cost)
                segments.append(segment)
            it += 1
            iterations += 1
        segment += 1

    return ShrinkageRecord(
        log_volumes=np.array(log_volumes, dtype=float),
        evals_per_iter=np.array(evals, dtype=int),
        segments=np.array(segments, dtype=int),
        stuck_count=stuck,
        iterations_run=iterations,
        K=K,
        config=cfg.to_dict(),
        wall_seconds=(time.perf_counter() - t0) if timing else None,
    )


class _ChainReplacement:
    def __init__(self, cfg):
        self.cfg = cfg
        self.step = fast_slice_step if cfg.engine == "compiled" else slice_step
        self.refresh_every = max(cfg.K // 5, 1)

    def start(self, g, live):
        proposal = ProposalState(self.cfg.method, g.d)
        proposal.refresh(live, epoch=0)
        return proposal, AdaptiveLength(1.0)

    def __call__(self, state, g, live, worst, threshold, it, rng):
        proposal, length = state
        j = _pick_start(live, worst, threshold, rng)
        out = run_chain(g, live.points[j], live.loglikes[j], self.cfg.n_steps, proposal,
                        live, threshold, length, rng, start_index=j, step=self.step)
        live.points[worst] = out.end_point
        live.loglikes[worst] = out.end_loglike
        if (it + 1) % self.refresh_every == 0:
            proposal.refresh(live, epoch=it + 1)
        return out.moved, out.evals


def _pick_start(live, worst, threshold, rng):
    """Uniform choice among live points strictly above the threshold.

    Plateau likelihoods (the pyramid under axis-aligned moves) produce exact
    ties with the discarded point; a tied point is not inside the restricted
    prior and cannot start a chain.  If every other point ties, fall back to
    any other point and let the chain report itself stuck.
    """
    above = np.flatnonzero(live.loglikes > threshold)
    if len(above) == 0:
        j = int(rng.integers(live.K - 1))
        return j + (j >= worst)
    return int(above[rng.integers(len(above))])


class _ExactReplacement:
    def start(self, g, live):
        return None

    def __call__(self, state, g, live, worst, threshold, it, rng):
        x = g.sample_constrained(threshold, rng)
        live.points[worst] = x
        live.loglikes[worst] = g.log_likelihood(x)
        return True, 0


def run_shrinkage(cfg, rng=None, timing=False):
    """Run the shrinkage harness with slice-chain replacement.

    A chain that ends where it started counts as stuck; the iteration still
    proceeds with that point.
    """
    if rng is None:
        rng = config_stream(cfg)
    return _run(cfg, rng, _ChainReplacement(cfg), timing)


def run_shrinkage_oracle(cfg, rng=None, timing=False):
    """Same harness, but replacements are exact draws from the restricted prior.

    Its shrinkage ratios follow Beta(K, 1) exactly; available for the
    Gaussian and pyramid families.
    """
    g = get_geometry(cfg.geometry)
    if g.kind == "gaussian-shell":
        raise ConfigError("no exact constrained sampler for the shell geometry")
    cfg = replace(cfg, restart_length=0)
    if rng is None:
        rng = config_stream(cfg, oracle=True)
    return _run(cfg, rng, _ExactReplacement(), timing)
