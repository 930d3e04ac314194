"""Direction proposals for slice steps.

Ten strategies are implemented, differing only in how the slice direction
is chosen:

==================  ==========================================================
cube-slice          random coordinate axis
region-slice        random principal axis of the live-point covariance,
                    scaled by sqrt(eigenvalue)
region-seq-slice    principal axes in descending-eigenvalue order, cycling
cube-harm           uniform direction on the unit sphere
region-harm         covariance square root applied to a unit-ball draw
cube-ortho-harm     batches of d sphere directions, Gram-Schmidt orthonormalized,
                    used in order
region-ortho-harm   batches of d ball draws orthonormalized in whitened space,
                    then mapped through the covariance square root
de-harm             difference vector of two random live points
de1                 de-harm with all but one random coordinate zeroed
de-mix              fair coin per step between de-harm and region-slice
==================  ==========================================================
"""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .linalg import (
    RankDeficiencyError,
    gram_schmidt,
    sample_covariance,
    sample_unit_ball,
    sample_unit_sphere,
)
from .slice_engine import StuckChain

__all__ = [
    "METHODS",
    "WHITENED",
    "LiveSet",
    "ProposalState",
    "propose_direction",
    "refresh_snapshot",
]

log = logging.getLogger(__name__)

METHODS = (
    "cube-slice",
    "region-slice",
    "region-seq-slice",
    "cube-harm",
    "region-harm",
    "cube-ortho-harm",
    "region-ortho-harm",
    "de-harm",
    "de1",
    "de-mix",
)

# methods that read the covariance snapshot
WHITENED = frozenset(
    ["region-slice", "region-seq-slice", "region-harm", "region-ortho-harm", "de-mix"]
)
DIFFERENTIAL = frozenset(["de-harm", "de1", "de-mix"])


@dataclass
class LiveSet:
    points: np.ndarray
    loglikes: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.loglikes = np.asarray(self.loglikes, dtype=float)
        if self.points.ndim != 2 or len(self.points) < 2:
            raise ValueError("a live set needs at least two points")
        if self.loglikes.shape != (len(self.points),):
            raise ValueError("one log-likelihood per live point expected")

    @property
    def K(self):
        return len(self.points)

    @property
    def d(self):
        return self.points.shape[1]


class ProposalState:
    """Per-chain state of one direction proposal strategy.

    Parameters
    ----------
    kind : str
        One of :data:`METHODS`.
    d : int
        Dimension of the parameter space.
    """

    def __init__(self, kind, d):
        if kind not in METHODS:
            raise ValueError(f"unknown method {kind!r}; expected one of: {', '.join(METHODS)}")
        self.kind = kind
        self.d = int(d)
        self.snapshot = None
        self.pending = deque()
        self.axis_cursor = 0
        self.warnings = 0
        self._propose = getattr(self, "_" + kind.replace("-", "_"))

    @property
    def needs_snapshot(self):
        return self.kind in WHITENED

    def refresh(self, live, epoch=0):
        """Re-estimate the covariance snapshot from ``live`` (whitened kinds only)."""
        if not self.needs_snapshot:
            return self
        try:
            self.snapshot = sample_covariance(live.points, epoch=epoch)
        except RankDeficiencyError:
            self.warnings += 1
            log.warning("covariance refresh failed at iteration %d; keeping previous", epoch)
            return self
        self.pending.clear()
        self.axis_cursor = 0
        return self

    def propose(self, current, live, rng, exclude=None):
        """Next slice direction.

        ``exclude`` is the index of a live point equal to ``current``, which
        differential proposals must not pair with itself.
        """
        if self.needs_snapshot and self.snapshot is None:
            raise RuntimeError(f"{self.kind} needs a covariance snapshot; call refresh() first")
        return self._propose(current, live, rng, exclude)

    # -- axis-aligned and whitened slice ---------------------------------

    def _cube_slice(self, current, live, rng, exclude):
        v = np.zeros(self.d)
        v[rng.integers(self.d)] = 1.0
        return v

    def _region_slice(self, current, live, rng, exclude):
        return self.snapshot.axes[:, rng.integers(self.d)]

    def _region_seq_slice(self, current, live, rng, exclude):
        v = self.snapshot.axes[:, self.axis_cursor]
        self.axis_cursor = (self.axis_cursor + 1) % self.d
        return v

    # -- hit-and-run -----------------------------------------------------

    def _cube_harm(self, current, live, rng, exclude):
        return sample_unit_sphere(self.d, rng)

    def _region_harm(self, current, live, rng, exclude):
        return self.snapshot.sqrt_map @ sample_unit_ball(self.d, rng)

    def _cube_ortho_harm(self, current, live, rng, exclude):
        if not self.pending:
            batch = self._orthonormal_batch(rng, sample_unit_sphere)
            self.pending.extend(batch)
        return self.pending.popleft()

    def _region_ortho_harm(self, current, live, rng, exclude):
        if not self.pending:
            batch = self._orthonormal_batch(rng, sample_unit_ball)
            self.pending.extend(batch @ self.snapshot.sqrt_map.T)
        return self.pending.popleft()

    def _orthonormal_batch(self, rng, draw):
        while True:
            raw = np.array([draw(self.d, rng) for _ in range(self.d)])
            try:
                return gram_schmidt(raw)
            except RankDeficiencyError:
                continue

    # -- differential ----------------------------------------------------

    def _de_harm(self, current, live, rng, exclude):
        return self._difference(live, rng, exclude, single_axis=False)

    def _de1(self, current, live, rng, exclude):
        return self._difference(live, rng, exclude, single_axis=True)

    def _de_mix(self, current, live, rng, exclude):
        if rng.random() < 0.5:
            return self._de_harm(current, live, rng, exclude)
        return self._region_slice(current, live, rng, exclude)

    def _difference(self, live, rng, exclude, single_axis):
        K = live.K
        pool = K - (exclude is not None)
        if pool < 2:
            raise StuckChain("not enough live points for a differential pair")
        for _ in range(K * K):
            a, b = _distinct_pair(pool, rng)
            if exclude is not None:
                a += a >= exclude
                b += b >= exclude
            v = live.points[a] - live.points[b]
            if single_axis:
                keep = rng.integers(self.d)
                axis_v = np.zeros(self.d)
                axis_v[keep] = v[keep]
                v = axis_v
            if np.any(v != 0):
                return v
        raise StuckChain("live points coincide; no nonzero differential vector")


def _distinct_pair(n, rng):
    """Ordered pair of distinct indices, uniform over ``range(n)``."""
    a = int(rng.integers(n))
    b = int(rng.integers(n - 1))
    if b >= a:
        b += 1
    return a, b


def propose_direction(state, current, live, rng, exclude=None):
    return state.propose(current, live, rng, exclude=exclude)


def refresh_snapshot(state, live, epoch=0):
    return state.refresh(live, epoch=epoch)
