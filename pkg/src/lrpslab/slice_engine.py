"""Slice steps along a given direction, and chains of them.

A step starts from a point inside the likelihood-restricted prior and
brackets the slice by doubling: the points at t = L, 2L, 4L, ... are tested
until one falls outside, then the same for negative t.  A position is then
drawn uniformly inside the bracket; rejected draws shrink the bracket
towards the start.  ``L`` adapts by +-10% depending on whether any doubling
happened.

Two implementations of the step exist: :func:`slice_step` is plain Python
and works with any object exposing ``log_likelihood`` and ``in_support``
(and any stream with a ``random()`` method); :func:`fast_slice_step`
runs the same procedure compiled, for the geometries in
:mod:`lrpslab.geometry`.  Both consume random numbers in the same order and
give identical results for the same generator state.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "AdaptiveLength",
    "SliceOutcome",
    "StuckChain",
    "slice_step",
    "fast_slice_step",
    "run_chain",
    "MAX_OPS",
]

MAX_OPS = 10**6
COLLAPSE_WIDTH = 1e-300


class StuckChain(RuntimeError):
    """A direction could not be produced; the chain cannot move."""


class AdaptiveLength:
    """Guess length of the stepping-out bracket, persistent over a run."""

    def __init__(self, value=1.0):
        if not value > 0:
            raise ValueError("guess length must be positive")
        self.value = float(value)

    def update(self, expanded):
        self.value *= 1.1 if expanded else 0.9

    def __repr__(self):
        return f"AdaptiveLength({self.value!r})"


@dataclass
class SliceOutcome:
    end_point: np.ndarray
    end_loglike: float
    evals: int
    moved: bool
    expansions: int = 0
    draws: int = 0
    status: int = _kernels.OK


def slice_step(g, start, start_loglike, v, threshold, length, rng, max_ops=MAX_OPS):
    """One slice step from ``start`` along ``v``; updates ``length`` in place.

    Points outside the prior support are rejections that cost no model
    evaluation.  On hitting ``max_ops`` combined bracket operations, or when
    the bracket collapses, the start point is returned with ``moved=False``.
    """
    start = np.asarray(start, dtype=float)
    v = np.asarray(v, dtype=float)
    L = length.value
    evals = 0
    ops = 0

    def inside(t):
        nonlocal evals
        y = start + t * v
        if not g.in_support(y):
            return y, None, False
        evals += 1
        ll = g.log_likelihood(y)
        return y, ll, ll > threshold

    def stuck(status, expansions, draws):
        length.update(expansions > 0)
        return SliceOutcome(start.copy(), start_loglike, evals, False, expansions, draws, status)

    t_hi, expand_pos = L, 0
    while True:
        ops += 1
        if not inside(t_hi)[2]:
            break
        if ops >= max_ops:
            return stuck(_kernels.CAPPED, expand_pos, 0)
        t_hi *= 2.0
        expand_pos += 1

    t_lo, expand_neg = -L, 0
    while True:
        ops += 1
        if not inside(t_lo)[2]:
            break
        if ops >= max_ops:
            return stuck(_kernels.CAPPED, expand_pos + expand_neg, 0)
        t_lo *= 2.0
        expand_neg += 1

    expansions = expand_pos + expand_neg
    draws = 0
    while True:
        if ops >= max_ops:
            return stuck(_kernels.CAPPED, expansions, draws)
        if t_hi - t_lo < COLLAPSE_WIDTH:
            return stuck(_kernels.COLLAPSED, expansions, draws)
        ops += 1
        t = t_lo + rng.random() * (t_hi - t_lo)
        draws += 1
        y, ll, ok = inside(t)
        if ok:
            length.update(expansions > 0)
            moved = bool(np.any(y != start))
            return SliceOutcome(y, ll, evals, moved, expansions, draws)
        if t < 0.0:
            t_lo = t
        else:
            t_hi = t


def fast_slice_step(g, start, start_loglike, v, threshold, length, rng, max_ops=MAX_OPS):
    """Compiled equivalent of :func:`slice_step` for built-in geometries."""
    status, y, ll, evals, e_pos, e_neg, draws = _kernels.slice_step(
        g.code, g.params, start, v, float(threshold), length.value, rng, max_ops
    )
    expansions = e_pos + e_neg
    length.update(expansions > 0)
    if status != _kernels.OK:
        return SliceOutcome(start.copy(), start_loglike, evals, False, expansions, draws, status)
    return SliceOutcome(y, ll, evals, bool(np.any(y != start)), expansions, draws)


def run_chain(g, start, start_loglike, n_steps, proposal, live, threshold, length, rng,
              start_index=None, step=None):
    """Chain ``n_steps`` slice steps, each along a fresh proposed direction.

    ``start_index`` is the live-point index the chain starts from, so that
    differential proposals do not pair the current point with itself while
    the chain is still sitting on it.  ``step`` selects the slice-step
    implementation (compiled by default).

    Returns an aggregated SliceOutcome; ``moved`` compares the final point
    with ``start`` and ``status`` is the first non-OK status seen.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if step is None:
        step = fast_slice_step
    x = np.asarray(start, dtype=float)
    ll = start_loglike
    evals = draws = expansions = 0
    status = _kernels.OK
    exclude = start_index
    for _ in range(n_steps):
        try:
            v = proposal.propose(x, live, rng, exclude=exclude)
        except StuckChain:
            status = status or _kernels.CAPPED
            continue
        out = step(g, x, ll, v, threshold, length, rng)
        evals += out.evals
        draws += out.draws
        expansions += out.expansions
        if out.status != _kernels.OK:
            status = status or out.status
        if out.moved:
            x, ll = out.end_point, out.end_loglike
            exclude = None
    moved = bool(np.any(x != start))
    return SliceOutcome(np.array(x, dtype=float), ll, evals, moved, expansions, draws, status)
