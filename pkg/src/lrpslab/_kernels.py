"""Compiled inner loops: likelihoods of the test geometries and the slice step.

Everything here is numba-jitted and works on plain arrays so the runner can
call it per slice step without Python overhead per model evaluation.
Geometries are passed as an integer kind code plus a parameter vector
``(rho, center, radius, width)``.
"""

import numpy as np
from numba import njit

GAUSS = 0
PYRAMID = 1
SHELL = 2

# slice step status codes
OK = 0
CAPPED = 1
COLLAPSED = 2


@njit(cache=True)
def loglike(kind, params, x):
    d = x.shape[0]
    if kind == GAUSS:
        rho = params[0]
        mean = 0.0
        for i in range(d):
            mean += x[i]
        mean /= d
        resid = 0.0
        for i in range(d):
            resid += (x[i] - mean) ** 2
        # x' inv(S) x split into the all-ones direction and its complement
        q = resid / (1.0 - rho) + d * mean * mean / (1.0 + (d - 1) * rho)
        return -0.5 * q
    elif kind == PYRAMID:
        c = params[1]
        m = 0.0
        for i in range(d):
            a = abs(x[i] - c)
            if a > m:
                m = a
        return -m
    else:
        c = params[1]
        r = params[2]
        w = params[3]
        r2 = 0.0
        for i in range(d):
            r2 += (x[i] - c) ** 2
        z = (r2 - r * r) / w
        return -z * z


@njit(cache=True)
def in_support(kind, x):
    if kind == GAUSS:
        return True
    for i in range(x.shape[0]):
        if not (0.0 <= x[i] <= 1.0):
            return False
    return True


@njit(cache=True)
def slice_step(kind, params, start, v, threshold, length, rng, max_ops):
    """One doubling step-out / shrink-on-reject slice step along ``v``.

    Returns ``(status, end, end_loglike, evals, expand_pos, expand_neg, draws)``.
    On a non-OK status ``end`` is a copy of ``start`` and ``end_loglike`` is nan.
    """
    d = start.shape[0]
    y = np.empty(d)
    evals = 0
    ops = 0

    t_hi = length
    expand_pos = 0
    while True:
        ops += 1
        for i in range(d):
            y[i] = start[i] + t_hi * v[i]
        inside = False
        if in_support(kind, y):
            evals += 1
            inside = loglike(kind, params, y) > threshold
        if not inside:
            break
        if ops >= max_ops:
            return CAPPED, start.copy(), np.nan, evals, expand_pos, 0, 0
        t_hi *= 2.0
        expand_pos += 1

    t_lo = -length
    expand_neg = 0
    while True:
        ops += 1
        for i in range(d):
            y[i] = start[i] + t_lo * v[i]
        inside = False
        if in_support(kind, y):
            evals += 1
            inside = loglike(kind, params, y) > threshold
        if not inside:
            break
        if ops >= max_ops:
            return CAPPED, start.copy(), np.nan, evals, expand_pos, expand_neg, 0
        t_lo *= 2.0
        expand_neg += 1

    draws = 0
    while True:
        if ops >= max_ops:
            return CAPPED, start.copy(), np.nan, evals, expand_pos, expand_neg, draws
        if t_hi - t_lo < 1e-300:
            return COLLAPSED, start.copy(), np.nan, evals, expand_pos, expand_neg, draws
        ops += 1
        t = t_lo + rng.random() * (t_hi - t_lo)
        draws += 1
        for i in range(d):
            y[i] = start[i] + t * v[i]
        if in_support(kind, y):
            evals += 1
            ll = loglike(kind, params, y)
            if ll > threshold:
                return OK, y, ll, evals, expand_pos, expand_neg, draws
        if t < 0.0:
            t_lo = t
        else:
            t_hi = t
