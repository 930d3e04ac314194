"""Shrinkage test: KS comparison of volume ratios against Beta(K, 1).

For an unbiased sampler the ratio t = V_{i+1} / V_i of consecutive
discarded volumes follows Beta(K, 1), whose CDF is t**K.  The transformed
values u = t**K are therefore uniform and a one-sample two-sided
Kolmogorov-Smirnov test against U(0, 1) decides the verdict.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = ["TestVerdict", "volume_ratios", "ks_statistic", "kolmogorov_sf",
           "ks_uniform_test", "verdict_for", "ALPHA"]

ALPHA = 0.01


@dataclass(frozen=True)
class TestVerdict:
    n: int
    ks_statistic: float
    p_value: float
    stuck_count: int
    accepted: bool

    def to_dict(self):
        return asdict(self)


def volume_ratios(rec):
    """Consecutive volume ratios exp(logV[i+1] - logV[i]) within each segment."""
    logv = np.asarray(rec.log_volumes, dtype=float)
    if len(logv) < 2:
        raise ValueError("need at least two recorded volumes")
    segments = np.asarray(getattr(rec, "segments", np.zeros(len(logv), dtype=int)))
    same = segments[1:] == segments[:-1]
    ratios = np.exp(np.diff(logv)[same])
    if len(ratios) == 0:
        raise ValueError("no two consecutive volumes in the same segment")
    return ratios


def ks_statistic(u):
    """Two-sided one-sample KS distance between ``u`` and U(0, 1)."""
    u = np.sort(np.asarray(u, dtype=float))
    n = len(u)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - u)
    d_minus = np.max(u - (i - 1) / n)
    return float(max(d_plus, d_minus))


def kolmogorov_sf(lam):
    """Survival function of the Kolmogorov distribution, Q(lam) = P(K > lam).

    Uses the alternating series 2 sum (-1)^(j-1) exp(-2 j^2 lam^2) for large
    arguments and the Jacobi-theta dual series for small ones, where the
    first converges slowly.
    """
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        # 1 - sqrt(2 pi)/lam * sum_j exp(-(2j-1)^2 pi^2 / (8 lam^2))
        y = math.exp(-math.pi**2 / (8.0 * lam * lam))
        total = 0.0
        for j in range(1, 30):
            term = y ** ((2 * j - 1) ** 2)
            total += term
            if term < 1e-17 * total:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * total))
    total = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += term if j % 2 else -term
        if term < 1e-17:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_uniform_test(ratios, K, stuck_count=0, alpha=ALPHA):
    """KS test of shrinkage ratios against Beta(K, 1).

    The p-value uses the asymptotic Kolmogorov distribution evaluated at
    (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * D.
    """
    t = np.asarray(ratios, dtype=float)
    if t.size == 0:
        raise ValueError("empty sample")
    if K < 1:
        raise ValueError("K must be at least 1")
    if not np.all((t > 0) & (t <= 1)):
        raise ValueError("volume ratios must lie in (0, 1]")
    n = t.size
    D = ks_statistic(t**K)
    sqn = math.sqrt(n)
    p = kolmogorov_sf((sqn + 0.12 + 0.11 / sqn) * D)
    return TestVerdict(n, D, p, int(stuck_count), bool(p >= alpha and stuck_count == 0))


def verdict_for(rec, alpha=ALPHA):
    """Verdict for a ShrinkageRecord (KS on its ratios plus the stuck rule)."""
    return ks_uniform_test(volume_ratios(rec), rec.K, rec.stuck_count, alpha=alpha)
