"""Covariance snapshots, Gram-Schmidt and uniform sphere/ball draws."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CovarianceSnapshot",
    "RankDeficiencyError",
    "sample_covariance",
    "gram_schmidt",
    "sample_unit_sphere",
    "sample_unit_ball",
]

EIGEN_FLOOR = 1e-12
GS_TOL = 1e-12


class RankDeficiencyError(ValueError):
    """Raised when vectors to orthogonalize are (numerically) linearly dependent."""


@dataclass(frozen=True)
class CovarianceSnapshot:
    """Sample covariance of the live points with its eigendecomposition.

    ``eigenvectors`` holds the principal axes as columns, ordered by
    descending eigenvalue.  ``axes`` are the same columns scaled by the
    square root of their eigenvalue, and ``sqrt_map`` is the symmetric
    square root Q diag(sqrt(lambda)) Q'.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sqrt_map: np.ndarray
    axes: np.ndarray
    epoch: int = 0

    @classmethod
    def from_matrix(cls, matrix, epoch=0):
        matrix = np.array(matrix, dtype=float)
        matrix = 0.5 * (matrix + matrix.T)
        evals, evecs = np.linalg.eigh(matrix)
        order = np.argsort(evals)[::-1]
        evals = evals[order]
        evecs = evecs[:, order]
        top = evals[0]
        if not top > 0:
            raise RankDeficiencyError("covariance has no positive eigenvalue")
        evals = np.maximum(evals, EIGEN_FLOOR * top)
        root = np.sqrt(evals)
        axes = evecs * root
        sqrt_map = axes @ evecs.T
        arrays = [matrix, evals, evecs, sqrt_map, axes]
        for a in arrays:
            a.setflags(write=False)
        return cls(*arrays, epoch=epoch)

    @property
    def d(self):
        return self.matrix.shape[0]


def sample_covariance(points, epoch=0):
    """Unbiased (n-1) sample covariance about the sample mean, as a snapshot."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError("need at least two points to estimate a covariance")
    centered = points - points.mean(axis=0)
    matrix = centered.T @ centered / (points.shape[0] - 1)
    return CovarianceSnapshot.from_matrix(matrix, epoch=epoch)


def gram_schmidt(vs):
    """Orthonormalize the rows of ``vs`` in order (modified Gram-Schmidt).

    The first output is parallel to the first input.  Raises
    RankDeficiencyError when a vector's residual after projection falls
    below 1e-12 of its original norm.
    """
    vs = np.array(vs, dtype=float)
    out = np.empty_like(vs)
    for i, v in enumerate(vs):
        norm0 = np.linalg.norm(v)
        w = v.copy()
        for j in range(i):
            w -= (out[j] @ w) * out[j]
        norm = np.linalg.norm(w)
        if norm0 == 0 or norm <= GS_TOL * norm0:
            raise RankDeficiencyError(f"vector {i} is linearly dependent on its predecessors")
        out[i] = w / norm
    return out


def sample_unit_sphere(d, rng):
    """Uniform direction on the unit sphere in ``d`` dimensions."""
    while True:
        z = rng.standard_normal(d)
        norm = np.sqrt(z @ z)
        if norm > 0:
            return z / norm


def sample_unit_ball(d, rng):
    """Uniform point in the closed unit ball in ``d`` dimensions."""
    return sample_unit_sphere(d, rng) * rng.random() ** (1.0 / d)
