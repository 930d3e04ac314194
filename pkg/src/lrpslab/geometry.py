"""Test problems with analytically known enclosed prior volume.

Three families are provided, each at any dimension:

* ``correlated-gaussian``: log L = -x' inv(S) x / 2 with unit diagonal and
  constant off-diagonal correlation, on an unbounded uniform prior.  Runs
  start from a uniform population inside the Mahalanobis ellipsoid of
  radius ``m0``.
* ``hyperpyramid``: log L = -max_i |x_i - 0.5| on the unit cube.  Contours
  are concentric cubes.
* ``gaussian-shell``: log L = -((|x - 0.5|^2 - R^2) / w)^2 on the unit cube.
  Contours are spherical shells that get thinner as the threshold rises.

Log-volumes are defined up to one additive constant per geometry (the
unit-ball volume is dropped), so only differences are meaningful.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .linalg import sample_unit_ball

__all__ = [
    "Geometry",
    "DomainError",
    "KINDS",
    "SETUPS",
    "make_geometry",
    "get_geometry",
    "log_likelihood",
    "log_enclosed_volume",
    "sample_prior",
    "in_support",
]

KINDS = ("correlated-gaussian", "hyperpyramid", "gaussian-shell")

_KIND_CODES = {
    "correlated-gaussian": _kernels.GAUSS,
    "hyperpyramid": _kernels.PYRAMID,
    "gaussian-shell": _kernels.SHELL,
}

_SHORT_NAMES = {
    "gauss": "correlated-gaussian",
    "pyramid": "hyperpyramid",
    "shell": "gaussian-shell",
}
_LONG_TO_SHORT = {v: k for k, v in _SHORT_NAMES.items()}

# the six standard setups
SETUPS = ("gauss16", "gauss100", "pyramid4", "pyramid16", "shell2", "shell8")


class DomainError(ValueError):
    """A likelihood threshold outside the range the geometry can attain."""


@dataclass(frozen=True)
class Geometry:
    kind: str
    d: int
    rho: float = 0.95
    center: float = 0.5
    radius: float = 0.4
    width: float = 0.004
    m0: float = 1.0
    params: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown geometry kind {self.kind!r}; expected one of {KINDS}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        if self.kind == "correlated-gaussian" and not (
            -1.0 / max(self.d - 1, 1) < self.rho < 1.0
        ):
            raise ValueError(f"correlation {self.rho} does not give a positive-definite covariance")
        params = np.array([self.rho, self.center, self.radius, self.width], dtype=float)
        params.setflags(write=False)
        object.__setattr__(self, "params", params)

    @property
    def code(self):
        return _KIND_CODES[self.kind]

    @property
    def name(self):
        return f"{_LONG_TO_SHORT[self.kind]}{self.d}"

    @property
    def bounded(self):
        """True when the uniform prior is the unit cube (False: whole space)."""
        return self.kind != "correlated-gaussian"

    @property
    def max_loglike(self):
        return 0.0

    @property
    def covariance(self):
        """Dense covariance matrix of the Gaussian family."""
        cov = np.full((self.d, self.d), self.rho)
        np.fill_diagonal(cov, 1.0)
        return cov

    @property
    def recordable_threshold(self):
        """Lowest threshold whose contour lies entirely inside the prior support.

        Below it the analytic volume ignores clipping by the unit cube and
        must not be used.  Only the shell can exceed the cube; the pyramid
        contours and the Gaussian start ellipsoid never do.
        """
        if self.kind != "gaussian-shell":
            return -math.inf
        half = min(self.center, 1.0 - self.center)
        return -(((half**2 - self.radius**2) / self.width) ** 2)

    def log_likelihood(self, x):
        x = self._check(x)
        return float(_kernels.loglike(self.code, self.params, x))

    def in_support(self, x):
        x = self._check(x)
        return bool(_kernels.in_support(self.code, x))

    def log_enclosed_volume(self, loglike):
        loglike = float(loglike)
        if not loglike <= self.max_loglike:
            raise DomainError(
                f"threshold {loglike} is above the maximum log-likelihood {self.max_loglike}"
            )
        d = self.d
        if self.kind == "correlated-gaussian":
            # Mahalanobis radius m = sqrt(-2 logL); V ~ m^d
            return 0.5 * d * math.log(-2.0 * loglike) if loglike < 0 else -math.inf
        if self.kind == "hyperpyramid":
            return d * math.log(-2.0 * loglike) if loglike < 0 else -math.inf
        return self._shell_log_volume(loglike)

    def _shell_log_volume(self, loglike):
        s = self.width * math.sqrt(-loglike)
        r2 = self.radius**2
        outer = r2 + s
        inner = r2 - s
        if outer <= 0:
            raise DomainError(f"empty level set at threshold {loglike}")
        log_outer = 0.5 * self.d * math.log(outer)
        if inner <= 0:
            return log_outer
        # log(r+^d - r-^d) without cancellation for thin shells
        log_ratio = 0.5 * self.d * math.log1p(-2.0 * s / outer)
        return log_outer + math.log(-math.expm1(log_ratio))

    def sample_prior(self, rng):
        if self.bounded:
            return rng.random(self.d)
        return self.sqrt_cov_apply(self.m0 * sample_unit_ball(self.d, rng))

    def sample_constrained(self, loglike, rng):
        """Exact uniform draw from the region with log-likelihood above ``loglike``."""
        if self.kind == "hyperpyramid":
            half = -loglike
            return self.center + half * (2.0 * rng.random(self.d) - 1.0)
        if self.kind == "correlated-gaussian":
            m = math.sqrt(-2.0 * loglike)
            return self.sqrt_cov_apply(m * sample_unit_ball(self.d, rng))
        raise ValueError(f"no exact constrained sampler for {self.kind}")

    def sqrt_cov_apply(self, z):
        """Apply the symmetric square root of the Gaussian covariance to ``z``.

        The covariance has eigenvalue 1+(d-1)rho along the all-ones direction
        and 1-rho on its complement, so the map is O(d).
        """
        z = np.asarray(z, dtype=float)
        d = self.d
        along = z.mean()
        a_par = math.sqrt(1.0 + (d - 1) * self.rho)
        a_perp = math.sqrt(1.0 - self.rho)
        return a_perp * (z - along) + a_par * along

    def mahalanobis2(self, x):
        """x' inv(S) x for the Gaussian family."""
        return -2.0 * float(_kernels.loglike(_kernels.GAUSS, self.params, self._check(x)))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"expected a point of dimension {self.d}, got shape {x.shape}")
        return x


_ID_RE = re.compile(r"^(gauss|pyramid|shell)(\d+)$")


def make_geometry(kind, d, **params):
    kind = _SHORT_NAMES.get(kind, kind)
    return Geometry(kind, int(d), **params)


def get_geometry(geometry_id):
    """Look up a geometry by id such as ``gauss16`` or ``shell8``."""
    if isinstance(geometry_id, Geometry):
        return geometry_id
    m = _ID_RE.match(str(geometry_id))
    if not m or int(m.group(2)) < 1:
        raise ValueError(
            f"unknown geometry {geometry_id!r}; expected <gauss|pyramid|shell><dim>, "
            f"e.g. one of {', '.join(SETUPS)}"
        )
    return make_geometry(m.group(1), int(m.group(2)))


def log_likelihood(g, x):
    return g.log_likelihood(x)


def log_enclosed_volume(g, loglike):
    return g.log_enclosed_volume(loglike)


def sample_prior(g, rng):
    return g.sample_prior(rng)


def in_support(g, x):
    return g.in_support(x)
