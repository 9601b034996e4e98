"""Passage time of Brownian motion to an independent random level.

For ``W`` a standard Brownian motion from 0 and ``X > 0`` independent of it,
``T_X = inf{t >= 0 : W_t = X}`` has

.. math::
   f_{T_X}(t) = \\frac{1}{\\sqrt{2\\pi t^3}}\\,E\\left[X e^{-X^2/2t}\\right],
   \\qquad
   P\\{T_X \\le t\\} = \\sqrt{\\frac{2}{\\pi t}}\\int_0^\\infty e^{-x^2/2t} F_X(x)\\,dx.

Both expectations are computed with :func:`arctan_law.quadrature.integrate`.
With ``X`` half-normal of scale ``sqrt(r)`` (the law of ``M_r - B_r``) these
reproduce the arctangent law.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import analytic
from .analytic import DomainError
from .quadrature import integrate

__all__ = [
    "LevelDistribution",
    "PointMass",
    "HalfNormal",
    "PassageTime",
    "passage_density",
    "passage_cdf",
    "passage_time_from_normal",
    "sample_passage_time",
]

QUANTILE_CUTOFF = 1e-14
DEFAULT_EPSREL = 1e-10
# past this exponent the integrand is assembled in log space
_LOG_SPACE_EXPONENT = 700.0
# erfc(9) ~ 4e-37: Gaussian mass beyond 9 sqrt(2t) is far below double precision
_GAUSS_CUTOFF = 9.0


class LevelDistribution(abc.ABC):
    """Law of a positive random level ``X``.

    Subclasses provide ``density`` and ``cdf``. Supplying ``quantile`` gives
    inverse-CDF sampling and a principled truncation point for free.
    """

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.density(x))

    @abc.abstractmethod
    def density(self, x):
        ...

    @abc.abstractmethod
    def cdf(self, x):
        ...

    def quantile(self, u):
        raise NotImplementedError

    @property
    def support_hint(self) -> tuple[float, float]:
        """Effective ``(lower, upper)`` support; ``upper`` may be ``inf``."""
        try:
            return 0.0, float(self.quantile(1.0 - QUANTILE_CUTOFF))
        except NotImplementedError:
            return 0.0, math.inf

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF draw; the ``u == 0`` event is redrawn so that ``X > 0``."""
        u = rng.random(size)
        if size is None:
            while u == 0.0:
                u = rng.random()
            return float(self.quantile(u))
        zero = u == 0.0
        while zero.any():
            u[zero] = rng.random(int(zero.sum()))
            zero = u == 0.0
        return np.asarray(self.quantile(u), dtype=float)


@dataclass(frozen=True)
class PointMass(LevelDistribution):
    """Deterministic level ``x0``."""

    x0: float

    def __post_init__(self):
        if not (math.isfinite(self.x0) and self.x0 > 0):
            raise DomainError(f"level must be positive, got {self.x0!r}")

    def density(self, x):
        raise TypeError("a point mass has no density")

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.x0, 1.0, 0.0)

    def quantile(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.x0)

    @property
    def support_hint(self):
        return self.x0, self.x0

    @property
    def breakpoints(self):
        return (self.x0,)


@dataclass(frozen=True)
class HalfNormal(LevelDistribution):
    """``|N(0, r)|``: the law of ``M_r - B_r``."""

    r: float = 1.0

    def __post_init__(self):
        analytic.LawParams(self.r)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return analytic.halfnormal_density(np.maximum(x, 0.0), self.r) * (x >= 0)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(
                x >= 0,
                0.5 * math.log(2.0 / (math.pi * self.r)) - x * x / (2.0 * self.r),
                -np.inf,
            )

    def cdf(self, x):
        return analytic.halfnormal_cdf(x, self.r)

    def quantile(self, u):
        return analytic.halfnormal_quantile(u, self.r)

    @property
    def support_hint(self):
        return 0.0, math.sqrt(2.0 * self.r) * float(special.erfcinv(QUANTILE_CUTOFF))


@dataclass(frozen=True)
class PassageTime:
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0):
            raise DomainError(f"passage time must be positive and finite, got {self.t!r}")

    def __float__(self):
        return self.t


def _check_time(t) -> float:
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"t must be positive and finite, got {t!r}")
    return t


def _seeds(lower: float, upper: float, scale: float, extra=()) -> list[float]:
    pts = [scale * k for k in (0.25, 1.0, 3.0, 10.0)]
    return [p for p in (*pts, *extra) if lower < p < upper]


def _integrate_tail(f, lower, upper, points, epsrel):
    """Integrate over ``[lower, upper]``; an infinite ``upper`` triggers doubling."""
    if math.isfinite(upper):
        return integrate(f, lower, upper, points=points, epsrel=epsrel)[0]
    edge = max(2.0 * lower, 1.0, *points) if points else max(2.0 * lower, 1.0)
    total = integrate(f, lower, edge, points=points, epsrel=epsrel)[0]
    while True:
        piece = integrate(f, edge, 2.0 * edge, epsrel=epsrel)[0]
        total += piece
        edge *= 2.0
        if abs(piece) <= 1e-15 * abs(total) or edge > 1e300:
            return total


def passage_density(t, level: LevelDistribution, *, epsrel: float = DEFAULT_EPSREL) -> float:
    """Density of the passage time to the random level at time ``t``.

    A :class:`PointMass` skips quadrature and returns the one-level density.
    """
    t = _check_time(t)
    prefactor = 1.0 / (math.sqrt(2.0 * math.pi) * t * math.sqrt(t))
    if isinstance(level, PointMass):
        x0 = level.x0
        return prefactor * x0 * math.exp(-x0 * x0 / (2.0 * t))

    lower, upper = level.support_hint
    # factor out the smallest exponent on the support so the integrand stays normal-range
    shift = lower * lower / (2.0 * t)
    shift = shift if shift > _LOG_SPACE_EXPONENT else 0.0

    def integrand(x):
        expo = x * x / (2.0 * t) - shift
        direct = x * np.exp(-expo) * level.density(x)
        big = expo > _LOG_SPACE_EXPONENT
        if big.any():
            with np.errstate(divide="ignore"):
                logged = np.exp(np.log(x[big]) - expo[big] + level.logpdf(x[big]))
            direct = np.asarray(direct, dtype=float).copy()
            direct[big] = logged
        return direct

    points = _seeds(lower, upper, math.sqrt(t), level.breakpoints)
    expectation = _integrate_tail(integrand, lower, upper, points, epsrel)
    if shift == 0.0:
        return prefactor * expectation
    if expectation <= 0.0:
        return 0.0
    return math.exp(math.log(prefactor) + math.log(expectation) - shift)


def passage_cdf(t, level: LevelDistribution, *, epsrel: float = DEFAULT_EPSREL) -> float:
    """``P{T_X <= t}`` through the integrated form against ``F_X``.

    Works for discrete levels too (the integrand is only piecewise smooth, so
    atoms are passed as breakpoints). Beyond the truncation point ``U`` the
    remaining Gaussian mass is added in closed form as ``F_X(U) erfc(U / sqrt(2t))``.
    """
    t = _check_time(t)
    lower, upper = level.support_hint
    if not math.isfinite(upper):
        upper = _doubling_upper(level, lower)
    width = math.sqrt(2.0 * t)
    cut = max(upper, lower + _GAUSS_CUTOFF * width)

    def integrand(x):
        return np.exp(-x * x / (2.0 * t)) * level.cdf(x)

    extra = (*level.breakpoints, upper)
    points = _seeds(lower, cut, math.sqrt(t), extra)
    body = integrate(integrand, lower, cut, points=points, epsrel=epsrel)[0]
    tail = float(level.cdf(cut)) * math.erfc(cut / width)
    return min(1.0, math.sqrt(2.0 / (math.pi * t)) * body + tail)


def _doubling_upper(level: LevelDistribution, lower: float) -> float:
    edge = max(2.0 * lower, 1.0)
    while 1.0 - float(level.cdf(edge)) > QUANTILE_CUTOFF and edge < 1e300:
        edge *= 2.0
    return edge


def passage_time_from_normal(level_value, z):
    """``x**2 / z**2``: the fixed-level passage time driven by a standard normal ``z``."""
    level_value = np.asarray(level_value, dtype=float)
    z = np.asarray(z, dtype=float)
    out = level_value * level_value / (z * z)
    return float(out) if out.ndim == 0 else out


def sample_passage_time(level: LevelDistribution, rng: np.random.Generator, size=None):
    """Draw ``T_X`` by composition: the level first, then ``x**2 / Z**2``.

    The level is drawn before any normal variate and never looked at again,
    which is what makes ``X`` independent of the driving motion. ``Z == 0``
    exactly has probability about ``2**-53`` per draw and is redrawn.
    """
    x = level.sample(rng, size)
    z = rng.standard_normal(size)
    if size is None:
        while z == 0.0:
            z = rng.standard_normal()
        return passage_time_from_normal(x, z)
    zero = z == 0.0
    while zero.any():
        z[zero] = rng.standard_normal(int(zero.sum()))
        zero = z == 0.0
    return passage_time_from_normal(x, z)
