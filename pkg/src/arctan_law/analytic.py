"""Closed-form laws around the post-horizon exceedance time of Brownian motion.

Let ``M_r`` be the running maximum of a Brownian motion on ``[0, r]`` and
``S`` the time after ``r`` until the path gets back above ``M_r``. Then

.. math::
   P\\{S \\le s\\} = \\frac{2}{\\pi}\\arctan\\sqrt{s/r},
   \\qquad
   f_S(s) = \\frac{\\sqrt{r}}{\\pi}\\,\\frac{1}{(s + r)\\sqrt{s}}.

This module also carries the fixed-level passage law given by the reflection
principle and the half-normal law of the gap ``M_r - B_r``. All functions take
scalars or arrays; scalar input returns a Python float.

Invalid arguments raise :class:`DomainError`. NaNs are never returned for bad
input because they would leak silently into Monte Carlo aggregates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "LawParams",
    "IntervalParams",
    "Probability",
    "arctan_cdf",
    "arctan_survival",
    "arctan_density",
    "arctan_quantile",
    "reflection_cdf",
    "halfnormal_density",
    "halfnormal_cdf",
    "halfnormal_quantile",
    "interval_cdf",
]

_TWO_OVER_PI = 2.0 / math.pi


class DomainError(ValueError):
    """An argument lies outside the domain of the law being evaluated."""


@dataclass(frozen=True)
class LawParams:
    """Horizon ``r`` of the running maximum."""

    r: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise DomainError(f"r must be positive and finite, got {self.r!r}")


@dataclass(frozen=True)
class IntervalParams:
    """Window ``[r1, r2]`` over which the maximum is taken."""

    r1: float
    r2: float

    def __post_init__(self):
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise DomainError("r1 and r2 must be finite")
        if not 0 <= self.r1 < self.r2:
            raise DomainError(f"need 0 <= r1 < r2, got r1={self.r1!r}, r2={self.r2!r}")

    @property
    def length(self) -> float:
        return self.r2 - self.r1

    def as_law(self) -> LawParams:
        return LawParams(self.length)


@dataclass(frozen=True)
class Probability:
    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"probability outside [0, 1]: {self.value!r}")

    def __float__(self):
        return float(self.value)


Horizon = Union[LawParams, float]


def _r(params: Horizon) -> float:
    if isinstance(params, LawParams):
        return params.r
    return LawParams(float(params)).r


def _as_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _out(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def arctan_cdf(s, params: Horizon = 1.0):
    """``P{S <= s}`` for the exceedance time after horizon ``r``."""
    r = _r(params)
    arr = _as_array(s, "s")
    if np.any(arr < 0):
        raise DomainError("s must be nonnegative")
    out = _TWO_OVER_PI * np.arctan(np.sqrt(arr / r))
    return _out(out, arr.ndim == 0)


def arctan_survival(s, params: Horizon = 1.0):
    """``P{S > s}`` via the complementary angle, free of cancellation in the tail."""
    r = _r(params)
    arr = _as_array(s, "s")
    if np.any(arr < 0):
        raise DomainError("s must be nonnegative")
    with np.errstate(divide="ignore", over="ignore"):
        out = _TWO_OVER_PI * np.arctan(np.sqrt(r / arr))
    return _out(out, arr.ndim == 0)


def arctan_density(s, params: Horizon = 1.0):
    """Density of the exceedance time.

    Raises for ``s <= 0``: the density has an integrable ``s**-0.5``
    singularity at the origin and no finite value there.
    """
    r = _r(params)
    arr = _as_array(s, "s")
    if np.any(arr <= 0):
        raise DomainError("density is defined for s > 0 only")
    out = math.sqrt(r) / math.pi / ((arr + r) * np.sqrt(arr))
    return _out(out, arr.ndim == 0)


def arctan_quantile(u, params: Horizon = 1.0):
    """Inverse of :func:`arctan_cdf` on ``[0, 1)``.

    The upper half uses ``r / tan(pi (1 - u) / 2)**2`` so that quantiles far in
    the tail keep full relative accuracy.
    """
    r = _r(params)
    arr = _as_array(u, "u")
    if np.any((arr < 0) | (arr >= 1)):
        raise DomainError("u must lie in [0, 1); S has unbounded support")
    half = math.pi / 2
    low = arr <= 0.5
    with np.errstate(divide="ignore"):
        out = np.where(
            low,
            r * np.tan(half * arr) ** 2,
            r / np.tan(half * (1.0 - arr)) ** 2,
        )
    return _out(out, arr.ndim == 0)


def reflection_cdf(x, t):
    """``P{T_x <= t} = 2 P{W_t >= x}`` for a fixed level ``x > 0``.

    Evaluated as ``erfc(x / sqrt(2 t))``; never as one minus a normal CDF.
    """
    xa = _as_array(x, "x")
    ta = _as_array(t, "t")
    if np.any(xa <= 0) or np.any(ta <= 0):
        raise DomainError("level x and time t must be positive")
    out = special.erfc(xa / np.sqrt(2.0 * ta))
    return _out(out, out.ndim == 0)


def halfnormal_density(x, params: Horizon = 1.0):
    """Density of ``M_r - B_r``, a half-normal with scale ``sqrt(r)``."""
    r = _r(params)
    arr = _as_array(x, "x")
    if np.any(arr < 0):
        raise DomainError("x must be nonnegative")
    out = math.sqrt(2.0 / (math.pi * r)) * np.exp(-arr * arr / (2.0 * r))
    return _out(out, arr.ndim == 0)


def halfnormal_cdf(x, params: Horizon = 1.0):
    r = _r(params)
    arr = _as_array(x, "x")
    out = special.erf(np.maximum(arr, 0.0) / math.sqrt(2.0 * r))
    return _out(out, arr.ndim == 0)


def halfnormal_quantile(u, params: Horizon = 1.0):
    r = _r(params)
    arr = _as_array(u, "u")
    if np.any((arr < 0) | (arr >= 1)):
        raise DomainError("u must lie in [0, 1)")
    out = math.sqrt(2.0 * r) * np.where(
        arr <= 0.5, special.erfinv(arr), special.erfcinv(1.0 - arr)
    )
    return _out(out, arr.ndim == 0)


def interval_cdf(s, params: IntervalParams):
    """Exceedance law when the maximum is taken over ``[r1, r2]``.

    Only the window length ``r2 - r1`` matters.
    """
    if not isinstance(params, IntervalParams):
        params = IntervalParams(*params)
    return arctan_cdf(s, params.as_law())
