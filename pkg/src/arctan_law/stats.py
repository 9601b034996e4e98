"""Kolmogorov-Smirnov machinery with DKW bands and censoring support."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "EmpiricalCdf",
    "KsReport",
    "ecdf_build",
    "dkw_bound",
    "two_sample_bound",
    "ks_one_sample",
    "ks_two_sample",
    "censored_compare",
    "censored_two_sample",
]


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_samples: np.ndarray

    @property
    def n(self) -> int:
        return int(self.sorted_samples.size)

    def __call__(self, x):
        """Right-continuous step function ``#{samples <= x} / n``."""
        idx = np.searchsorted(self.sorted_samples, x, side="right")
        out = idx / self.n
        return float(out) if np.ndim(out) == 0 else out

    def left_limit(self, x):
        idx = np.searchsorted(self.sorted_samples, x, side="left")
        out = idx / self.n
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class KsReport:
    distance: float
    n: int
    bound: float
    alpha: float

    @property
    def passed(self) -> bool:
        return self.distance < self.bound

    def to_dict(self) -> dict:
        return {
            "distance": self.distance,
            "n": self.n,
            "bound": self.bound,
            "alpha": self.alpha,
            "pass": self.passed,
        }


def ecdf_build(samples) -> EmpiricalCdf:
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("cannot build an empirical CDF from no samples")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    arr = np.sort(arr)
    arr.flags.writeable = False
    return EmpiricalCdf(arr)


def _check_alpha(alpha: float):
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def dkw_bound(n: int, alpha: float = 0.01) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width with Massart's constant."""
    _check_alpha(alpha)
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def two_sample_bound(n_a: int, n_b: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample critical value ``c(alpha) sqrt((n_a + n_b) / (n_a n_b))``."""
    _check_alpha(alpha)
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    return c * math.sqrt((n_a + n_b) / (n_a * n_b))


def _sup_distance(ecdf: EmpiricalCdf, cdf_at_samples: np.ndarray, scale: float = 1.0):
    """Sup of |F_n - F| over sample points, using both one-sided limits.

    ``scale`` rescales the step heights, which turns the ECDF of the uncensored
    values into the sub-distribution of the full sample.
    """
    x = ecdf.sorted_samples
    upper = np.searchsorted(x, x, side="right") / ecdf.n * scale
    lower = np.searchsorted(x, x, side="left") / ecdf.n * scale
    return float(max(np.max(np.abs(upper - cdf_at_samples)), np.max(np.abs(lower - cdf_at_samples))))


def ks_one_sample(ecdf: EmpiricalCdf, analytic_cdf: Callable, alpha: float = 0.01) -> KsReport:
    if not isinstance(ecdf, EmpiricalCdf):
        ecdf = ecdf_build(ecdf)
    f = np.asarray(analytic_cdf(ecdf.sorted_samples), dtype=float)
    return KsReport(_sup_distance(ecdf, f), ecdf.n, dkw_bound(ecdf.n, alpha), alpha)


def ks_two_sample(a: EmpiricalCdf, b: EmpiricalCdf, alpha: float = 0.01) -> KsReport:
    if not isinstance(a, EmpiricalCdf):
        a = ecdf_build(a)
    if not isinstance(b, EmpiricalCdf):
        b = ecdf_build(b)
    merged = np.concatenate([a.sorted_samples, b.sorted_samples])
    # both ECDFs are right-continuous steps; the sup is attained at a jump
    distance = float(np.max(np.abs(np.asarray(a(merged)) - np.asarray(b(merged)))))
    return KsReport(distance, a.n + b.n, two_sample_bound(a.n, b.n, alpha), alpha)


def _split_censored(samples, n_censored):
    arr = np.asarray(samples, dtype=float).ravel()
    flagged = np.isinf(arr) & (arr > 0)
    if np.any(np.isnan(arr)) or np.any(np.isinf(arr) & (arr < 0)):
        raise ValueError("samples must be finite or +inf (censored)")
    return arr[~flagged], int(flagged.sum()) + int(n_censored)


def censored_compare(
    samples,
    analytic_cdf: Callable,
    horizon: float,
    alpha: float = 0.01,
    *,
    n_censored: int = 0,
) -> KsReport:
    """KS distance between the empirical sub-distribution and ``analytic_cdf`` on ``[0, horizon]``.

    ``samples`` holds observed times; censored paths are given as ``+inf``
    entries, or counted through ``n_censored``, or both. The empirical side is
    ``#{observed <= x} / n`` with ``n`` the total count, never renormalized, so
    a wrong censoring rate shows up as a gap at the horizon.
    """
    if not (horizon > 0):
        raise ValueError("horizon must be positive")
    observed, censored = _split_censored(samples, n_censored)
    if np.any(observed > horizon):
        raise ValueError("observed times must not exceed the horizon")
    n = observed.size + censored
    if n == 0:
        raise ValueError("no samples")
    f_horizon = float(analytic_cdf(horizon))
    if observed.size == 0:
        return KsReport(f_horizon, n, dkw_bound(n, alpha), alpha)
    ecdf = ecdf_build(observed)
    scale = ecdf.n / n
    f = np.asarray(analytic_cdf(ecdf.sorted_samples), dtype=float)
    distance = max(_sup_distance(ecdf, f, scale), abs(scale - f_horizon))
    return KsReport(distance, n, dkw_bound(n, alpha), alpha)


def censored_two_sample(a, b, horizon: float, alpha: float = 0.01) -> KsReport:
    """Two-sample KS on ``[0, horizon]`` between samples with ``+inf`` for censored.

    All censored entries sit beyond the horizon in both samples, so putting
    them at a common point past it gives the sup of the sub-distribution gap.
    """
    a_obs, a_cens = _split_censored(a, 0)
    b_obs, b_cens = _split_censored(b, 0)
    beyond = 2.0 * horizon + 1.0
    if np.any(a_obs > horizon) or np.any(b_obs > horizon):
        raise ValueError("observed times must not exceed the horizon")
    a_full = np.concatenate([a_obs, np.full(a_cens, beyond)])
    b_full = np.concatenate([b_obs, np.full(b_cens, beyond)])
    return ks_two_sample(ecdf_build(a_full), ecdf_build(b_full), alpha)
