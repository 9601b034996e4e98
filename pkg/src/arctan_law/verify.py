"""Verification suites behind ``arctan-law verify``.

Each check yields ``{"name", "metric", "bound", "pass"}`` with
``pass = metric < bound``. Random checks take their streams from the root seed
and a fixed per-check tag, so a report is a pure function of the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analytic, levy_passage, simulate, stats
from .quadrature import integrate
from .streams import make_rng

SUITES = ("analytic", "lemma", "path", "interval", "levy")

# stream tags; never reuse one for two different checks
_TAG_EXACT = 1
_TAG_LEMMA = 2
_TAG_INTERVAL_EXACT = 3
_STREAM_PATH = 10
_STREAM_B0 = (11, 12, 13)
_STREAM_INTERVAL = (20, 21, 22, 23)
_STREAM_LEVY = 30
_STREAM_LEVY_SHIFT = (31, 32)

# sizes: criteria that fix n use it; the rest are chosen to run in seconds
PATH_N = 100_000
PATH_STEPS = 1000
B0_N = 20_000
B0_STEPS = 200
INTERVAL_N = 20_000
INTERVAL_STEPS = 200
LEVY_N = 100_000
LEVY_STEPS = 1000
LEVY_SHIFT_N = 20_000
EXACT_N = 1_000_000
LEMMA_N = 100_000


@dataclass
class Check:
    name: str
    metric: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.metric < self.bound)

    def to_dict(self):
        return {"name": self.name, "metric": float(self.metric), "bound": float(self.bound), "pass": self.passed}


def _log_grid(r: float, count: int = 200):
    return np.geomspace(0.01 * r, 100.0 * r, count)


# -- analytic ---------------------------------------------------------------

def exact_points_error() -> float:
    worst = 0.0
    for r in (0.5, 1.0, 7.0):
        for ratio, target in ((1.0 / 3.0, 1.0 / 3.0), (1.0, 0.5), (3.0, 2.0 / 3.0)):
            worst = max(worst, abs(analytic.arctan_cdf(ratio * r, r) - target))
    return worst


def quantile_roundtrip_error() -> float:
    u = np.linspace(0.0, 0.999, 1000)
    return max(
        float(np.max(np.abs(analytic.arctan_cdf(analytic.arctan_quantile(u, r), r) - u)))
        for r in (0.5, 1.0, 7.0)
    )


def arctan_normalization_error(r: float = 1.0) -> float:
    # s = r tan^2(theta) maps (0, pi/2) onto (0, inf)
    def integrand(theta):
        tan = np.tan(theta)
        return analytic.arctan_density(r * tan * tan, r) * 2.0 * r * tan / np.cos(theta) ** 2

    value, _ = integrate(integrand, 0.0, math.pi / 2, epsrel=1e-13)
    return abs(value - 1.0)


def density_cdf_consistency_error(r: float = 1.0) -> float:
    worst = 0.0
    for s in np.geomspace(1e-3 * r, 1e3 * r, 121):
        h = 1e-5 * s
        # difference the survival function where it is the smaller side
        if s > r:
            fd = (analytic.arctan_survival(s - h, r) - analytic.arctan_survival(s + h, r)) / (2 * h)
        else:
            fd = (analytic.arctan_cdf(s + h, r) - analytic.arctan_cdf(s - h, r)) / (2 * h)
        exact = analytic.arctan_density(s, r)
        worst = max(worst, abs(fd - exact) / exact)
    return worst


def tail_law_excess() -> float:
    """Worst ratio of the tail-expansion error to its bound ``(r/s)/3``; must stay below 1."""
    worst = 0.0
    for r in (0.5, 1.0, 7.0):
        for s in np.geomspace(100 * r, 1e5 * r, 50):
            lead = (2 / math.pi) * math.sqrt(r / s)
            rel = abs(analytic.arctan_survival(s, r) - lead) / lead
            worst = max(worst, rel / ((r / s) / 3.0))
    return worst


def scaling_law_error() -> float:
    worst = 0.0
    for c in (0.25, 3.0, 1e3):
        for s in np.geomspace(1e-3, 1e3, 50):
            worst = max(worst, abs(analytic.arctan_cdf(c * s, c * 1.0) - analytic.arctan_cdf(s, 1.0)))
    return worst


def reflection_scaling_error() -> float:
    worst = 0.0
    for x in np.geomspace(1e-2, 10, 30):
        for t in np.geomspace(1e-2, 1e2, 30):
            worst = max(worst, abs(analytic.reflection_cdf(x, t) - analytic.reflection_cdf(2 * x, 4 * t)))
    return worst


def analytic_checks(seed: int) -> list[Check]:
    rng = make_rng(seed, _TAG_EXACT)
    draws = simulate.sample_exceedance_exact(1.0, rng, EXACT_N)
    ks = stats.ks_one_sample(stats.ecdf_build(draws), lambda x: analytic.arctan_cdf(x, 1.0), 0.01)
    tail_frac = float(np.mean(draws > 100.0))
    return [
        Check("exact_points", exact_points_error(), 1e-15),
        Check("quantile_roundtrip", quantile_roundtrip_error(), 1e-12),
        Check("density_normalization", arctan_normalization_error(), 1e-10),
        Check("density_cdf_consistency", density_cdf_consistency_error(), 1e-6),
        Check("scaling_law", scaling_law_error(), 1e-15),
        Check("tail_law", tail_law_excess(), 1.0),
        Check("reflection_scale_invariance", reflection_scaling_error(), 1e-14),
        Check("interval_r1_zero", abs(analytic.interval_cdf(2.0, analytic.IntervalParams(0.0, 1.5))
                                      - analytic.arctan_cdf(2.0, 1.5)), 1e-300),
        Check("exact_sampler_ks", ks.distance, ks.bound),
        Check("exact_sampler_tail_100r", abs(tail_frac - analytic.arctan_survival(100.0, 1.0)), 0.0008),
    ]


# -- lemma ------------------------------------------------------------------

def halfnormal_equivalence_error() -> float:
    worst = 0.0
    for r in (0.5, 1.0, 7.0):
        level = levy_passage.HalfNormal(r)
        for s in _log_grid(r):
            exact = analytic.arctan_density(s, r)
            worst = max(worst, abs(levy_passage.passage_density(s, level) - exact) / exact)
    return worst


def tonelli_halfnormal_error() -> float:
    worst = 0.0
    for r in (0.5, 1.0, 7.0):
        level = levy_passage.HalfNormal(r)
        for s in _log_grid(r):
            worst = max(worst, abs(levy_passage.passage_cdf(s, level) - analytic.arctan_cdf(s, r)))
    return worst


def tonelli_pointmass_error() -> float:
    worst = 0.0
    for x in (0.1, 1.0, 4.0):
        level = levy_passage.PointMass(x)
        for t in _log_grid(1.0, 60):
            worst = max(worst, abs(levy_passage.passage_cdf(t, level) - analytic.reflection_cdf(x, t)))
    return worst


def passage_normalization_error(r: float = 2.0) -> float:
    level = levy_passage.HalfNormal(r)

    def integrand(theta):
        tan = np.tan(theta)
        t = r * tan * tan
        jac = 2.0 * r * tan / np.cos(theta) ** 2
        return np.array([levy_passage.passage_density(ti, level) if ti > 0 else 0.0 for ti in t]) * jac

    value, _ = integrate(integrand, 0.0, math.pi / 2, epsrel=1e-12)
    return abs(value - 1.0)


def cdf_density_derivative_error(level, r: float = 1.0) -> float:
    worst = 0.0
    for s in _log_grid(r, 40):
        h = 1e-4 * s
        fd = (levy_passage.passage_cdf(s + h, level) - levy_passage.passage_cdf(s - h, level)) / (2 * h)
        dens = levy_passage.passage_density(s, level)
        worst = max(worst, abs(fd - dens) / dens)
    return worst


def lemma_checks(seed: int) -> list[Check]:
    rng = make_rng(seed, _TAG_LEMMA)
    draws = levy_passage.sample_passage_time(levy_passage.HalfNormal(1.0), rng, LEMMA_N)
    ks = stats.ks_one_sample(stats.ecdf_build(draws), lambda x: analytic.arctan_cdf(x, 1.0), 0.01)
    return [
        Check("halfnormal_equivalence", halfnormal_equivalence_error(), 1e-8),
        Check("tonelli_cdf_halfnormal", tonelli_halfnormal_error(), 1e-8),
        Check("tonelli_pointmass_reflection", tonelli_pointmass_error(), 1e-9),
        Check("passage_density_normalization", passage_normalization_error(), 1e-10),
        Check("cdf_density_consistency", cdf_density_derivative_error(levy_passage.HalfNormal(1.0)), 1e-5),
        Check("lemma_sampler_ks", ks.distance, ks.bound),
    ]


# -- path -------------------------------------------------------------------

def _config(seed: int, workers: int, steps: int, **kw) -> simulate.PathConfig:
    return simulate.PathConfig(steps_per_unit_time=steps, seed=seed, workers=workers, **kw)


def path_checks(seed: int, workers: int = 1) -> list[Check]:
    out = simulate.simulate_exceedance(_config(seed, workers, PATH_STEPS), PATH_N, stream=_STREAM_PATH)
    law = lambda x: analytic.arctan_cdf(x, 1.0)  # noqa: E731
    ks = stats.censored_compare(out.s, law, out.horizon, 0.01)
    frac = float(out.censored.mean())
    below_r = float(np.mean(out.s <= 1.0))
    checks = [
        Check("path_censored_ks", ks.distance, 0.01),
        Check("path_censored_fraction", abs(frac - analytic.arctan_survival(10.0, 1.0)), 0.004),
        Check("path_median", abs(below_r - 0.5), 3 * math.sqrt(0.25 / PATH_N)),
    ]

    starts = {"b0_zero": 0.0, "b0_shifted": 100.0, "b0_gaussian": simulate.GaussianStart(0.0, 1.0)}
    samples = {}
    for (name, b0), stream in zip(starts.items(), _STREAM_B0):
        res = simulate.simulate_exceedance(_config(seed, workers, B0_STEPS, b0=b0), B0_N, stream=stream)
        samples[name] = (res.s, res.horizon)
    names = list(samples)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            (a, horizon), (b, _) = samples[names[i]], samples[names[j]]
            rep = stats.censored_two_sample(a, b, horizon, 0.01)
            checks.append(Check(f"{names[i]}_vs_{names[j]}", rep.distance, rep.bound))
    return checks


def interval_checks(seed: int, workers: int = 1) -> list[Check]:
    cfg = _config(seed, workers, INTERVAL_STEPS)
    a = simulate.simulate_interval_exceedance(2.0, 5.0, cfg, INTERVAL_N, stream=_STREAM_INTERVAL[0])
    b = simulate.simulate_interval_exceedance(7.0, 10.0, cfg, INTERVAL_N, stream=_STREAM_INTERVAL[1])
    zero = simulate.simulate_interval_exceedance(0.0, 1.0, cfg, INTERVAL_N, stream=_STREAM_INTERVAL[2])
    plain = simulate.simulate_exceedance(cfg, INTERVAL_N, stream=_STREAM_INTERVAL[3])
    exact = simulate.sample_exceedance_exact(3.0, make_rng(seed, _TAG_INTERVAL_EXACT), INTERVAL_N)
    exact = np.where(exact <= a.horizon, exact, np.inf)

    below = float(np.mean(a.s <= 3.0))
    translate = stats.censored_two_sample(a.s, b.s, a.horizon)
    vs_exact = stats.censored_two_sample(a.s, exact, a.horizon)
    r1_zero = stats.censored_two_sample(zero.s, plain.s, zero.horizon)
    argmax = stats.ks_two_sample(a.argmax_bucket.astype(float), b.argmax_bucket.astype(float))
    level = stats.ks_two_sample(a.m_r - a.b_start, b.m_r - b.b_start)
    return [
        Check("interval_median", abs(below - 0.5), 0.015),
        Check("interval_translation_ks", translate.distance, translate.bound),
        Check("interval_vs_exact_ks", vs_exact.distance, vs_exact.bound),
        Check("interval_r1_zero_ks", r1_zero.distance, r1_zero.bound),
        Check("interval_argmax_translation_ks", argmax.distance, argmax.bound),
        Check("interval_level_translation_ks", level.distance, level.bound),
    ]


def levy_checks(seed: int, workers: int = 1) -> list[Check]:
    cfg = _config(seed, workers, LEVY_STEPS)
    gap, increment = simulate.levy_identity_samples(cfg, LEVY_N, stream=_STREAM_LEVY)
    two = stats.ks_two_sample(gap, increment)
    one = stats.ks_one_sample(gap, lambda x: analytic.halfnormal_cdf(x, 1.0))

    base = simulate.simulate_maxima(_config(seed, workers, B0_STEPS), LEVY_SHIFT_N, stream=_STREAM_LEVY_SHIFT[0])
    shifted = simulate.simulate_maxima(
        _config(seed, workers, B0_STEPS, b0=100.0), LEVY_SHIFT_N, stream=_STREAM_LEVY_SHIFT[1]
    )
    shift = stats.ks_two_sample(base.gap, shifted.gap)
    return [
        Check("levy_two_sample_ks", two.distance, 1.628 * math.sqrt(2.0 / LEVY_N)),
        Check("gap_vs_halfnormal_ks", one.distance, one.bound),
        Check("gap_b0_shift_ks", shift.distance, shift.bound),
    ]


RUNNERS: dict[str, Callable[..., list[Check]]] = {
    "analytic": lambda seed, workers: analytic_checks(seed),
    "lemma": lambda seed, workers: lemma_checks(seed),
    "path": path_checks,
    "interval": interval_checks,
    "levy": levy_checks,
}


def run_suite(suite: str, seed: int, workers: int = 1) -> tuple[list[Check], bool]:
    if suite == "all":
        names = SUITES
    elif suite in RUNNERS:
        names = (suite,)
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES + ('all',)}")
    checks: list[Check] = []
    for name in names:
        checks.extend(RUNNERS[name](seed, workers))
    return checks, all(c.passed for c in checks)
