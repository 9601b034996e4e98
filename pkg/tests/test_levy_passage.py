import math
from dataclasses import dataclass

import numpy as np
import pytest
from scipy import integrate, stats as sp_stats

from arctan_law import analytic, stats
from arctan_law.analytic import DomainError
from arctan_law.levy_passage import (
    HalfNormal,
    LevelDistribution,
    PassageTime,
    PointMass,
    passage_cdf,
    passage_density,
    passage_time_from_normal,
    sample_passage_time,
)


@dataclass(frozen=True)
class Uniform(LevelDistribution):
    lo: float
    hi: float

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def quantile(self, u):
        return self.lo + (self.hi - self.lo) * np.asarray(u)

    @property
    def support_hint(self):
        return self.lo, self.hi


@dataclass(frozen=True)
class Exponential(LevelDistribution):
    """No quantile on purpose: forces the doubling search for the upper limit."""

    rate: float

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0)), 0.0)

    def cdf(self, x):
        return -np.expm1(-self.rate * np.maximum(np.asarray(x, dtype=float), 0.0))

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)


@dataclass(frozen=True)
class TwoPoint(LevelDistribution):
    a: float
    b: float

    def density(self, x):
        raise TypeError("discrete")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (x >= self.a) + 0.5 * (x >= self.b)

    @property
    def support_hint(self):
        return self.a, self.b

    @property
    def breakpoints(self):
        return (self.a, self.b)


def expectation_density_oracle(t, level):
    """The random-level density by QUADPACK over the level's full support."""
    lo, hi = level.support_hint
    hi = hi if math.isfinite(hi) else np.inf
    value, _ = integrate.quad(
        lambda x: x * math.exp(-x * x / (2 * t)) * float(level.density(x)), lo, hi, epsabs=0, epsrel=1e-12, limit=400
    )
    return value / math.sqrt(2 * math.pi * t**3)


def test_pointmass_density_is_classical_one_level_density():
    assert passage_density(1.0, PointMass(1.0)) == pytest.approx(0.2419707245191433498, rel=1e-15)


def test_halfnormal_density_reproduces_closed_form_at_one():
    assert passage_density(1.0, HalfNormal(1.0)) == pytest.approx(1 / (2 * math.pi), rel=1e-12)


@pytest.mark.parametrize("r", [0.5, 1.0, 7.0])
def test_halfnormal_level_density_is_arctan_density(r):
    level = HalfNormal(r)
    grid = np.geomspace(0.01 * r, 100 * r, 200)
    got = np.array([passage_density(s, level) for s in grid])
    want = analytic.arctan_density(grid, r)
    assert np.max(np.abs(got - want) / want) < 1e-8


@pytest.mark.parametrize("r", [0.5, 1.0, 7.0])
def test_tonelli_cdf_matches_arctan_law(r):
    level = HalfNormal(r)
    grid = np.geomspace(0.01 * r, 100 * r, 200)
    got = np.array([passage_cdf(s, level) for s in grid])
    assert np.max(np.abs(got - analytic.arctan_cdf(grid, r))) < 1e-8


def test_cdf_examples():
    assert passage_cdf(1.0, PointMass(1.0)) == pytest.approx(0.31731050786291410283, abs=1e-12)
    assert passage_cdf(3.0, HalfNormal(1.0)) == pytest.approx(2 / 3, abs=1e-12)
    assert abs(passage_cdf(1e12, HalfNormal(1.0)) - 1.0) < 1e-6


@pytest.mark.parametrize("x", [0.05, 1.0, 3.0, 10.0])
def test_pointmass_cdf_matches_reflection(x):
    for t in np.geomspace(1e-3, 1e4, 40):
        assert abs(passage_cdf(t, PointMass(x)) - analytic.reflection_cdf(x, t)) < 1e-9


def test_passage_density_normalizes():
    level = HalfNormal(2.0)

    def integrand(theta):
        tan = math.tan(theta)
        t = 2.0 * tan * tan
        return passage_density(t, level) * 4.0 * tan / math.cos(theta) ** 2 if t > 0 else 0.0

    value, _ = integrate.quad(integrand, 0, math.pi / 2, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert value == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("level", [Uniform(0.5, 2.0), Exponential(1.5), HalfNormal(3.0)])
@pytest.mark.parametrize("t", [0.01, 0.3, 1.0, 20.0])
def test_density_against_independent_quadrature(level, t):
    assert passage_density(t, level) == pytest.approx(expectation_density_oracle(t, level), rel=1e-9)


@pytest.mark.parametrize("level", [Uniform(0.5, 2.0), Exponential(1.5), HalfNormal(1.0)])
def test_cdf_derivative_matches_density(level):
    for s in np.geomspace(0.01, 100, 30):
        h = 1e-4 * s
        fd = (passage_cdf(s + h, level) - passage_cdf(s - h, level)) / (2 * h)
        assert fd == pytest.approx(passage_density(s, level), rel=1e-5)


def test_discrete_level_cdf_is_mixture_of_reflections():
    level = TwoPoint(0.5, 2.0)
    for t in (0.1, 1.0, 10.0):
        expected = 0.5 * (analytic.reflection_cdf(0.5, t) + analytic.reflection_cdf(2.0, t))
        assert passage_cdf(t, level) == pytest.approx(expected, abs=1e-10)
    with pytest.raises(TypeError):
        passage_density(1.0, level)


def test_large_exponent_corner_keeps_precision():
    # x^2 / 2t runs from 703 to 722 over the support; reference from mpmath at 50 digits
    assert passage_density(0.01, Uniform(3.75, 3.8)) == pytest.approx(3.4564667911885244043e-304, rel=1e-10)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_rejects_bad_time(bad):
    with pytest.raises(DomainError):
        passage_density(bad, HalfNormal(1.0))
    with pytest.raises(DomainError):
        passage_cdf(bad, HalfNormal(1.0))


def test_domain_types():
    with pytest.raises(DomainError):
        PointMass(0.0)
    with pytest.raises(DomainError):
        HalfNormal(-1.0)
    with pytest.raises(DomainError):
        PassageTime(0.0)
    assert float(PassageTime(2.5)) == 2.5


def test_halfnormal_support_hint_is_far_quantile():
    lo, hi = HalfNormal(4.0).support_hint
    assert lo == 0.0
    assert 1.0 - analytic.halfnormal_cdf(hi, 4.0) == pytest.approx(1e-14, rel=1e-3)


# -- sampler -------------------------------------------------------------------

class _FixedNormal:
    def __init__(self, z):
        self.z = z

    def random(self, size=None):
        return 0.5

    def standard_normal(self, size=None):
        return self.z


def test_forced_unit_normal_gives_squared_level():
    assert passage_time_from_normal(1.7, 1.0) == pytest.approx(1.7**2)
    assert sample_passage_time(PointMass(1.7), _FixedNormal(1.0)) == pytest.approx(1.7**2)


def test_zero_normal_is_redrawn():
    class Once(_FixedNormal):
        calls = 0

        def standard_normal(self, size=None):
            self.calls += 1
            return 0.0 if self.calls == 1 else 2.0

    rng = Once(None)
    assert sample_passage_time(PointMass(2.0), rng) == pytest.approx(1.0)
    assert rng.calls == 2


def test_sampler_median_and_mass_below_3r():
    rng = np.random.default_rng(2024)
    t = sample_passage_time(HalfNormal(1.0), rng, 1_000_000)
    assert 0.99 <= np.median(t) <= 1.01
    assert abs(np.mean(t <= 3.0) - 2 / 3) < 0.002


@pytest.mark.parametrize("r", [0.5, 4.0])
def test_sampler_law_within_dkw(r):
    rng = np.random.default_rng(11)
    draws = sample_passage_time(HalfNormal(r), rng, 100_000)
    report = stats.ks_one_sample(stats.ecdf_build(draws), lambda x: analytic.arctan_cdf(x, r))
    assert report.passed


def test_sampler_for_generic_level_matches_quadrature_cdf():
    level = Exponential(2.0)
    rng = np.random.default_rng(5)
    draws = np.sort(sample_passage_time(level, rng, 20_000))
    # KS against the quadrature CDF on a subsample of evaluation points
    idx = np.linspace(0, draws.size - 1, 400).astype(int)
    f = np.array([passage_cdf(draws[i], level) for i in idx])
    ecdf = (idx + 1) / draws.size
    assert np.max(np.abs(ecdf - f)) < stats.dkw_bound(draws.size, 0.01)


def test_samples_are_positive():
    rng = np.random.default_rng(0)
    assert np.all(sample_passage_time(HalfNormal(1.0), rng, 10_000) > 0)
    assert np.all(HalfNormal(1.0).sample(rng, 10_000) > 0)


def test_monotone_coupling_under_stochastic_dominance():
    small, big = HalfNormal(1.0), HalfNormal(2.5)
    ta = sample_passage_time(small, np.random.default_rng(99), 50_000)
    tb = sample_passage_time(big, np.random.default_rng(99), 50_000)
    assert np.all(ta <= tb)


def test_scipy_halfnormal_agrees_with_level():
    x = np.linspace(0, 6, 50)
    np.testing.assert_allclose(HalfNormal(2.0).cdf(x), sp_stats.halfnorm(scale=math.sqrt(2.0)).cdf(x), atol=1e-15)
