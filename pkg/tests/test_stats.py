import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sp_stats

from arctan_law import analytic
from arctan_law.simulate import sample_exceedance_exact
from arctan_law.stats import (
    censored_compare,
    censored_two_sample,
    dkw_bound,
    ecdf_build,
    ks_one_sample,
    ks_two_sample,
    two_sample_bound,
)

finite_samples = st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=60)


def test_ecdf_examples():
    assert ecdf_build([3, 1, 2])(2) == pytest.approx(2 / 3)
    single = ecdf_build([5])
    assert single(4.999) == 0.0
    assert single(5) == 1.0


def test_ecdf_uniform_midpoint():
    u = np.random.default_rng(3).random(1_000_000)
    assert abs(ecdf_build(u)(0.5) - 0.5) < 0.0016


@pytest.mark.parametrize("bad", [[], [1.0, math.nan], [math.inf]])
def test_ecdf_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        ecdf_build(bad)


def test_ecdf_is_immutable():
    e = ecdf_build([2.0, 1.0])
    with pytest.raises(ValueError):
        e.sorted_samples[0] = 5.0


@given(finite_samples)
def test_ecdf_monotone_right_continuous_with_lattice_range(samples):
    e = ecdf_build(samples)
    grid = np.sort(np.concatenate([e.sorted_samples, e.sorted_samples - 1e-3, e.sorted_samples + 1e-3]))
    vals = e(grid)
    assert np.all(np.diff(vals) >= 0)
    np.testing.assert_allclose(vals * e.n, np.round(vals * e.n), atol=1e-9)
    # value at an atom equals the right limit
    for x in e.sorted_samples:
        assert e(x) == e(np.nextafter(x, np.inf))
        assert e.left_limit(x) < e(x)


def test_stratified_sample_distance_is_half_step():
    n = 1000
    u = (np.arange(1, n + 1) - 0.5) / n
    x = analytic.arctan_quantile(u, 2.0)
    rep = ks_one_sample(ecdf_build(x), lambda s: analytic.arctan_cdf(s, 2.0))
    assert rep.distance == pytest.approx(1 / (2 * n), rel=1e-9)


def test_dkw_bounds():
    # published to ~1e-6; the formula values are 0.0051470 and 0.0016276
    assert dkw_bound(100_000, 0.01) == pytest.approx(0.0051475, abs=1e-6)
    assert dkw_bound(1_000_000, 0.01) == pytest.approx(0.0016278, abs=1e-6)
    assert math.sqrt(math.log(200) / 2e5) == dkw_bound(100_000, 0.01)


@given(st.integers(1, 10**8))
def test_dkw_doubling(n):
    assert dkw_bound(2 * n) == pytest.approx(dkw_bound(n) / math.sqrt(2), rel=1e-14)


def test_two_sample_bound():
    assert two_sample_bound(100_000, 100_000, 0.01) == pytest.approx(0.00728, abs=5e-6)
    assert two_sample_bound(1, 1, 0.01) / math.sqrt(2) == pytest.approx(1.628, abs=5e-4)
    with pytest.raises(ValueError):
        two_sample_bound(10, 10, 1.5)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_one_sample_matches_scipy(seed):
    x = np.random.default_rng(seed).standard_normal(500)
    rep = ks_one_sample(ecdf_build(x), sp_stats.norm.cdf)
    assert rep.distance == pytest.approx(sp_stats.kstest(x, "norm").statistic, abs=1e-14)


def test_one_sample_handles_ties():
    x = np.array([1.0, 1.0, 1.0, 2.0])
    rep = ks_one_sample(ecdf_build(x), lambda s: np.clip(np.asarray(s) / 3.0, 0, 1))
    # F_n jumps 0 -> 3/4 at 1 where F = 1/3
    assert rep.distance == pytest.approx(0.75 - 1 / 3)


@given(st.lists(st.floats(0.01, 100), min_size=2, max_size=50))
def test_one_sample_invariant_under_monotone_map(samples):
    law = lambda s: analytic.arctan_cdf(s, 1.0)  # noqa: E731
    x = np.array(samples)
    plain = ks_one_sample(ecdf_build(x), law).distance
    cubed = ks_one_sample(ecdf_build(x**3), lambda y: law(np.cbrt(y))).distance
    assert cubed == pytest.approx(plain, abs=1e-12)


def test_two_sample_examples():
    a = ecdf_build([1.0, 2.0, 5.0])
    assert ks_two_sample(a, a).distance == 0.0
    assert ks_two_sample(ecdf_build([1, 2]), ecdf_build([3, 4])).distance == 1.0


# scipy divides by zero computing its p-value for one-element samples; only its statistic is used
@pytest.mark.filterwarnings("ignore:divide by zero:RuntimeWarning")
@settings(max_examples=50)
@given(finite_samples, finite_samples)
def test_two_sample_symmetric_and_matches_scipy(a, b):
    d_ab = ks_two_sample(ecdf_build(a), ecdf_build(b)).distance
    d_ba = ks_two_sample(ecdf_build(b), ecdf_build(a)).distance
    assert d_ab == d_ba
    assert d_ab == pytest.approx(sp_stats.ks_2samp(a, b, method="asymp").statistic, abs=1e-12)


def test_report_pass_flag():
    rep = ks_one_sample(ecdf_build([0.5]), lambda s: np.asarray(s))
    assert rep.passed == (rep.distance < rep.bound)
    d = rep.to_dict()
    assert set(d) == {"distance", "n", "bound", "alpha", "pass"}


def test_censored_without_censoring_reduces_to_one_sample():
    x = sample_exceedance_exact(1.0, np.random.default_rng(8), 5000)
    law = lambda s: analytic.arctan_cdf(s, 1.0)  # noqa: E731
    horizon = float(x.max()) * 1e6
    plain = ks_one_sample(ecdf_build(x), law)
    cens = censored_compare(x, law, horizon)
    assert cens.distance == pytest.approx(plain.distance, abs=1e-6)
    assert cens.bound == plain.bound


def test_all_censored_distance_is_cdf_at_horizon():
    law = lambda s: analytic.arctan_cdf(s, 1.0)  # noqa: E731
    rep = censored_compare(np.full(10, np.inf), law, 10.0)
    assert rep.distance == pytest.approx(analytic.arctan_cdf(10.0, 1.0))
    rep = censored_compare([], law, 10.0, n_censored=7)
    assert rep.n == 7 and rep.distance == pytest.approx(analytic.arctan_cdf(10.0))


def test_censored_exact_draws_pass():
    x = sample_exceedance_exact(1.0, np.random.default_rng(21), 1_000_000)
    x = np.where(x <= 10.0, x, np.inf)
    rep = censored_compare(x, lambda s: analytic.arctan_cdf(s, 1.0), 10.0, 0.01)
    assert rep.n == 1_000_000
    assert rep.passed


def test_censored_rate_error_is_visible():
    # drop the censored paths entirely: the sub-distribution overshoots at the horizon
    x = sample_exceedance_exact(1.0, np.random.default_rng(4), 20_000)
    x = x[x <= 10.0]
    rep = censored_compare(x, lambda s: analytic.arctan_cdf(s, 1.0), 10.0)
    assert rep.distance > 0.15


def test_censored_validation():
    law = lambda s: analytic.arctan_cdf(s, 1.0)  # noqa: E731
    with pytest.raises(ValueError):
        censored_compare([1.0], law, 0.0)
    with pytest.raises(ValueError):
        censored_compare([11.0], law, 10.0)
    with pytest.raises(ValueError):
        censored_compare([math.nan], law, 10.0)


def test_censored_two_sample():
    a = np.array([1.0, 2.0, np.inf, np.inf])
    b = np.array([1.5, np.inf, np.inf, np.inf])
    rep = censored_two_sample(a, b, 10.0)
    assert rep.distance == pytest.approx(0.25)
    assert censored_two_sample(a, a, 10.0).distance == 0.0
