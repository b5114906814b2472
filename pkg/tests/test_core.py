import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decisionscore.core import (
    CrReport,
    DistributionError,
    NormalSpec,
    RankingDistribution,
    ScalarDistribution,
    cdf,
    competitive_ratio,
    discretize_normal,
    survival,
)


def normal_quantile(p, mu=0.0, sigma=1.0):
    # Independent high-precision quantile: mu + sigma * sqrt(2) * erfinv(2p - 1).
    mpmath.mp.dps = 40
    return float(mu + sigma * mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(p) - 1))


U510 = ScalarDistribution.uniform([5, 10])


@pytest.mark.parametrize("a,expected", [(5, 1.0), (7, 0.5), (10.0001, 0.0), (10, 0.5), (0, 1.0)])
def test_survival(a, expected):
    assert survival(U510, a) == expected


@pytest.mark.parametrize("z,expected", [(5, 0.5), (4.99, 0.0), (10, 1.0), (7, 0.5)])
def test_cdf(z, expected):
    assert cdf(U510, z) == expected


def test_survival_of_infinite_price():
    assert survival(U510, math.inf) == 0.0


def test_duplicates_merge_and_sort():
    d = ScalarDistribution.empirical([10, 5, 5])
    assert d.atoms() == [(5.0, pytest.approx(2 / 3)), (10.0, pytest.approx(1 / 3))]


def test_probabilities_must_sum_to_one():
    with pytest.raises(DistributionError):
        ScalarDistribution.from_atoms([1, 2], [0.5, 0.4])
    with pytest.raises(DistributionError):
        ScalarDistribution.from_atoms([-1, 2], [0.5, 0.5])


def test_ranking_distribution_validates_permutations():
    with pytest.raises(DistributionError):
        RankingDistribution.empirical([(0, 0, 1)])
    d = RankingDistribution.empirical([(0, 1), (0, 1), (1, 0)])
    assert d.atoms() == [((0, 1), pytest.approx(2 / 3)), ((1, 0), pytest.approx(1 / 3))]


@given(
    st.lists(st.integers(0, 30), min_size=1, max_size=12),
    st.floats(-5, 40, allow_nan=False),
)
def test_survival_cdf_complement(samples, a):
    d = ScalarDistribution.empirical(samples)
    below = d.values[d.values < a]
    lower = below[-1] if below.size else -1.0
    a_minus = (lower + a) / 2 if below.size else a - 1.0
    assert survival(d, a) + cdf(d, a_minus) == pytest.approx(1.0, abs=1e-12)


@given(st.lists(st.integers(0, 30), min_size=1, max_size=12))
def test_monotone(samples):
    d = ScalarDistribution.empirical(samples)
    grid = np.linspace(-1, 32, 200)
    s = [survival(d, x) for x in grid]
    c = [cdf(d, x) for x in grid]
    assert all(x >= y for x, y in zip(s, s[1:]))
    assert all(x <= y for x, y in zip(c, c[1:]))


def test_discretize_standard_normal_two_atoms():
    d = discretize_normal(NormalSpec(0.0, 1.0), 2)
    assert d.values[0] == 0.0
    assert d.values[1] == pytest.approx(normal_quantile(0.75), abs=1e-4)
    assert d.values[1] == pytest.approx(0.6745, abs=1e-4)
    np.testing.assert_allclose(d.probs, [0.5, 0.5])


def test_discretize_degenerate_std_merges():
    d = discretize_normal(NormalSpec(10.0, 1e-9), 5)
    assert d.size == 1
    assert d.values[0] == pytest.approx(10.0, abs=1e-8)
    assert d.probs[0] == 1.0


def test_discretize_four_quantiles():
    d = discretize_normal(NormalSpec(100.0, 10.0), 4)
    expected = [normal_quantile(p, 100, 10) for p in (0.125, 0.375, 0.625, 0.875)]
    np.testing.assert_allclose(d.values, expected, atol=1e-2)
    np.testing.assert_allclose(d.values, [88.49, 96.81, 103.19, 111.51], atol=1e-2)


def test_discretize_mean_matches_censored_monte_carlo():
    spec = NormalSpec(1.0, 2.0)
    d = discretize_normal(spec, 100_000)
    rng = np.random.default_rng(7)
    draws = np.maximum(rng.normal(spec.mean, spec.std, size=10_000_000), 0.0)
    assert abs(d.mean() - draws.mean()) < 1e-2


def test_normal_spec_rejects_non_positive_std():
    with pytest.raises(DistributionError):
        NormalSpec(1.0, 0.0)


@pytest.mark.parametrize(
    "star,hat,expected",
    [(10, 5, 0.5), (0, 0, 1.0), (5, 0, 0.0), (0, -3, 0.0), (-2.5, -7.5, 1 / 3)],
)
def test_competitive_ratio_zero_handling(star, hat, expected):
    assert competitive_ratio(star, hat) == pytest.approx(expected)


def test_cr_report_is_plain_data():
    rep = CrReport(0.5, None, 1, 2)
    assert rep.ratio == 0.5


def test_json_round_trip():
    d = ScalarDistribution.empirical([3, 1, 4, 1, 5])
    assert ScalarDistribution.from_json(d.to_json()) == d
    r = RankingDistribution.empirical([(2, 0, 1), (0, 1, 2)])
    assert RankingDistribution.from_json(r.to_json()) == r
