import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decisionscore import metrics
from decisionscore.core import RankingDistribution, ScalarDistribution
from decisionscore.metrics import (
    DimensionMismatch,
    EmptyInput,
    LengthMismatch,
    PairedPredictions,
    kendall_tau,
    kolmogorov,
    persona_mae,
    shuffled_mae,
    transport_cost,
    wasserstein_kendall,
    wasserstein_scalar,
)

U = ScalarDistribution.uniform


def brute_kendall(x, y):
    px = {item: i for i, item in enumerate(x)}
    py = {item: i for i, item in enumerate(y)}
    return sum(
        (px[a] < px[b]) != (py[a] < py[b]) for a, b in itertools.combinations(range(len(x)), 2)
    )


def exact_ot(cost, p, q):
    """Minimum over all vertices of the transportation polytope, in exact arithmetic."""
    p = [Fraction(x).limit_denominator(1000) for x in p]
    q = [Fraction(x).limit_denominator(1000) for x in q]
    a, b = len(p), len(q)
    cells = [(i, j) for i in range(a) for j in range(b)]
    best = None
    for basis in itertools.combinations(cells, a + b - 1):
        # Solve the marginal equations restricted to the chosen cells.
        rows = []
        for i in range(a):
            rows.append([Fraction(int(c[0] == i)) for c in basis] + [p[i]])
        for j in range(b):
            rows.append([Fraction(int(c[1] == j)) for c in basis] + [q[j]])
        x = _solve(rows, len(basis))
        if x is None or any(v < 0 for v in x):
            continue
        val = sum(v * int(cost[c]) for v, c in zip(x, basis))
        best = val if best is None else min(best, val)
    return best


def _solve(rows, k):
    rows = [r[:] for r in rows]
    piv_cols, r = [], 0
    for col in range(k):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            return None
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [v / rows[r][col] for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [u - f * v for u, v in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    return [rows[i][-1] for i in range(k)]


# --- Kendall ---------------------------------------------------------------------------


def test_kendall_examples():
    assert kendall_tau((0, 1, 2), (0, 1, 2)) == 0
    assert kendall_tau((0, 1, 2), (2, 1, 0)) == 3
    assert kendall_tau((0, 1, 2), (2, 1, 0), normalized=True) == 1.0
    assert kendall_tau((0, 1, 2), (1, 0, 2)) == 1
    with pytest.raises(LengthMismatch):
        kendall_tau((0, 1), (0, 1, 2))


@settings(max_examples=200, deadline=None)
@given(st.permutations(range(7)), st.permutations(range(7)))
def test_kendall_matches_pair_count(x, y):
    assert kendall_tau(x, y) == brute_kendall(x, y)
    assert kendall_tau(x, y) == kendall_tau(y, x)


# --- scalar distances --------------------------------------------------------------------


def test_wasserstein_scalar_examples():
    assert wasserstein_scalar(U([0]), U([1])) == 1
    assert wasserstein_scalar(U([0, 2]), U([1, 3])) == 1
    F = U([3, 7, 8])
    assert wasserstein_scalar(F, F) == 0


def test_wasserstein_scalar_sorted_samples():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = int(rng.integers(1, 30))
        a, b = rng.uniform(0, 100, m), rng.uniform(0, 100, m)
        expected = np.abs(np.sort(a) - np.sort(b)).mean()
        got = wasserstein_scalar(ScalarDistribution.empirical(a), ScalarDistribution.empirical(b))
        assert got == pytest.approx(expected, abs=1e-12)


def test_kolmogorov_examples():
    assert kolmogorov(U([5, 10]), U([10])) == 0.5
    assert kolmogorov(U([5, 10]), U([5, 10])) == 0
    assert kolmogorov(U([0]), U([1])) == 1


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(0, 20), min_size=1, max_size=10),
    st.lists(st.integers(0, 20), min_size=1, max_size=10),
)
def test_scalar_distance_properties(a, b):
    F, G = ScalarDistribution.empirical(a), ScalarDistribution.empirical(b)
    assert wasserstein_scalar(F, G) >= 0
    assert wasserstein_scalar(F, G) == pytest.approx(wasserstein_scalar(G, F))
    assert 0 <= kolmogorov(F, G) <= 1
    assert kolmogorov(F, G) == kolmogorov(G, F)
    grid = np.arange(-1, 22, 0.5)
    brute = max(
        abs(sum(x <= z for x in a) / len(a) - sum(x <= z for x in b) / len(b)) for z in grid
    )
    assert kolmogorov(F, G) == pytest.approx(brute)


# --- ranking OT ---------------------------------------------------------------------------


def test_wasserstein_kendall_examples():
    F = RankingDistribution.empirical([(0, 1, 2), (2, 0, 1)])
    assert wasserstein_kendall(F, F) == 0
    a = RankingDistribution.point_mass((0, 1, 2))
    b = RankingDistribution.point_mass((2, 1, 0))
    assert wasserstein_kendall(a, b, normalized=True) == 1.0
    swap = RankingDistribution.empirical([(0, 1), (1, 0)])
    assert wasserstein_kendall(swap, RankingDistribution.point_mass((0, 1)), normalized=False) == 0.5
    with pytest.raises(DimensionMismatch):
        wasserstein_kendall(a, swap)


def random_rank_dist(rng, n, k):
    rankings = [tuple(rng.permutation(n)) for _ in range(k)]
    weights = rng.integers(1, 6, size=k)
    return RankingDistribution.from_atoms(rankings, weights / weights.sum())


@pytest.mark.parametrize("seed", range(25))
def test_wasserstein_kendall_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    F = RankingDistribution.empirical([rng.permutation(n) for _ in range(int(rng.integers(1, 5)))], n=n)
    G = RankingDistribution.empirical([rng.permutation(n) for _ in range(int(rng.integers(1, 5)))], n=n)
    cost = metrics.kendall_matrix(F.rankings, G.rankings)
    expected = exact_ot(cost, F.probs, G.probs)
    assert wasserstein_kendall(F, G, normalized=False) == pytest.approx(float(expected), abs=1e-12)
    assert wasserstein_kendall(G, F, normalized=False) == pytest.approx(float(expected), abs=1e-12)


def test_flow_and_assignment_routes_agree(monkeypatch):
    rng = np.random.default_rng(3)
    for _ in range(10):
        F = RankingDistribution.empirical([rng.permutation(5) for _ in range(12)], n=5)
        G = RankingDistribution.empirical([rng.permutation(5) for _ in range(9)], n=5)
        cost = metrics.kendall_matrix(F.rankings, G.rankings)
        via_assignment = transport_cost(cost, F.probs, G.probs)
        monkeypatch.setattr(metrics, "MAX_ASSIGNMENT", 0)
        via_flow = transport_cost(cost, F.probs, G.probs)
        monkeypatch.undo()
        assert via_assignment == pytest.approx(via_flow, abs=1e-12)


def test_wasserstein_kendall_weighted_atoms():
    rng = np.random.default_rng(11)
    for _ in range(5):
        F, G = random_rank_dist(rng, 4, 3), random_rank_dist(rng, 4, 4)
        cost = metrics.kendall_matrix(F.rankings, G.rankings)
        expected = exact_ot(cost, F.probs, G.probs)
        assert wasserstein_kendall(F, G, normalized=False) == pytest.approx(float(expected), abs=1e-9)


# --- persona metrics ---------------------------------------------------------------------------


def test_persona_examples():
    assert persona_mae(PairedPredictions([10, 20], [12, 18])) == 2
    pairs = PairedPredictions([0, 10], [0, 10])
    assert persona_mae(pairs) == 0
    assert shuffled_mae(pairs) == 5
    same = PairedPredictions([(0, 1, 2)] * 3, [(2, 1, 0)] * 3)
    assert persona_mae(same) == shuffled_mae(same) == 1.0
    with pytest.raises(EmptyInput):
        PairedPredictions([], [])
    with pytest.raises(LengthMismatch):
        PairedPredictions([1.0], [1.0, 2.0])


def test_shuffled_invariant_to_prediction_order():
    rng = np.random.default_rng(5)
    truths = [tuple(rng.permutation(6)) for _ in range(20)]
    preds = [tuple(rng.permutation(6)) for _ in range(20)]
    perm = rng.permutation(20)
    a = PairedPredictions(truths, preds)
    b = PairedPredictions(truths, [preds[i] for i in perm])
    assert shuffled_mae(a) == pytest.approx(shuffled_mae(b))
    assert persona_mae(a) != pytest.approx(persona_mae(b))
    brute = np.mean([kendall_tau(t, p, normalized=True) for t in truths for p in preds])
    assert shuffled_mae(a) == pytest.approx(brute)


def test_random_rankings_average_one_half():
    n, m = 10, 600
    rng = np.random.default_rng(2024)
    truths = [tuple(rng.permutation(n)) for _ in range(m)]
    preds = [tuple(rng.permutation(n)) for _ in range(m)]
    # Kendall distance of two random permutations: variance n(n-1)(2n+5)/72 raw.
    sd = np.sqrt(n * (n - 1) * (2 * n + 5) / 72) / (n * (n - 1) / 2)
    got = persona_mae(PairedPredictions(truths, preds))
    assert abs(got - 0.5) <= 3 * sd / np.sqrt(m)
    assert abs(0.497 - 0.5) <= 3 * sd / np.sqrt(m)
