"""Decision-agnostic distances between distributions and persona-level prediction errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import RankingDistribution, ScalarDistribution, validate_ranking

# Replicated assignment problems above this size go to network simplex instead.
MAX_ASSIGNMENT = 2000
MAX_DENOMINATOR = 10**6


class LengthMismatch(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


def _pair_indicators(orders: np.ndarray) -> np.ndarray:
    """Row k holds [pos(i) < pos(j)] for every item pair i < j of ranking k."""
    orders = np.atleast_2d(orders)
    n = orders.shape[1]
    pos = np.empty_like(orders)
    rows = np.arange(orders.shape[0])[:, None]
    pos[rows, orders] = np.arange(n)[None, :]
    iu, ju = np.triu_indices(n, k=1)
    return (pos[:, iu] < pos[:, ju]).astype(np.int64)


def kendall_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Raw Kendall distances between every ranking in A and every ranking in B."""
    pa, pb = _pair_indicators(A), _pair_indicators(B)
    return pa.sum(1)[:, None] + pb.sum(1)[None, :] - 2 * pa @ pb.T


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def kendall_tau(x: Sequence[int], y: Sequence[int], normalized: bool = False) -> float:
    if len(x) != len(y):
        raise LengthMismatch(f"rankings of length {len(x)} and {len(y)}")
    n = len(x)
    x, y = validate_ranking(x, n), validate_ranking(y, n)
    raw = int(kendall_matrix(np.array([x]), np.array([y]))[0, 0])
    if not normalized:
        return float(raw)
    return raw / _pairs(n) if n > 1 else 0.0


def _cdf_steps(F: ScalarDistribution, G: ScalarDistribution):
    pts = np.union1d(F.values, G.values)
    fc = np.cumsum(F.probs)[np.searchsorted(F.values, pts, side="right") - 1]
    fc[np.searchsorted(F.values, pts, side="right") == 0] = 0.0
    gc = np.cumsum(G.probs)[np.searchsorted(G.values, pts, side="right") - 1]
    gc[np.searchsorted(G.values, pts, side="right") == 0] = 0.0
    return pts, fc, gc


def wasserstein_scalar(F: ScalarDistribution, G: ScalarDistribution) -> float:
    """Area between the two CDFs."""
    pts, fc, gc = _cdf_steps(F, G)
    return float(np.dot(np.abs(fc - gc)[:-1], np.diff(pts)))


def kolmogorov(F: ScalarDistribution, G: ScalarDistribution) -> float:
    pts, fc, gc = _cdf_steps(F, G)
    return float(min(1.0, np.abs(fc - gc).max()))


def _integer_masses(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Scale both mass vectors to integers over a common denominator."""
    fr_p = [Fraction(float(x)).limit_denominator(MAX_DENOMINATOR) for x in p]
    fr_q = [Fraction(float(x)).limit_denominator(MAX_DENOMINATOR) for x in q]
    denom = 1
    for f in fr_p + fr_q:
        denom = math.lcm(denom, f.denominator)
    ip = np.array([int(f * denom) for f in fr_p], dtype=np.int64)
    iq = np.array([int(f * denom) for f in fr_q], dtype=np.int64)
    # Rounding noise can leave totals a unit or two apart; settle it on the largest atom.
    ip[np.argmax(ip)] += denom - ip.sum()
    iq[np.argmax(iq)] += denom - iq.sum()
    return ip, iq, denom


def transport_cost(cost: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    """Exact optimal transport cost for an integer cost matrix and rational masses."""
    ip, iq, denom = _integer_masses(p, q)
    if denom <= MAX_ASSIGNMENT:
        rows = np.repeat(np.arange(len(ip)), ip)
        cols = np.repeat(np.arange(len(iq)), iq)
        sub = cost[np.ix_(rows, cols)]
        r, c = linear_sum_assignment(sub)
        return float(sub[r, c].sum()) / denom
    G = nx.DiGraph()
    for i, m in enumerate(ip):
        G.add_node(("s", i), demand=-int(m))
    for j, m in enumerate(iq):
        G.add_node(("t", j), demand=int(m))
    for i in range(len(ip)):
        for j in range(len(iq)):
            G.add_edge(("s", i), ("t", j), weight=int(cost[i, j]))
    total, _ = nx.network_simplex(G)
    return total / denom


def wasserstein_kendall(F: RankingDistribution, G: RankingDistribution, normalized: bool = True) -> float:
    """Optimal transport between ranking distributions under the Kendall distance."""
    if F.n != G.n:
        raise DimensionMismatch(f"rankings over {F.n} and {G.n} items")
    cost = kendall_matrix(F.rankings, G.rankings)
    value = transport_cost(cost, F.probs, G.probs)
    if normalized:
        return value / _pairs(F.n) if F.n > 1 else 0.0
    return value


Outcome = Union[float, Sequence[int]]


@dataclass(frozen=True)
class PairedPredictions:
    """Per-persona truths and predictions, aligned by index."""

    truths: tuple
    predictions: tuple

    def __init__(self, truths: Sequence[Outcome], predictions: Sequence[Outcome]):
        if len(truths) != len(predictions):
            raise LengthMismatch("truths and predictions differ in length")
        if not truths:
            raise EmptyInput("no personas")
        object.__setattr__(self, "truths", tuple(_freeze(t) for t in truths))
        object.__setattr__(self, "predictions", tuple(_freeze(p) for p in predictions))
        kinds = {isinstance(x, tuple) for x in self.truths + self.predictions}
        if len(kinds) > 1:
            raise DimensionMismatch("mixed rankings and scalars")
        if self.is_ranking and len({len(x) for x in self.truths + self.predictions}) > 1:
            raise DimensionMismatch("rankings of different lengths")

    @property
    def is_ranking(self) -> bool:
        return isinstance(self.truths[0], tuple)

    def __len__(self) -> int:
        return len(self.truths)


def _freeze(x):
    if isinstance(x, (int, float, np.integer, np.floating)):
        return float(x)
    return tuple(int(v) for v in x)


def _cross_distances(pairs: PairedPredictions) -> np.ndarray:
    if pairs.is_ranking:
        n = len(pairs.truths[0])
        raw = kendall_matrix(np.array(pairs.truths), np.array(pairs.predictions))
        return raw / _pairs(n) if n > 1 else np.zeros_like(raw, dtype=float)
    t = np.array(pairs.truths)
    p = np.array(pairs.predictions)
    return np.abs(t[:, None] - p[None, :])


def persona_mae(pairs: PairedPredictions) -> float:
    """Mean distance between each persona's truth and its own prediction."""
    if pairs.is_ranking:
        n = len(pairs.truths[0])
        ind_t = _pair_indicators(np.array(pairs.truths))
        ind_p = _pair_indicators(np.array(pairs.predictions))
        raw = (ind_t != ind_p).sum(axis=1)
        return float(raw.mean() / _pairs(n)) if n > 1 else 0.0
    t, p = np.array(pairs.truths), np.array(pairs.predictions)
    return float(np.abs(t - p).mean())


def shuffled_mae(pairs: PairedPredictions) -> float:
    """Mean distance over all m^2 truth/prediction pairs, i.e. against a random persona's prediction."""
    return float(_cross_distances(pairs).mean())
