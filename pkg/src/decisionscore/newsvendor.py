"""Newsvendor: stock a units against demand xi, paying q per unit short and 1 - q per unit left over.

Optimal stock is a q-quantile of demand, so the decision only changes when q crosses
a cumulative probability level of F or of the estimate. Between levels both actions
are fixed and the ratio of the two (affine in q) losses is monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .core import (
    CrReport,
    NewsvendorRatio,
    NormalSpec,
    ScalarDistribution,
    competitive_ratio,
    rational_integral,
)

LEVEL_TOL = 1e-12
TIE_TOL = 1e-9
# Stand-in for the open ends q -> 0 and q -> 1 of the ratio domain.
EDGE_WITNESS = 1e-9


@dataclass(frozen=True)
class StockInterval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("lo must not exceed hi")

    def __contains__(self, a: float) -> bool:
        return self.lo <= a <= self.hi


def _check_q(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")


def shortage_overage(F: ScalarDistribution, a: float) -> tuple[float, float]:
    """(E[(xi - a)+], E[(a - xi)+]) under F."""
    v, p = F.values, F.probs
    return float(np.dot(p, np.maximum(v - a, 0.0))), float(np.dot(p, np.maximum(a - v, 0.0)))


def nv_reward(F: ScalarDistribution, q: float, a: float) -> float:
    _check_q(q)
    if a < 0:
        raise ValueError("stock must be non-negative")
    under, over = shortage_overage(F, a)
    return -(q * under + (1.0 - q) * over)


def optimal_stock(F: ScalarDistribution, q: float) -> StockInterval:
    """All maximizers of nv_reward: the atom whose CDF cell holds q, or the gap between two atoms."""
    _check_q(q)
    levels = F.cumulative_levels()
    i = int(np.searchsorted(levels, q - LEVEL_TOL, side="left"))
    i = min(i, F.size - 1)
    lo = float(F.values[i])
    if i < F.size - 1 and abs(levels[i] - q) <= LEVEL_TOL:
        return StockInterval(lo, float(F.values[i + 1]))
    return StockInterval(lo, lo)


def interior_levels(F: ScalarDistribution) -> list[float]:
    return [float(x) for x in F.cumulative_levels()]


def _ratio(r_star: float, r_hat: float) -> float:
    if r_hat >= r_star - TIE_TOL * max(1.0, abs(r_star)):
        return 1.0
    return competitive_ratio(r_star, r_hat)


def induced_cr(
    F: ScalarDistribution, F_hat: ScalarDistribution, q: float, adversarial: bool = True
) -> CrReport:
    """Ratio at one q. The estimate's action is the worse endpoint of its argmax
    interval when ``adversarial``, otherwise the left endpoint."""
    a_star = optimal_stock(F, q).lo
    interval = optimal_stock(F_hat, q)
    r_star = nv_reward(F, q, a_star)
    if adversarial:
        a_hat = min((interval.lo, interval.hi), key=lambda a: (nv_reward(F, q, a), a))
    else:
        a_hat = interval.lo
    r_hat = nv_reward(F, q, a_hat)
    return CrReport(_ratio(r_star, r_hat), NewsvendorRatio(q), a_star, a_hat, r_star, r_hat)


def candidate_ratios(F: ScalarDistribution, F_hat: ScalarDistribution, q_lo: float = 0.0, q_hi: float = 1.0) -> list[float]:
    """Cumulative levels of both distributions inside [q_lo, q_hi] plus the two ends.

    An end at 0 or 1 is replaced by a point ``EDGE_WITNESS`` inside the open interval,
    since the ratio can keep falling all the way to the boundary.
    """
    if not 0.0 <= q_lo < q_hi <= 1.0:
        raise ValueError("need 0 <= q_lo < q_hi <= 1")
    lo = q_lo if q_lo > 0 else EDGE_WITNESS
    hi = q_hi if q_hi < 1 else 1.0 - EDGE_WITNESS
    pts = {lo, hi}
    pts.update(x for x in interior_levels(F) + interior_levels(F_hat) if lo <= x <= hi)
    return sorted(pts)


def worstcr_newsvendor(
    F: ScalarDistribution, F_hat: ScalarDistribution, q_lo: float = 0.0, q_hi: float = 1.0
) -> CrReport:
    """Infimum over q of the ratio with adversarial ties in the estimated argmax."""
    if F.size == 1 and F_hat.size == 1:
        # Neither decision depends on q, so the ratio is constant.
        return induced_cr(F, F_hat, 0.5)
    best = None
    for q in candidate_ratios(F, F_hat, q_lo, q_hi):
        rep = induced_cr(F, F_hat, q, adversarial=True)
        if best is None or rep.ratio < best.ratio:
            best = rep
    return best


def segment_boundaries(F: ScalarDistribution, F_hat: ScalarDistribution, q_lo: float, q_hi: float) -> list[float]:
    pts = {q_lo, q_hi}
    pts.update(x for x in interior_levels(F) + interior_levels(F_hat) if q_lo < x < q_hi)
    return sorted(pts)


def avgcr_newsvendor(F: ScalarDistribution, F_hat: ScalarDistribution, q_lo: float, q_hi: float) -> float:
    """Mean ratio for q ~ Unif[q_lo, q_hi] with the left-endpoint tie rule."""
    if not 0.0 < q_lo < q_hi < 1.0:
        raise ValueError("need 0 < q_lo < q_hi < 1")
    pts = segment_boundaries(F, F_hat, q_lo, q_hi)
    total = 0.0
    for u, v in zip(pts, pts[1:]):
        mid = 0.5 * (u + v)
        a_star = optimal_stock(F, mid).lo
        a_hat = optimal_stock(F_hat, mid).lo
        if a_hat == a_star:
            total += v - u
            continue
        u_star, o_star = shortage_overage(F, a_star)
        u_hat, o_hat = shortage_overage(F, a_hat)
        # loss(q) = O + q (U - O); the ratio is loss* / loss^
        alpha, beta = o_star, u_star - o_star
        gamma, delta = o_hat, u_hat - o_hat
        if max(abs(gamma), abs(gamma + delta)) <= 1e-15:
            total += v - u
        elif max(abs(alpha), abs(alpha + beta)) <= 1e-15:
            continue
        else:
            total += rational_integral(alpha, beta, gamma, delta, u, v)
    return total / (q_hi - q_lo)


# --- analytic normal estimate -------------------------------------------------------


def normal_stock(spec: NormalSpec, q: float) -> float:
    """Optimal stock under a normal demand estimate censored at zero."""
    _check_q(q)
    return max(0.0, NormalDist(spec.mean, spec.std).inv_cdf(q))


def induced_cr_normal(F: ScalarDistribution, spec: NormalSpec, q: float) -> CrReport:
    a_star = optimal_stock(F, q).lo
    a_hat = normal_stock(spec, q)
    r_star, r_hat = nv_reward(F, q, a_star), nv_reward(F, q, a_hat)
    return CrReport(_ratio(r_star, r_hat), NewsvendorRatio(q), a_star, a_hat, r_star, r_hat)


def avgcr_newsvendor_normal(
    F: ScalarDistribution, spec: NormalSpec, q_lo: float, q_hi: float, nodes: int = 64
) -> float:
    """Mean ratio against an unrounded normal estimate, by Gauss-Legendre on each CDF cell of F."""
    if not 0.0 < q_lo < q_hi < 1.0:
        raise ValueError("need 0 < q_lo < q_hi < 1")
    x, w = np.polynomial.legendre.leggauss(nodes)
    pts = [q_lo] + [p for p in interior_levels(F) if q_lo < p < q_hi] + [q_hi]
    total = 0.0
    for u, v in zip(pts, pts[1:]):
        half = 0.5 * (v - u)
        qs = u + half * (x + 1.0)
        total += half * math.fsum(wi * induced_cr_normal(F, spec, qi).ratio for wi, qi in zip(w, qs))
    return total / (q_hi - q_lo)


def worstcr_newsvendor_normal(
    F: ScalarDistribution, spec: NormalSpec, q_lo: float = 0.001, q_hi: float = 0.999, points: int = 10_001
) -> CrReport:
    """Grid search; the estimate's stock moves continuously so there is no finite candidate set."""
    best = None
    for q in np.linspace(q_lo, q_hi, points).tolist():
        rep = induced_cr_normal(F, spec, q)
        if best is None or rep.ratio < best.ratio:
            best = rep
    return best
