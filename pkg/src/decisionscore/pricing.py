"""Posted pricing: the seller picks a price a and earns (a - c) Pr[WTP >= a].

Every price in the support (plus the no-sale price ``inf``) defines a line in the
cost c, so optimal profit is the upper envelope of those lines. Between envelope
breakpoints both the true and the estimated winner are fixed and the ratio of two
affine functions is monotone, which keeps the worst-case search finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    CrReport,
    PricingCost,
    ScalarDistribution,
    competitive_ratio,
    rational_integral,
    survival,
)

INF = math.inf
TIE_TOL = 1e-9


@dataclass(frozen=True)
class AffineLine:
    """Profit of ``action`` as a function of cost: intercept + slope * c."""

    slope: float
    intercept: float
    action: float

    def __call__(self, c: float) -> float:
        return self.intercept + self.slope * c


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    line: AffineLine


def pricing_reward(F: ScalarDistribution, c: float, a: float) -> float:
    if c < 0:
        raise ValueError("cost must be non-negative")
    if a == INF:
        return 0.0
    return (a - c) * survival(F, a)


def price_lines(F: ScalarDistribution) -> list[AffineLine]:
    """One line per support price and one flat zero line for not selling."""
    lines = []
    for a in F.values.tolist():
        s = survival(F, a)
        lines.append(AffineLine(-s, a * s, a))
    lines.append(AffineLine(0.0, 0.0, INF))
    return lines


def _tol(x: float) -> float:
    return TIE_TOL * max(1.0, abs(x))


def _argmax_lines(lines: Sequence[AffineLine], c: float) -> list[AffineLine]:
    vals = [ln(c) for ln in lines]
    top = max(vals)
    return [ln for ln, v in zip(lines, vals) if v >= top - _tol(top)]


def optimal_prices(F: ScalarDistribution, c: float) -> set[float]:
    """Full argmax over the support and ``inf``."""
    if c < 0:
        raise ValueError("cost must be non-negative")
    return {ln.action for ln in _argmax_lines(price_lines(F), c)}


def upper_envelope(lines: Sequence[AffineLine], c_min: float, c_max: float) -> list[Segment]:
    """Exact upper envelope of ``lines`` on [c_min, c_max] as consecutive segments.

    Starting from the winner at c_min (ties go to the line that stays on top, i.e.
    the larger slope, then the larger intercept), walk right to the nearest point
    where a steeper-rising line overtakes it.
    """
    if not c_min < c_max:
        raise ValueError("need c_min < c_max")
    if not lines:
        raise ValueError("need at least one line")
    # Equal slopes: only the largest intercept can ever win.
    by_slope: dict[float, AffineLine] = {}
    for ln in lines:
        cur = by_slope.get(ln.slope)
        if cur is None or ln.intercept > cur.intercept:
            by_slope[ln.slope] = ln
    pool = list(by_slope.values())

    def winner_at(c: float, candidates: Sequence[AffineLine]) -> AffineLine:
        top = max(ln(c) for ln in candidates)
        tied = [ln for ln in candidates if ln(c) >= top - _tol(top)]
        return max(tied, key=lambda ln: (ln.slope, ln.intercept))

    segments = []
    c, cur = c_min, winner_at(c_min, pool)
    while True:
        nxt, nxt_c = None, c_max
        for ln in pool:
            if ln.slope <= cur.slope:
                continue
            x = (cur.intercept - ln.intercept) / (ln.slope - cur.slope)
            if x <= c:
                continue
            if x < nxt_c or (x == nxt_c and nxt is not None and ln.slope > nxt.slope):
                nxt, nxt_c = ln, x
        if nxt is None or nxt_c >= c_max:
            segments.append(Segment(c, c_max, cur))
            return segments
        segments.append(Segment(c, nxt_c, cur))
        # Several lines may cross at the same point; the steepest riser continues.
        crossing = [ln for ln in pool if ln.slope > cur.slope and abs(ln(nxt_c) - cur(nxt_c)) <= _tol(cur(nxt_c))]
        c, cur = nxt_c, max(crossing + [nxt], key=lambda ln: (ln.slope, ln.intercept))


def envelope_breakpoints(segments: Sequence[Segment]) -> list[float]:
    return [s.lo for s in segments[1:]]


def _true_profit(F: ScalarDistribution, c: float, a: float) -> float:
    return 0.0 if a == INF else (a - c) * survival(F, a)


def _evaluate(F, F_hat, lines, lines_hat, c: float, adversarial: bool) -> CrReport:
    star = max(_argmax_lines(lines, c), key=lambda ln: -ln.action)
    tied = _argmax_lines(lines_hat, c)
    if adversarial:
        hat = min(tied, key=lambda ln: (_true_profit(F, c, ln.action), ln.action))
    else:
        hat = min(tied, key=lambda ln: ln.action)
    r_star, r_hat = _true_profit(F, c, star.action), _true_profit(F, c, hat.action)
    # An estimated choice tied with the true optimum is optimal, whatever the rounding.
    ratio = 1.0 if r_hat >= r_star - _tol(r_star) else competitive_ratio(r_star, r_hat)
    return CrReport(ratio, PricingCost(c), star.action, hat.action, r_star, r_hat)


def induced_cr(F: ScalarDistribution, F_hat: ScalarDistribution, c: float, adversarial: bool = True) -> CrReport:
    """Competitive ratio at a single cost; ``adversarial`` breaks estimated ties against the seller."""
    return _evaluate(F, F_hat, price_lines(F), price_lines(F_hat), c, adversarial)


def candidate_costs(F: ScalarDistribution, F_hat: ScalarDistribution, c_lo: float, c_hi: float) -> list[float]:
    """{c_lo, c_hi} plus breakpoints of both envelopes inside the interval, sorted."""
    pts = {float(c_lo), float(c_hi)}
    for dist in (F, F_hat):
        pts.update(envelope_breakpoints(upper_envelope(price_lines(dist), c_lo, c_hi)))
    return sorted(pts)


def worstcr_pricing(F: ScalarDistribution, F_hat: ScalarDistribution, c_max: float) -> CrReport:
    """Infimum over c in [0, c_max] of the ratio with adversarial estimated ties."""
    if c_max <= 0:
        raise ValueError("c_max must be positive")
    lines, lines_hat = price_lines(F), price_lines(F_hat)
    best = None
    for c in candidate_costs(F, F_hat, 0.0, c_max):
        rep = _evaluate(F, F_hat, lines, lines_hat, c, adversarial=True)
        if best is None or rep.ratio < best.ratio:
            best = rep
    return best


def avgcr_pricing(F: ScalarDistribution, F_hat: ScalarDistribution, c_lo: float, c_hi: float) -> float:
    """Mean ratio for c ~ Unif[c_lo, c_hi]; estimated ties go to the lowest price."""
    if not 0 <= c_lo < c_hi:
        raise ValueError("need 0 <= c_lo < c_hi")
    lines, lines_hat = price_lines(F), price_lines(F_hat)
    pts = candidate_costs(F, F_hat, c_lo, c_hi)
    total = 0.0
    for u, v in zip(pts, pts[1:]):
        if v - u <= 0:
            continue
        mid = 0.5 * (u + v)
        star = max(_argmax_lines(lines, mid), key=lambda ln: -ln.action)
        hat = min(_argmax_lines(lines_hat, mid), key=lambda ln: ln.action)
        if star.action == INF:
            # No price beats zero profit here, and the estimate earns at most zero too.
            total += v - u
        elif hat.action != INF:
            s_hat = survival(F, hat.action)
            total += rational_integral(hat.action * s_hat, -s_hat, star.intercept, star.slope, u, v)
    return total / (c_hi - c_lo)
