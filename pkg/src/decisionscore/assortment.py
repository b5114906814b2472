"""Assortment selection under a ranking-based choice model with knapsack families.

Assortments are exposed as frozensets of item indices. Internally every subset of
``range(n)`` is a bitmask, and rewards for all ``2**n`` subsets are tabulated at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core import AssortmentParams, CrReport, RankingDistribution, competitive_ratio
from .simplex import solve_lp

MAX_ITEMS = 20
TIE_TOL = 1e-9
LP_MARGIN = 1e-6
# Feasibility slack when comparing a subset's total size with the budget.
SIZE_TOL = 1e-9

REWARD_PRESETS = {
    "inverse": lambda n: [10.0 / p for p in range(1, n + 1)],
    "linear": lambda n: [10.0 - (p - 1) for p in range(1, n + 1)],
    "quadratic": lambda n: [10.0 - 0.1 * (p - 1) ** 2 for p in range(1, n + 1)],
}

Assortment = frozenset


class EmptyAssortment(ValueError):
    pass


class EmptyFamily(ValueError):
    pass


class TooManyItems(ValueError):
    pass


@dataclass(frozen=True)
class SizeRegime:
    kind: str  # "unit", "random" or "hard"
    seed: int = 0
    instance_count: int = 100

    def __post_init__(self) -> None:
        if self.kind not in ("unit", "random", "hard"):
            raise ValueError(f"unknown size regime {self.kind!r}")
        if self.instance_count < 1:
            raise ValueError("instance_count must be >= 1")

    @classmethod
    def unit(cls) -> "SizeRegime":
        return cls("unit")

    @classmethod
    def random(cls, seed: int = 0, instance_count: int = 100) -> "SizeRegime":
        return cls("random", seed, instance_count)

    @classmethod
    def hard(cls) -> "SizeRegime":
        return cls("hard")


def reward_preset(name: str, n: int) -> list[float]:
    return REWARD_PRESETS[name](n)


def to_mask(a) -> int:
    mask = 0
    for j in a:
        mask |= 1 << int(j)
    return mask


def from_mask(mask: int) -> frozenset:
    return frozenset(j for j in range(mask.bit_length()) if mask >> j & 1)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _check_rewards(rewards: Sequence[float], n: int) -> np.ndarray:
    r = np.asarray(rewards, dtype=float)
    if r.shape != (n,):
        raise ValueError(f"expected {n} rewards, got {r.shape}")
    if np.any(r < 0) or np.any(np.diff(r) > 0):
        raise ValueError("rewards must be non-increasing and non-negative")
    return r


def _guard(n: int) -> None:
    if n > MAX_ITEMS:
        raise TooManyItems(f"subset enumeration is limited to n <= {MAX_ITEMS}, got {n}")


def subset_rewards(dist: RankingDistribution, rewards: Sequence[float]) -> np.ndarray:
    """Expected reward of every subset; index is the subset's bitmask (entry 0 is the empty set)."""
    n = dist.n
    _guard(n)
    r = np.append(_check_rewards(rewards, n), 0.0)
    pos = dist.positions()
    best = np.full((dist.size, 1), n, dtype=np.int64)
    for j in range(n):
        best = np.concatenate([best, np.minimum(best, pos[:, j : j + 1])], axis=1)
    return dist.probs @ r[best]


def subset_sizes(sizes: Sequence[float]) -> np.ndarray:
    total = np.zeros(1)
    for s in sizes:
        total = np.concatenate([total, total + float(s)])
    return total


def assortment_reward(dist: RankingDistribution, rewards: Sequence[float], a) -> float:
    """Expected position reward of the best-ranked offered item."""
    items = list(a)
    if not items:
        raise EmptyAssortment("assortment must be non-empty")
    r = _check_rewards(rewards, dist.n)
    if any(not 0 <= j < dist.n for j in items):
        raise ValueError("item index out of range")
    first = dist.positions()[:, items].min(axis=1)
    return float(dist.probs @ r[first])


def popularity_scores(dist: RankingDistribution, rewards: Sequence[float]) -> np.ndarray:
    """Expected reward from offering each item alone."""
    r = _check_rewards(rewards, dist.n)
    return dist.probs @ r[dist.positions()]


def _feasible_masks(sizes: Sequence[float], budget_multiplier: float) -> np.ndarray:
    n = len(sizes)
    _guard(n)
    if budget_multiplier <= 0:
        raise ValueError("budget multiplier must be positive")
    budget = budget_multiplier * float(np.mean(sizes))
    totals = subset_sizes(sizes)
    ok = totals <= budget + SIZE_TOL * max(1.0, budget)
    ok[0] = False
    masks = np.flatnonzero(ok)
    if masks.size == 0:
        raise EmptyFamily("no non-empty assortment fits the budget")
    return masks


def feasible_family(sizes: Sequence[float], budget_multiplier: float, n: int | None = None) -> Iterator[frozenset]:
    """Yield every non-empty assortment whose total size is within B times the mean size."""
    if n is not None and n != len(sizes):
        raise ValueError("n does not match the number of sizes")
    for mask in _feasible_masks(sizes, budget_multiplier):
        yield from_mask(int(mask))


def _lex_key(mask: int) -> tuple[int, ...]:
    return tuple(sorted(from_mask(mask)))


def _pick(masks: np.ndarray, objective: np.ndarray, secondary: np.ndarray | None) -> int:
    """Argmax of ``objective`` over ``masks``; ties go to min ``secondary`` then lexicographic order."""
    vals = objective[masks]
    top = vals.max()
    tied = masks[vals >= top - TIE_TOL * max(1.0, abs(top))]
    if secondary is not None and tied.size > 1:
        sec = secondary[tied]
        low = sec.min()
        tied = tied[sec <= low + TIE_TOL * max(1.0, abs(low))]
    return int(min(tied.tolist(), key=_lex_key))


def saa_assortment(
    dist_hat: RankingDistribution,
    params: AssortmentParams,
    adversary: RankingDistribution | None = None,
) -> frozenset:
    """Assortment maximizing expected reward under ``dist_hat`` over the knapsack family.

    Ties go to the lexicographically smallest sorted index tuple, unless ``adversary``
    is given, in which case the tied assortment with the lowest reward under
    ``adversary`` is chosen first.
    """
    masks = _feasible_masks(params.sizes, params.budget_multiplier)
    est = subset_rewards(dist_hat, params.rewards)
    sec = subset_rewards(adversary, params.rewards) if adversary is not None else None
    return from_mask(_pick(masks, est, sec))


def popularity_baseline(scores: Sequence[float], sizes: Sequence[float], budget_multiplier: float) -> frozenset:
    """Feasible assortment with the largest total popularity score."""
    masks = _feasible_masks(sizes, budget_multiplier)
    return from_mask(_pick(masks, subset_sizes(scores), None))


def separating_knapsack(
    a_star,
    a_hat,
    bad_sets: Sequence,
    epsilon: float = LP_MARGIN,
    n: int | None = None,
) -> tuple[np.ndarray, float] | None:
    """Sizes with budget 1 under which ``a_star`` and ``a_hat`` fit and every bad set overflows.

    Items outside ``a_star | a_hat`` get size 2, so they can never be packed. Bad
    sets must overflow by at least ``epsilon``. Returns ``(sizes, budget)`` or None
    when no such sizes exist.
    """
    a_star, a_hat = frozenset(a_star), frozenset(a_hat)
    union = sorted(a_star | a_hat)
    if n is None:
        n = max(union) + 1
    col = {j: k for k, j in enumerate(union)}

    def row(items) -> np.ndarray:
        v = np.zeros(len(union))
        for j in items:
            v[col[j]] = 1.0
        return v

    A_lb = [row(b) for b in bad_sets]
    if any(not frozenset(b) <= (a_star | a_hat) for b in bad_sets):
        raise ValueError("bad sets must lie inside a_star | a_hat")
    res = solve_lp(
        None,
        A_ub=np.array([row(a_star), row(a_hat)]),
        b_ub=np.ones(2),
        A_lb=np.array(A_lb) if A_lb else None,
        b_lb=np.full(len(A_lb), 1.0 + epsilon) if A_lb else None,
        n=len(union),
    )
    if res.status != "optimal":
        return None
    sizes = np.full(n, 2.0)
    for j, k in col.items():
        sizes[j] = res.x[k]
    return sizes, 1.0


def witness_sizes(a_star_mask: int, a_hat_mask: int, n: int) -> np.ndarray:
    """Budget-1 sizes that leave ``a_star`` and ``a_hat`` as the only maximal feasible sets.

    Requires one of the two set differences to have at most one element.
    """
    only_star = a_star_mask & ~a_hat_mask
    only_hat = a_hat_mask & ~a_star_mask
    if _popcount(only_star) > 1:
        only_star, only_hat = only_hat, only_star
    if _popcount(only_star) > 1:
        raise ValueError("both set differences have two or more items")
    sizes = np.full(n, 2.0)
    for j in range(n):
        bit = 1 << j
        if a_star_mask & a_hat_mask & bit:
            sizes[j] = 0.0
        elif only_star & bit:
            sizes[j] = 1.0
        elif only_hat & bit:
            sizes[j] = 1.0 / n
    return sizes


def _params_from_sizes(rewards, sizes: np.ndarray, budget: float) -> AssortmentParams:
    mean = float(np.mean(sizes))
    mult = budget / mean if mean > 0 else 1.0
    return AssortmentParams(tuple(float(x) for x in rewards), tuple(float(s) for s in sizes), mult)


def induced_cr(
    F: RankingDistribution,
    F_hat: RankingDistribution,
    params: AssortmentParams,
    adversarial: bool = True,
    *,
    R: np.ndarray | None = None,
    R_hat: np.ndarray | None = None,
) -> CrReport:
    """Competitive ratio at a single parameter; ``adversarial`` picks the worst tied SAA action."""
    if R is None:
        R = subset_rewards(F, params.rewards)
    if R_hat is None:
        R_hat = subset_rewards(F_hat, params.rewards)
    masks = _feasible_masks(params.sizes, params.budget_multiplier)
    star = _pick(masks, R, None)
    hat = _pick(masks, R_hat, R if adversarial else None)
    return CrReport(
        competitive_ratio(R[star], R[hat]),
        params,
        from_mask(star),
        from_mask(hat),
        float(R[star]),
        float(R[hat]),
    )


def _bad_sets(union: int, R: np.ndarray, R_hat: np.ndarray, r_star: float, r_hat: float) -> list[int]:
    """Inclusion-minimal subsets of ``union`` beating ``a_star`` on truth or ``a_hat`` on the estimate."""
    subs = np.arange(R.size)
    subs = subs[(subs & ~union) == 0]
    tol_s = TIE_TOL * max(1.0, abs(r_star))
    tol_h = TIE_TOL * max(1.0, abs(r_hat))
    bad = (R[subs] > r_star + tol_s) | (R_hat[subs] > r_hat + tol_h)
    bad_set = set(subs[bad].tolist())
    minimal = []
    for m in bad_set:
        if all((m & ~(1 << j)) not in bad_set for j in range(m.bit_length()) if m >> j & 1):
            minimal.append(m)
    return sorted(minimal)


def _pair_witness(star: int, hat: int, n: int, R, R_hat) -> np.ndarray | None:
    if min(_popcount(star & ~hat), _popcount(hat & ~star)) <= 1:
        return witness_sizes(star, hat, n)
    bad = _bad_sets(star | hat, R, R_hat, R[star], R_hat[hat])
    res = separating_knapsack(from_mask(star), from_mask(hat), [from_mask(b) for b in bad], LP_MARGIN, n)
    return None if res is None else res[0]


def worstcr_assortment(
    F: RankingDistribution, F_hat: RankingDistribution, rewards: Sequence[float]
) -> CrReport:
    """Infimum over item sizes and budgets of the competitive ratio of the SAA assortment.

    Pairs (a*, a^) are scanned with a^ in increasing true reward and a* in decreasing
    true reward; the first realizable a* for each a^ ends the inner scan. A pair is
    realizable directly when one set difference has at most one item, otherwise when
    a small LP can size every better subset out of the knapsack.
    """
    if F.n != F_hat.n:
        raise ValueError("distributions rank different item counts")
    n = F.n
    R = subset_rewards(F, rewards)
    R_hat = subset_rewards(F_hat, rewards)
    masks = np.arange(1, 1 << n)
    hat_order = masks[np.lexsort((masks, R[masks]))]
    star_order = masks[np.lexsort((masks, -R[masks]))]
    R_star_sorted = R[star_order]
    R_hat_star = R_hat[star_order]

    best = 1.0
    best_pair: tuple[int, int, np.ndarray] | None = None
    top = R_star_sorted[0]
    for hat in hat_order.tolist():
        r_hat_true = R[hat]
        if competitive_ratio(top, r_hat_true) >= best:
            break
        tol = TIE_TOL * max(1.0, abs(R_hat[hat]))
        # Pairs tied on true reward have ratio 1 and cannot lower the infimum.
        cand = np.flatnonzero(
            (R_star_sorted > r_hat_true + TIE_TOL * max(1.0, abs(r_hat_true)))
            & (R_hat_star <= R_hat[hat] + tol)
        )
        for k in cand.tolist():
            star = int(star_order[k])
            rho = competitive_ratio(R[star], r_hat_true)
            if rho >= best:
                break
            sizes = _pair_witness(star, hat, n, R, R_hat)
            if sizes is not None:
                best = rho
                best_pair = (star, hat, sizes)
                break

    if best_pair is None:
        params = AssortmentParams(tuple(float(x) for x in rewards), (1.0,) * n, float(n))
        rep = induced_cr(F, F_hat, params, True, R=R, R_hat=R_hat)
        return rep
    star, hat, sizes = best_pair
    params = _params_from_sizes(rewards, sizes, 1.0)
    return CrReport(best, params, from_mask(star), from_mask(hat), float(R[star]), float(R[hat]))


def _regime_sizes(regime: SizeRegime, F: RankingDistribution, rewards) -> list[np.ndarray]:
    n = F.n
    if regime.kind == "unit":
        return [np.ones(n)]
    if regime.kind == "hard":
        return [popularity_scores(F, rewards)]
    rng = np.random.default_rng(regime.seed)
    return list(rng.uniform(0.8, 1.2, size=(regime.instance_count, n)))


def avgcr_assortment(
    F: RankingDistribution,
    F_hat: RankingDistribution,
    rewards: Sequence[float],
    regime: SizeRegime,
    budget_multiplier: float,
) -> float:
    """Mean competitive ratio over the size instances of ``regime`` (lexicographic ties)."""
    R = subset_rewards(F, rewards)
    R_hat = subset_rewards(F_hat, rewards)
    ratios = []
    for sizes in _regime_sizes(regime, F, rewards):
        params = AssortmentParams(tuple(float(x) for x in rewards), tuple(float(s) for s in sizes), budget_multiplier)
        ratios.append(induced_cr(F, F_hat, params, adversarial=False, R=R, R_hat=R_hat).ratio)
    return math.fsum(ratios) / len(ratios)


def popularity_cr(
    F: RankingDistribution,
    rewards: Sequence[float],
    regime: SizeRegime,
    budget_multiplier: float,
) -> float:
    """Mean competitive ratio of the popularity-score baseline over a size regime."""
    R = subset_rewards(F, rewards)
    scores = popularity_scores(F, rewards)
    ratios = []
    for sizes in _regime_sizes(regime, F, rewards):
        masks = _feasible_masks(sizes, budget_multiplier)
        star = _pick(masks, R, None)
        chosen = to_mask(popularity_baseline(scores, sizes, budget_multiplier))
        ratios.append(competitive_ratio(R[star], R[chosen]))
    return math.fsum(ratios) / len(ratios)


def plackett_luce_sample(
    utilities: Sequence[float], count: int, seed: int | np.random.Generator | None = None
) -> RankingDistribution:
    """Uniform distribution over ``count`` rankings drawn with item weights exp(utility).

    Sorting utilities perturbed by independent Gumbel noise draws items sequentially
    without replacement with exactly these weights.
    """
    u = np.asarray(utilities, dtype=float)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    keys = u[None, :] + rng.gumbel(size=(count, u.size))
    order = np.argsort(-keys, axis=1, kind="stable")
    return RankingDistribution.empirical(order.tolist(), n=u.size)
