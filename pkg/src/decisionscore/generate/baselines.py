"""Non-LLM reference estimators."""

from __future__ import annotations

from typing import Any, Sequence

import numpy as np

from ..core import RankingDistribution, ScalarDistribution
from .protocol import Estimate

BASELINES = ("RandomRankings", "RandomWtp", "DSampleEmpirical", "PooledDemand")
WTP_RANGE = (44.0, 144.0)


def _subsampled(pool: np.ndarray, subsample: int, reps: int, rng: np.random.Generator) -> list[np.ndarray]:
    return [pool[np.sort(rng.choice(len(pool), subsample, replace=False))] for _ in range(reps)]


def random_rankings(
    n: int, seed: int = 0, pool: int = 600, subsample: int = 200, reps: int = 20
) -> list[RankingDistribution]:
    """Uniformly random permutations, pooled then subsampled like the sampling methods."""
    rng = np.random.default_rng(seed)
    perms = np.array([rng.permutation(n) for _ in range(pool)])
    return [RankingDistribution.empirical([tuple(int(x) for x in row) for row in s], n=n) for s in _subsampled(perms, subsample, reps, rng)]


def random_wtp(
    seed: int = 0,
    pool: int = 100,
    subsample: int = 50,
    reps: int = 20,
    lo: float = WTP_RANGE[0],
    hi: float = WTP_RANGE[1],
) -> list[ScalarDistribution]:
    rng = np.random.default_rng(seed)
    draws = rng.uniform(lo, hi, size=pool)
    return [ScalarDistribution.empirical(s) for s in _subsampled(draws, subsample, reps, rng)]


def d_sample_empirical(samples: Sequence[Any], d: int, seed: int = 0, reps: int = 20, ranking_n: int | None = None):
    """Empirical distributions of ``d`` IID draws from the uniform distribution over ``samples``."""
    if d <= 0:
        raise ValueError("d must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(reps):
        idx = rng.integers(0, len(samples), size=d)
        chosen = [samples[i] for i in idx]
        if ranking_n is not None:
            out.append(RankingDistribution.empirical(chosen, n=ranking_n))
        else:
            out.append(ScalarDistribution.empirical(chosen))
    return out


def pooled_demand(samples: dict[str, Sequence[float]]) -> ScalarDistribution:
    """One empirical distribution over every observed demand of every item."""
    pooled = [x for key in sorted(samples) for x in samples[key]]
    if not pooled:
        raise ValueError("no demand observations")
    return ScalarDistribution.empirical(pooled)


def run_baseline(
    kind: str,
    samples: dict[str, Sequence[Any]],
    seed: int = 0,
    reps: int = 20,
    d: int | None = None,
    ranking_n: int | None = None,
    pool: int | None = None,
    subsample: int | None = None,
) -> list[Estimate]:
    """Baseline estimates for every key of ``samples`` (the ground-truth outcomes per key).

    Keys are seeded independently from ``seed`` and their position in sorted order.
    """
    keys = sorted(samples)
    per_key: dict[str, list] = {}
    shared = pooled_demand(samples) if kind == "PooledDemand" else None
    for i, key in enumerate(keys):
        s = [seed, i]
        if kind == "RandomRankings":
            if ranking_n is None:
                raise ValueError("RandomRankings needs ranking_n")
            per_key[key] = random_rankings(ranking_n, s, pool or 600, subsample or 200, reps)
        elif kind == "RandomWtp":
            per_key[key] = random_wtp(s, pool or 100, subsample or 50, reps)
        elif kind == "DSampleEmpirical":
            if d is None:
                raise ValueError("DSampleEmpirical needs d")
            per_key[key] = d_sample_empirical(list(samples[key]), d, s, reps, ranking_n)
        elif kind == "PooledDemand":
            per_key[key] = [shared]
        else:
            raise ValueError(f"unknown baseline {kind!r}; choose from {BASELINES}")
    count = len(next(iter(per_key.values()))) if per_key else 0
    return [
        Estimate(r, {k: per_key[k][r] for k in keys}, provenance={"baseline": kind, "seed": seed})
        for r in range(count)
    ]
