"""Distribution and parameter types shared by the three decision problems."""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Any, Iterable, Sequence

import numpy as np

PROB_TOL = 1e-12
# Rewards within this absolute distance of zero are treated as zero when forming ratios.
ZERO_TOL = 1e-12


class DistributionError(ValueError):
    """Raised when atoms or probabilities violate a distribution invariant."""


class RangeError(ValueError):
    """A value falls outside its documented range."""


class InvalidRanking(DistributionError):
    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_probs(probs: np.ndarray) -> np.ndarray:
    if probs.ndim != 1 or probs.size == 0:
        raise DistributionError("need at least one atom")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise DistributionError("probabilities must be finite and non-negative")
    total = math.fsum(probs.tolist())
    if abs(total - 1.0) > PROB_TOL:
        raise DistributionError(f"probabilities sum to {total!r}, not 1")
    return probs / total


def validate_ranking(order: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    """Return ``order`` as a tuple after checking it is a permutation of 0..n-1."""
    ranking = tuple(int(x) for x in order)
    size = len(ranking) if n is None else n
    if len(ranking) != size or sorted(ranking) != list(range(size)):
        raise InvalidRanking(f"{ranking} is not a permutation of 0..{size - 1}")
    return ranking


@dataclass(frozen=True, eq=False)
class ScalarDistribution:
    """Finite distribution on non-negative reals with strictly increasing support.

    Build instances with :meth:`from_atoms`, :meth:`empirical` or :meth:`uniform`;
    these merge duplicate values and renormalize.
    """

    values: np.ndarray
    probs: np.ndarray
    _tail: np.ndarray = field(repr=False)
    _cum: np.ndarray = field(repr=False)

    @classmethod
    def from_atoms(cls, values: Iterable[float], probs: Iterable[float]) -> "ScalarDistribution":
        v = np.asarray(list(values), dtype=float)
        p = np.asarray(list(probs), dtype=float)
        if v.shape != p.shape:
            raise DistributionError("values and probabilities differ in length")
        p = _check_probs(p)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise DistributionError("support values must be finite and non-negative")
        keep = p > 0
        v, p = v[keep], p[keep]
        uniq, inverse = np.unique(v, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, p)
        merged /= math.fsum(merged.tolist())
        # tail[i] = Pr[X >= values[i]], cum[i] = Pr[X <= values[i]]; one extra slot each.
        tail = np.append(np.cumsum(merged[::-1])[::-1], 0.0)
        cum = np.insert(np.cumsum(merged), 0, 0.0)
        tail[0] = 1.0
        cum[-1] = 1.0
        return cls(_frozen(uniq), _frozen(merged), _frozen(tail), _frozen(cum))

    @classmethod
    def empirical(cls, samples: Iterable[float]) -> "ScalarDistribution":
        s = np.asarray(list(samples), dtype=float)
        if s.size == 0:
            raise DistributionError("empty sample")
        uniq, counts = np.unique(s, return_counts=True)
        return cls.from_atoms(uniq, counts / counts.sum())

    @classmethod
    def uniform(cls, values: Iterable[float]) -> "ScalarDistribution":
        return cls.empirical(values)

    @property
    def size(self) -> int:
        return int(self.values.size)

    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def cumulative_levels(self) -> np.ndarray:
        """Interior CDF levels Pr[X <= v_i] for all but the largest atom."""
        return self._cum[1:-1].copy()

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def std(self) -> float:
        mu = self.mean()
        return float(np.sqrt(np.dot(self.probs, (self.values - mu) ** 2)))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.values, size=size, replace=True, p=self.probs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarDistribution):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.probs.tobytes()))

    def to_json(self) -> dict[str, Any]:
        return {"kind": "scalar", "atoms": [[v, p] for v, p in self.atoms()]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "ScalarDistribution":
        atoms = obj["atoms"]
        return cls.from_atoms([a[0] for a in atoms], [a[1] for a in atoms])


@dataclass(frozen=True, eq=False)
class RankingDistribution:
    """Weighted collection of strict rankings over items 0..n-1.

    ``rankings[k, p]`` is the item in position ``p`` (0 = most preferred) of atom ``k``.
    Duplicate rankings are merged, keeping first-occurrence order.
    """

    n: int
    rankings: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_atoms(
        cls, rankings: Iterable[Sequence[int]], probs: Iterable[float], n: int | None = None
    ) -> "RankingDistribution":
        rows = [tuple(int(x) for x in r) for r in rankings]
        p = _check_probs(np.asarray(list(probs), dtype=float))
        if len(rows) != p.size:
            raise DistributionError("rankings and probabilities differ in length")
        size = len(rows[0]) if n is None else n
        merged: OrderedDict[tuple[int, ...], float] = OrderedDict()
        for row, w in zip(rows, p.tolist()):
            validate_ranking(row, size)
            if w > 0:
                merged[row] = merged.get(row, 0.0) + w
        arr = np.array(list(merged.keys()), dtype=np.int64).reshape(len(merged), size)
        w = np.array(list(merged.values()), dtype=float)
        w /= math.fsum(w.tolist())
        return cls(size, _frozen(arr), _frozen(w))

    @classmethod
    def empirical(cls, rankings: Iterable[Sequence[int]], n: int | None = None) -> "RankingDistribution":
        rows = [tuple(int(x) for x in r) for r in rankings]
        if not rows:
            raise DistributionError("empty sample")
        return cls.from_atoms(rows, [1.0 / len(rows)] * len(rows), n=n)

    @classmethod
    def point_mass(cls, ranking: Sequence[int]) -> "RankingDistribution":
        return cls.from_atoms([ranking], [1.0])

    @property
    def size(self) -> int:
        return int(self.probs.size)

    def atoms(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(r), p) for r, p in zip(self.rankings.tolist(), self.probs.tolist())]

    def positions(self) -> np.ndarray:
        """``pos[k, j]`` = position of item ``j`` in ranking ``k``."""
        pos = np.empty_like(self.rankings)
        rows = np.arange(self.size)[:, None]
        pos[rows, self.rankings] = np.arange(self.n)[None, :]
        return pos

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankingDistribution):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.rankings, other.rankings)
            and np.array_equal(self.probs, other.probs)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.rankings.tobytes(), self.probs.tobytes()))

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "ranking",
            "n": self.n,
            "atoms": [[list(r), p] for r, p in self.atoms()],
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "RankingDistribution":
        atoms = obj["atoms"]
        return cls.from_atoms([a[0] for a in atoms], [a[1] for a in atoms], n=obj.get("n"))


@dataclass(frozen=True)
class NormalSpec:
    mean: float
    std: float

    def __post_init__(self) -> None:
        if not (self.std > 0 and math.isfinite(self.std)):
            raise DistributionError(f"std must be positive, got {self.std}")

    def to_json(self) -> dict[str, Any]:
        return {"kind": "normal", "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class AssortmentParams:
    rewards: tuple[float, ...]
    sizes: tuple[float, ...]
    budget_multiplier: float

    def __post_init__(self) -> None:
        r = self.rewards
        if any(x < 0 for x in r) or any(a < b for a, b in zip(r, r[1:])):
            raise ValueError("rewards must be non-increasing and non-negative")
        if len(self.sizes) != len(r):
            raise ValueError("sizes and rewards differ in length")
        if any(s < 0 for s in self.sizes):
            raise ValueError("sizes must be non-negative")
        if not self.budget_multiplier > 0:
            raise ValueError("budget multiplier must be positive")

    @property
    def budget(self) -> float:
        return self.budget_multiplier * float(np.mean(self.sizes))


@dataclass(frozen=True)
class PricingCost:
    cost: float

    def __post_init__(self) -> None:
        if not self.cost >= 0:
            raise ValueError("cost must be non-negative")


@dataclass(frozen=True)
class NewsvendorRatio:
    q: float

    def __post_init__(self) -> None:
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")


@dataclass(frozen=True)
class CrReport:
    """A competitive ratio with the parameter and actions that attain it."""

    ratio: float
    theta: Any
    a_star: Any
    a_hat: Any
    true_reward_star: float = math.nan
    true_reward_hat: float = math.nan


def competitive_ratio(reward_star: float, reward_hat: float) -> float:
    """min(|R*|, |R^|) / max(|R*|, |R^|); both zero gives 1, exactly one zero gives 0."""
    x, y = abs(reward_star), abs(reward_hat)
    zx, zy = x <= ZERO_TOL, y <= ZERO_TOL
    if zx and zy:
        return 1.0
    if zx or zy:
        return 0.0
    return min(x, y) / max(x, y)


def survival(dist: ScalarDistribution, a: float) -> float:
    """Pr[X >= a]; an atom located exactly at ``a`` counts."""
    if a == math.inf:
        return 0.0
    idx = int(np.searchsorted(dist.values, a, side="left"))
    return float(dist._tail[idx])


def survival_many(dist: ScalarDistribution, a: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(dist.values, a, side="left")
    return dist._tail[idx]


def cdf(dist: ScalarDistribution, z: float) -> float:
    """Pr[X <= z] (right-continuous)."""
    idx = int(np.searchsorted(dist.values, z, side="right"))
    return float(dist._cum[idx])


def cdf_many(dist: ScalarDistribution, z: np.ndarray) -> np.ndarray:
    return dist._cum[np.searchsorted(dist.values, z, side="right")]


def discretize_normal(spec: NormalSpec, m_hat: int = 101) -> ScalarDistribution:
    """Uniform distribution on the normal quantiles at (i - 0.5)/m_hat, clamped at 0.

    Quantiles that coincide after clamping (or sit within float noise of each other,
    as for a vanishing std) are merged and their masses summed.
    """
    if m_hat < 2:
        raise ValueError("m_hat must be at least 2")
    nd = NormalDist(spec.mean, spec.std)
    qs = [max(0.0, nd.inv_cdf((i - 0.5) / m_hat)) for i in range(1, m_hat + 1)]
    tol = 1e-9 * max(1.0, abs(spec.mean))
    groups: list[list[float]] = [[qs[0]]]
    for x in qs[1:]:
        if x - groups[-1][0] <= tol:
            groups[-1].append(x)
        else:
            groups.append([x])
    values = [g[0] if g[0] == 0.0 else math.fsum(g) / len(g) for g in groups]
    probs = [len(g) / m_hat for g in groups]
    return ScalarDistribution.from_atoms(values, probs)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def ratio_direction(alpha: float, beta: float, gamma: float, delta: float) -> int:
    """Sign of d/dx (alpha + beta x) / (gamma + delta x) where the denominator is nonzero."""
    det = beta * gamma - alpha * delta
    scale = max(abs(beta * gamma), abs(alpha * delta), 1.0)
    if abs(det) <= 1e-12 * scale:
        return 0
    return 1 if det > 0 else -1


def rational_integral(alpha: float, beta: float, gamma: float, delta: float, lo: float, hi: float) -> float:
    """Integral over [lo, hi] of (alpha + beta x) / (gamma + delta x).

    Uses the log antiderivative, switching to 64-point Gauss-Legendre when the
    denominator is flat or vanishes at an endpoint.
    """
    if hi <= lo:
        return 0.0
    d_lo, d_hi = gamma + delta * lo, gamma + delta * hi
    tiny = 1e-12 * max(1.0, abs(gamma), abs(delta))
    if abs(delta) < 1e-12 or abs(d_lo) <= tiny or abs(d_hi) <= tiny:
        half = 0.5 * (hi - lo)
        x = lo + half * (_GL_NODES + 1.0)
        return float(half * np.dot(_GL_WEIGHTS, (alpha + beta * x) / (gamma + delta * x)))
    k = beta / delta
    return k * (hi - lo) + (alpha - k * gamma) / delta * math.log(d_hi / d_lo)
