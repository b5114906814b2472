"""Replication protocol: how many queries to send, how pools are subsampled, and how
parsed answers become estimated distributions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from ..assortment import plackett_luce_sample
from ..core import NormalSpec, RangeError, RankingDistribution, ScalarDistribution, discretize_normal
from ..data import ENDOWMENT, LABELS, PRODUCTS, DemandSeries, SushiRecord, WtpRecord, persona_text
from .llm import LlmClient
from .parsing import (
    ParseError,
    parse_newsvendor_prediction,
    parse_ranking,
    parse_ranking_batch,
    parse_utilities,
    parse_wtp,
    parse_wtp_batch,
    parse_wtp_description,
)
from .prompts import METHODS, PROBLEMS, PromptContext, ReferenceItem, build_prompt, render_premiums, render_ranking

log = logging.getLogger(__name__)


class InsufficientValidResponses(RuntimeError):
    pass


_DEFAULTS = {
    "assortment": {"pool_size": 600, "subsample_size": 200, "batch_size": 30, "few_shot_pool_size": 300},
    "pricing": {"pool_size": 100, "subsample_size": 50, "batch_size": 25, "few_shot_pool_size": 100},
    "newsvendor": {},
}


@dataclass(frozen=True)
class GenerationSpec:
    problem: str
    method: str
    few_shot: bool = False
    pool_size: int = 600
    subsample_size: int = 200
    repetitions: int = 20
    batch_size: int = 30
    resample_size: int | None = None  # redraw this many outcomes from each batch
    description_samples: int = 200  # rankings drawn from each utility vector
    example_sets: int = 5
    examples_per_set: int = 6
    runs_per_set: int = 4
    few_shot_pool_size: int = 300
    queries_per_item: int = 1
    reference_count: int = 100
    normal_atoms: int = 101
    max_parse_retries: int = 3
    max_extra_queries: int | None = None  # default: as many as the target
    seed: int = 0

    def __post_init__(self) -> None:
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.problem == "newsvendor" and (self.method != "Description" or self.few_shot):
            raise ValueError("newsvendor generation supports zero-shot Description only")
        counts = (
            self.pool_size, self.subsample_size, self.repetitions, self.batch_size, self.description_samples,
            self.example_sets, self.examples_per_set, self.runs_per_set, self.few_shot_pool_size,
            self.queries_per_item, self.reference_count, self.normal_atoms,
        )
        if any(c <= 0 for c in counts) or (self.resample_size is not None and self.resample_size <= 0):
            raise ValueError("replication counts must be positive")
        if self.subsample_size > min(self.pool_size, self.few_shot_pool_size if self.few_shot else self.pool_size):
            raise ValueError("subsample larger than its pool")

    @classmethod
    def defaults(cls, problem: str, method: str, few_shot: bool = False, **overrides: Any) -> "GenerationSpec":
        return cls(problem=problem, method=method, few_shot=few_shot, **{**_DEFAULTS.get(problem, {}), **overrides})


@dataclass
class GenerationContext:
    """Inputs drawn from the datasets.

    ``outside`` holds respondents excluded from the ground truth; they supply few-shot
    examples and personas (rotated in order).
    """

    items: Sequence[str] = ()
    outside: Sequence[SushiRecord | WtpRecord] = ()
    series: Sequence[DemandSeries] = ()
    labels: Sequence[str] = LABELS


@dataclass
class Estimate:
    replicate: int
    distributions: dict[str, RankingDistribution | ScalarDistribution]
    paired: dict[str, list[tuple[Any, Any]]] = field(default_factory=dict)
    normal_specs: dict[str, NormalSpec] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)


@dataclass
class _Draw:
    value: Any
    key: str
    persona: Any = None


def _collect(
    client: LlmClient,
    make: Callable[[int], tuple[list[dict[str, str]], Any]],
    parse: Callable[[str], Any],
    target: int,
    tag: str,
    spec: GenerationSpec,
) -> list[_Draw]:
    """Query slots 0, 1, ... until ``target`` answers parse, retrying each slot a few times."""
    extra = target if spec.max_extra_queries is None else spec.max_extra_queries
    built = [make(i) for i in range(target)]
    first = client.complete_many([(msgs, f"{tag}/{i}/0") for i, (msgs, _) in enumerate(built)])
    draws: list[_Draw] = []

    def attempt(slot: int, msgs, persona, exchange) -> bool:
        for k in range(spec.max_parse_retries + 1):
            if exchange is None:
                exchange = client.complete(msgs, f"{tag}/{slot}/{k}")
            try:
                draws.append(_Draw(parse(exchange.text), exchange.key, persona))
                return True
            except (ParseError, RangeError) as exc:
                log.info("%s slot %d attempt %d unparseable: %s", tag, slot, k, exc)
                exchange = None
        log.warning("%s slot %d skipped after %d attempts", tag, slot, spec.max_parse_retries + 1)
        return False

    for slot, ((msgs, persona), ex) in enumerate(zip(built, first)):
        attempt(slot, msgs, persona, ex)
    slot = target
    while len(draws) < target and slot < target + extra:
        msgs, persona = make(slot)
        attempt(slot, msgs, persona, None)
        slot += 1
    if len(draws) < target:
        raise InsufficientValidResponses(f"{tag}: {len(draws)} of {target} valid responses")
    return draws


class _Runner:
    def __init__(self, spec: GenerationSpec, ctx: GenerationContext, client: LlmClient):
        self.spec, self.ctx, self.client = spec, ctx, client
        self.rng = np.random.default_rng(spec.seed)

    # prompt pieces -------------------------------------------------------------

    def example_sets(self, label: str | None) -> list[tuple[str, ...]]:
        if not self.spec.few_shot:
            return [()]
        if len(self.ctx.outside) < self.spec.examples_per_set:
            raise ValueError("not enough outside respondents for few-shot examples")
        sets = []
        for _ in range(self.spec.example_sets):
            idx = self.rng.choice(len(self.ctx.outside), self.spec.examples_per_set, replace=False)
            sets.append(tuple(self.render_example(self.ctx.outside[i], label) for i in sorted(idx)))
        return sets

    def render_example(self, record, label: str | None) -> str:
        if isinstance(record, SushiRecord):
            return render_ranking(record.ranking)
        return render_premiums({p: record.premiums[f"{p}_{label}"] for p in PRODUCTS})

    def persona(self, slot: int):
        if self.spec.method != "PersonaSampling":
            return None
        if not self.ctx.outside:
            raise ValueError("persona sampling needs outside respondents")
        return self.ctx.outside[slot % len(self.ctx.outside)]

    def prompt(self, examples, label: str | None, persona) -> list[dict[str, str]]:
        ctx = PromptContext(
            items=tuple(self.ctx.items),
            label=label,
            examples=examples,
            persona=persona_text(persona.persona) if persona is not None else None,
            batch_size=self.spec.batch_size,
        )
        return build_prompt(self.spec.problem, self.spec.method, ctx)

    # outcome handling ---------------------------------------------------------------

    def parser(self) -> Callable[[str], Any]:
        n = len(self.ctx.items)
        spec = self.spec
        if spec.problem == "assortment":
            return {
                "Sampling": lambda t: parse_ranking(t, n),
                "PersonaSampling": lambda t: parse_ranking(t, n),
                "BatchGeneration": lambda t: parse_ranking_batch(t, n, spec.batch_size),
                "Description": lambda t: parse_utilities(t, n),
            }[spec.method]
        return {
            "Sampling": parse_wtp,
            "PersonaSampling": parse_wtp,
            "BatchGeneration": lambda t: parse_wtp_batch(t, spec.batch_size),
            "Description": parse_wtp_description,
        }[spec.method]

    def to_distributions(self, outcomes: Sequence[Any], label: str | None) -> dict[str, Any]:
        if self.spec.problem == "assortment":
            return {"assortment": RankingDistribution.empirical(outcomes, n=len(self.ctx.items))}
        return {
            f"{p}_{label}": ScalarDistribution.empirical([ENDOWMENT + o[p] for o in outcomes]) for p in PRODUCTS
        }

    def pairs(self, draws: Sequence[_Draw], label: str | None) -> dict[str, list]:
        if self.spec.method != "PersonaSampling":
            return {}
        if self.spec.problem == "assortment":
            return {"assortment": [(d.persona.ranking, d.value) for d in draws]}
        return {
            f"{p}_{label}": [
                (ENDOWMENT + d.persona.premiums[f"{p}_{label}"], ENDOWMENT + d.value[p]) for d in draws
            ]
            for p in PRODUCTS
        }

    # methods ---------------------------------------------------------------------------

    def run_label(self, label: str | None) -> list[Estimate]:
        spec = self.spec
        tag0 = f"{spec.problem}/{spec.method}/{'few' if spec.few_shot else 'zero'}/{label or '-'}"
        parse = self.parser()
        out: list[Estimate] = []
        for s, examples in enumerate(self.example_sets(label)):
            tag = f"{tag0}/set{s}"
            if spec.method in ("Sampling", "PersonaSampling"):
                target = spec.few_shot_pool_size if spec.few_shot else spec.pool_size
                reps = spec.runs_per_set if spec.few_shot else spec.repetitions

                def make(slot: int):
                    persona = self.persona(slot)
                    return self.prompt(examples, label, persona), persona

                pool = _collect(self.client, make, parse, target, tag, spec)
                for r in range(reps):
                    idx = np.sort(self.rng.choice(len(pool), spec.subsample_size, replace=False))
                    chosen = [pool[i] for i in idx]
                    out.append(
                        Estimate(
                            len(out),
                            self.to_distributions([d.value for d in chosen], label),
                            self.pairs(chosen, label),
                            provenance={"example_set": s, "cache_keys": sorted({d.key for d in chosen})},
                        )
                    )
            else:
                count = spec.runs_per_set if spec.few_shot else spec.repetitions
                msgs = self.prompt(examples, label, None)
                draws = _collect(self.client, lambda slot: (msgs, None), parse, count, tag, spec)
                for d in draws:
                    out.append(
                        Estimate(
                            len(out),
                            self.from_single_query(d.value, label),
                            provenance={"example_set": s, "cache_keys": [d.key]},
                        )
                    )
        return out

    def from_single_query(self, value: Any, label: str | None) -> dict[str, Any]:
        spec = self.spec
        if spec.method == "BatchGeneration":
            outcomes = list(value)
            if spec.resample_size is not None:
                idx = self.rng.choice(len(outcomes), spec.resample_size, replace=True)
                outcomes = [outcomes[i] for i in idx]
            return self.to_distributions(outcomes, label)
        # Description
        if spec.problem == "assortment":
            seed = int(self.rng.integers(2**63))
            return {"assortment": plackett_luce_sample(value, spec.description_samples, seed)}
        return {
            f"{p}_{label}": ScalarDistribution.from_atoms([ENDOWMENT + v for v in value[p][0]], value[p][1])
            for p in PRODUCTS
        }

    def run_newsvendor(self) -> list[Estimate]:
        spec, series = self.spec, list(self.ctx.series)
        if len(series) < 2:
            raise ValueError("newsvendor generation needs at least two items")
        stats = []
        for s in series:
            obs = np.array(s.observed(), dtype=float)
            stats.append(ReferenceItem(s.metadata, float(obs.mean()), float(obs.std())))
        estimates = [Estimate(k, {}, provenance={"cache_keys": []}) for k in range(spec.queries_per_item)]
        for i, target in enumerate(series):
            others = [j for j in range(len(series)) if j != i]
            k = min(spec.reference_count, len(others))
            refs = tuple(stats[j] for j in sorted(self.rng.choice(others, k, replace=False)))
            msgs = build_prompt("newsvendor", "Description", PromptContext(references=refs, target=target.metadata))
            draws = _collect(
                self.client, lambda slot: (msgs, None), parse_newsvendor_prediction,
                spec.queries_per_item, f"newsvendor/{target.item_id}", spec,
            )
            for est, d in zip(estimates, draws):
                est.normal_specs[target.item_id] = d.value
                est.distributions[target.item_id] = discretize_normal(d.value, spec.normal_atoms)
                est.provenance["cache_keys"].append(d.key)
        return estimates


def run_generation(spec: GenerationSpec, ctx: GenerationContext, client: LlmClient) -> list[Estimate]:
    """Estimated distributions for one generation method.

    Pricing runs once per label condition; estimates with the same replicate index
    are merged so each holds all six product keys.
    """
    runner = _Runner(spec, ctx, client)
    if spec.problem == "newsvendor":
        return runner.run_newsvendor()
    if spec.problem == "assortment":
        if not ctx.items:
            raise ValueError("assortment generation needs item descriptions")
        return runner.run_label(None)
    merged: list[Estimate] = []
    for label in ctx.labels:
        for est in runner.run_label(label):
            if est.replicate == len(merged):
                merged.append(replace(est, provenance={"cache_keys": list(est.provenance["cache_keys"])}))
            else:
                target = merged[est.replicate]
                target.distributions.update(est.distributions)
                target.paired.update(est.paired)
                target.provenance["cache_keys"].extend(est.provenance["cache_keys"])
    return merged
