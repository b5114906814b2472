"""Parsers for model responses. Each takes the last final-answer marker, since
reasoning text before it may contain lookalike numbers."""

from __future__ import annotations

import json
import math
import re

from ..core import NormalSpec, RangeError

PRODUCT_KEYS = {"bohol": "bohol", "davao": "davao", "improvedbicol": "improvedbicol"}
PREMIUM_MAX = 100.0
PROB_SLACK = 1e-3

_FINAL = re.compile(r"final\s*answer\s*[:：]?", re.IGNORECASE)
_INT = re.compile(r"-?\d+")
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PREDICTION = re.compile(
    r"PREDICTION\s*(?:->|→|=>|:|\\rightarrow)?\s*Mean\s*[:=]\s*\[?\s*(" + _NUM + r")\s*\]?\s*,\s*"
    r"Std\s*[:=]\s*\[?\s*(" + _NUM + r")",
    re.IGNORECASE,
)


class ParseError(ValueError):
    pass


class ProbabilityError(ParseError):
    pass


class InvalidStd(ParseError):
    pass


def final_answer(text: str) -> str:
    """Text after the last 'Final Answer' marker."""
    matches = list(_FINAL.finditer(text))
    if not matches:
        raise ParseError("no 'Final Answer' line")
    return text[matches[-1].end() :]


def _ranking_from(chunk: str, n: int) -> tuple[int, ...]:
    nums = [int(x) for x in _INT.findall(chunk)]
    if len(nums) != n:
        raise ParseError(f"expected {n} integers, found {len(nums)}")
    if any(not 0 <= x < n for x in nums):
        raise ParseError(f"items must lie in 0..{n - 1}")
    if len(set(nums)) != n:
        raise ParseError("duplicate items in ranking")
    return tuple(nums)


def parse_ranking(text: str, n: int) -> tuple[int, ...]:
    tail = final_answer(text)
    line = next((ln for ln in tail.splitlines() if _INT.search(ln)), None)
    if line is None:
        raise ParseError("final answer holds no integers")
    return _ranking_from(line, n)


def parse_ranking_batch(text: str, n: int, count: int) -> list[tuple[int, ...]]:
    """``count`` rankings, one per line after the marker; lines that do not parse are skipped."""
    tail = final_answer(text)
    rankings = []
    for line in tail.splitlines():
        if not _INT.search(line):
            continue
        try:
            rankings.append(_ranking_from(line, n))
        except ParseError:
            continue
    if len(rankings) < count:
        raise ParseError(f"expected {count} rankings, found {len(rankings)} valid")
    return rankings[:count]


def _json_objects(chunk: str) -> list:
    """All top-level JSON objects in ``chunk`` in order."""
    decoder = json.JSONDecoder()
    out, i = [], 0
    while True:
        i = chunk.find("{", i)
        if i < 0:
            return out
        try:
            obj, end = decoder.raw_decode(chunk, i)
        except json.JSONDecodeError:
            i += 1
            continue
        out.append(obj)
        i = end


def _canonical_product(name: str) -> str:
    key = re.sub(r"[^a-z]", "", name.lower())
    if key not in PRODUCT_KEYS:
        raise ParseError(f"unknown product {name!r}")
    return PRODUCT_KEYS[key]


def _premium(value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"premium {value!r} is not a number") from None
    if not math.isfinite(x) or not 0.0 <= x <= PREMIUM_MAX:
        raise RangeError(f"premium {x} outside [0, {PREMIUM_MAX:g}]")
    return x


def _premium_map(obj) -> dict[str, float]:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object of premiums")
    out = {_canonical_product(k): _premium(v) for k, v in obj.items()}
    if set(out) != set(PRODUCT_KEYS.values()):
        raise ParseError(f"premiums for {sorted(out)} instead of all three products")
    return out


def parse_wtp(text: str) -> dict[str, float]:
    objs = [o for o in _json_objects(final_answer(text)) if isinstance(o, dict)]
    if not objs:
        raise ParseError("no JSON object after the final answer marker")
    return _premium_map(objs[-1])


def parse_wtp_batch(text: str, count: int) -> list[dict[str, float]]:
    tail = final_answer(text)
    rows = []
    for obj in _json_objects(tail):
        try:
            rows.append(_premium_map(obj))
        except (ParseError, RangeError):
            continue
    if len(rows) < count:
        raise ParseError(f"expected {count} premium sets, found {len(rows)} valid")
    return rows[:count]


def parse_wtp_description(text: str, support_size: int = 5) -> dict[str, tuple[list[float], list[float]]]:
    """Per product: support values (must include 0) and probabilities, renormalized exactly."""
    objs = [o for o in _json_objects(final_answer(text)) if isinstance(o, dict) and "premium_support" in o]
    if not objs:
        raise ParseError("no premium_support object")
    obj = objs[-1]
    support = {_canonical_product(k): v for k, v in obj.get("premium_support", {}).items()}
    probs = {_canonical_product(k): v for k, v in obj.get("probabilities", {}).items()}
    out = {}
    for product in PRODUCT_KEYS.values():
        if product not in support or product not in probs:
            raise ParseError(f"missing distribution for {product}")
        vals = [_premium(v) for v in support[product]]
        try:
            ps = [float(p) for p in probs[product]]
        except (TypeError, ValueError):
            raise ParseError(f"non-numeric probability for {product}") from None
        if len(vals) != support_size or len(ps) != support_size:
            raise ParseError(f"{product}: expected {support_size} values and probabilities")
        if 0.0 not in vals:
            raise ParseError(f"{product}: support must include 0")
        if any(p < 0 or not math.isfinite(p) for p in ps):
            raise ProbabilityError(f"{product}: negative probability")
        total = math.fsum(ps)
        if abs(total - 1.0) > PROB_SLACK:
            raise ProbabilityError(f"{product}: probabilities sum to {total:.4f}")
        out[product] = (vals, [p / total for p in ps])
    return out


def parse_utilities(text: str, n: int) -> list[float]:
    """Utilities keyed "0".."n-1"; accepts either a JSON object or bare key/value pairs."""
    tail = final_answer(text)
    pairs = dict(re.findall(r'"?(\d+)"?\s*:\s*(' + _NUM + r")", tail))
    try:
        util = [float(pairs[str(i)]) for i in range(n)]
    except KeyError as exc:
        raise ParseError(f"missing utility for item {exc.args[0]}") from None
    if any(not math.isfinite(u) for u in util):
        raise ParseError("non-finite utility")
    return util


def parse_newsvendor_prediction(text: str) -> NormalSpec:
    matches = _PREDICTION.findall(text)
    if not matches:
        raise ParseError("no 'PREDICTION -> Mean: ..., Std: ...' line")
    mean, std = (float(x) for x in matches[-1])
    if not std > 0:
        raise InvalidStd(f"std must be positive, got {std}")
    return NormalSpec(mean, std)
