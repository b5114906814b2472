"""Prompt templates for the three generation tasks.

Templates are plain strings so rendering is byte-stable; every prompt is a single
user message.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..data import METADATA_FIELDS

METHODS = ("Sampling", "PersonaSampling", "BatchGeneration", "Description")
PROBLEMS = ("assortment", "pricing", "newsvendor")


class MissingContext(ValueError):
    pass


# --- shared pieces ----------------------------------------------------------------------

FEW_SHOT_INTRO = (
    "To help with the estimation task, we provide some examples of a respondent's decision "
    "as guidance for the model.\n"
)

PERSONA_BLOCK = (
    "To help with the estimation task, we provide a persona description of the one you should pretend to be.\n"
    "\n"
    "So, pretend you are {persona}.\n"
)


def _examples_block(examples: Sequence[str], assortment: bool) -> str:
    lines = [FEW_SHOT_INTRO]
    if assortment:
        lines.append("The examples are listed below:\n")
    lines.append(f"Examples (totally {len(examples)} examples):")
    lines += [f"- {i}: A person made a decision of: {ex}" for i, ex in enumerate(examples)]
    return "\n".join(lines) + "\n"


# --- assortment ----------------------------------------------------------------------------

SUSHI_BACKGROUND = (
    "We study sushi preference patterns among Japanese consumers. "
    "The sushi items listed below are those considered.\n"
    "\n"
    "Sushi items (Target items):\n"
    "{items}\n"
)

SUSHI_SAMPLING = (
    "Based on the information provided, please simulate a Japanese respondent's sushi preference ranking.\n"
    "\n"
    "Task: Generate one ranking to represent a potential preference ordering over the {n} sushi items.\n"
    "\n"
    "INSTRUCTIONS:\n"
    "1. First, explain your reasoning. Consider the sushi item descriptions (and examples and persona if we provided).\n"
    "2. Second, provide the final ranking as exactly {n} unique integers from 0 to {last}, "
    "ordered from most preferred to least preferred.\n"
    "\n"
    "Output Format: Reasoning: [...]\n"
    "Final Answer: [{n} integers separated by spaces]\n"
)

SUSHI_BATCH = (
    "Based on the information provided, please generate a representative batch of sushi preference rankings.\n"
    "\n"
    "Task: Generate a batch of {batch} independent preference rankings over the {n} sushi items.\n"
    "\n"
    "INSTRUCTIONS:\n"
    "1. First, explain your reasoning. Consider the sushi item descriptions (and examples if we provided).\n"
    "2. Second, please output exactly {batch} rankings, each consisting of {n} unique integers from 0 to {last}, "
    "ordered from most preferred to least preferred.\n"
    "\n"
    "Output Format: Reasoning: [...]\n"
    "Final Answer: [{batch} lines of rankings, each line corresponding to one ranking.]\n"
)

SUSHI_DESCRIPTION = (
    "Based on the information provided, please verbalize the utilities for the {n} sushi.\n"
    "\n"
    "Task: Provide utilities to {n} sushi, and utilities can be any real numbers (scale/shift invariant) "
    "and must be floats in [0, 5].\n"
    "\n"
    "INSTRUCTIONS:\n"
    "1. First, explain your reasoning. Consider the sushi item descriptions (and examples if we provided).\n"
    "2. Second, provide the utilities.\n"
    "\n"
    "Output Format: Reasoning: [...]\n"
    'Final Answer: [{{"0": <float>, "1": <float>, ..., "{last}": <float>}}]\n'
)

# --- pricing --------------------------------------------------------------------------------

PRICING_BACKGROUND = (
    "We study willingness-to-pay premiums for tablea chocolate products among consumers from "
    "Central Bicol State University of Agriculture in the Philippines. You will help us simulate "
    "willingness-to-pay decision. Here are three target items with there awards/origin:\n"
    "\n"
    "{block}\n"
)

PRICING_LABELS = {
    "award": (
        "Chocolate products (providing awards):\n"
        "- Bohol: won Academy of Chocolate\n"
        "- Davao: won Great Taste\n"
        "- Improved Bicol: no award"
    ),
    "origin": (
        "Chocolate products (providing origin):\n"
        "- Bohol: Bohol island cacao\n"
        "- Davao: Davao region cacao\n"
        "- Improved Bicol: Bicol region cacao"
    ),
}

PRICING_LEAD = (
    "Based on the information provided, please finish the task below. "
    "Suppose you hold an endowment chocolate (regular Bicol) worth 44 PHP.\n"
    "\n"
)

PRICING_SAMPLING = PRICING_LEAD + (
    "Task: For each target product, report the premium (additional PHP over 44) you'd be willing to pay "
    "to exchange for it.\n"
    "\n"
    "INSTRUCTIONS:\n"
    "1. First, explain your reasoning. Consider the chocolate item descriptions (and examples and persona if we provided).\n"
    "2. Second, provide the premium (additional PHP over 44) you'd be willing to pay to exchange for each "
    "target product, and each premium value must be between 0 and 100. Use non-negative numbers; if you "
    "would not exchange for that product, use 0.\n"
    "\n"
    "Output Format: Reasoning: [...]\n"
    'Final Answer: [{{"Bohol": X, "Davao": Y, "ImprovedBicol": Z}}]\n'
)

PRICING_BATCH = PRICING_LEAD + (
    "Task: For each target product, provide {batch} independent premiums (additional PHP over 44) you'd be "
    "willing to pay to exchange for it.\n"
    "\n"
    "INSTRUCTIONS:\n"
    "1. First, explain your reasoning. Consider the chocolate item descriptions (and examples if we provided).\n"
    "2. Second, provide {batch} premiums (additional PHP over 44) you'd be willing to pay to exchange for each "
    "target product, and each premium value must be between 0 and 100. Use non-negative numbers; if you "
    "would not exchange for that product, use 0.\n"
    "\n"
    "Output Format: Reasoning: [...]\n"
    'Final Answer: [{{"Bohol": X_1, "Davao": Y_1, "ImprovedBicol": Z_1}},'
    '{{"Bohol": X_2, "Davao": Y_2, "ImprovedBicol": Z_2}},...,'
    '{{"Bohol": X_{batch}, "Davao": Y_{batch}, "ImprovedBicol": Z_{batch}}}]\n'
)

PRICING_DESCRIPTION = PRICING_LEAD + (
    "Task: For each target product, provide a discrete distribution over the premium (additional PHP over 44) "
    "you would be willing to pay to exchange for it.\n"
    "\n"
    "INSTRUCTIONS:\n"
    "1. First, explain your reasoning. Consider the chocolate item descriptions (and examples if we provided).\n"
    "2. Second, for each product, output exactly 5 most likely premium values. The 5 values must include 0 "
    "(meaning you would not exchange), and each premium value must be between 0 and 100. Also, output the "
    "probability for each of the 5 values. Probabilities must be non-negative and sum to 1 for each product. "
    "Please avoid identical distributions across the three products unless strongly justified.\n"
    "\n"
    "Output Format: Reasoning: [...] Final Answer: [\n"
    "{{\n"
    '  "premium_support": {{\n'
    '    "Bohol": [v1, v2, ..., v5],\n'
    '    "Davao": [v1, v2, ..., v5],\n'
    '    "ImprovedBicol": [v1, v2, ..., v5]\n'
    "  }},\n"
    '  "probabilities": {{\n'
    '    "Bohol": [p1, p2, ..., p5],\n'
    '    "Davao": [p1, p2, ..., p5],\n'
    '    "ImprovedBicol": [p1, p2, ..., p5]\n'
    "  }}\n"
    "}} ]\n"
)

# --- newsvendor -------------------------------------------------------------------------------

NEWSVENDOR_HEAD = (
    "You are an expert in inventory demand forecasting. Use the provided reference items to estimate "
    "statistics for the Target Item.\n"
    "\n"
    "Context ({count} Reference Items with known Demand Statistics):\n"
)

NEWSVENDOR_TAIL = (
    "Target Item Task:\n"
    "Please estimate the demand distribution for:\n"
    "- Product Name: {name}\n"
    "- Features:\n"
    "{features}\n"
    "\n"
    "Task: Estimate the underlying Normal distribution parameters for the Target Item.\n"
    "\n"
    "STRICT OUTPUT FORMAT:\n"
    "You must start your response with exactly this line:\n"
    "PREDICTION -> Mean: [Value], Std: [Value]\n"
    "\n"
    "Then, on a new line, provide your:\n"
    "REASONING -> [Your detailed explanation here]\n"
)

SEPARATOR = "-" * 30


@dataclass(frozen=True)
class ReferenceItem:
    features: dict[str, str] = field(hash=False)
    mean: float
    std: float


@dataclass(frozen=True)
class PromptContext:
    """Everything a template may need; unused fields are ignored."""

    items: tuple[str, ...] = ()  # assortment item descriptions
    label: str | None = None  # pricing label condition
    examples: tuple[str, ...] = ()  # rendered few-shot examples
    persona: str | None = None
    batch_size: int | None = None
    references: tuple[ReferenceItem, ...] = ()
    target: dict[str, str] | None = field(default=None, hash=False)


def _feature_lines(features: dict[str, str], indent: str) -> str:
    return "\n".join(f"{indent}- {k}: {features.get(k, '')}" for k in METADATA_FIELDS)


def render_ranking(ranking: Sequence[int]) -> str:
    return " ".join(str(int(x)) for x in ranking)


def render_premiums(premiums: dict[str, float]) -> str:
    names = {"bohol": "Bohol", "davao": "Davao", "improvedbicol": "ImprovedBicol"}
    parts = [f'"{names[k]}": {premiums[k]:g}' for k in ("bohol", "davao", "improvedbicol")]
    return "{" + ", ".join(parts) + "}"


def _assortment(method: str, ctx: PromptContext) -> str:
    if not ctx.items:
        raise MissingContext("assortment prompts need item descriptions")
    n = len(ctx.items)
    items = "\n".join(f"- {i}: {d}" for i, d in enumerate(ctx.items))
    parts = [SUSHI_BACKGROUND.format(items=items)]
    if ctx.examples:
        parts.append(_examples_block(ctx.examples, assortment=True))
    if method == "PersonaSampling":
        parts.append(PERSONA_BLOCK.format(persona=ctx.persona))
    if method in ("Sampling", "PersonaSampling"):
        parts.append(SUSHI_SAMPLING.format(n=n, last=n - 1))
    elif method == "BatchGeneration":
        parts.append(SUSHI_BATCH.format(n=n, last=n - 1, batch=ctx.batch_size))
    else:
        parts.append(SUSHI_DESCRIPTION.format(n=n, last=n - 1))
    return "\n".join(parts)


def _pricing(method: str, ctx: PromptContext) -> str:
    if ctx.label not in PRICING_LABELS:
        raise MissingContext("pricing prompts need a label condition: award or origin")
    parts = [PRICING_BACKGROUND.format(block=PRICING_LABELS[ctx.label])]
    if ctx.examples:
        parts.append(_examples_block(ctx.examples, assortment=False))
    if method == "PersonaSampling":
        parts.append(PERSONA_BLOCK.format(persona=ctx.persona))
    if method in ("Sampling", "PersonaSampling"):
        parts.append(PRICING_SAMPLING)
    elif method == "BatchGeneration":
        parts.append(PRICING_BATCH.format(batch=ctx.batch_size))
    else:
        parts.append(PRICING_DESCRIPTION)
    return "\n".join(parts)


def _newsvendor(method: str, ctx: PromptContext) -> str:
    if method != "Description":
        raise MissingContext("newsvendor prompts support the Description method only")
    if not ctx.references or ctx.target is None:
        raise MissingContext("newsvendor prompts need reference items and a target")
    lines = [NEWSVENDOR_HEAD.format(count=len(ctx.references))]
    for i, ref in enumerate(ctx.references, start=1):
        lines.append(f"[Reference Item {i}]")
        lines.append("Features:")
        lines.append(_feature_lines(ref.features, ""))
        lines.append("")
        lines.append(f"KNOWN STATISTICS -> Mean: {ref.mean:.2f}, Std: {ref.std:.2f}")
        lines.append(SEPARATOR)
    lines.append("")
    name = ctx.target.get("prod_name", "")
    lines.append(NEWSVENDOR_TAIL.format(name=name, features=_feature_lines(ctx.target, "    ")))
    return "\n".join(lines)


def build_prompt(problem: str, method: str, ctx: PromptContext) -> list[dict[str, str]]:
    """Chat messages for one query."""
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "PersonaSampling" and not ctx.persona:
        raise MissingContext("persona sampling needs a persona")
    if method == "BatchGeneration" and not ctx.batch_size:
        raise MissingContext("batch generation needs a batch size")
    render = {"assortment": _assortment, "pricing": _pricing, "newsvendor": _newsvendor}[problem]
    return [{"role": "user", "content": render(method, ctx)}]
