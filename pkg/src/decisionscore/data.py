"""Dataset loaders, ground-truth construction and the weekly-demand cleaning pipeline.

All inputs are CSV files in the canonical schemas below. Upstream datasets ship in
other layouts; convert them once into these schemas.

Sushi preferences (one row per respondent, file order defines ground-truth membership)::

    id,rank_1,...,rank_n,<persona columns...>

Chocolate willingness-to-pay premiums (0-100 PHP on top of a 44 PHP endowment)::

    id,bohol_award,davao_award,improvedbicol_award,bohol_origin,davao_origin,improvedbicol_origin,<persona columns...>

Daily sales and article metadata for the demand pipeline::

    article_id,date,units,price
    article_id,prod_name,product_type_name,...,detail_desc
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .core import InvalidRanking, RangeError, RankingDistribution, ScalarDistribution, validate_ranking

log = logging.getLogger(__name__)

SUSHI_GROUND_TRUTH = 600
WTP_GROUND_TRUTH = 100
ENDOWMENT = 44.0
PREMIUM_MAX = 100.0
PRODUCTS = ("bohol", "davao", "improvedbicol")
LABELS = ("award", "origin")
WTP_COLUMNS = tuple(f"{p}_{label}" for label in LABELS for p in PRODUCTS)
METADATA_FIELDS = (
    "prod_name",
    "product_type_name",
    "graphical_appearance_name",
    "colour_group_name",
    "department_name",
    "index_name",
    "section_name",
    "garment_group_name",
    "detail_desc",
)
WINDOW_START = dt.date(2019, 3, 3)
WINDOW_WEEKS = 30


class SchemaError(ValueError):
    pass


def _read_rows(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        return list(reader.fieldnames), list(reader)


# --- sushi -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SushiRecord:
    respondent_id: str
    ranking: tuple[int, ...]
    persona: dict[str, str] = field(default_factory=dict, hash=False)


def load_sushi(path: str | Path) -> list[SushiRecord]:
    header, rows = _read_rows(path)
    rank_cols = [c for c in header if c.startswith("rank_")]
    if "id" not in header or not rank_cols:
        raise SchemaError(f"{path}: need an id column and rank_1..rank_n")
    rank_cols.sort(key=lambda c: int(c.split("_")[1]))
    n = len(rank_cols)
    if [int(c.split("_")[1]) for c in rank_cols] != list(range(1, n + 1)):
        raise SchemaError(f"{path}: rank columns must be rank_1..rank_{n}")
    persona_cols = [c for c in header if c != "id" and c not in rank_cols]
    records = []
    for lineno, row in enumerate(rows, start=2):
        try:
            ranking = validate_ranking([int(row[c]) for c in rank_cols], n)
        except (InvalidRanking, ValueError) as exc:
            raise InvalidRanking(f"{path}: row {lineno}: {exc}") from None
        records.append(SushiRecord(row["id"], ranking, {c: row[c] for c in persona_cols}))
    return records


def ground_truth_assortment(records: Sequence[SushiRecord], count: int = SUSHI_GROUND_TRUTH) -> RankingDistribution:
    """Uniform over the first ``count`` respondents in file order."""
    head = records[:count]
    if not head:
        raise SchemaError("no sushi records")
    return RankingDistribution.empirical([r.ranking for r in head], n=len(head[0].ranking))


def load_item_descriptions(path: str | Path) -> list[str]:
    """Item descriptions from an ``id,description`` CSV, ordered by id."""
    header, rows = _read_rows(path)
    if not {"id", "description"} <= set(header):
        raise SchemaError(f"{path}: need id and description columns")
    rows = sorted(rows, key=lambda r: int(r["id"]))
    if [int(r["id"]) for r in rows] != list(range(len(rows))):
        raise SchemaError(f"{path}: ids must be 0..n-1")
    return [r["description"] for r in rows]


# --- willingness to pay ------------------------------------------------------------------


@dataclass(frozen=True)
class WtpRecord:
    respondent_id: str
    premiums: dict[str, float] = field(hash=False)
    persona: dict[str, str] = field(default_factory=dict, hash=False)


def load_wtp(path: str | Path) -> list[WtpRecord]:
    header, rows = _read_rows(path)
    missing = [c for c in ("id",) + WTP_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    persona_cols = [c for c in header if c != "id" and c not in WTP_COLUMNS]
    records = []
    for lineno, row in enumerate(rows, start=2):
        premiums = {}
        for col in WTP_COLUMNS:
            try:
                value = float(row[col])
            except ValueError:
                raise SchemaError(f"{path}: row {lineno}: {col} is not a number") from None
            if not 0.0 <= value <= PREMIUM_MAX:
                raise RangeError(f"{path}: row {lineno}: premium {value} outside [0, {PREMIUM_MAX:g}]")
            premiums[col] = value
        records.append(WtpRecord(row["id"], premiums, {c: row[c] for c in persona_cols}))
    return records


def ground_truth_pricing(records: Sequence[WtpRecord], product: str, count: int = WTP_GROUND_TRUTH) -> ScalarDistribution:
    """Uniform over total WTP (endowment plus premium) of the first ``count`` respondents."""
    if product not in WTP_COLUMNS:
        raise SchemaError(f"unknown product {product!r}")
    head = records[:count]
    if not head:
        raise SchemaError("no WTP records")
    return ScalarDistribution.empirical([ENDOWMENT + r.premiums[product] for r in head])


def persona_text(persona: dict[str, str]) -> str:
    return "; ".join(f"{k.replace('_', ' ')}: {v}" for k, v in persona.items() if v != "")


# --- weekly demand ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DemandSeries:
    item_id: str
    metadata: dict[str, str] = field(hash=False)
    demands: tuple[float | None, ...]
    prices: tuple[float | None, ...]
    mean_price: float | None = None

    @property
    def missing(self) -> int:
        return sum(d is None for d in self.demands)

    def observed(self) -> list[float]:
        return [d for d in self.demands if d is not None]


@dataclass(frozen=True)
class SaleRow:
    article_id: str
    date: dt.date
    units: float
    price: float


def load_sales(path: str | Path) -> list[SaleRow]:
    header, rows = _read_rows(path)
    if not {"article_id", "date", "units", "price"} <= set(header):
        raise SchemaError(f"{path}: need article_id,date,units,price")
    out = []
    for lineno, row in enumerate(rows, start=2):
        try:
            out.append(
                SaleRow(row["article_id"], dt.date.fromisoformat(row["date"]), float(row["units"]), float(row["price"]))
            )
        except ValueError as exc:
            raise SchemaError(f"{path}: row {lineno}: {exc}") from None
    return out


def load_metadata(path: str | Path) -> dict[str, dict[str, str]]:
    header, rows = _read_rows(path)
    missing = [c for c in ("article_id",) + METADATA_FIELDS if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    return {row["article_id"]: {k: row[k] for k in METADATA_FIELDS} for row in rows}


def weekly_series(
    sales: Iterable[SaleRow],
    metadata: dict[str, dict[str, str]],
    start: dt.date = WINDOW_START,
    weeks: int = WINDOW_WEEKS,
) -> list[DemandSeries]:
    """Weekly unit totals and unit-weighted mean prices in 7-day blocks from ``start``."""
    units: dict[str, list[float]] = {}
    revenue: dict[str, list[float]] = {}
    for row in sales:
        week = (row.date - start).days // 7
        if not 0 <= week < weeks:
            continue
        if row.article_id not in metadata:
            raise SchemaError(f"article {row.article_id} has no metadata")
        units.setdefault(row.article_id, [0.0] * weeks)[week] += row.units
        revenue.setdefault(row.article_id, [0.0] * weeks)[week] += row.units * row.price
    out = []
    for item in sorted(units):
        u, r = units[item], revenue[item]
        prices = tuple(r[w] / u[w] if u[w] > 0 else None for w in range(weeks))
        out.append(DemandSeries(item, metadata[item], tuple(u), prices))
    return out


def clean_series(
    series: DemandSeries, price_tolerance: float = 0.2, max_missing: int = 10
) -> DemandSeries | None:
    """Apply the three filters to one item; None when the item is dropped.

    The reference mean price is computed once and stored, so cleaning an already
    cleaned series changes nothing.
    """
    mu = series.mean_price
    if mu is None:
        observed = [p for p in series.prices if p is not None]
        mu = math.fsum(observed) / len(observed) if observed else 0.0
    demands, prices = [], []
    for d, p in zip(series.demands, series.prices):
        bad_price = p is None or abs(p - mu) > price_tolerance * mu
        if d is None or d == 0 or bad_price:
            demands.append(None)
            prices.append(None)
        else:
            demands.append(d)
            prices.append(p)
    if sum(d is None for d in demands) > max_missing:
        return None
    return replace(series, demands=tuple(demands), prices=tuple(prices), mean_price=mu)


def preprocess_hm(
    series: Iterable[DemandSeries],
    product_type: str | None = "Trousers",
    price_tolerance: float = 0.2,
    max_missing: int = 10,
) -> list[DemandSeries]:
    kept = []
    for s in series:
        if product_type is not None and s.metadata.get("product_type_name") != product_type:
            continue
        cleaned = clean_series(s, price_tolerance, max_missing)
        if cleaned is None:
            log.info("dropping item %s: too many missing weeks", s.item_id)
            continue
        kept.append(cleaned)
    return kept


def ground_truth_newsvendor(series: DemandSeries) -> ScalarDistribution:
    observed = series.observed()
    if not observed:
        raise SchemaError(f"item {series.item_id} has no observed demand")
    return ScalarDistribution.empirical(observed)


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def write_demand_csv(series: Sequence[DemandSeries], path: str | Path) -> None:
    weeks = len(series[0].demands) if series else WINDOW_WEEKS
    cols = ["article_id", *METADATA_FIELDS, "mean_price"]
    cols += [f"d{w + 1:02d}" for w in range(weeks)] + [f"p{w + 1:02d}" for w in range(weeks)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for s in series:
            writer.writerow(
                [s.item_id, *(s.metadata.get(k, "") for k in METADATA_FIELDS), _fmt(s.mean_price)]
                + [_fmt(d) for d in s.demands]
                + [_fmt(p) for p in s.prices]
            )


def load_demand_csv(path: str | Path) -> list[DemandSeries]:
    header, rows = _read_rows(path)
    dcols = [c for c in header if c.startswith("d") and c[1:].isdigit()]
    pcols = [c for c in header if c.startswith("p") and c[1:].isdigit()]
    if "article_id" not in header or not dcols or len(dcols) != len(pcols):
        raise SchemaError(f"{path}: not a demand table")

    def num(x: str) -> float | None:
        return float(x) if x != "" else None

    out = []
    for row in rows:
        out.append(
            DemandSeries(
                row["article_id"],
                {k: row.get(k, "") for k in METADATA_FIELDS},
                tuple(num(row[c]) for c in dcols),
                tuple(num(row[c]) for c in pcols),
                num(row.get("mean_price", "")),
            )
        )
    return out
