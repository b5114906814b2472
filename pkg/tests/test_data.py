import csv
import datetime as dt

import numpy as np
import pytest

from decisionscore.core import InvalidRanking, RangeError
from decisionscore.data import (
    METADATA_FIELDS,
    WINDOW_START,
    WTP_COLUMNS,
    DemandSeries,
    SaleRow,
    SchemaError,
    ground_truth_assortment,
    ground_truth_newsvendor,
    ground_truth_pricing,
    load_demand_csv,
    load_item_descriptions,
    load_metadata,
    load_sales,
    load_sushi,
    load_wtp,
    persona_text,
    preprocess_hm,
    weekly_series,
    write_demand_csv,
)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def sushi_rows(count, seed=0):
    rng = np.random.default_rng(seed)
    return [[f"s{i}", *rng.permutation(10).tolist(), "f", "20-29"] for i in range(count)]


SUSHI_HEADER = ["id", *[f"rank_{k}" for k in range(1, 11)], "gender", "age"]


def test_load_sushi_ground_truth(tmp_path):
    rows = sushi_rows(601)
    path = write_csv(tmp_path / "sushi.csv", SUSHI_HEADER, rows)
    records = load_sushi(path)
    assert len(records) == 601 and records[0].persona == {"gender": "f", "age": "20-29"}
    gt = ground_truth_assortment(records)
    assert gt.n == 10
    assert gt.probs.sum() == pytest.approx(1.0)
    # 600 respondents, each of weight 1/600 (duplicated rankings merge)
    assert np.allclose(gt.probs * 600, np.round(gt.probs * 600))
    assert round(float((gt.probs * 600).sum())) == 600
    excluded = records[600].ranking
    if excluded not in {r.ranking for r in records[:600]}:
        assert excluded not in {tuple(o) for o in gt.rankings}


def test_sushi_duplicate_item_reports_row(tmp_path):
    rows = sushi_rows(3)
    rows[1][2] = rows[1][1]
    path = write_csv(tmp_path / "sushi.csv", SUSHI_HEADER, rows)
    with pytest.raises(InvalidRanking, match="row 3"):
        load_sushi(path)


def test_sushi_schema_error(tmp_path):
    path = write_csv(tmp_path / "bad.csv", ["id", "rank_1", "rank_3"], [["a", 0, 1]])
    with pytest.raises(SchemaError):
        load_sushi(path)


def test_item_descriptions(tmp_path):
    path = write_csv(tmp_path / "items.csv", ["id", "description"], [[1, "tuna"], [0, "ebi"]])
    assert load_item_descriptions(path) == ["ebi", "tuna"]


def wtp_rows(count):
    return [[f"w{i}", *[float((i + j) % 100) for j in range(6)], "m"] for i in range(count)]


def test_wtp_ground_truth(tmp_path):
    rows = wtp_rows(120)
    rows[0][1:7] = [20, 0, 0, 0, 0, 0]
    path = write_csv(tmp_path / "wtp.csv", ["id", *WTP_COLUMNS, "gender"], rows)
    records = load_wtp(path)
    gts = {p: ground_truth_pricing(records, p) for p in WTP_COLUMNS}
    assert 64.0 in gts["bohol_award"].values
    assert len({tuple(g.values) for g in gts.values()}) == 6
    assert all(g.values.min() >= 44 and g.values.max() <= 144 for g in gts.values())


def test_wtp_range_error(tmp_path):
    rows = wtp_rows(2)
    rows[1][3] = 101
    path = write_csv(tmp_path / "wtp.csv", ["id", *WTP_COLUMNS, "gender"], rows)
    with pytest.raises(RangeError, match="row 3"):
        load_wtp(path)


def test_wtp_missing_column(tmp_path):
    path = write_csv(tmp_path / "wtp.csv", ["id", *WTP_COLUMNS[:5]], [["a", 1, 2, 3, 4, 5]])
    with pytest.raises(SchemaError):
        load_wtp(path)


def test_persona_text_skips_blanks():
    assert persona_text({"gender": "f", "age_bin": "30-39", "x": ""}) == "gender: f; age bin: 30-39"


# --- demand pipeline ----------------------------------------------------------------------------


def meta(item, product_type="Trousers"):
    m = {f: f"{f} of {item}" for f in METADATA_FIELDS}
    m["product_type_name"] = product_type
    return m


def day(week, offset=0):
    return WINDOW_START + dt.timedelta(days=7 * week + offset)


def build_fixture():
    """One item per rule, each violating exactly that rule (or sitting on its boundary)."""
    sales, metadata = [], {}

    def item(name, units, prices, product_type="Trousers"):
        metadata[name] = meta(name, product_type)
        for w, (u, p) in enumerate(zip(units, prices)):
            if u is None:
                continue
            # split each week into two sales days to exercise aggregation
            sales.append((name, day(w, 1), u / 2, p))
            sales.append((name, day(w, 4), u / 2, p))

    base = [float(5 + w % 7) for w in range(30)]
    item("clean", base, [10.0] * 30)
    item("shorts", base, [10.0] * 30, product_type="Shorts")  # product-type filter
    item("zero11", [0.0] * 11 + base[11:], [10.0] * 30)  # 11 zero-sale weeks: dropped
    item("zero10", [0.0] * 10 + base[10:], [10.0] * 30)  # 10 zero-sale weeks: kept
    item("gaps11", [None] * 11 + base[11:], [10.0] * 30)  # 11 weeks without any rows: dropped
    item("price_outlier", base, [10.0] * 29 + [20.0])  # one week flagged by the 20% price band
    item("price11", base, [10.0] * 19 + [30.0] * 11)  # price band flags > 10 weeks: dropped
    # sales outside the window are ignored
    metadata["windowed"] = meta("windowed")
    for w in range(30):
        sales.append(("windowed", day(w), 3.0, 8.0))
    sales.append(("windowed", WINDOW_START - dt.timedelta(days=1), 100.0, 8.0))
    sales.append(("windowed", day(30), 100.0, 8.0))
    return sales, metadata


EXPECTED = {"clean": 30, "zero10": 20, "price_outlier": 29, "windowed": 30}


def write_fixture(tmp_path):
    sales, metadata = build_fixture()
    sp = write_csv(
        tmp_path / "sales.csv", ["article_id", "date", "units", "price"], [(a, d.isoformat(), u, p) for a, d, u, p in sales]
    )
    mp = write_csv(
        tmp_path / "articles.csv", ["article_id", *METADATA_FIELDS], [[k, *(v[f] for f in METADATA_FIELDS)] for k, v in metadata.items()]
    )
    return sp, mp


def test_preprocess_fixture_retained_set(tmp_path):
    sp, mp = write_fixture(tmp_path)
    kept = preprocess_hm(weekly_series(load_sales(sp), load_metadata(mp)))
    assert {s.item_id: len(s.observed()) for s in kept} == EXPECTED
    by_id = {s.item_id: s for s in kept}
    assert all(d > 0 for s in kept for d in s.observed())
    assert by_id["windowed"].observed() == [3.0] * 30
    assert by_id["price_outlier"].demands[29] is None
    assert by_id["clean"].metadata["prod_name"] == "prod_name of clean"


def test_preprocess_idempotent(tmp_path):
    sp, mp = write_fixture(tmp_path)
    once = preprocess_hm(weekly_series(load_sales(sp), load_metadata(mp)))
    assert preprocess_hm(once) == once
    path = tmp_path / "demand.csv"
    write_demand_csv(once, path)
    reloaded = load_demand_csv(path)
    assert reloaded == once
    assert preprocess_hm(reloaded) == once


def test_weekly_price_is_unit_weighted():
    rows = [SaleRow("a", day(0, 0), 1.0, 10.0), SaleRow("a", day(0, 6), 3.0, 14.0)]
    (s,) = weekly_series(rows, {"a": meta("a")})
    assert s.demands[0] == 4.0 and s.prices[0] == pytest.approx(13.0)
    assert s.demands[1] == 0.0 and s.prices[1] is None


def test_all_item_types_when_filter_disabled(tmp_path):
    sp, mp = write_fixture(tmp_path)
    kept = preprocess_hm(weekly_series(load_sales(sp), load_metadata(mp)), product_type=None)
    assert "shorts" in {s.item_id for s in kept}


def test_sales_without_metadata():
    with pytest.raises(SchemaError):
        weekly_series([SaleRow("x", day(0), 1.0, 1.0)], {})


def test_ground_truth_newsvendor_examples():
    s = DemandSeries("a", meta("a"), (5.0, 5.0, 10.0), (1.0,) * 3)
    assert ground_truth_newsvendor(s).atoms() == pytest.approx([(5.0, 2 / 3), (10.0, 1 / 3)])
    single = DemandSeries("b", meta("b"), (None, 7.0), (None, 1.0))
    assert ground_truth_newsvendor(single).atoms() == [(7.0, 1.0)]
    many = DemandSeries("c", meta("c"), tuple(float(i) for i in range(1, 31)), (1.0,) * 30)
    dist = ground_truth_newsvendor(many)
    assert dist.size == 30 and np.allclose(dist.probs, 1 / 30)
    with pytest.raises(SchemaError):
        ground_truth_newsvendor(DemandSeries("d", meta("d"), (None,), (None,)))
