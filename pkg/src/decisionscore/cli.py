"""Command-line driver: generate estimates, score them, tabulate, export survival curves.

Usage::

    decisionscore gen CONFIG
    decisionscore eval CONFIG
    decisionscore report CONFIG
    decisionscore plot-data CONFIG

CONFIG is a JSON file; relative paths inside it resolve against its directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy import stats

from . import assortment, newsvendor, pricing
from .core import (
    DistributionError,
    NormalSpec,
    RangeError,
    RankingDistribution,
    ScalarDistribution,
    survival_many,
)
from .data import (
    SUSHI_GROUND_TRUTH,
    WTP_COLUMNS,
    WTP_GROUND_TRUTH,
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
    preprocess_hm,
    weekly_series,
)
from .generate import (
    BASELINES,
    METHODS,
    AuthError,
    Estimate,
    GenerationContext,
    GenerationSpec,
    InsufficientValidResponses,
    LlmClient,
    LlmConfig,
    NetworkError,
    ResponseCache,
    run_baseline,
    run_generation,
)
from .generate.prompts import MissingContext
from .metrics import PairedPredictions, kolmogorov, persona_mae, shuffled_mae, wasserstein_kendall, wasserstein_scalar

log = logging.getLogger("decisionscore")

DIST_SCHEMA = "decisionscore.distribution/1"
RESULTS_SCHEMA = "decisionscore.results/1"
VALUES_SCHEMA = "decisionscore.values/1"
SURVIVAL_SCHEMA = "decisionscore.survival/1"

EXIT_CONFIG, EXIT_DATA, EXIT_NETWORK = 2, 3, 4

_LABEL = re.compile(r"^[A-Za-z0-9_.+-]+$")

DEFAULT_SWEEPS = {
    "rewards": ["inverse", "linear", "quadratic"],
    "budgets": [2, 5],
    "regimes": ["unit", "random", "hard"],
    "random_instances": 100,
    "c_max": 32.0,
    "cost_ranges": [[0, 32], [0, 66], [0, 100]],
    "q_range": [0.01, 0.99],
}
METRICS = ("worstcr", "avgcr", "wasserstein", "kolmogorov", "persona")


class ConfigError(ValueError):
    pass


class MissingInput(FileNotFoundError):
    pass


# --- config ------------------------------------------------------------------------------------


@dataclass
class MethodEntry:
    label: str
    method: str | None = None  # generation method
    baseline: str | None = None
    few_shot: bool = False
    options: dict[str, Any] = field(default_factory=dict)


@dataclass
class RunConfig:
    problem: str
    root: Path
    output_dir: Path
    data: dict[str, Any]
    methods: list[MethodEntry]
    metrics: tuple[str, ...] = METRICS
    sweeps: dict[str, Any] = field(default_factory=lambda: dict(DEFAULT_SWEEPS))
    seed: int = 0
    llm: dict[str, Any] = field(default_factory=dict)
    plot: dict[str, Any] = field(default_factory=dict)
    workers: int = 1

    def path(self, key: str) -> Path:
        if key not in self.data:
            raise ConfigError(f"data.{key} is required for {self.problem}")
        return self.root / self.data[key]


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    problem = raw.get("problem")
    if problem not in ("assortment", "pricing", "newsvendor"):
        raise ConfigError("problem must be assortment, pricing or newsvendor")
    root = path.parent
    methods = []
    for entry in raw.get("methods", []):
        label = entry.get("label")
        if not label or not _LABEL.match(label):
            raise ConfigError(f"method label {label!r} must match {_LABEL.pattern}")
        m = MethodEntry(label, entry.get("method"), entry.get("baseline"), bool(entry.get("few_shot", False)), dict(entry.get("options", {})))
        if (m.method is None) == (m.baseline is None):
            raise ConfigError(f"{label}: give exactly one of method or baseline")
        if m.method is not None and m.method not in METHODS:
            raise ConfigError(f"{label}: unknown method {m.method!r}")
        if m.baseline is not None and m.baseline not in BASELINES:
            raise ConfigError(f"{label}: unknown baseline {m.baseline!r}")
        methods.append(m)
    if len({m.label for m in methods}) != len(methods):
        raise ConfigError("method labels must be unique")
    metrics = tuple(raw.get("metrics", METRICS))
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ConfigError(f"unknown metrics {sorted(unknown)}")
    sweeps = {**DEFAULT_SWEEPS, **raw.get("sweeps", {})}
    _check_sweeps(sweeps)
    return RunConfig(
        problem=problem,
        root=root,
        output_dir=root / raw.get("output_dir", "out"),
        data=dict(raw.get("data", {})),
        methods=methods,
        metrics=metrics,
        sweeps=sweeps,
        seed=int(raw.get("seed", 0)),
        llm=dict(raw.get("llm", {})),
        plot=dict(raw.get("plot", {})),
        workers=int(raw.get("workers", 1)),
    )


def _check_sweeps(s: dict[str, Any]) -> None:
    if not s["c_max"] > 0:
        raise ConfigError("c_max must be positive")
    for lo, hi in s["cost_ranges"]:
        if not 0 <= lo < hi:
            raise ConfigError(f"bad cost range [{lo}, {hi}]")
    lo, hi = s["q_range"]
    if not 0 < lo < hi < 1:
        raise ConfigError("q_range must lie inside (0, 1)")
    if any(b <= 0 for b in s["budgets"]):
        raise ConfigError("budgets must be positive")
    if any(r not in assortment.REWARD_PRESETS for r in s["rewards"]):
        raise ConfigError(f"reward presets must be among {sorted(assortment.REWARD_PRESETS)}")
    if any(r not in ("unit", "random", "hard") for r in s["regimes"]):
        raise ConfigError("regimes must be unit, random or hard")


# --- problem data ----------------------------------------------------------------------------


@dataclass
class Problem:
    truths: dict[str, Any]  # key -> ground-truth distribution
    samples: dict[str, list]  # key -> ground-truth outcomes (for sampling baselines)
    context: GenerationContext
    ranking_n: int | None = None


def load_problem(cfg: RunConfig) -> Problem:
    if cfg.problem == "assortment":
        records = load_sushi(cfg.path("sushi"))
        count = int(cfg.data.get("ground_truth_count", SUSHI_GROUND_TRUTH))
        items = load_item_descriptions(cfg.path("items")) if "items" in cfg.data else []
        gt = ground_truth_assortment(records, count)
        ctx = GenerationContext(items=tuple(items), outside=tuple(records[count:]))
        return Problem({"assortment": gt}, {"assortment": [r.ranking for r in records[:count]]}, ctx, gt.n)
    if cfg.problem == "pricing":
        records = load_wtp(cfg.path("wtp"))
        count = int(cfg.data.get("ground_truth_count", WTP_GROUND_TRUTH))
        truths = {p: ground_truth_pricing(records, p, count) for p in WTP_COLUMNS}
        samples = {p: [44.0 + r.premiums[p] for r in records[:count]] for p in WTP_COLUMNS}
        return Problem(truths, samples, GenerationContext(outside=tuple(records[count:])))
    if "demand" in cfg.data:
        series = load_demand_csv(cfg.path("demand"))
    else:
        raw = weekly_series(load_sales(cfg.path("sales")), load_metadata(cfg.path("articles")))
        series = preprocess_hm(raw, cfg.data.get("product_type", "Trousers"))
    if not series:
        raise SchemaError("no demand series after preprocessing")
    truths = {s.item_id: ground_truth_newsvendor(s) for s in series}
    samples = {s.item_id: s.observed() for s in series}
    return Problem(truths, samples, GenerationContext(series=tuple(series)))


# --- distribution files ----------------------------------------------------------------------------


def _seed_for(cfg: RunConfig, label: str) -> int:
    return int(np.random.SeedSequence([cfg.seed, zlib.crc32(label.encode())]).generate_state(1)[0])


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def estimate_document(cfg: RunConfig, entry: MethodEntry, est: Estimate, spec_desc: dict[str, Any], seed: int) -> dict:
    return {
        "schema": DIST_SCHEMA,
        "problem": cfg.problem,
        "label": entry.label,
        "replicate": est.replicate,
        "distributions": {k: est.distributions[k].to_json() for k in sorted(est.distributions)},
        "normal_specs": {k: est.normal_specs[k].to_json() for k in sorted(est.normal_specs)},
        "paired": {k: [[_jsonable(t), _jsonable(p)] for t, p in v] for k, v in sorted(est.paired.items())},
        "provenance": {"spec": spec_desc, "seed": seed, "config_seed": cfg.seed, **est.provenance},
    }


def parse_distribution(obj: dict[str, Any]):
    if obj.get("kind") == "ranking":
        return RankingDistribution.from_json(obj)
    if obj.get("kind") == "scalar":
        return ScalarDistribution.from_json(obj)
    raise DistributionError(f"unknown distribution kind {obj.get('kind')!r}")


@dataclass
class StoredEstimate:
    label: str
    replicate: int
    distributions: dict[str, Any]
    paired: dict[str, list]
    normal_specs: dict[str, NormalSpec]


def read_estimates(cfg: RunConfig, labels: Sequence[str] | None = None) -> dict[str, list[StoredEstimate]]:
    base = cfg.output_dir / "distributions"
    labels = list(labels) if labels is not None else [m.label for m in cfg.methods]
    out: dict[str, list[StoredEstimate]] = {}
    for label in labels:
        files = sorted((base / label).glob("rep_*.json"))
        if not files:
            raise MissingInput(f"no distribution files for method {label} under {base / label}")
        ests = []
        for f in files:
            doc = json.loads(f.read_text(encoding="utf-8"))
            if doc.get("schema") != DIST_SCHEMA:
                raise SchemaError(f"{f}: unexpected schema {doc.get('schema')!r}")
            ests.append(
                StoredEstimate(
                    label,
                    int(doc["replicate"]),
                    {k: parse_distribution(v) for k, v in doc["distributions"].items()},
                    {k: [(t, p) for t, p in v] for k, v in doc.get("paired", {}).items()},
                    {k: NormalSpec(v["mean"], v["std"]) for k, v in doc.get("normal_specs", {}).items()},
                )
            )
        out[label] = ests
    return out


# --- gen -------------------------------------------------------------------------------------------


def make_client(cfg: RunConfig) -> LlmClient:
    llm = dict(cfg.llm)
    cache_path = llm.pop("cache", None)
    config = LlmConfig.from_dict(llm)
    cache = ResponseCache(cfg.root / cache_path if cache_path else None)
    return LlmClient(config, cache)


def cmd_gen(cfg: RunConfig) -> int:
    problem = load_problem(cfg)
    client = None
    specs: dict[str, GenerationSpec] = {}
    for entry in cfg.methods:
        if entry.method is None:
            continue
        try:
            specs[entry.label] = GenerationSpec.defaults(
                cfg.problem, entry.method, entry.few_shot, seed=_seed_for(cfg, entry.label), **entry.options
            )
        except TypeError as exc:
            raise ConfigError(f"{entry.label}: {exc}") from None
    if specs:
        client = make_client(cfg)
        if not client.config.offline:
            client.api_key()  # fail before anything is written

    results: list[tuple[MethodEntry, list[Estimate], dict[str, Any], int]] = []
    for entry in cfg.methods:
        seed = _seed_for(cfg, entry.label)
        if entry.baseline is not None:
            opts = dict(entry.options)
            estimates = run_baseline(
                entry.baseline,
                problem.samples,
                seed=seed,
                reps=int(opts.pop("reps", 20)),
                d=opts.pop("d", None),
                ranking_n=problem.ranking_n,
                pool=opts.pop("pool", None),
                subsample=opts.pop("subsample", None),
            )
            if opts:
                raise ConfigError(f"{entry.label}: unknown baseline options {sorted(opts)}")
            desc = {"baseline": entry.baseline, **entry.options}
        else:
            spec = specs[entry.label]
            estimates = run_generation(spec, problem.context, client)
            desc = {k: v for k, v in vars(spec).items()}
            desc["llm"] = client.config.request_fields()
        results.append((entry, estimates, desc, seed))

    for entry, estimates, desc, seed in results:
        target = cfg.output_dir / "distributions" / entry.label
        target.mkdir(parents=True, exist_ok=True)
        for old in target.glob("rep_*.json"):
            old.unlink()
        for est in estimates:
            doc = estimate_document(cfg, entry, est, desc, seed)
            (target / f"rep_{est.replicate:03d}.json").write_text(_dump(doc), encoding="utf-8")
        log.info("%s: wrote %d estimates", entry.label, len(estimates))
    truth = {"schema": DIST_SCHEMA, "problem": cfg.problem, "distributions": {k: v.to_json() for k, v in sorted(problem.truths.items())}}
    (cfg.output_dir / "ground_truth.json").write_text(_dump(truth), encoding="utf-8")
    return 0


# --- eval ---------------------------------------------------------------------------------------------


def metric_names(cfg: RunConfig) -> list[str]:
    s, names = cfg.sweeps, []
    if "worstcr" in cfg.metrics:
        if cfg.problem == "assortment":
            names += [f"worstcr[reward={r}]" for r in s["rewards"]]
        elif cfg.problem == "pricing":
            names.append(f"worstcr[c_max={s['c_max']:g}]")
        else:
            names.append("worstcr[q={:g}-{:g}]".format(*s["q_range"]))
    if "avgcr" in cfg.metrics:
        if cfg.problem == "assortment":
            names += [
                f"avgcr[reward={r},regime={g},B={b:g}]" for r in s["rewards"] for g in s["regimes"] for b in s["budgets"]
            ]
        elif cfg.problem == "pricing":
            names += ["avgcr[c={:g}-{:g}]".format(lo, hi) for lo, hi in s["cost_ranges"]]
        else:
            names.append("avgcr[q={:g}-{:g}]".format(*s["q_range"]))
    if "wasserstein" in cfg.metrics:
        names.append("wasserstein")
    if "kolmogorov" in cfg.metrics and cfg.problem != "assortment":
        names.append("kolmogorov")
    return names


def score_key(problem: str, metrics: Sequence[str], sweeps: dict[str, Any], seed: int, F, F_hat, paired) -> dict[str, float]:
    """Every requested metric for one (ground truth, estimate) pair."""
    out: dict[str, float] = {}
    s = sweeps
    if problem == "assortment":
        for r in s["rewards"]:
            rewards = assortment.reward_preset(r, F.n)
            if "worstcr" in metrics:
                out[f"worstcr[reward={r}]"] = assortment.worstcr_assortment(F, F_hat, rewards).ratio
            if "avgcr" in metrics:
                for g in s["regimes"]:
                    regime = assortment.SizeRegime(g, seed, int(s["random_instances"]))
                    for b in s["budgets"]:
                        out[f"avgcr[reward={r},regime={g},B={b:g}]"] = assortment.avgcr_assortment(F, F_hat, rewards, regime, b)
        if "wasserstein" in metrics:
            out["wasserstein"] = wasserstein_kendall(F, F_hat)
    elif problem == "pricing":
        if "worstcr" in metrics:
            out[f"worstcr[c_max={s['c_max']:g}]"] = pricing.worstcr_pricing(F, F_hat, float(s["c_max"])).ratio
        if "avgcr" in metrics:
            for lo, hi in s["cost_ranges"]:
                out["avgcr[c={:g}-{:g}]".format(lo, hi)] = pricing.avgcr_pricing(F, F_hat, float(lo), float(hi))
    else:
        lo, hi = s["q_range"]
        if "worstcr" in metrics:
            out["worstcr[q={:g}-{:g}]".format(lo, hi)] = newsvendor.worstcr_newsvendor(F, F_hat, lo, hi).ratio
        if "avgcr" in metrics:
            out["avgcr[q={:g}-{:g}]".format(lo, hi)] = newsvendor.avgcr_newsvendor(F, F_hat, lo, hi)
    if problem != "assortment":
        if "wasserstein" in metrics:
            out["wasserstein"] = wasserstein_scalar(F, F_hat)
        if "kolmogorov" in metrics:
            out["kolmogorov"] = kolmogorov(F, F_hat)
    if "persona" in metrics and paired:
        pairs = PairedPredictions([t for t, _ in paired], [p for _, p in paired])
        out["persona_mae"] = persona_mae(pairs)
        out["shuffled_mae"] = shuffled_mae(pairs)
    return out


def _score_task(args):
    return score_key(*args)


@dataclass
class ResultRow:
    method: str
    metric: str
    mean: float
    ci_half_width: float
    replicates: int
    groups: int
    ci_basis: str
    flag: str = ""


def t_interval(values: Sequence[float]) -> tuple[float, float]:
    """Mean and 95% Student-t half-width; a single value gives half-width 0."""
    x = np.asarray(values, dtype=float)
    mean = float(x.mean())
    if x.size < 2:
        return mean, 0.0
    sd = float(x.std(ddof=1))
    return mean, float(stats.t.ppf(0.975, x.size - 1) * sd / math.sqrt(x.size))


def aggregate(method: str, metric: str, by_key: dict[str, list[float]]) -> ResultRow:
    """One key: interval over replicates. Several keys: average each key over replicates,
    then take the interval over the per-key means. One replicate: half-width 0, flagged."""
    reps = max(len(v) for v in by_key.values())
    if len(by_key) == 1:
        (vals,) = by_key.values()
        mean, hw = t_interval(vals)
        basis = "replicates"
        n = len(vals)
    else:
        means = [float(np.mean(by_key[k])) for k in sorted(by_key)]
        mean, hw = t_interval(means)
        basis = "keys"
        n = len(means)
    flag = ""
    if reps < 2:
        # a single generation has no replicate spread to report
        hw, flag = 0.0, "single-replicate"
    elif n < 2:
        flag = "single-group"
    return ResultRow(method, metric, mean, hw, reps, len(by_key), basis, flag)


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_eval(cfg: RunConfig) -> int:
    problem = load_problem(cfg)
    estimates = read_estimates(cfg)
    tasks, index = [], []
    for label, ests in estimates.items():
        for est in ests:
            for key in sorted(problem.truths):
                if key not in est.distributions:
                    raise MissingInput(f"{label} replicate {est.replicate} has no distribution for {key}")
                tasks.append(
                    (cfg.problem, cfg.metrics, cfg.sweeps, cfg.seed, problem.truths[key], est.distributions[key], est.paired.get(key))
                )
                index.append((label, est.replicate, key))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            scores = list(pool.map(_score_task, tasks, chunksize=4))
    else:
        scores = [_score_task(t) for t in tasks]

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    buf.write(f"# schema: {VALUES_SCHEMA}\n")
    w.writerow(["method", "replicate", "key", "metric", "value"])
    table: dict[tuple[str, str], dict[str, list[float]]] = {}
    for (label, rep, key), sc in zip(index, scores):
        for metric in sorted(sc):
            w.writerow([label, rep, key, metric, _fmt(sc[metric])])
            table.setdefault((label, metric), {}).setdefault(key, []).append(sc[metric])
    (cfg.output_dir / "values.csv").write_text(buf.getvalue(), encoding="utf-8")

    order = metric_names(cfg) + ["persona_mae", "shuffled_mae"]
    rows = []
    for label in estimates:
        for metric in order:
            if (label, metric) in table:
                rows.append(aggregate(label, metric, table[(label, metric)]))
    write_results(rows, cfg.output_dir / "results.csv")
    return 0


def write_results(rows: Sequence[ResultRow], path: Path) -> None:
    buf = io.StringIO()
    buf.write(f"# schema: {RESULTS_SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "metric", "mean", "ci_half_width", "replicates", "groups", "ci_basis", "flag"])
    for r in rows:
        w.writerow([r.method, r.metric, _fmt(r.mean), _fmt(r.ci_half_width), r.replicates, r.groups, r.ci_basis, r.flag])
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_results(path: Path) -> list[ResultRow]:
    if not path.exists():
        raise MissingInput(f"{path} not found; run eval first")
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        rows.append(
            ResultRow(
                rec["method"], rec["metric"], float(rec["mean"]), float(rec["ci_half_width"]),
                int(rec["replicates"]), int(rec["groups"]), rec["ci_basis"], rec["flag"],
            )
        )
    return rows


# --- report ---------------------------------------------------------------------------------------------


def render_report(rows: Sequence[ResultRow]) -> str:
    """Markdown table: one row per method, one column per metric, cells 'mean ± half-width'."""
    methods = list(dict.fromkeys(r.method for r in rows))
    metrics = list(dict.fromkeys(r.metric for r in rows))
    cell = {(r.method, r.metric): r for r in rows}
    lines = ["| method | " + " | ".join(metrics) + " |", "|---" * (len(metrics) + 1) + "|"]
    for m in methods:
        parts = []
        for k in metrics:
            r = cell.get((m, k))
            if r is None:
                parts.append("")
            else:
                parts.append(f"{r.mean:.3f} ± {r.ci_half_width:.3f}" + (" *" if r.flag else ""))
        lines.append(f"| {m} | " + " | ".join(parts) + " |")
    if any(r.flag for r in rows):
        lines.append("")
        lines.append("\\* interval not defined (single replicate or single group), reported as 0")
    return "\n".join(lines) + "\n"


def cmd_report(cfg: RunConfig) -> int:
    text = render_report(read_results(cfg.output_dir / "results.csv"))
    (cfg.output_dir / "report.md").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


# --- plot-data ---------------------------------------------------------------------------------------------


def survival_steps(dist: ScalarDistribution) -> list[tuple[float, float]]:
    """Corner points of the survival step function Pr[X >= a]: the level just at and just past each atom."""
    at = survival_many(dist, dist.values)
    after = np.concatenate([at[1:], [0.0]])
    pts = []
    for v, s0, s1 in zip(dist.values.tolist(), at.tolist(), after.tolist()):
        pts.append((v, s0))
        pts.append((v, s1))
    return pts


def cmd_plot_data(cfg: RunConfig) -> int:
    if cfg.problem == "assortment":
        raise ConfigError("survival curves need a scalar problem")
    problem = load_problem(cfg)
    labels = cfg.plot.get("methods", [m.label for m in cfg.methods])
    keys = cfg.plot.get("keys", sorted(problem.truths))
    replicate = int(cfg.plot.get("replicate", 0))
    if not keys:
        raise MissingInput("no keys selected for plot-data")
    unknown = [k for k in keys if k not in problem.truths]
    if unknown:
        raise MissingInput(f"unknown keys {unknown}")
    estimates = read_estimates(cfg, labels)
    series: list[tuple[str, str, ScalarDistribution]] = []
    for key in keys:
        series.append(("ground_truth", key, problem.truths[key]))
        for label in labels:
            chosen = [e for e in estimates[label] if e.replicate == replicate]
            if not chosen:
                raise MissingInput(f"{label} has no replicate {replicate}")
            series.append((label, key, chosen[0].distributions[key]))
    buf = io.StringIO()
    buf.write(f"# schema: {SURVIVAL_SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "key", "price", "survival"])
    for label, key, dist in series:
        for x, s in survival_steps(dist):
            w.writerow([label, key, _fmt(x), _fmt(s)])
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    (cfg.output_dir / "survival.csv").write_text(buf.getvalue(), encoding="utf-8")
    return 0


# --- entry point -------------------------------------------------------------------------------------------

COMMANDS = {"gen": cmd_gen, "eval": cmd_eval, "report": cmd_report, "plot-data": cmd_plot_data}


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="decisionscore", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("config", help="JSON run configuration")
    parser.add_argument("--offline", action="store_true", help="answer LLM requests from the cache only")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.offline:
            cfg.llm["offline"] = True
        return COMMANDS[args.command](cfg)
    except (ConfigError, MissingContext) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (AuthError, NetworkError, InsufficientValidResponses) as exc:
        log.error("network error: %s", exc)
        return EXIT_NETWORK
    except (SchemaError, DistributionError, RangeError, MissingInput, FileNotFoundError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except ValueError as exc:
        # remaining ValueErrors come from spec validation
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
