"""Command-line pipeline: validate / evaluate / select / compare / report.

Exit codes are stable across commands: 0 success, 1 domain or validation
failure, 2 I/O failure. All outputs are deterministic and atomically
written; the FAIRRANK_LOG environment variable (DEBUG/INFO/WARNING/ERROR)
controls stderr log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
from dataclasses import dataclass, field, replace

from . import reporting
from .cddiagram import cd_groups, cd_layout, cd_svg
from .errors import EmptyCandidates, FairrankError, IoFailure
from .ingest import (load_corpus, load_run_dir, parse_prediction_log,
                     validate_run)
from .metrics import MetricConfig, bundle_scalars, evaluate_run
from .reporting import COMPARISON_METRICS, MetricsRow
from .selection import ModelCandidate, select
from .stats import build_rank_table, friedman_test, nemenyi_cd

logger = logging.getLogger("fairrank.cli")

# CLI strategy flag value -> canonical strategy name
STRATEGY_NAMES = {"overall": "overall", "pareto": "pareto_minimax", "dto": "dto"}
SEED_POLICIES = ("rank_seed_mean", "rank_per_seed")


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved pipeline settings: built-in defaults, overridden by the
    key=value config file, overridden by command-line flags."""
    runs_dir: str = ""
    output_dir: str = ""
    metric_config: MetricConfig = field(default_factory=MetricConfig)
    selection_strategy: str = "pareto"
    comparison_metric: str = "worst_auc"
    alpha: float = 0.05
    seed_policy: str = "rank_seed_mean"
    force_posthoc: bool = False

    def validated(self) -> "PipelineConfig":
        if not 0.0 < self.alpha < 1.0:
            raise FairrankError(f"alpha must be in (0,1), got {self.alpha}")
        if self.selection_strategy not in STRATEGY_NAMES:
            raise FairrankError(f"strategy must be one of {sorted(STRATEGY_NAMES)}, "
                                f"got {self.selection_strategy!r}")
        if self.comparison_metric not in COMPARISON_METRICS:
            raise FairrankError(f"metric must be one of {sorted(COMPARISON_METRICS)}, "
                                f"got {self.comparison_metric!r}")
        if self.seed_policy not in SEED_POLICIES:
            raise FairrankError(f"seed-policy must be one of {SEED_POLICIES}, "
                                f"got {self.seed_policy!r}")
        return self


_BOOL_VALUES = {"true": True, "1": True, "yes": True,
                "false": False, "0": False, "no": False}


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key=value config: blank lines and #-comments ignored."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    pairs: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FairrankError(f"{path}:{n}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def _parse_bool(key: str, value: str) -> bool:
    try:
        return _BOOL_VALUES[value.lower()]
    except KeyError:
        raise FairrankError(f"config {key} must be a boolean, got {value!r}") from None


def resolve_config(args) -> PipelineConfig:
    """Defaults <- config file <- flags, then validated."""
    cfg = PipelineConfig()
    mc = cfg.metric_config
    if getattr(args, "config", None):
        pairs = parse_config_file(args.config)
        known = {"runs_dir", "output_dir", "out", "strategy", "metric", "alpha",
                 "seed_policy", "force_posthoc", "ece_bins", "tnr_target",
                 "threshold_rule", "positive_means_finding"}
        for key in pairs:
            if key not in known:
                raise FairrankError(f"unknown config key {key!r}")
        try:
            if "ece_bins" in pairs:
                mc = replace(mc, ece_bins=int(pairs["ece_bins"]))
            if "tnr_target" in pairs:
                mc = replace(mc, tnr_target=float(pairs["tnr_target"]))
            if "alpha" in pairs:
                cfg = replace(cfg, alpha=float(pairs["alpha"]))
        except ValueError as exc:
            raise FairrankError(f"bad numeric config value: {exc}") from None
        if "threshold_rule" in pairs:
            mc = replace(mc, threshold_rule=pairs["threshold_rule"])
        if "positive_means_finding" in pairs:
            mc = replace(mc, positive_means_finding=_parse_bool(
                "positive_means_finding", pairs["positive_means_finding"]))
        if "force_posthoc" in pairs:
            cfg = replace(cfg, force_posthoc=_parse_bool(
                "force_posthoc", pairs["force_posthoc"]))
        cfg = replace(cfg,
                      runs_dir=pairs.get("runs_dir", cfg.runs_dir),
                      output_dir=pairs.get("output_dir", pairs.get("out", cfg.output_dir)),
                      selection_strategy=pairs.get("strategy", cfg.selection_strategy),
                      comparison_metric=pairs.get("metric", cfg.comparison_metric),
                      seed_policy=pairs.get("seed_policy", cfg.seed_policy),
                      metric_config=mc)
    if getattr(args, "runs_dir", None):
        cfg = replace(cfg, runs_dir=args.runs_dir)
    if getattr(args, "out", None):
        cfg = replace(cfg, output_dir=args.out)
    if getattr(args, "strategy", None):
        cfg = replace(cfg, selection_strategy=args.strategy)
    if getattr(args, "metric", None):
        cfg = replace(cfg, comparison_metric=args.metric)
    if getattr(args, "alpha", None) is not None:
        cfg = replace(cfg, alpha=args.alpha)
    if getattr(args, "seed_policy", None):
        cfg = replace(cfg, seed_policy=args.seed_policy)
    if getattr(args, "force_posthoc", False):
        cfg = replace(cfg, force_posthoc=True)
    return cfg.validated()


# ---------------------------------------------------------------- validate

def cmd_validate(paths, out=None) -> int:
    """Validate run directories, corpus roots, or bare prediction logs;
    print one report per run. Exit 0 when nothing is an error."""
    out = sys.stdout if out is None else out
    any_error = False
    for path in paths:
        if os.path.isfile(path):
            try:
                with open(path, "rb") as handle:
                    parsed = parse_prediction_log(handle, _format_of(path))
            except OSError as exc:
                raise IoFailure(f"cannot read {path}: {exc}") from exc
            print(f"log {path}: {len(parsed.records)} record(s), "
                  f"{len(parsed.issues)} issue(s)", file=out)
            for issue in parsed.issues:
                any_error = True
                print(f"  error line {issue.line}: [{issue.kind}] {issue.message}", file=out)
            continue
        if not os.path.isdir(path):
            raise IoFailure(f"no such file or directory: {path}")
        if os.path.exists(os.path.join(path, "manifest.json")):
            loaded = [load_run_dir(path)]
        else:
            loaded = load_corpus(path)
            if not loaded:
                print(f"corpus {path}: no runs found", file=out)
        for run, issues in loaded:
            report = validate_run(run, issues)
            status = "OK" if report.ok else "FAILED"
            counts = ", ".join(f"g{g}:{c.n}" for g, c in enumerate(report.group_counts))
            print(f"run {report.run_id}: {status} ({counts})", file=out)
            for line in report.lines():
                print(f"  {line}", file=out)
            any_error = any_error or not report.ok
    return 1 if any_error else 0


def _format_of(path: str) -> str:
    return "csv" if path.lower().endswith(".csv") else "jsonl"


# ---------------------------------------------------------------- evaluate

def evaluate_corpus(cfg: PipelineConfig):
    """Validate and evaluate every run under runs_dir.

    Returns (rows, m, failures): metrics rows for the runs that passed,
    the widest subgroup count (for the CSV header), and a list of
    (run_id, message) for runs that failed validation or evaluation.
    """
    if not cfg.runs_dir:
        raise FairrankError("runs_dir is required (flag --runs-dir or config runs_dir)")
    rows: list[MetricsRow] = []
    failures: list[tuple[str, str]] = []
    m = 0
    for run, issues in load_corpus(cfg.runs_dir):
        report = validate_run(run, issues)
        if not report.ok:
            failures.append((run.manifest.run_id, "; ".join(report.lines())))
            continue
        try:
            bundle = evaluate_run(run, cfg.metric_config)
        except FairrankError as exc:
            failures.append((run.manifest.run_id, str(exc)))
            continue
        man = run.manifest
        rows.append(MetricsRow(man.run_id, man.algorithm, man.dataset, man.attribute,
                               man.seed, man.split, bundle_scalars(bundle)))
        m = max(m, man.m)
    return rows, m, failures


def cmd_evaluate(cfg: PipelineConfig) -> tuple[int, list[MetricsRow], int]:
    rows, m, failures = evaluate_corpus(cfg)
    _require_out(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    reporting.write_text_atomic(os.path.join(cfg.output_dir, "metrics.csv"),
                                reporting.metrics_rows_to_csv(rows, m))
    reporting.write_text_atomic(os.path.join(cfg.output_dir, "metrics_aggregate.csv"),
                                reporting.aggregate_rows_to_csv(rows, m))
    for run_id, message in failures:
        print(f"run {run_id}: {message}", file=sys.stderr)
    logger.info("evaluated %d run(s), %d failure(s)", len(rows), len(failures))
    return (1 if failures else 0), rows, m


def _require_out(cfg: PipelineConfig) -> None:
    if not cfg.output_dir:
        raise FairrankError("output directory is required (flag --out or config output_dir)")


# ---------------------------------------------------------------- select

_GROUP_COL = re.compile(r"(?:auc|fpr|fnr|tprattnr)_g(\d+)")


def _group_m(rows) -> int:
    """Real subgroup count of a candidate group: highest subgroup index
    with any defined per-group value, +1. Trailing all-blank subgroup
    columns are header padding from wider corpora, not real subgroups."""
    max_g = -1
    for row in rows:
        for col, v in row.values.items():
            if v is None:
                continue
            match = _GROUP_COL.fullmatch(col)
            if match:
                max_g = max(max_g, int(match.group(1)))
    return max_g + 1


def candidates_from_rows(rows) -> list[ModelCandidate]:
    """Metrics rows -> selection candidates (rows lacking overall_auc are
    unusable under every strategy and dropped with a log line)."""
    m = max(_group_m(rows), 1)
    out = []
    for row in rows:
        overall = row.values.get("overall_auc")
        if overall is None:
            logger.warning("run %s has no overall_auc; not a selection candidate", row.run_id)
            continue
        out.append(ModelCandidate(row.run_id, overall,
                                  tuple(row.values.get(f"auc_g{g}") for g in range(m))))
    return out


def selection_split(rows) -> list[MetricsRow]:
    """Model selection happens on the validation split when one exists."""
    validation = [r for r in rows if r.split == "validation"]
    return validation if validation else list(rows)


def run_selection(cfg: PipelineConfig, rows):
    """One selection per (algorithm, dataset, attribute) group."""
    strategy = STRATEGY_NAMES[cfg.selection_strategy]
    groups: dict[tuple[str, str, str], list[MetricsRow]] = {}
    for row in selection_split(rows):
        groups.setdefault((row.algorithm, row.dataset, row.attribute), []).append(row)
    selections, empty = [], []
    for key in sorted(groups):
        candidates = candidates_from_rows(groups[key])
        try:
            selections.append((key, select(candidates, strategy)))
        except EmptyCandidates as exc:
            empty.append((key, str(exc)))
    return selections, empty


def cmd_select(cfg: PipelineConfig, rows) -> int:
    selections, empty = run_selection(cfg, rows)
    _require_out(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    report = reporting.selection_report(STRATEGY_NAMES[cfg.selection_strategy],
                                        selections, empty)
    path = os.path.join(cfg.output_dir, f"selection_{cfg.selection_strategy}.json")
    reporting.write_text_atomic(path, reporting.to_json(report))
    for key, reason in empty:
        print(f"selection group {'/'.join(key)}: {reason}", file=sys.stderr)
    return 0 if selections else 1


# ---------------------------------------------------------------- compare

def comparison_split(rows) -> list[MetricsRow]:
    """Comparison reads the reporting (test) split when one exists."""
    test = [r for r in rows if r.split == "test"]
    return test if test else list(rows)


def _collapse_sweeps(cfg: PipelineConfig, rows) -> list[MetricsRow]:
    """One row per (algorithm, dataset, attribute, seed): hyperparameter
    sweeps are collapsed by the configured selection strategy (falling
    back to best-overall when the strategy cannot run)."""
    cells: dict[tuple, list[MetricsRow]] = {}
    for row in rows:
        cells.setdefault((row.algorithm, row.dataset, row.attribute, row.seed),
                         []).append(row)
    out = []
    for key in sorted(cells):
        members = cells[key]
        if len(members) == 1:
            out.append(members[0])
            continue
        candidates = candidates_from_rows(members)
        try:
            chosen = select(candidates, STRATEGY_NAMES[cfg.selection_strategy]).chosen
        except EmptyCandidates:
            try:
                chosen = select(candidates, "overall").chosen
            except EmptyCandidates:
                logger.warning("cell %s: no usable sweep candidate; cell dropped", key)
                continue
        logger.info("cell %s: sweep of %d collapsed to %s", key, len(members), chosen)
        out.append(next(r for r in members if r.run_id == chosen))
    return out


def comparison_values(cfg: PipelineConfig, rows):
    """Build the rank-table inputs: algorithm names and one metric-value
    row per dataset x attribute cell (or per cell x seed under
    rank_per_seed). Missing entries are None; complete-row filtering is
    left to the rank table's listwise deletion."""
    metric = cfg.comparison_metric
    rows = _collapse_sweeps(cfg, comparison_split(rows))
    algorithms = sorted({r.algorithm for r in rows})
    values: dict[tuple, dict[str, list[float]]] = {}
    for row in rows:
        v = row.values.get(metric)
        if v is None:
            continue
        cell = ((row.dataset, row.attribute, row.seed) if cfg.seed_policy == "rank_per_seed"
                else (row.dataset, row.attribute))
        values.setdefault(cell, {}).setdefault(row.algorithm, []).append(v)
    value_rows = []
    for cell in sorted(values):
        per_alg = values[cell]
        value_rows.append([
            (sum(per_alg[a]) / len(per_alg[a])) if a in per_alg else None
            for a in algorithms])
    return algorithms, value_rows


def cmd_compare(cfg: PipelineConfig, rows) -> int:
    algorithms, value_rows = comparison_values(cfg, rows)
    complete = [r for r in value_rows if all(v is not None for v in r)]
    dropped = len(value_rows) - len(complete)
    direction = COMPARISON_METRICS[cfg.comparison_metric]
    table = build_rank_table(algorithms, complete, direction)
    friedman = friedman_test(table, cfg.alpha)
    cd = groups = None
    run_posthoc = friedman.significant or cfg.force_posthoc
    if run_posthoc:
        cd = nemenyi_cd(table.k, table.n_rows, cfg.alpha)
        positions = dict(zip(table.algorithms, table.mean_ranks))
        groups = cd_groups(positions, cd)
    _require_out(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    report = reporting.comparison_report(cfg.comparison_metric, direction, table,
                                         friedman, cfg.alpha, cd, groups,
                                         cfg.seed_policy, dropped)
    base = os.path.join(cfg.output_dir, f"comparison_{cfg.comparison_metric}")
    reporting.write_text_atomic(f"{base}.json", reporting.to_json(report))
    if run_posthoc:
        layout = cd_layout(dict(zip(table.algorithms, table.mean_ranks)), cd)
        reporting.write_bytes_atomic(
            os.path.join(cfg.output_dir, f"cd_{cfg.comparison_metric}.svg"),
            cd_svg(layout).encode("utf-8"))
    return 0


# ---------------------------------------------------------------- wiring

def _read_metrics_csv(path: str) -> list[MetricsRow]:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IoFailure(f"cannot read metrics CSV {path}: {exc}") from exc
    return reporting.parse_metrics_csv(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairrank",
        description="Fairness evaluation, model selection, and statistical "
                    "comparison for binary classifiers over subgroup-"
                    "partitioned prediction logs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, runs=False, csv=False):
        p.add_argument("--config", help="key=value config file (flags win)")
        p.add_argument("--out", help="output directory")
        if runs:
            p.add_argument("--runs-dir", help="corpus root: <run_id>/manifest.json + predictions")
        if csv:
            p.add_argument("metrics_csv", help="metrics CSV produced by `evaluate`")

    p = sub.add_parser("validate", help="check logs/manifests, print per-run reports")
    p.add_argument("paths", nargs="+", help="run dir, corpus root, or prediction log file")

    p = sub.add_parser("evaluate", help="compute the metrics CSV for a corpus")
    common(p, runs=True)

    p = sub.add_parser("select", help="pick one model per algorithm/dataset/attribute")
    common(p, csv=True)
    p.add_argument("--strategy", choices=sorted(STRATEGY_NAMES))

    p = sub.add_parser("compare", help="Friedman/Nemenyi comparison across algorithms")
    common(p, csv=True)
    p.add_argument("--strategy", choices=sorted(STRATEGY_NAMES),
                   help="strategy used to collapse hyperparameter sweeps")
    p.add_argument("--metric", choices=sorted(COMPARISON_METRICS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--force-posthoc", action="store_true",
                   help="emit CD/groups/SVG even when Friedman is not significant")
    p.add_argument("--seed-policy", dest="seed_policy", choices=SEED_POLICIES)

    p = sub.add_parser("report", help="evaluate + select + compare in one pass")
    common(p, runs=True)
    p.add_argument("--strategy", choices=sorted(STRATEGY_NAMES))
    p.add_argument("--metric", choices=sorted(COMPARISON_METRICS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--force-posthoc", action="store_true")
    p.add_argument("--seed-policy", dest="seed_policy", choices=SEED_POLICIES)
    return parser


def _setup_logging() -> None:
    level_name = os.environ.get("FAIRRANK_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _dispatch(args) -> int:
    if args.command == "validate":
        return cmd_validate(args.paths)
    cfg = resolve_config(args)
    if args.command == "evaluate":
        code, _, _ = cmd_evaluate(cfg)
        return code
    if args.command == "select":
        return cmd_select(cfg, _read_metrics_csv(args.metrics_csv))
    if args.command == "compare":
        return cmd_compare(cfg, _read_metrics_csv(args.metrics_csv))
    if args.command == "report":
        code, rows, _ = cmd_evaluate(cfg)
        select_code = cmd_select(cfg, rows)
        cmd_compare(cfg, rows)
        return max(code, select_code)
    raise FairrankError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except IoFailure as exc:
        print(f"fairrank: I/O error: {exc}", file=sys.stderr)
        return 2
    except FairrankError as exc:
        print(f"fairrank: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
