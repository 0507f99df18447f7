"""File formats: the per-run metrics CSV, the seed-aggregated companion CSV,
and the selection/comparison JSON reports.

All writers are deterministic (stable row and key order, floats at 6
decimals in CSV) and atomic (write to a temp file in the target directory,
then rename), so interrupted commands never leave partial files and
repeated runs on identical inputs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import IoFailure, MalformedLine

BASE_COLUMNS = ("run_id", "algorithm", "dataset", "attribute", "seed", "split",
                "overall_auc", "worst_auc", "auc_gap", "eqodd", "bce", "ece", "threshold")
GROUP_BLOCKS = ("auc", "fpr", "fnr", "tprattnr")
METRIC_COLUMNS = BASE_COLUMNS[6:]

# comparison metrics and whether larger values are better
COMPARISON_METRICS = {"overall_auc": "higher_better",
                      "worst_auc": "higher_better",
                      "auc_gap": "lower_better"}


@dataclass(frozen=True)
class MetricsRow:
    """One metrics CSV row: run identity plus metric name -> value
    (None where the CSV cell is blank)."""
    run_id: str
    algorithm: str
    dataset: str
    attribute: str
    seed: int
    split: str
    values: dict[str, float | None]

    def metric_columns(self):
        return self.values


def group_columns(m: int) -> list[str]:
    """Per-subgroup column names for m subgroups, in header order."""
    return [f"{block}_g{g}" for block in GROUP_BLOCKS for g in range(m)]


def csv_header(m: int) -> list[str]:
    return list(BASE_COLUMNS) + group_columns(m)


def _fmt_float(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def metrics_rows_to_csv(rows, m: int) -> str:
    """Serialize metrics rows (sorted by run_id) to CSV text. m is the
    subgroup-column count of the header; rows from runs with fewer
    subgroups leave the extra cells blank."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = csv_header(m)
    writer.writerow(header)
    for row in sorted(rows, key=lambda r: r.run_id):
        record = [row.run_id, row.algorithm, row.dataset, row.attribute,
                  str(row.seed), row.split]
        record += [_fmt_float(row.values.get(col)) for col in header[6:]]
        writer.writerow(record)
    return buf.getvalue()


def parse_metrics_csv(text: str) -> list[MetricsRow]:
    """Parse metrics CSV text back into rows. The header must start with
    the base columns; per-subgroup columns are discovered from it."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedLine("metrics CSV is empty") from None
    if tuple(header[:len(BASE_COLUMNS)]) != BASE_COLUMNS:
        raise MalformedLine(
            f"metrics CSV header must start with {','.join(BASE_COLUMNS)}")
    for extra in header[len(BASE_COLUMNS):]:
        if not re.fullmatch(r"(auc|fpr|fnr|tprattnr)_g\d+", extra):
            raise MalformedLine(f"unexpected metrics CSV column {extra!r}")
    rows = []
    for i, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise MalformedLine(f"line {i}: {len(record)} cells for {len(header)} columns")
        try:
            seed = int(record[4])
        except ValueError:
            raise MalformedLine(f"line {i}: seed {record[4]!r} is not an integer") from None
        values: dict[str, float | None] = {}
        for col, cell in zip(header[6:], record[6:]):
            try:
                values[col] = float(cell) if cell != "" else None
            except ValueError:
                raise MalformedLine(f"line {i}: {col} value {cell!r} is not a number") from None
        rows.append(MetricsRow(record[0], record[1], record[2], record[3],
                               seed, record[5], values))
    return rows


def _mean_std(values: list[float]) -> tuple[float, float, int]:
    arr = np.asarray(values, dtype=float)
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return float(np.mean(arr)), std, int(arr.size)


def aggregate_rows_to_csv(rows, m: int) -> str:
    """Seed-aggregated companion CSV: rows grouped by algorithm, dataset,
    attribute, and split; every metric column becomes a _mean/_std pair
    over the runs of the group (undefined cells skipped; std is the n-1
    sample deviation, 0 for a single value)."""
    metric_cols = list(METRIC_COLUMNS) + group_columns(m)
    groups: dict[tuple[str, str, str, str], list[MetricsRow]] = {}
    for row in rows:
        groups.setdefault((row.algorithm, row.dataset, row.attribute, row.split),
                          []).append(row)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["algorithm", "dataset", "attribute", "split", "n_runs"]
    for col in metric_cols:
        header += [f"{col}_mean", f"{col}_std"]
    writer.writerow(header)
    for key in sorted(groups):
        members = groups[key]
        record = list(key) + [str(len(members))]
        for col in metric_cols:
            defined = [v for row in members if (v := row.values.get(col)) is not None]
            if defined:
                mean, std, _ = _mean_std(defined)
                record += [_fmt_float(mean), _fmt_float(std)]
            else:
                record += ["", ""]
        writer.writerow(record)
    return buf.getvalue()


def selection_report(strategy: str, selections, empty_groups) -> dict:
    """JSON-ready selection report: one entry per (algorithm, dataset,
    attribute) group, carrying the chosen run and selection diagnostics.
    front_size appears only under the Pareto strategy."""
    entries = []
    for (algorithm, dataset, attribute), result in selections:
        entry = {
            "algorithm": algorithm,
            "dataset": dataset,
            "attribute": attribute,
            "strategy": result.strategy,
            "chosen_run_id": result.chosen,
            "criterion_value": result.score,
            "tie_broken": result.tie_broken,
            "excluded": [{"run_id": rid, "reason": reason} for rid, reason in result.excluded],
            "on_front": result.on_front,
        }
        if result.front_size is not None:
            entry["front_size"] = result.front_size
        entries.append(entry)
    return {
        "strategy": strategy,
        "selections": entries,
        "empty_groups": [{"algorithm": a, "dataset": d, "attribute": t, "reason": reason}
                         for (a, d, t), reason in empty_groups],
    }


def comparison_report(metric: str, direction: str, table, friedman, alpha: float,
                      cd: float | None, groups, seed_policy: str,
                      dropped_rows: int) -> dict:
    """JSON-ready comparison report. cd and groups are None when the
    Friedman gate did not fire (and --force-posthoc was off)."""
    ordered = sorted(zip(table.algorithms, table.mean_ranks), key=lambda kv: (kv[1], kv[0]))
    return {
        "metric": metric,
        "direction": direction,
        "k": table.k,
        "N": table.n_rows,
        "mean_ranks": {name: rank for name, rank in ordered},
        "chi2": friedman.chi2,
        "p_value": friedman.p_value,
        "alpha": alpha,
        "significant": friedman.significant,
        "cd": cd,
        "groups": None if groups is None else [list(g) for g in groups],
        "seed_policy": seed_policy,
        "dropped_rows": dropped_rows,
    }


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write text via temp-file-then-rename so readers never see a
    partial file and crashes leave no garbage at the target name."""
    write_bytes_atomic(path, text.encode("utf-8"))


def write_bytes_atomic(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    try:
        with open(tmp, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoFailure(f"cannot write {path}: {exc}") from exc
