"""Parsing, validation, and indexing of prediction logs and run manifests.

A corpus on disk is a directory of runs::

    runs_dir/
        <run_id>/
            manifest.json        one JSON object describing the run
            predictions.jsonl    one JSON record per sample (or predictions.csv)

Record schema (JSONL keys / CSV header): ``run_id``, ``sample_id``,
``score`` (real in [0,1]), ``label`` (0 or 1), ``group`` (subgroup id >= 0).
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (EmptySubgroup, FieldOutOfRange, InvalidManifest, IoFailure,
                     MalformedLine, MissingField)

log = logging.getLogger("fairrank.ingest")

RECORD_FIELDS = ("run_id", "sample_id", "score", "label", "group")
SPLITS = ("validation", "test")


@dataclass(frozen=True)
class PredictionRecord:
    """One sample's score, binary label, and subgroup id within a run."""
    run_id: str
    sample_id: str
    score: float
    label: int
    group: int


@dataclass(frozen=True)
class RunManifest:
    """Identity of one trained model checkpoint."""
    run_id: str
    algorithm: str
    dataset: str
    attribute: str
    seed: int
    hparam_id: str
    split: str
    group_names: tuple[str, ...]

    @property
    def m(self) -> int:
        return len(self.group_names)


@dataclass
class RunData:
    """A manifest plus the prediction records belonging to it."""
    manifest: RunManifest
    records: list[PredictionRecord]


@dataclass(frozen=True)
class LineIssue:
    """One rejected log line: 1-based line number, error kind, message."""
    line: int
    kind: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class ParsedLog:
    records: list[PredictionRecord]
    issues: list[LineIssue]


def _record_from_mapping(obj: dict, line_no: int) -> PredictionRecord:
    for key in RECORD_FIELDS:
        if key not in obj or obj[key] in (None, ""):
            raise MissingField(f"missing field '{key}'")
    try:
        score = float(obj["score"])
        label = int(obj["label"])
        group = int(obj["group"])
    except (TypeError, ValueError) as exc:
        raise MalformedLine(f"non-numeric field: {exc}") from exc
    if not 0.0 <= score <= 1.0:
        raise FieldOutOfRange(f"score out of range [0,1]: {obj['score']}")
    if label not in (0, 1):
        raise FieldOutOfRange(f"label must be 0 or 1: {obj['label']}")
    if group < 0:
        raise FieldOutOfRange(f"group must be >= 0: {obj['group']}")
    return PredictionRecord(str(obj["run_id"]), str(obj["sample_id"]), score, label, group)


def parse_prediction_log(source, format: str = "jsonl") -> ParsedLog:
    """Parse a prediction log from bytes, text, or a file-like object.

    Returns all well-formed records in input order together with the list of
    rejected lines; a bad line never aborts the rest of the file.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    records: list[PredictionRecord] = []
    issues: list[LineIssue] = []

    def reject(line_no: int, exc: Exception) -> None:
        issues.append(LineIssue(line_no, type(exc).__name__, str(exc)))

    if format == "jsonl":
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                reject(line_no, MalformedLine(f"bad JSON: {exc.msg}"))
                continue
            if not isinstance(obj, dict):
                reject(line_no, MalformedLine("record is not a JSON object"))
                continue
            try:
                records.append(_record_from_mapping(obj, line_no))
            except (MalformedLine, MissingField, FieldOutOfRange) as exc:
                reject(line_no, exc)
    elif format == "csv":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            return ParsedLog([], [])
        if [h.strip() for h in header] != list(RECORD_FIELDS):
            raise MalformedLine(f"bad CSV header: expected {','.join(RECORD_FIELDS)}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(RECORD_FIELDS):
                reject(line_no, MalformedLine(f"expected {len(RECORD_FIELDS)} fields, got {len(row)}"))
                continue
            obj = dict(zip(RECORD_FIELDS, row))
            try:
                records.append(_record_from_mapping(obj, line_no))
            except (MalformedLine, MissingField, FieldOutOfRange) as exc:
                reject(line_no, exc)
    else:
        raise ValueError(f"unknown log format: {format!r}")

    if issues:
        log.debug("parse: %d records, %d rejected lines", len(records), len(issues))
    return ParsedLog(records, issues)


def records_to_jsonl(records) -> str:
    """Serialize records to the canonical JSONL interchange form."""
    lines = []
    for r in records:
        lines.append(json.dumps({"run_id": r.run_id, "sample_id": r.sample_id,
                                 "score": r.score, "label": r.label, "group": r.group}))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_manifest(text: str | bytes) -> RunManifest:
    """Parse and structurally validate a manifest.json payload."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidManifest(f"manifest is not valid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise InvalidManifest("manifest must be a JSON object")
    required = ("run_id", "algorithm", "dataset", "attribute", "seed",
                "hparam_id", "split", "group_names")
    for key in required:
        if key not in obj:
            raise InvalidManifest(f"manifest missing key '{key}'")
    if obj["split"] not in SPLITS:
        raise InvalidManifest(f"split must be one of {SPLITS}, got {obj['split']!r}")
    names = obj["group_names"]
    if not isinstance(names, list) or not all(isinstance(g, str) for g in names):
        raise InvalidManifest("group_names must be an array of strings")
    if len(names) < 2:
        raise InvalidManifest(f"group_names must list at least 2 subgroups, got {len(names)}")
    try:
        seed = int(obj["seed"])
    except (TypeError, ValueError) as exc:
        raise InvalidManifest(f"seed must be an integer: {obj['seed']!r}") from exc
    return RunManifest(str(obj["run_id"]), str(obj["algorithm"]), str(obj["dataset"]),
                       str(obj["attribute"]), seed, str(obj["hparam_id"]),
                       str(obj["split"]), tuple(names))


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity.upper()}: {self.message}"


@dataclass
class GroupCounts:
    n: int = 0
    n_pos: int = 0
    n_neg: int = 0


@dataclass
class ValidationReport:
    """Per-group sample counts plus a severity-tagged issue list."""
    run_id: str
    group_counts: list[GroupCounts] = field(default_factory=list)
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def error(self, message: str) -> None:
        self.issues.append(ValidationIssue("error", message))

    def warning(self, message: str) -> None:
        self.issues.append(ValidationIssue("warning", message))

    def lines(self) -> list[str]:
        out = []
        for g, c in enumerate(self.group_counts):
            out.append(f"group {g}: n={c.n} pos={c.n_pos} neg={c.n_neg}")
        out.extend(str(i) for i in self.issues)
        return out


def validate_run(run: RunData, parse_issues: list[LineIssue] | None = None) -> ValidationReport:
    """Check a run's records against its manifest; never raises.

    Errors: out-of-range group ids, records from a different run, rejected
    log lines. Warnings: groups with a single label value (their AUC will be
    undefined), empty groups, duplicate sample ids.
    """
    m = run.manifest.m
    report = ValidationReport(run.manifest.run_id, [GroupCounts() for _ in range(m)])
    for issue in parse_issues or []:
        report.error(f"line {issue.line}: {issue.message}")

    seen_ids: set[str] = set()
    dup_ids: set[str] = set()
    out_of_range = 0
    foreign = 0
    for rec in run.records:
        if rec.run_id != run.manifest.run_id:
            foreign += 1
            continue
        if rec.sample_id in seen_ids:
            dup_ids.add(rec.sample_id)
        seen_ids.add(rec.sample_id)
        if rec.group >= m:
            out_of_range += 1
            continue
        counts = report.group_counts[rec.group]
        counts.n += 1
        if rec.label == 1:
            counts.n_pos += 1
        else:
            counts.n_neg += 1

    if foreign:
        report.error(f"{foreign} record(s) carry a run_id other than '{run.manifest.run_id}'")
    if out_of_range:
        report.error(f"{out_of_range} record(s) have group id >= m={m}")
    if dup_ids:
        report.warning(f"{len(dup_ids)} duplicate sample_id value(s)")
    for g, c in enumerate(report.group_counts):
        if c.n == 0:
            report.warning(f"group {g} ('{run.manifest.group_names[g]}'): no samples")
        elif c.n_pos == 0:
            report.warning(f"group {g}: no positives; per-group AUC undefined")
        elif c.n_neg == 0:
            report.warning(f"group {g}: no negatives; per-group AUC undefined")
    return report


def resampling_weights(group_of_sample, m: int) -> np.ndarray:
    """Per-sample draw weights that rebalance subgroups.

    A sample in group s gets weight 1/(m*n_s), so the weights sum to 1 and
    each subgroup is drawn with probability exactly 1/m.
    """
    groups = np.asarray(group_of_sample, dtype=int)
    if groups.size and (groups.min() < 0 or groups.max() >= m):
        raise FieldOutOfRange("group id outside 0..m-1")
    counts = np.bincount(groups, minlength=m)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EmptySubgroup(f"subgroup(s) {empty.tolist()} have no samples")
    return 1.0 / (m * counts[groups])


def load_run_dir(run_dir: str | Path) -> tuple[RunData, list[LineIssue]]:
    """Load one run directory (manifest + predictions log)."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.json"
    try:
        manifest = parse_manifest(manifest_path.read_bytes())
    except OSError as exc:
        raise IoFailure(f"cannot read {manifest_path}: {exc}") from exc
    jsonl, csvp = run_dir / "predictions.jsonl", run_dir / "predictions.csv"
    if jsonl.exists():
        path, fmt = jsonl, "jsonl"
    elif csvp.exists():
        path, fmt = csvp, "csv"
    else:
        raise IoFailure(f"no predictions.jsonl or predictions.csv in {run_dir}")
    try:
        parsed = parse_prediction_log(path.read_bytes(), fmt)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return RunData(manifest, parsed.records), parsed.issues


def load_corpus(runs_dir: str | Path) -> list[tuple[RunData, list[LineIssue]]]:
    """Load every run directory under runs_dir, sorted by directory name."""
    runs_dir = Path(runs_dir)
    if not runs_dir.is_dir():
        raise IoFailure(f"runs directory not found: {runs_dir}")
    out = []
    for entry in sorted(p for p in runs_dir.iterdir() if p.is_dir()):
        if not (entry / "manifest.json").exists():
            log.debug("skipping %s: no manifest.json", entry)
            continue
        out.append(load_run_dir(entry))
    return out
