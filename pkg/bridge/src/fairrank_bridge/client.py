"""Subprocess client: run the ``fairrank`` command-line engine over an
exported corpus and parse its report artifacts into Python objects.

The engine is only ever reached through its executable and its output
files — this package never imports it — so the two sides can be upgraded
and deployed independently as long as the file formats hold.
"""

from __future__ import annotations

import csv
import glob
import io
import json
import os
import shutil
import subprocess
from dataclasses import dataclass, field

from .errors import EngineNotFound, IoFailure, NonZeroExit

#: metrics/aggregate CSV columns carried through as strings
STR_COLS = frozenset({"run_id", "algorithm", "dataset", "attribute", "split"})
#: columns carried through as ints
INT_COLS = frozenset({"seed", "n_runs"})


@dataclass(frozen=True)
class ReportOptions:
    """Knobs forwarded to ``fairrank report`` (None = engine default)."""

    strategy: str | None = None        # overall | pareto | dto
    metric: str | None = None          # overall_auc | worst_auc | auc_gap
    alpha: float | None = None
    seed_policy: str | None = None
    force_posthoc: bool = False
    config: str | None = None          # optional key=value config file
    engine: str = "fairrank"           # executable name or path
    timeout: float = 600.0             # seconds

    def argv(self, runs_dir: str, out_dir: str, exe: str) -> list[str]:
        argv = [exe, "report", "--runs-dir", runs_dir, "--out", out_dir]
        if self.config is not None:
            argv += ["--config", self.config]
        if self.strategy is not None:
            argv += ["--strategy", self.strategy]
        if self.metric is not None:
            argv += ["--metric", self.metric]
        if self.alpha is not None:
            argv += ["--alpha", repr(float(self.alpha))]
        if self.seed_policy is not None:
            argv += ["--seed-policy", self.seed_policy]
        if self.force_posthoc:
            argv.append("--force-posthoc")
        return argv


@dataclass(frozen=True)
class RunReport:
    """Parsed artifacts of one engine report run.

    ``raw`` maps each output basename to its exact text, so callers that
    need byte-level fidelity (checksums, archival) never depend on the
    parsed view.
    """

    out_dir: str
    metrics: tuple[dict, ...]          # per-run metric rows
    aggregate: tuple[dict, ...]        # per algorithm/dataset/attribute/split
    selection: dict                    # selection_<strategy>.json payload
    comparison: dict                   # comparison_<metric>.json payload
    svg: str | None                    # cd_<metric>.svg text, if produced
    raw: dict = field(repr=False, default_factory=dict)
    stdout: str = ""
    stderr: str = ""


def _parse_csv(text: str) -> tuple[dict, ...]:
    """Typed rows: blank cells become None, numeric columns become
    int/float, identity columns stay strings."""
    rows = []
    for record in csv.DictReader(io.StringIO(text)):
        row = {}
        for key, cell in record.items():
            if key in STR_COLS:
                row[key] = cell
            elif cell == "" or cell is None:
                row[key] = None
            elif key in INT_COLS:
                row[key] = int(cell)
            else:
                row[key] = float(cell)
        rows.append(row)
    return tuple(rows)


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise IoFailure(f"cannot read engine output {path}: {exc}") from exc


def _single(out_dir: str, pattern: str) -> str:
    matches = sorted(glob.glob(os.path.join(out_dir, pattern)))
    if len(matches) != 1:
        raise IoFailure(f"expected exactly one {pattern} in {out_dir}, "
                        f"found {len(matches)}")
    return matches[0]


def run_report(runs_dir: str, out_dir: str,
               options: ReportOptions | None = None) -> RunReport:
    """Run ``fairrank report`` over ``runs_dir``, writing artifacts to
    ``out_dir``, and return them parsed.

    Raises :class:`EngineNotFound` when the executable is not on PATH and
    :class:`NonZeroExit` (carrying the exit code and stderr) when the
    engine reports a failure.
    """
    options = options or ReportOptions()
    exe = shutil.which(options.engine)
    if exe is None:
        raise EngineNotFound(
            f"engine executable {options.engine!r} not found on PATH")
    os.makedirs(out_dir, exist_ok=True)
    proc = subprocess.run(options.argv(runs_dir, out_dir, exe),
                          capture_output=True, text=True,
                          timeout=options.timeout)
    if proc.returncode != 0:
        raise NonZeroExit(proc.returncode, proc.stderr)

    raw = {}
    for name in ("metrics.csv", "metrics_aggregate.csv"):
        raw[name] = _read_text(os.path.join(out_dir, name))
    selection_path = _single(out_dir, "selection_*.json")
    comparison_path = _single(out_dir, "comparison_*.json")
    raw[os.path.basename(selection_path)] = _read_text(selection_path)
    raw[os.path.basename(comparison_path)] = _read_text(comparison_path)
    svg = None
    svg_paths = sorted(glob.glob(os.path.join(out_dir, "cd_*.svg")))
    if svg_paths:
        svg = _read_text(svg_paths[0])
        raw[os.path.basename(svg_paths[0])] = svg

    return RunReport(out_dir=out_dir,
                     metrics=_parse_csv(raw["metrics.csv"]),
                     aggregate=_parse_csv(raw["metrics_aggregate.csv"]),
                     selection=json.loads(raw[os.path.basename(selection_path)]),
                     comparison=json.loads(raw[os.path.basename(comparison_path)]),
                     svg=svg, raw=raw, stdout=proc.stdout, stderr=proc.stderr)
