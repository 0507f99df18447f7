"""Exporter hooks for training loops: write engine-compatible run
directories (manifest.json + predictions.jsonl) record by record.

The emitted files mirror the engine's ingest formats exactly:

* ``manifest.json`` — object with run_id, algorithm, dataset, attribute,
  seed (int), hparam_id, split ("validation" or "test"), and group_names
  (>= 2 subgroup names; the subgroup count m is its length).
* ``predictions.jsonl`` — one JSON object per line with run_id, sample_id,
  score in [0,1], label in {0,1}, and group in [0, m).

Scores within ``CLAMP_SLACK`` of the [0,1] boundary are clamped to the
boundary with a :class:`ClampWarning` — training frameworks emit 1.0 plus
float noise routinely — while scores beyond the slack are rejected.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field

from .errors import (ClampWarning, FieldOutOfRange, InvalidManifest,
                     IoFailure, LengthMismatch)

SPLITS = ("validation", "test")
CLAMP_SLACK = 1e-6


@dataclass
class ExportSession:
    """One open run export: manifest identity plus an append handle to the
    run's predictions file. Not shareable across threads; concurrent
    sessions for different runs are safe."""

    run_dir: str
    run_id: str
    algorithm: str
    dataset: str
    attribute: str
    seed: int
    hparam_id: str
    split: str
    group_names: tuple[str, ...]
    _handle: object = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return len(self.group_names)

    @property
    def closed(self) -> bool:
        return self._handle is None

    def log_batch(self, sample_ids, scores, labels, groups) -> int:
        return log_batch(self, sample_ids, scores, labels, groups)

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def __enter__(self) -> "ExportSession":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def begin_run(runs_root: str, *, run_id: str, algorithm: str, dataset: str,
              attribute: str, seed: int, hparam_id: str = "h0",
              split: str = "test", group_names, overwrite: bool = False) -> ExportSession:
    """Create ``runs_root/<run_id>/`` with a manifest and an empty
    predictions log, and return the open session.

    Refuses an existing run directory unless ``overwrite`` is set (an
    overwrite truncates the predictions log and rewrites the manifest).
    """
    names = tuple(str(g) for g in group_names)
    if len(names) < 2:
        raise InvalidManifest(f"at least 2 subgroups required, got {len(names)}")
    if split not in SPLITS:
        raise InvalidManifest(f"split must be one of {SPLITS}, got {split!r}")
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise InvalidManifest(f"seed must be an integer, got {seed!r}") from None
    if not run_id:
        raise InvalidManifest("run_id must be non-empty")

    run_dir = os.path.join(runs_root, run_id)
    if os.path.exists(run_dir) and not overwrite:
        raise IoFailure(f"run directory already exists: {run_dir} "
                        "(pass overwrite=True to replace it)")
    manifest = {"run_id": run_id, "algorithm": algorithm, "dataset": dataset,
                "attribute": attribute, "seed": seed, "hparam_id": hparam_id,
                "split": split, "group_names": list(names)}
    try:
        os.makedirs(run_dir, exist_ok=True)
        with open(os.path.join(run_dir, "manifest.json"), "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        handle = open(os.path.join(run_dir, "predictions.jsonl"), "w", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot create run directory {run_dir}: {exc}") from exc
    return ExportSession(run_dir, run_id, algorithm, dataset, attribute,
                         seed, hparam_id, split, names, handle)


def _clean_score(raw, sample_id) -> tuple[float, bool]:
    """Validate one score; returns (value, was_clamped)."""
    try:
        score = float(raw)
    except (TypeError, ValueError):
        raise FieldOutOfRange(f"sample {sample_id!r}: score {raw!r} is not a number") from None
    if math.isnan(score):
        raise FieldOutOfRange(f"sample {sample_id!r}: score is NaN")
    if 0.0 <= score <= 1.0:
        return score, False
    if 1.0 < score <= 1.0 + CLAMP_SLACK:
        return 1.0, True
    if -CLAMP_SLACK <= score < 0.0:
        return 0.0, True
    raise FieldOutOfRange(f"sample {sample_id!r}: score {score!r} outside [0,1] "
                          f"beyond clamp slack {CLAMP_SLACK}")


def log_batch(session: ExportSession, sample_ids, scores, labels, groups) -> int:
    """Append one JSONL line per sample; returns the number written.

    The whole batch is validated before anything is written, so a raised
    error means the file did not change.
    """
    if session.closed:
        raise IoFailure(f"session for run {session.run_id!r} is closed")
    sample_ids, scores = list(sample_ids), list(scores)
    labels, groups = list(labels), list(groups)
    lengths = {len(sample_ids), len(scores), len(labels), len(groups)}
    if len(lengths) != 1:
        raise LengthMismatch(
            f"batch sequences must be equal length, got sample_ids={len(sample_ids)} "
            f"scores={len(scores)} labels={len(labels)} groups={len(groups)}")

    lines: list[str] = []
    clamped = 0
    for sid, raw_score, raw_label, raw_group in zip(sample_ids, scores, labels, groups):
        sid = str(sid)
        score, was_clamped = _clean_score(raw_score, sid)
        clamped += was_clamped
        try:
            label = int(raw_label)
            group = int(raw_group)
        except (TypeError, ValueError):
            raise FieldOutOfRange(f"sample {sid!r}: label/group must be integers") from None
        if label not in (0, 1):
            raise FieldOutOfRange(f"sample {sid!r}: label must be 0 or 1, got {label}")
        if not 0 <= group < session.m:
            raise FieldOutOfRange(f"sample {sid!r}: group must be in [0, {session.m}), "
                                  f"got {group}")
        lines.append(json.dumps({"run_id": session.run_id, "sample_id": sid,
                                 "score": score, "label": label, "group": group}))

    if clamped:
        warnings.warn(f"run {session.run_id!r}: clamped {clamped} score(s) "
                      f"within {CLAMP_SLACK} of [0,1] to the boundary", ClampWarning,
                      stacklevel=3)
    try:
        for line in lines:
            session._handle.write(line + "\n")
        session._handle.flush()
    except OSError as exc:
        raise IoFailure(f"cannot append to predictions log: {exc}") from exc
    return len(lines)
