"""Training-side bridge for the fairness evaluation engine.

Two halves, joined only by files and a subprocess:

* :mod:`fairrank_bridge.export` — write engine-compatible run directories
  (``manifest.json`` + ``predictions.jsonl``) straight from a training
  loop, batch by batch, with boundary clamping and strict validation.
* :mod:`fairrank_bridge.client` — invoke the ``fairrank`` executable over
  an exported corpus and parse the report artifacts it produces.

The engine package is never imported; the contract is the file formats
and the command line.
"""

from .client import INT_COLS, STR_COLS, ReportOptions, RunReport, run_report
from .errors import (BridgeError, ClampWarning, EngineNotFound,
                     FieldOutOfRange, InvalidManifest, IoFailure,
                     LengthMismatch, NonZeroExit)
from .export import CLAMP_SLACK, SPLITS, ExportSession, begin_run, log_batch

__version__ = "0.1.0"

__all__ = [
    "BridgeError", "InvalidManifest", "LengthMismatch", "FieldOutOfRange",
    "IoFailure", "EngineNotFound", "NonZeroExit", "ClampWarning",
    "ExportSession", "begin_run", "log_batch", "SPLITS", "CLAMP_SLACK",
    "ReportOptions", "RunReport", "run_report", "STR_COLS", "INT_COLS",
    "__version__",
]
