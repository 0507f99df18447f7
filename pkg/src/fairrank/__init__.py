"""fairrank: fairness evaluation, model selection, and statistical
comparison for binary classifiers over subgroup-partitioned prediction
logs.

The library is organized bottom-up: `ingest` parses and validates
prediction logs and run manifests, `metrics` computes per-run subgroup and
pooled metrics, `selection` picks models under three strategies (overall
AUC, Pareto-front minimax, distance-to-utopia), `stats` ranks algorithms
and runs the Friedman/Nemenyi procedure, `cddiagram` renders
critical-difference diagrams, and `cli` ties it all into file-based
pipelines (`fairrank validate|evaluate|select|compare|report`).
"""

from .errors import (DegenerateLabels, EmptyCandidates, EmptyInput,
                     EmptySubgroup, FairrankError, FieldOutOfRange,
                     InvalidManifest, IoFailure, LengthMismatch,
                     MalformedLine, MissingField, MixedShape,
                     NonBinaryAttribute, TooFewAlgorithms, TooFewRows,
                     UndefinedRate, UndefinedValue, UnsupportedAlpha,
                     UnsupportedK)
from .ingest import (ParsedLog, PredictionRecord, RunData, RunManifest,
                     ValidationReport, load_corpus, load_run_dir,
                     parse_manifest, parse_prediction_log,
                     records_to_jsonl, resampling_weights, validate_run)
from .metrics import (ConfusionRates, EqOddResult, GroupMetrics,
                      MetricBundle, MetricConfig, SeedStats,
                      aggregate_seeds, auc, bce, bundle_scalars,
                      confusion_rates, ece, eq_odd, evaluate_run,
                      select_threshold, tpr_at_tnr, underdiagnosis_rate)
from .selection import (ModelCandidate, ParetoFront, SelectionResult,
                        dominates, dto_distance, dto_utopia, pareto_front,
                        select, select_dto, select_overall,
                        select_pareto_minimax)
from .stats import (FriedmanResult, RankTable, build_rank_table,
                    friedman_chi2, friedman_test, nemenyi_cd, rank_row)
from .cddiagram import CDLayout, cd_groups, cd_layout, cd_svg, render_cd_svg

__version__ = "0.1.0"

__all__ = [
    "FairrankError", "IoFailure", "MalformedLine", "MissingField",
    "FieldOutOfRange", "InvalidManifest", "EmptySubgroup", "DegenerateLabels",
    "EmptyInput", "UndefinedRate", "NonBinaryAttribute", "MixedShape",
    "LengthMismatch", "EmptyCandidates", "UndefinedValue", "TooFewRows",
    "TooFewAlgorithms", "UnsupportedK", "UnsupportedAlpha",
    "PredictionRecord", "RunManifest", "RunData", "ParsedLog",
    "ValidationReport", "parse_prediction_log", "parse_manifest",
    "records_to_jsonl", "validate_run", "resampling_weights",
    "load_run_dir", "load_corpus",
    "MetricConfig", "ConfusionRates", "EqOddResult", "GroupMetrics",
    "MetricBundle", "SeedStats", "auc", "bce", "ece", "select_threshold",
    "confusion_rates", "tpr_at_tnr", "eq_odd", "underdiagnosis_rate",
    "evaluate_run", "bundle_scalars", "aggregate_seeds",
    "ModelCandidate", "ParetoFront", "SelectionResult", "dominates",
    "pareto_front", "select_pareto_minimax", "dto_utopia", "dto_distance",
    "select_dto", "select_overall", "select",
    "RankTable", "FriedmanResult", "rank_row", "build_rank_table",
    "friedman_chi2", "friedman_test", "nemenyi_cd",
    "CDLayout", "cd_groups", "cd_layout", "cd_svg", "render_cd_svg",
    "__version__",
]
