"""Per-run evaluation metrics, per subgroup and pooled.

All metric functions are pure and deterministic. Scores are probabilities in
[0,1]; labels are 0/1 with 1 = the positive (finding present) class unless
the producer documents otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import (DegenerateLabels, EmptyInput, FieldOutOfRange, MixedShape,
                     NonBinaryAttribute, UndefinedRate)
from .ingest import RunData

BCE_EPS = 1e-7

THRESHOLD_RULES = ("max_f1", "min_f1")


@dataclass(frozen=True)
class MetricConfig:
    """Knobs shared by evaluate_run and the CLI.

    positive_means_finding selects the underdiagnosis-rate convention: when
    the positive label means "finding present", a missed diagnosis is a false
    negative (FNR); when it means "No Finding", it is a false positive (FPR).
    """
    ece_bins: int = 10
    tnr_target: float = 0.8
    threshold_rule: str = "max_f1"
    positive_means_finding: bool = True


@dataclass(frozen=True)
class ConfusionRates:
    """Confusion counts and rates at a fixed decision threshold.

    Rates are None when their denominator is zero. By construction
    tpr + fnr == 1.0 and tnr + fpr == 1.0 exactly whenever defined.
    """
    tp: int
    tn: int
    fp: int
    fn: int
    threshold: float
    tpr: float | None
    tnr: float | None
    fpr: float | None
    fnr: float | None


@dataclass(frozen=True)
class EqOddResult:
    eqopp0: float
    eqopp1: float
    eqodd: float


@dataclass(frozen=True)
class GroupMetrics:
    """Metrics of one subgroup; None where undefined for this group."""
    auc: float | None
    bce: float | None
    ece: float | None
    fpr: float | None
    fnr: float | None
    tpr_at_80tnr: float | None


@dataclass(frozen=True)
class MetricBundle:
    """All metrics of one run: per-subgroup values plus pooled aggregates."""
    run_id: str
    per_group: tuple[GroupMetrics, ...]
    overall_auc: float
    worst_auc: float | None
    auc_gap: float | None
    eqodd: float | None
    bce: float
    ece: float
    threshold: float


def _scores_labels(scores, labels):
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be equal-length 1-d sequences")
    if y.size and not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return s, y.astype(int)


def auc(scores, labels) -> float:
    """Area under the ROC curve as the Mann-Whitney statistic.

    Equals (#{positive > negative pairs} + 0.5 * #{tied pairs}) divided by
    (#positives * #negatives), computed from midranks in O(n log n). The
    result is derived from the smaller of the two complementary pair counts,
    so auc(1 - s, y) == 1 - auc(s, y) holds exactly in floating point.
    """
    s, y = _scores_labels(scores, labels)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("AUC needs at least one positive and one negative label")
    ranks = rankdata(s, method="average")
    # rank sums are half-integers, exact in float64 at these magnitudes
    num = float(ranks[y == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    den = float(n_pos) * float(n_neg)
    if 2.0 * num > den:
        return 1.0 - (den - num) / den
    if 2.0 * num < den:
        return 1.0 - (1.0 - num / den)
    return 0.5


def bce(scores, labels) -> float:
    """Mean binary cross entropy with probabilities clamped to [1e-7, 1-1e-7]."""
    s, y = _scores_labels(scores, labels)
    if s.size == 0:
        raise EmptyInput("bce of an empty sample set")
    p = np.clip(s, BCE_EPS, 1.0 - BCE_EPS)
    return float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1.0 - p))))


def ece(scores, labels, bins: int = 10) -> float:
    """Expected calibration error over equal-width score bins.

    The unit interval is split into `bins` bins, each closed on the left and
    open on the right except the last, which also contains 1.0. Empty bins
    contribute nothing.
    """
    s, y = _scores_labels(scores, labels)
    if s.size == 0:
        raise EmptyInput("ece of an empty sample set")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    idx = np.minimum((s * bins).astype(int), bins - 1)
    total = 0.0
    for b in np.unique(idx):
        members = idx == b
        n_b = int(members.sum())
        gap = abs(float(np.mean(y[members])) - float(np.mean(s[members])))
        total += n_b / s.size * gap
    return total


def select_threshold(scores, labels, rule: str = "max_f1") -> float:
    """Decision threshold for the rule `predict positive iff score >= t`.

    Candidates are the distinct observed scores plus 0; the returned
    threshold maximizes F1 (rule "max_f1", the default) with ties resolved
    toward the largest threshold. "min_f1" returns the F1-minimizing
    candidate instead and exists only to make the conventional reading of
    the rule's name runnable; it is degenerate by construction.
    """
    if rule not in THRESHOLD_RULES:
        raise ValueError(f"threshold_rule must be one of {THRESHOLD_RULES}")
    s, y = _scores_labels(scores, labels)
    n_pos = int((y == 1).sum())
    if n_pos == 0:
        raise DegenerateLabels("threshold selection needs at least one positive label")
    cand = np.unique(np.append(s, 0.0))
    pos_sorted = np.sort(s[y == 1])
    neg_sorted = np.sort(s[y == 0])
    tp = n_pos - np.searchsorted(pos_sorted, cand, side="left")
    fp = neg_sorted.size - np.searchsorted(neg_sorted, cand, side="left")
    # F1 = 2tp / (2tp + fp + fn) = 2tp / (tp + fp + n_pos); tp = 0 gives 0
    f1 = np.where(tp > 0, 2.0 * tp / (tp + fp + n_pos), 0.0)
    best = f1.max() if rule == "max_f1" else f1.min()
    return float(cand[f1 == best].max())


def confusion_rates(scores, labels, threshold: float) -> ConfusionRates:
    """Confusion counts/rates for `predict positive iff score >= threshold`.

    Rates with a zero denominator are None rather than NaN.
    """
    s, y = _scores_labels(scores, labels)
    pred = s >= threshold
    tp = int(np.sum(pred & (y == 1)))
    fn = int(np.sum(~pred & (y == 1)))
    fp = int(np.sum(pred & (y == 0)))
    tn = int(np.sum(~pred & (y == 0)))
    tpr = tp / (tp + fn) if tp + fn > 0 else None
    tnr = tn / (tn + fp) if tn + fp > 0 else None
    fnr = None if tpr is None else 1.0 - tpr
    fpr = None if tnr is None else 1.0 - tnr
    return ConfusionRates(tp, tn, fp, fn, float(threshold), tpr, tnr, fpr, fnr)


def tpr_at_tnr(scores, labels, target_tnr: float = 0.8) -> float:
    """TPR at the smallest threshold whose TNR reaches target_tnr.

    Thresholds are the observed scores plus +inf; TNR(t) is the fraction of
    negatives strictly below t, so it is nondecreasing in t and +inf always
    reaches 1. No interpolation.
    """
    s, y = _scores_labels(scores, labels)
    pos = np.sort(s[y == 1])
    neg = np.sort(s[y == 0])
    if pos.size == 0 or neg.size == 0:
        raise DegenerateLabels("TPR@TNR needs both classes")
    for t in np.unique(s):
        if np.searchsorted(neg, t, side="left") / neg.size >= target_tnr:
            return float((pos.size - np.searchsorted(pos, t, side="left")) / pos.size)
    return 0.0  # only the all-negative rule (t = +inf) reaches the target


def eq_odd(*rates_by_group: ConfusionRates) -> EqOddResult:
    """Equalized-odds score for a binary sensitive attribute.

    eqopp0 = 1 - |fpr_g0 - fpr_g1| penalizes cross-group deviation of the
    positive-prediction rate among negatives, eqopp1 likewise among
    positives, and eqodd is their mean. Call with exactly the two per-group
    rate sets.
    """
    if len(rates_by_group) != 2:
        raise NonBinaryAttribute(
            f"equalized odds is defined for exactly 2 subgroups, got {len(rates_by_group)}")
    g0, g1 = rates_by_group
    for name, r in (("g0", g0), ("g1", g1)):
        if r.fpr is None or r.tpr is None:
            raise UndefinedRate(f"{name} has undefined tpr/fpr (missing a label class)")
    eqopp0 = 1.0 - abs(g0.fpr - g1.fpr)
    eqopp1 = 1.0 - abs(g0.tpr - g1.tpr)
    return EqOddResult(eqopp0, eqopp1, 0.5 * (eqopp0 + eqopp1))


def underdiagnosis_rate(rates: ConfusionRates, positive_means_finding: bool = True) -> float | None:
    """Rate of sick patients the classifier clears: FNR when the positive
    label marks a finding, FPR when it marks 'No Finding'."""
    return rates.fnr if positive_means_finding else rates.fpr


def evaluate_run(run: RunData, config: MetricConfig = MetricConfig()) -> MetricBundle:
    """Compute the full metric bundle for one run.

    The decision threshold is selected once on the pooled run and applied to
    every subgroup. Per-group values are None where undefined (empty group,
    single label value); worst_auc/auc_gap are derived from the defined
    per-group AUCs only. eqodd is present only for binary attributes with
    defined rates on both sides. Raises DegenerateLabels only when the
    pooled run has a single label value.
    """
    m = run.manifest.m
    groups = np.array([r.group for r in run.records], dtype=int)
    if groups.size and groups.max() >= m:
        raise FieldOutOfRange(f"record group id >= m={m}; validate the run first")
    scores = np.array([r.score for r in run.records], dtype=float)
    labels = np.array([r.label for r in run.records], dtype=int)

    overall_auc = auc(scores, labels)
    threshold = select_threshold(scores, labels, config.threshold_rule)
    overall_bce = bce(scores, labels)
    overall_ece = ece(scores, labels, config.ece_bins)

    per_group: list[GroupMetrics] = []
    rates_by_group: list[ConfusionRates | None] = []
    for g in range(m):
        mask = groups == g
        s_g, y_g = scores[mask], labels[mask]
        if s_g.size == 0:
            per_group.append(GroupMetrics(None, None, None, None, None, None))
            rates_by_group.append(None)
            continue
        try:
            auc_g = auc(s_g, y_g)
        except DegenerateLabels:
            auc_g = None
        rates = confusion_rates(s_g, y_g, threshold)
        try:
            tprtnr_g = tpr_at_tnr(s_g, y_g, config.tnr_target)
        except DegenerateLabels:
            tprtnr_g = None
        per_group.append(GroupMetrics(auc_g, bce(s_g, y_g), ece(s_g, y_g, config.ece_bins),
                                      rates.fpr, rates.fnr, tprtnr_g))
        rates_by_group.append(rates)

    defined = [g.auc for g in per_group if g.auc is not None]
    worst = min(defined) if defined else None
    gap = max(defined) - min(defined) if defined else None

    eqodd_value = None
    if m == 2 and all(r is not None and r.fpr is not None and r.tpr is not None
                      for r in rates_by_group):
        eqodd_value = eq_odd(*rates_by_group).eqodd

    return MetricBundle(run.manifest.run_id, tuple(per_group), overall_auc,
                        worst, gap, eqodd_value, overall_bce, overall_ece, threshold)


@dataclass(frozen=True)
class SeedStats:
    mean: float
    std: float
    n: int


def _sample_std(values: np.ndarray) -> float:
    if values.size <= 1:
        return 0.0
    return float(np.std(values, ddof=1))


def bundle_scalars(bundle: MetricBundle) -> dict[str, float | None]:
    """Flatten a bundle into the scalar metric map used by CSV output and
    seed aggregation (keys match the metrics CSV columns)."""
    out: dict[str, float | None] = {
        "overall_auc": bundle.overall_auc,
        "worst_auc": bundle.worst_auc,
        "auc_gap": bundle.auc_gap,
        "eqodd": bundle.eqodd,
        "bce": bundle.bce,
        "ece": bundle.ece,
        "threshold": bundle.threshold,
    }
    for g, gm in enumerate(bundle.per_group):
        out[f"auc_g{g}"] = gm.auc
        out[f"fpr_g{g}"] = gm.fpr
        out[f"fnr_g{g}"] = gm.fnr
        out[f"tprattnr_g{g}"] = gm.tpr_at_80tnr
    return out


def aggregate_seeds(bundles) -> dict[str, SeedStats]:
    """Mean and sample standard deviation per metric across seed repeats.

    The bundles must come from the same algorithm x dataset x attribute x
    hyperparameter cell and share the subgroup count. Metrics undefined in
    every bundle are omitted; otherwise the statistics run over the defined
    values (n reported per metric). std uses the n-1 denominator and is 0
    for a single value.
    """
    bundles = list(bundles)
    if not bundles:
        raise EmptyInput("aggregate_seeds needs at least one bundle")
    m = len(bundles[0].per_group)
    if any(len(b.per_group) != m for b in bundles):
        raise MixedShape("bundles disagree on subgroup count")
    maps = [bundle_scalars(b) for b in bundles]
    out: dict[str, SeedStats] = {}
    for key in maps[0]:
        values = np.array([v for mp in maps if (v := mp[key]) is not None], dtype=float)
        if values.size:
            out[key] = SeedStats(float(np.mean(values)), _sample_std(values), int(values.size))
    return out
