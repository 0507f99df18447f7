"""Rank-based comparison of algorithms across dataset x attribute rows:
Friedman test with Nemenyi critical difference.

Each row of a RankTable ranks the k algorithms on one dataset/attribute
cell (rank 1 = best, midranks for ties); the Friedman statistic asks
whether the k column mean ranks could be a chance permutation, and the
Nemenyi critical difference bounds how far two mean ranks must be apart
before the difference is significant at the chosen alpha.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import fdtrc, gammaincc
from scipy.stats import rankdata

from .errors import (TooFewAlgorithms, TooFewRows, UndefinedValue,
                     UnsupportedAlpha, UnsupportedK)

logger = logging.getLogger("fairrank.stats")

DIRECTIONS = ("higher_better", "lower_better")

# Studentized-range quantiles divided by sqrt(2), the constants of the
# two-tailed Nemenyi procedure, for k = 2..20 treatments at infinite df.
# Cross-checked against scipy.stats.studentized_range.ppf(1 - alpha, k, inf)
# / sqrt(2) (agreement within 7e-4, the published tables' own rounding).
Q_ALPHA = {
    0.05: {2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949,
           8: 3.031, 9: 3.102, 10: 3.164, 11: 3.219, 12: 3.268, 13: 3.313,
           14: 3.354, 15: 3.391, 16: 3.426, 17: 3.458, 18: 3.489, 19: 3.517,
           20: 3.544},
    0.10: {2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589, 7: 2.693,
           8: 2.780, 9: 2.855, 10: 2.920, 11: 2.978, 12: 3.030, 13: 3.077,
           14: 3.120, 15: 3.159, 16: 3.196, 17: 3.230, 18: 3.261, 19: 3.291,
           20: 3.319},
}


@dataclass(frozen=True)
class RankTable:
    """Per-row ranks of k algorithms over N dataset/attribute rows."""
    algorithms: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    direction: str
    mean_ranks: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.algorithms)

    @property
    def n_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class FriedmanResult:
    """Friedman chi-square outcome, plus the Iman-Davenport F refinement
    as a side output (None when its denominator is non-positive). The
    significance gate uses the plain chi-square p-value."""
    chi2: float
    df: int
    p_value: float
    significant: bool
    iman_davenport_f: float | None = None
    iman_davenport_p: float | None = None


def _has_undefined(values) -> bool:
    return any(v is None or (isinstance(v, float) and math.isnan(v)) for v in values)


def rank_row(values, direction: str) -> tuple[float, ...]:
    """Rank one row of metric values: rank 1 = best, ties get midranks.

    "higher_better" treats larger values as better (AUC-like metrics);
    "lower_better" treats smaller values as better (gap-like metrics).
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if _has_undefined(values):
        raise UndefinedValue("cannot rank a row containing undefined values")
    v = np.asarray(values, dtype=float)
    ranks = rankdata(-v if direction == "higher_better" else v, method="average")
    return tuple(float(r) for r in ranks)


def build_rank_table(algorithms, value_rows, direction: str) -> RankTable:
    """Rank each row of metric values and average the columns.

    Rows containing an undefined value (None/NaN) are dropped entirely
    (listwise deletion) and the dropped count is logged; ranks are only
    comparable within complete rows.
    """
    algorithms = tuple(algorithms)
    if len(algorithms) < 2:
        raise TooFewAlgorithms(f"need >= 2 algorithms, got {len(algorithms)}")
    kept, dropped = [], 0
    for row in value_rows:
        row = tuple(row)
        if len(row) != len(algorithms):
            raise UndefinedValue(
                f"row has {len(row)} values for {len(algorithms)} algorithms")
        if _has_undefined(row):
            dropped += 1
            continue
        kept.append(rank_row(row, direction))
    if dropped:
        logger.info("dropped %d row(s) with undefined values from rank table", dropped)
    if not kept:
        raise TooFewRows("no complete rows to rank")
    mean = np.asarray(kept, dtype=float).mean(axis=0)
    return RankTable(algorithms, tuple(kept), direction, tuple(float(x) for x in mean))


def friedman_chi2(mean_ranks, n_rows: int) -> float:
    """Friedman statistic from column mean ranks:
    chi2 = [12N / (k(k+1))] * [sum_j mean_rank_j^2 - k(k+1)^2 / 4]."""
    r = np.asarray(mean_ranks, dtype=float)
    k = r.size
    chi2 = 12.0 * n_rows / (k * (k + 1)) * (float(np.sum(r * r)) - k * (k + 1) ** 2 / 4.0)
    return max(chi2, 0.0)  # clamp the all-tied case against roundoff


def chi2_sf(x: float, df: int) -> float:
    """Upper tail of the chi-square distribution: the regularized upper
    incomplete gamma Q(df/2, x/2)."""
    return float(gammaincc(df / 2.0, x / 2.0))


def friedman_test(table: RankTable, alpha: float = 0.05) -> FriedmanResult:
    """Friedman test over a rank table; significant iff p < alpha.

    Also reports the Iman-Davenport F refinement
    F = (N-1) chi2 / (N(k-1) - chi2) with its F-distribution p-value,
    or None when chi2 reaches its maximum N(k-1).
    """
    if table.k < 2:
        raise TooFewAlgorithms(f"need >= 2 algorithms, got {table.k}")
    if table.n_rows < 2:
        raise TooFewRows(f"need >= 2 rows, got {table.n_rows}")
    n, k = table.n_rows, table.k
    chi2 = friedman_chi2(table.mean_ranks, n)
    df = k - 1
    p = chi2_sf(chi2, df)
    f_stat = f_p = None
    denom = n * (k - 1) - chi2
    if denom > 0:
        f_stat = (n - 1) * chi2 / denom
        f_p = float(fdtrc(k - 1.0, (k - 1.0) * (n - 1.0), f_stat))
    return FriedmanResult(chi2, df, p, p < alpha, f_stat, f_p)


def nemenyi_cd(k: int, n_rows: int, alpha: float = 0.05) -> float:
    """Nemenyi critical difference CD = q_alpha(k) * sqrt(k(k+1) / (6N)).

    Two algorithms whose mean ranks differ by more than the CD perform
    significantly differently at level alpha. Constants are tabulated for
    k = 2..20 and alpha in {0.05, 0.10}.
    """
    key = round(alpha, 2)
    if key not in Q_ALPHA:
        raise UnsupportedAlpha(f"alpha must be 0.05 or 0.10, got {alpha}")
    if not 2 <= k <= 20:
        raise UnsupportedK(f"k must be in 2..20, got {k}")
    if n_rows < 2:
        raise TooFewRows(f"need >= 2 rows, got {n_rows}")
    return Q_ALPHA[key][k] * math.sqrt(k * (k + 1) / (6.0 * n_rows))
