"""Rank statistics over a results grid: Friedman test, Nemenyi critical
difference, average ranks, fractional wins, and best-to-worst ranges.

Rows of a score matrix are subjects (datasets), columns are treatments
(scaling techniques or models), and higher scores are better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScoreMatrix",
    "FriedmanResult",
    "row_ranks",
    "friedman",
    "chi2_sf",
    "nemenyi_cd",
    "fractional_wins",
    "best_worst_range",
    "average_ranks",
]


@dataclass(frozen=True)
class ScoreMatrix:
    """Rectangular grid of scores with row and column identifiers."""

    values: np.ndarray
    row_ids: tuple
    col_ids: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("score matrix must be 2-D")
        if v.shape != (len(self.row_ids), len(self.col_ids)):
            raise ValueError("score matrix shape does not match its identifiers")
        if v.shape[0] < 2 or v.shape[1] < 2:
            raise ValueError("score matrix needs at least 2 rows and 2 columns")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    degrees_of_freedom: int
    p_value: float

    @property
    def reject_at_0_05(self) -> bool:
        return self.p_value < 0.05


def _values(m) -> np.ndarray:
    if isinstance(m, ScoreMatrix):
        return m.values
    v = np.asarray(m, dtype=np.float64)
    if v.ndim != 2:
        raise ValueError("expected a 2-D score matrix")
    return v


def row_ranks(scores, higher_better: bool = True) -> np.ndarray:
    """Fractional ranks of one row; rank 1 is best, ties share the mean of
    the rank positions they span."""
    v = np.asarray(scores, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a 1-D row with at least 2 entries")
    key = -v if higher_better else v
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sorted_key[j + 1] == sorted_key[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(row: np.ndarray) -> float:
    """Sum of t^3 - t over the tie groups of one row."""
    _, counts = np.unique(row, return_counts=True)
    t = counts.astype(np.float64)
    return float(np.sum(t ** 3 - t))


def friedman(m) -> FriedmanResult:
    """Tie-corrected Friedman chi-square test over an N x k score matrix.

    A fully tied matrix (correction factor 0) degenerates to statistic 0,
    p-value 1: there is no rank variation to test.
    """
    v = _values(m)
    n, k = v.shape
    if n < 2 or k < 2:
        raise ValueError("Friedman test needs at least 2 rows and 2 columns")
    ranks = np.vstack([row_ranks(v[i]) for i in range(n)])
    col_sums = ranks.sum(axis=0)
    uncorrected = 12.0 / (n * k * (k + 1)) * float(np.sum(col_sums ** 2)) - 3.0 * n * (k + 1)
    ties = sum(_tie_term(v[i]) for i in range(n))
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0.0:
        return FriedmanResult(statistic=0.0, degrees_of_freedom=k - 1, p_value=1.0)
    statistic = max(uncorrected / correction, 0.0)
    return FriedmanResult(
        statistic=statistic,
        degrees_of_freedom=k - 1,
        p_value=chi2_sf(statistic, k - 1),
    )


def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series; use for x < a + 1."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(1000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_continued_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by modified Lentz
    continued fraction; use for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_sf(x: float, df: int) -> float:
    """Chi-square survival function 1 - P(df/2, x/2), monotone decreasing in x."""
    if x < 0:
        raise ValueError(f"chi-square statistic must be non-negative, got {x}")
    if not (isinstance(df, (int, np.integer)) and df >= 1):
        raise ValueError(f"degrees of freedom must be a positive integer, got {df}")
    if x == 0.0:
        return 1.0
    a = df / 2.0
    half = x / 2.0
    if half < a + 1.0:
        return min(max(1.0 - _gamma_p_series(a, half), 0.0), 1.0)
    return min(max(_gamma_q_continued_fraction(a, half), 0.0), 1.0)


# Two-tailed Nemenyi constants at alpha = 0.05 (studentized range over
# sqrt(2)) for k = 2..10 treatments.
_NEMENYI_Q_05 = {
    2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850,
    7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164,
}


def nemenyi_cd(k: int, n_subjects: int, alpha: float = 0.05) -> float:
    """Critical difference of average ranks: q_alpha * sqrt(k(k+1) / (6N))."""
    if alpha != 0.05:
        raise ValueError("only the alpha = 0.05 constant table is built in")
    if k not in _NEMENYI_Q_05:
        raise ValueError(f"k must be in 2..10, got {k}")
    if n_subjects < 1:
        raise ValueError(f"need at least one subject, got {n_subjects}")
    return _NEMENYI_Q_05[k] * math.sqrt(k * (k + 1) / (6.0 * n_subjects))


def fractional_wins(m) -> np.ndarray:
    """Per-column win totals; each row's single win is split equally among
    the columns tied at that row's maximum.  Totals sum to the row count."""
    v = _values(m)
    wins = np.zeros(v.shape[1], dtype=np.float64)
    for row in v:
        best = row.max()
        tied = row == best
        wins[tied] += 1.0 / tied.sum()
    return wins


def best_worst_range(m) -> tuple[np.ndarray, float]:
    """Per-row (max - min) plus the mean over rows."""
    v = _values(m)
    ranges = v.max(axis=1) - v.min(axis=1)
    return ranges, float(ranges.mean())


def average_ranks(m) -> np.ndarray:
    """Column means of per-row fractional ranks; lower is better."""
    v = _values(m)
    ranks = np.vstack([row_ranks(v[i]) for i in range(v.shape[0])])
    return ranks.mean(axis=0)
