"""Feature scaling: fit parameters on training data, transform anything.

Every scaler except the quantile transformer is an affine map per column,
x' = (x - T) / S, where the translation T and scale S are learned from the
training matrix only.  Transforming never looks at the data being
transformed, which is what makes the train/test split leak-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ScalerKind",
    "FittedScaler",
    "SCALER_IDS",
    "scaler_from_id",
    "quantile",
    "inverse_normal_cdf",
    "fit",
    "transform",
]

# Probability clip for the quantile transformer; keeps the normal quantile
# function finite.  inverse_normal_cdf(QT_PROB_CLIP) = -5.1993375821...
QT_PROB_CLIP = 1e-7
QT_OUTPUT_BOUND = 5.199338

_AFFINE_TAGS = ("MC", "SS", "PS", "VS", "MM", "MA", "RS")
_ALL_TAGS = ("NS",) + _AFFINE_TAGS + ("QT",)


@dataclass(frozen=True)
class ScalerKind:
    """A scaling technique plus its (few) hyperparameters.

    Tags: NS identity, MC mean centering, SS standard, PS pareto, VS vast,
    MM min-max to [low, high], MA max-abs, RS robust (median/IQR),
    QT quantile-to-normal.
    """

    tag: str
    low: float = 0.0
    high: float = 1.0
    n_quantiles: int = 1000

    def __post_init__(self):
        if self.tag not in _ALL_TAGS:
            raise ValueError(f"unknown scaler tag {self.tag!r}")
        if self.tag == "MM" and not self.low < self.high:
            raise ValueError(f"MM range requires low < high, got [{self.low}, {self.high}]")
        if self.tag == "QT" and self.n_quantiles < 2:
            raise ValueError(f"QT requires n_quantiles >= 2, got {self.n_quantiles}")


SCALER_IDS = {tag: ScalerKind(tag) for tag in _ALL_TAGS}


def scaler_from_id(scaler_id: str) -> ScalerKind:
    """Resolve a scaler abbreviation (NS, SS, MM, MA, RS, QT, MC, PS, VS)."""
    try:
        return SCALER_IDS[scaler_id]
    except KeyError:
        raise ValueError(
            f"unknown scaler id {scaler_id!r}; expected one of {', '.join(_ALL_TAGS)}"
        ) from None


@dataclass(frozen=True)
class FittedScaler:
    """Per-feature parameters learned from a training matrix.

    Which fields are populated depends on the kind: mean/std for the
    centering family, x_min/x_max for min-max, max_abs for max-abs,
    q1/q2/q3 for robust, references (n_quantiles x n_features, each column
    non-decreasing) for the quantile transformer.
    """

    kind: ScalerKind
    n_features: int
    mean: np.ndarray | None = None
    std: np.ndarray | None = None
    x_min: np.ndarray | None = None
    x_max: np.ndarray | None = None
    max_abs: np.ndarray | None = None
    q1: np.ndarray | None = None
    q2: np.ndarray | None = None
    q3: np.ndarray | None = None
    references: np.ndarray | None = None

    @property
    def translation(self) -> np.ndarray:
        """Translational term T of x' = (x - T) / S.  Affine kinds only."""
        tag = self.kind.tag
        if tag == "NS":
            return np.zeros(self.n_features)
        if tag in ("MC", "SS", "PS", "VS"):
            return self.mean.copy()
        if tag == "MM":
            return self.x_min - self.kind.low * self.scale
        if tag == "MA":
            return np.zeros(self.n_features)
        if tag == "RS":
            return self.q2.copy()
        raise ValueError(f"{tag} is not an affine scaler")

    @property
    def scale(self) -> np.ndarray:
        """Scaling factor S of x' = (x - T) / S.  Affine kinds only.

        Degenerate factors (zero spread) are replaced by 1 so the
        transform stays total; see _safe_scale.
        """
        tag = self.kind.tag
        if tag in ("NS", "MC"):
            return np.ones(self.n_features)
        if tag == "SS":
            return _safe_scale(self.std)
        if tag == "PS":
            return _safe_scale(np.sqrt(self.std))
        if tag == "VS":
            # (x - m)/s * m/s == (x - m) / (s*s/m); sign follows the mean,
            # and a zero mean sends every value to 0 via an infinite factor.
            with np.errstate(divide="ignore"):
                return np.where(self.std == 0.0, 1.0, self.std * self.std / self.mean)
        if tag == "MM":
            return _safe_scale((self.x_max - self.x_min) / (self.kind.high - self.kind.low))
        if tag == "MA":
            return _safe_scale(self.max_abs)
        if tag == "RS":
            return _safe_scale(self.q3 - self.q1)
        raise ValueError(f"{tag} is not an affine scaler")


def _safe_scale(s: np.ndarray) -> np.ndarray:
    return np.where(s == 0.0, 1.0, s)


def quantile(sorted_values, q: float) -> float:
    """Linear-interpolation ("type 7") quantile of a non-decreasing sequence.

    Position p = (n-1)*q; the result interpolates between the two
    surrounding order statistics.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile level must be in [0, 1], got {q}")
    v = np.asarray(sorted_values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("quantile of an empty sequence")
    pos = (v.size - 1) * q
    i = int(math.floor(pos))
    if i >= v.size - 1:
        return float(v[-1])
    frac = pos - i
    return float(v[i] + frac * (v[i + 1] - v[i]))


def _column_quantiles(sorted_col: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """Vectorized version of `quantile` for one sorted column."""
    n = sorted_col.size
    pos = (n - 1) * qs
    i = np.minimum(np.floor(pos).astype(np.intp), n - 2) if n > 1 else np.zeros(qs.size, np.intp)
    frac = pos - i
    if n == 1:
        return np.full(qs.size, sorted_col[0])
    return sorted_col[i] + frac * (sorted_col[i + 1] - sorted_col[i])


# Peter Acklam's rational approximation to the standard normal quantile
# function; documented maximum relative error 1.15e-9.  Antisymmetry is
# structural: the upper tail is evaluated as the negated lower tail.
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_ACKLAM_P_LOW = 0.02425


def _acklam_tail(p):
    """Lower-tail branch (0 < p <= p_low); returns negative z."""
    c, d = _ACKLAM_C, _ACKLAM_D
    q = np.sqrt(-2.0 * np.log(p))
    num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
    den = (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
    return num / den


def _acklam_central(p):
    """Central branch (p_low < p < 1 - p_low); odd around p = 0.5."""
    a, b = _ACKLAM_A, _ACKLAM_B
    q = p - 0.5
    r = q * q
    num = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
    den = ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    return num / den


def _inv_norm_cdf_array(p: np.ndarray) -> np.ndarray:
    out = np.empty_like(p)
    lo = p < _ACKLAM_P_LOW
    hi = p > 1.0 - _ACKLAM_P_LOW
    mid = ~(lo | hi)
    if lo.any():
        out[lo] = _acklam_tail(p[lo])
    if hi.any():
        out[hi] = -_acklam_tail(1.0 - p[hi])
    if mid.any():
        out[mid] = _acklam_central(p[mid])
    return out


def inverse_normal_cdf(p: float) -> float:
    """Standard normal quantile z with Phi(z) = p, accurate to ~1e-9.

    Strictly increasing on (0, 1) and antisymmetric around 0.5.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie strictly in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    return float(_inv_norm_cdf_array(np.array([p], dtype=np.float64))[0])


def fit(kind: ScalerKind, train_features) -> FittedScaler:
    """Learn per-feature scaling parameters from a training matrix.

    Standard deviations are population (divide by n).  The quantile
    transformer stores min(n_quantiles, n_train) reference quantiles per
    feature, taken at evenly spaced levels.
    """
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise ValueError("training features must be a non-empty 2-D matrix")
    n, d = X.shape
    tag = kind.tag

    if tag == "NS":
        return FittedScaler(kind=kind, n_features=d)
    if tag in ("MC", "SS", "PS", "VS"):
        return FittedScaler(kind=kind, n_features=d, mean=X.mean(axis=0), std=X.std(axis=0))
    if tag == "MM":
        return FittedScaler(kind=kind, n_features=d, x_min=X.min(axis=0), x_max=X.max(axis=0))
    if tag == "MA":
        return FittedScaler(kind=kind, n_features=d, max_abs=np.abs(X).max(axis=0))
    if tag == "RS":
        S = np.sort(X, axis=0)
        qs = np.array([0.25, 0.5, 0.75])
        quarts = np.stack([_column_quantiles(S[:, j], qs) for j in range(d)], axis=1)
        return FittedScaler(
            kind=kind, n_features=d, q1=quarts[0], q2=quarts[1], q3=quarts[2]
        )
    if tag == "QT":
        nq = max(2, min(kind.n_quantiles, n))
        levels = np.arange(nq, dtype=np.float64) / (nq - 1)
        S = np.sort(X, axis=0)
        refs = np.stack([_column_quantiles(S[:, j], levels) for j in range(d)], axis=1)
        return FittedScaler(kind=kind, n_features=d, references=refs)
    raise ValueError(f"unknown scaler tag {tag!r}")


def transform(fitted: FittedScaler, features) -> np.ndarray:
    """Apply a fitted scaler column-wise.

    Reads statistics only from the fitted parameters, never from
    `features`, so the output of each row is independent of every other
    row (no look-ahead).
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D matrix")
    if X.shape[1] != fitted.n_features:
        raise ValueError(
            f"feature count mismatch: fitted on {fitted.n_features} columns, "
            f"got {X.shape[1]}"
        )
    tag = fitted.kind.tag
    if tag == "NS":
        return X.copy()
    if tag == "QT":
        return _transform_quantile(fitted, X)
    return (X - fitted.translation) / fitted.scale


def _transform_quantile(fitted: FittedScaler, X: np.ndarray) -> np.ndarray:
    refs = fitted.references
    nq = refs.shape[0]
    levels = np.arange(nq, dtype=np.float64) / (nq - 1)
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        ref = refs[:, j]
        v = np.clip(X[:, j], ref[0], ref[-1])
        # Average of the forward and reverse interpolants: ordinary linear
        # interpolation between distinct reference values, plateau midpoints
        # at tied ones.
        fwd = np.interp(v, ref, levels)
        rev = -np.interp(-v, -ref[::-1], -levels[::-1])
        p = np.clip(0.5 * (fwd + rev), QT_PROB_CLIP, 1.0 - QT_PROB_CLIP)
        out[:, j] = _inv_norm_cdf_array(p)
    return out
