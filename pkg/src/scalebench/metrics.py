"""Confusion-matrix metrics for imbalanced binary classification.

All rates use the pessimistic zero convention: a rate whose denominator is
zero is 0, which keeps every metric total and in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfusionMatrix",
    "confusion",
    "precision",
    "recall",
    "specificity",
    "f_beta",
    "f1",
    "g_mean",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(predictions, labels, positive_class: int) -> ConfusionMatrix:
    """Count the 2x2 confusion matrix with `positive_class` as positive."""
    pred = np.asarray(predictions)
    lab = np.asarray(labels)
    if pred.shape != lab.shape or pred.ndim != 1 or pred.size == 0:
        raise ValueError(
            f"predictions and labels must be equal-length non-empty vectors, "
            f"got shapes {pred.shape} and {lab.shape}"
        )
    pos_pred = pred == positive_class
    pos_lab = lab == positive_class
    return ConfusionMatrix(
        tp=int(np.sum(pos_pred & pos_lab)),
        fp=int(np.sum(pos_pred & ~pos_lab)),
        fn=int(np.sum(~pos_pred & pos_lab)),
        tn=int(np.sum(~pos_pred & ~pos_lab)),
    )


def _rate(num: int, den: int) -> float:
    return num / den if den > 0 else 0.0


def precision(cm: ConfusionMatrix) -> float:
    return _rate(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> float:
    return _rate(cm.tp, cm.tp + cm.fn)


def specificity(cm: ConfusionMatrix) -> float:
    return _rate(cm.tn, cm.tn + cm.fp)


def f_beta(cm: ConfusionMatrix, beta: float) -> float:
    """F-beta from counts: (1 + b^2) TP / ((1 + b^2) TP + b^2 (FP + FN))."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    b2 = beta * beta
    den = (1.0 + b2) * cm.tp + b2 * (cm.fp + cm.fn)
    return (1.0 + b2) * cm.tp / den if den > 0 else 0.0


def f1(cm: ConfusionMatrix) -> float:
    return f_beta(cm, 1.0)


def g_mean(cm: ConfusionMatrix) -> float:
    """Geometric mean of sensitivity and specificity."""
    return math.sqrt(recall(cm) * specificity(cm))
