"""Empirical ROC curves and AUC.

Two routes to the same number are provided: :func:`auc_trapezoid` integrates
the threshold-swept curve built by :func:`roc_curve`, and :func:`auc_rank`
computes the Mann-Whitney statistic from midranks. Ties between a positive
and a negative score count as half a win in both.

The decision rule throughout is ``score >= t`` => predicted positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from aucgap.exceptions import AucUndefinedError

__all__ = [
    "AucValue",
    "RocCurve",
    "RocPoint",
    "auc_rank",
    "auc_trapezoid",
    "check_scores_labels",
    "midranks",
    "roc_curve",
]


class RocPoint(NamedTuple):
    fpr: float
    tpr: float
    threshold: float


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Ordered ROC points, one per distinct score plus the ``(0, 0)`` sentinel.

    ``thresholds[0]`` is ``+inf``; every later threshold is an observed score
    and the sequence is strictly decreasing.
    """

    fpr: NDArray[np.float64]
    tpr: NDArray[np.float64]
    thresholds: NDArray[np.float64]
    n_pos: int
    n_neg: int

    def __post_init__(self):
        fpr, tpr, thr = self.fpr, self.tpr, self.thresholds
        if not (fpr.shape == tpr.shape == thr.shape) or fpr.ndim != 1 or fpr.size < 2:
            raise ValueError("fpr, tpr and thresholds must be 1-D arrays of equal length >= 2")
        if fpr[0] != 0 or tpr[0] != 0 or fpr[-1] != 1 or tpr[-1] != 1:
            raise ValueError("ROC curve must start at (0, 0) and end at (1, 1)")
        if np.any(np.diff(fpr) < 0) or np.any(np.diff(tpr) < 0):
            raise ValueError("fpr and tpr must be non-decreasing")
        if np.any(np.diff(thr[1:]) >= 0):
            raise ValueError("thresholds must be strictly decreasing after the sentinel")

    @property
    def points(self) -> list[RocPoint]:
        return [
            RocPoint(float(f), float(t), float(h))
            for f, t, h in zip(self.fpr, self.tpr, self.thresholds)
        ]

    def __len__(self) -> int:
        return self.fpr.size


@dataclass(frozen=True)
class AucValue:
    value: float
    n_pos: int
    n_neg: int

    def __float__(self) -> float:
        return self.value


def check_scores_labels(
    scores: ArrayLike, labels: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Validate and coerce a score/label pair.

    Labels may be booleans or 0/1 integers. Raises ``ValueError`` on shape
    problems or non-finite scores and :class:`AucUndefinedError` when either
    class is absent.
    """
    scores = np.asarray(scores, dtype=np.float64)
    raw = np.asarray(labels)
    if scores.ndim != 1 or raw.ndim != 1:
        raise ValueError("scores and labels must be 1-D")
    if scores.shape[0] != raw.shape[0]:
        raise ValueError(
            f"scores and labels must have the same length, got {scores.shape[0]} and {raw.shape[0]}"
        )
    if raw.dtype != np.bool_:
        if raw.size and not np.all((raw == 0) | (raw == 1)):
            raise ValueError("labels must be boolean or 0/1")
        raw = raw.astype(bool)
    if not np.all(np.isfinite(scores)):
        bad = int(np.flatnonzero(~np.isfinite(scores))[0])
        raise ValueError(f"non-finite score at index {bad}: {scores[bad]!r}")
    n_pos = int(raw.sum())
    n_neg = raw.size - n_pos
    if n_pos < 1 or n_neg < 1:
        raise AucUndefinedError(
            f"AUC undefined for this set: {n_pos} positives, {n_neg} negatives"
        )
    return scores, raw


def _descending_order(scores: NDArray[np.float64]) -> NDArray[np.intp]:
    # stable sort keeps input index as the secondary key
    return np.argsort(-scores, kind="stable")


def roc_curve(scores: Sequence[float] | ArrayLike, labels: Sequence[bool] | ArrayLike) -> RocCurve:
    """Sweep the threshold over every distinct score, highest first.

    Tied scores collapse into a single point, so the result has one point per
    distinct score value after the ``(0, 0, +inf)`` sentinel.
    """
    scores, labels = check_scores_labels(scores, labels)
    order = _descending_order(scores)
    s = scores[order]
    y = labels[order]

    # last index of each run of equal scores
    ends = np.flatnonzero(np.diff(s) != 0)
    ends = np.r_[ends, s.size - 1]

    tps = np.cumsum(y)[ends]
    fps = (ends + 1) - tps
    n_pos = int(tps[-1])
    n_neg = int(fps[-1])

    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    thresholds = np.r_[np.inf, s[ends]]
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, n_pos=n_pos, n_neg=n_neg)


def auc_trapezoid(curve: RocCurve) -> AucValue:
    """Trapezoidal area under ``curve`` in FPR-TPR space."""
    area = float(np.sum(np.diff(curve.fpr) * (curve.tpr[1:] + curve.tpr[:-1])) / 2.0)
    # rounding can push the sum a hair outside [0, 1]
    area = min(max(area, 0.0), 1.0)
    return AucValue(area, curve.n_pos, curve.n_neg)


def midranks(values: NDArray[np.float64]) -> NDArray[np.float64]:
    """1-based ranks with tied values sharing the mean of their positions."""
    order = np.argsort(values, kind="stable")
    s = values[order]
    n = s.size
    starts = np.r_[0, np.flatnonzero(np.diff(s) != 0) + 1]
    stops = np.r_[starts[1:], n]
    # positions starts..stops-1 (0-based) -> mean 1-based rank
    group_rank = (starts + 1 + stops) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(group_rank, stops - starts)
    return ranks


def auc_rank(scores: Sequence[float] | ArrayLike, labels: Sequence[bool] | ArrayLike) -> AucValue:
    """AUC as the normalised Mann-Whitney U statistic, O(n log n).

    Equals the fraction of (positive, negative) pairs in which the positive
    scores higher, with tied pairs credited 0.5.
    """
    scores, labels = check_scores_labels(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    rank_sum = float(midranks(scores)[labels].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return AucValue(u / (n_pos * n_neg), n_pos, n_neg)
