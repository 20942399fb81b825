"""Reduce multiclass and real-valued prediction tasks to binary score/label sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from aucgap.exceptions import AucUndefinedError, ConfigError, DegenerateDataError
from aucgap.grouping import EvaluationRecord, GroupSpec
from aucgap.report import GapReport, evaluate

__all__ = [
    "ClassGapSweep",
    "MulticlassRecord",
    "RealTargetRecord",
    "one_vs_rest",
    "per_class_gap_sweep",
    "threshold_real",
]


@dataclass(frozen=True)
class MulticlassRecord:
    """Per-class scores for one instance. Scores need not sum to one."""

    class_scores: Mapping[str, float]
    true_class: str
    attributes: Mapping[str, Optional[str]] = field(default_factory=dict)
    fold_id: Optional[str] = None

    def __post_init__(self):
        if len(self.class_scores) < 2:
            raise ValueError("a multiclass record needs at least 2 classes")
        if self.true_class not in self.class_scores:
            raise ValueError(f"true class {self.true_class!r} has no score")
        if not all(math.isfinite(s) for s in self.class_scores.values()):
            raise ValueError("class scores must be finite")


@dataclass(frozen=True)
class RealTargetRecord:
    predicted_value: float
    true_value: float
    attributes: Mapping[str, Optional[str]] = field(default_factory=dict)
    fold_id: Optional[str] = None

    def __post_init__(self):
        if not (math.isfinite(self.predicted_value) and math.isfinite(self.true_value)):
            raise ValueError("predicted and true values must be finite")


def one_vs_rest(records: Sequence[MulticlassRecord], target_class: str) -> list[EvaluationRecord]:
    """Binary view with ``target_class`` positive and every other class negative."""
    out = []
    for i, r in enumerate(records):
        if target_class not in r.class_scores:
            raise ConfigError(f"unknown target class {target_class!r} (record {i})")
        out.append(
            EvaluationRecord(
                float(r.class_scores[target_class]),
                r.true_class == target_class,
                r.attributes,
                r.fold_id,
            )
        )
    n_pos = sum(r.label for r in out)
    if n_pos == 0:
        raise AucUndefinedError(f"AUC undefined for class {target_class!r}: no instances of it")
    if n_pos == len(out):
        raise AucUndefinedError(f"AUC undefined for class {target_class!r}: no instances of other classes")
    return out


def threshold_real(records: Sequence[RealTargetRecord], threshold: float) -> list[EvaluationRecord]:
    """Label a record positive iff its true value is ``>= threshold``."""
    if not math.isfinite(threshold):
        raise ConfigError("threshold must be finite")
    out = [
        EvaluationRecord(float(r.predicted_value), r.true_value >= threshold, r.attributes, r.fold_id)
        for r in records
    ]
    n_pos = sum(r.label for r in out)
    if n_pos == 0 or n_pos == len(out):
        raise DegenerateDataError(
            f"degenerate labeling: threshold {threshold!r} gives {n_pos} positives "
            f"and {len(out) - n_pos} negatives"
        )
    return out


@dataclass(frozen=True)
class ClassGapSweep:
    """One gap report per class, plus the max gap over classes.

    Classes whose one-vs-rest problem is degenerate appear in ``errors``
    instead of ``reports``.
    """

    reports: dict[str, GapReport]
    errors: dict[str, str]

    @property
    def max_gap_over_classes(self) -> Optional[float]:
        if not self.reports:
            return None
        return max(r.gap.value for r in self.reports.values())

    @property
    def max_gap_class(self) -> Optional[str]:
        best = None
        for name in sorted(self.reports):
            if best is None or self.reports[name].gap.value > self.reports[best].gap.value:
                best = name
        return best


def per_class_gap_sweep(
    records: Sequence[MulticlassRecord],
    specs: Sequence[GroupSpec],
    classes: Optional[Sequence[str]] = None,
    **kwargs,
) -> ClassGapSweep:
    """Run :func:`aucgap.report.evaluate` once per class on its one-vs-rest view.

    ``classes`` restricts the sweep; by default every class scored on the
    first record is used. Extra keyword arguments go to ``evaluate``.
    """
    if not records:
        raise ConfigError("no records")
    all_classes = sorted(records[0].class_scores)
    if classes is None:
        classes = all_classes
    else:
        unknown = [c for c in classes if c not in all_classes]
        if unknown:
            raise ConfigError(f"unknown classes {unknown}; known: {all_classes}")
    if len(all_classes) < 2:
        raise ConfigError("need at least 2 classes")

    reports, errors = {}, {}
    for cls in sorted(set(classes)):
        try:
            binary = one_vs_rest(records, cls)
            reports[cls] = evaluate(binary, specs, **kwargs)
        except DegenerateDataError as exc:
            errors[cls] = str(exc)
    return ClassGapSweep(reports, errors)
