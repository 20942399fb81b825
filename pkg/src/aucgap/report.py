"""End-to-end gap analysis for one binary problem: group, validate, score, gap."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from aucgap.exceptions import AucUndefinedError, DegenerateDataError
from aucgap.gap import (
    GapInterval,
    GapValue,
    SubgroupAucTable,
    auc_gap,
    bootstrap_gap,
    group_auc,
    subgroup_aucs,
)
from aucgap.grouping import EvaluationRecord, GroupSpec, build_groups, record_arrays, validate_groups
from aucgap.roc import AucValue

__all__ = ["GapReport", "evaluate"]


@dataclass(frozen=True)
class GapReport:
    overall_auc: AucValue
    table: SubgroupAucTable
    gap: GapValue
    interval: Optional[GapInterval]
    warnings: tuple[str, ...]
    n_records: int
    overall_per_fold: Optional[dict[str, float]] = None

    def to_dict(self) -> dict:
        """JSON-ready body; full float precision, deterministic key order."""
        groups = []
        for e in self.table.entries.values():
            v = e.validity
            groups.append(
                {
                    "name": e.group,
                    "n": v.n,
                    "n_pos": v.n_pos,
                    "n_neg": v.n_neg,
                    "status": v.status,
                    "reason": v.reason,
                    "auc": e.auc,
                    "per_fold": e.per_fold,
                }
            )
        interval = None
        if self.interval is not None:
            i = self.interval
            interval = {
                "method": i.method,
                "confidence": i.confidence,
                "lower": i.lower,
                "upper": i.upper,
                "n_resamples": i.n_resamples,
                "n_skipped": i.n_skipped,
                "seed": i.seed,
            }
        return {
            "n_records": self.n_records,
            "overall_auc": {
                "value": self.overall_auc.value,
                "n_pos": self.overall_auc.n_pos,
                "n_neg": self.overall_auc.n_neg,
                "per_fold": self.overall_per_fold,
            },
            "groups": groups,
            "n_valid_groups": self.gap.n_valid_groups,
            "n_excluded_groups": len(self.table) - self.gap.n_valid_groups,
            "gap": {
                "value": self.gap.value,
                "arg_max_group": self.gap.arg_max_group,
                "arg_min_group": self.gap.arg_min_group,
                "n_valid_groups": self.gap.n_valid_groups,
            },
            "interval": interval,
            "warnings": list(self.warnings),
        }


def evaluate(
    records: Sequence[EvaluationRecord],
    specs: Sequence[GroupSpec],
    *,
    min_pos: int = 1,
    min_neg: int = 1,
    allow_missing: bool = False,
    n_resamples: Optional[int] = None,
    seed: int = 0,
) -> GapReport:
    """Run the full pipeline on binary records.

    ``n_resamples=None`` skips the bootstrap. A bootstrap that cannot run
    (fewer than two valid groups, all resamples degenerate) becomes a warning.

    Raises
    ------
    AucUndefinedError
        The records as a whole lack a class.
    """
    scores, labels, fold_ids = record_arrays(records)
    overall, overall_folds = group_auc(scores, labels, fold_ids, np.arange(len(records)))
    if overall is None:
        n_pos = int(labels.sum())
        raise AucUndefinedError(
            f"overall AUC undefined: {n_pos} positives, {labels.size - n_pos} negatives"
            + (" in every fold" if fold_ids is not None else "")
        )
    n_pos = int(labels.sum())
    overall_auc = AucValue(overall, n_pos, labels.size - n_pos)

    assignment = build_groups(records, specs, allow_missing=allow_missing)
    validity = validate_groups(assignment, records, min_pos, min_neg)
    table = subgroup_aucs(records, assignment, validity)
    gap = auc_gap(table)

    warnings = []
    if gap.warning:
        warnings.append(gap.warning)
    excluded = table.excluded()
    if excluded:
        warnings.append(f"{len(excluded)} of {len(table)} groups excluded")

    interval = None
    if n_resamples is not None:
        try:
            interval = bootstrap_gap(
                records, assignment, n_resamples, seed, min_pos=min_pos, min_neg=min_neg
            )
        except DegenerateDataError as exc:
            warnings.append(f"bootstrap skipped: {exc}")
        else:
            if interval.n_skipped:
                warnings.append(f"bootstrap: {interval.n_skipped} degenerate resamples skipped")

    return GapReport(
        overall_auc=overall_auc,
        table=table,
        gap=gap,
        interval=interval,
        warnings=tuple(warnings),
        n_records=len(records),
        overall_per_fold=overall_folds,
    )
