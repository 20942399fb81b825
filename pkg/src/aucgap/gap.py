"""Subgroup AUCs, fold averaging, the AUC gap and its bootstrap interval."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from aucgap.exceptions import ConfigError, DegenerateDataError
from aucgap.grouping import (
    UNDEFINED_IN_ALL_FOLDS,
    EvaluationRecord,
    GroupAssignment,
    GroupValidity,
    record_arrays,
    validate_groups,
)
from aucgap.roc import auc_rank

__all__ = [
    "FEWER_THAN_TWO_VALID",
    "GapInterval",
    "GapValue",
    "SubgroupAuc",
    "SubgroupAucTable",
    "auc_gap",
    "bootstrap_gap",
    "group_auc",
    "subgroup_aucs",
]

FEWER_THAN_TWO_VALID = "fewer than 2 valid groups"


@dataclass(frozen=True)
class SubgroupAuc:
    """One table row. ``auc`` is None when the group is excluded."""

    group: str
    auc: Optional[float]
    validity: GroupValidity
    per_fold: Optional[dict[str, float]] = None


@dataclass(frozen=True)
class SubgroupAucTable:
    entries: dict[str, SubgroupAuc]

    def __post_init__(self):
        ordered = dict(sorted(self.entries.items()))
        object.__setattr__(self, "entries", ordered)
        for e in ordered.values():
            if e.auc is not None and not 0.0 <= e.auc <= 1.0:
                raise ValueError(f"AUC for {e.group!r} outside [0, 1]: {e.auc}")

    @classmethod
    def from_values(cls, values: Mapping[str, Optional[float]]) -> "SubgroupAucTable":
        """Build a table from plain ``name -> auc`` values (None = excluded)."""
        entries = {}
        for name, v in values.items():
            if v is None:
                validity = GroupValidity(name, "excluded", UNDEFINED_IN_ALL_FOLDS)
            else:
                validity = GroupValidity(name, "valid")
            entries[name] = SubgroupAuc(name, None if v is None else float(v), validity)
        return cls(entries)

    def valid(self) -> dict[str, float]:
        return {n: e.auc for n, e in self.entries.items() if e.validity.is_valid and e.auc is not None}

    def excluded(self) -> list[SubgroupAuc]:
        return [e for e in self.entries.values() if not e.validity.is_valid]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, name: str) -> SubgroupAuc:
        return self.entries[name]


@dataclass(frozen=True)
class GapValue:
    value: float
    arg_max_group: Optional[str]
    arg_min_group: Optional[str]
    n_valid_groups: int
    warning: Optional[str] = None


@dataclass(frozen=True)
class GapInterval:
    lower: float
    upper: float
    n_resamples: int
    seed: int
    method: str = "percentile-bootstrap"
    confidence: float = 0.95
    n_skipped: int = 0


def group_auc(
    scores: NDArray[np.float64],
    labels: NDArray[np.bool_],
    fold_ids: Optional[NDArray],
    idx: NDArray[np.intp],
) -> tuple[Optional[float], Optional[dict[str, float]]]:
    """AUC of the records at ``idx``, macro-averaged over folds when present.

    Folds in which the group lacks a class are skipped. Returns ``(None, ...)``
    when no AUC is defined.
    """
    s = scores[idx]
    y = labels[idx]
    if fold_ids is None:
        if y.all() or not y.any():
            return None, None
        return auc_rank(s, y).value, None

    f = fold_ids[idx]
    per_fold = {}
    for fold in sorted(set(f)):
        mask = f == fold
        yf = y[mask]
        if yf.all() or not yf.any():
            continue
        per_fold[fold] = auc_rank(s[mask], yf).value
    if not per_fold:
        return None, per_fold
    return math.fsum(per_fold.values()) / len(per_fold), per_fold


def subgroup_aucs(
    records: Sequence[EvaluationRecord],
    assignment: GroupAssignment,
    validity: Sequence[GroupValidity],
) -> SubgroupAucTable:
    """Per-group AUC for every group in ``assignment``.

    Excluded groups are kept with ``auc=None``. A valid group whose folds all
    lack a class is demoted to excluded (``undefined-in-all-folds``) rather
    than aborting the table.
    """
    by_name = {v.group: v for v in validity}
    missing = [n for n in assignment.groups if n not in by_name]
    if missing:
        raise ConfigError(f"no validity entry for groups {missing}")

    scores, labels, fold_ids = record_arrays(records)
    entries = {}
    for name, idx in assignment.groups.items():
        v = by_name[name]
        if not v.is_valid:
            entries[name] = SubgroupAuc(name, None, v)
            continue
        auc, per_fold = group_auc(scores, labels, fold_ids, idx)
        if auc is None:
            v = replace(v, status="excluded", reason=UNDEFINED_IN_ALL_FOLDS)
        entries[name] = SubgroupAuc(name, auc, v, per_fold)
    return SubgroupAucTable(entries)


def _gap_of(values: Mapping[str, float]) -> GapValue:
    names = sorted(values)
    if len(names) < 2:
        only = names[0] if names else None
        return GapValue(0.0, only, only, len(names), FEWER_THAN_TWO_VALID)
    hi = lo = names[0]
    for n in names[1:]:
        # strict comparisons keep the lexicographically smallest name on ties
        if values[n] > values[hi]:
            hi = n
        if values[n] < values[lo]:
            lo = n
    return GapValue(values[hi] - values[lo], hi, lo, len(names))


def auc_gap(table: SubgroupAucTable) -> GapValue:
    """Largest absolute difference between valid subgroup AUCs (max - min).

    With fewer than two valid groups the gap is 0.0 and ``warning`` is set.
    """
    return _gap_of(table.valid())


def bootstrap_gap(
    records: Sequence[EvaluationRecord],
    assignment: GroupAssignment,
    n_resamples: int = 1000,
    seed: int = 0,
    *,
    min_pos: int = 1,
    min_neg: int = 1,
    confidence: float = 0.95,
) -> GapInterval:
    """Percentile bootstrap interval for the AUC gap.

    Each resample redraws every valid group's members with replacement,
    independently per group, so group sizes are preserved and overlapping
    groups are resampled separately. Resample ``k`` uses its own Philox
    stream spawned from ``seed``, making the result independent of
    evaluation order. Resamples where some group loses a class are skipped.
    """
    if n_resamples < 100:
        raise ValueError("n_resamples must be >= 100")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    validity = validate_groups(assignment, records, min_pos, min_neg)
    scores, labels, fold_ids = record_arrays(records)
    table = subgroup_aucs(records, assignment, validity)
    groups = [(n, assignment[n]) for n in table.valid()]
    if len(groups) < 2:
        raise DegenerateDataError("bootstrap needs at least 2 valid groups on the full sample")

    streams = np.random.SeedSequence(seed).spawn(n_resamples)
    gaps = []
    for ss in streams:
        rng = np.random.Generator(np.random.Philox(ss))
        values = {}
        for name, members in groups:
            draw = members[rng.integers(0, members.size, size=members.size)]
            auc, _ = group_auc(scores, labels, fold_ids, draw)
            if auc is None:
                break
            values[name] = auc
        else:
            gaps.append(_gap_of(values).value)

    if not gaps:
        raise DegenerateDataError(f"all {n_resamples} bootstrap resamples were degenerate")
    alpha = 1.0 - confidence
    lower, upper = np.quantile(np.asarray(gaps), [alpha / 2, 1 - alpha / 2])
    return GapInterval(
        lower=float(lower),
        upper=float(upper),
        n_resamples=n_resamples,
        seed=seed,
        confidence=confidence,
        n_skipped=n_resamples - len(gaps),
    )
