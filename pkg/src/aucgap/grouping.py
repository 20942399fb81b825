"""Named, possibly-overlapping subgroups over evaluation records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from aucgap.exceptions import ConfigError

__all__ = [
    "MISSING",
    "INTERSECTION_JOIN",
    "EvaluationRecord",
    "Explicit",
    "GroupAssignment",
    "GroupSpec",
    "GroupValidity",
    "Intersection",
    "SingleAttribute",
    "build_groups",
    "record_arrays",
    "validate_groups",
]

MISSING = "(missing)"
INTERSECTION_JOIN = "∧"  # logical-and sign

NO_POSITIVES = "no-positives"
NO_NEGATIVES = "no-negatives"
BELOW_MIN_SIZE = "below-min-size"
UNDEFINED_IN_ALL_FOLDS = "undefined-in-all-folds"


@dataclass(frozen=True)
class EvaluationRecord:
    """One scored instance."""

    score: float
    label: bool
    attributes: Mapping[str, Optional[str]] = field(default_factory=dict)
    fold_id: Optional[str] = None


@dataclass(frozen=True)
class SingleAttribute:
    """One group per observed value of ``attribute``."""

    attribute: str

    def __post_init__(self):
        if not self.attribute:
            raise ConfigError("attribute name must be non-empty")


@dataclass(frozen=True)
class Intersection:
    """One group per observed combination of the listed attributes."""

    attributes: tuple[str, ...]

    def __post_init__(self):
        attrs = tuple(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        if not attrs or any(not a for a in attrs):
            raise ConfigError("intersection needs at least one non-empty attribute name")
        if len(set(attrs)) != len(attrs):
            raise ConfigError(f"repeated attribute in intersection {attrs}")


@dataclass(frozen=True)
class Explicit:
    """A single named group: records whose attributes equal every ``where`` value."""

    name: str
    where: Mapping[str, str]

    def __post_init__(self):
        if not self.name:
            raise ConfigError("explicit group needs a name")
        if not self.where or any(not k for k in self.where):
            raise ConfigError(f"explicit group {self.name!r} needs non-empty attribute conditions")


GroupSpec = Union[SingleAttribute, Intersection, Explicit]


@dataclass(frozen=True, eq=False)
class GroupAssignment:
    """Group name -> sorted member indices into the record sequence.

    Groups may overlap and a record may belong to no group at all.
    """

    groups: dict[str, NDArray[np.intp]]
    n_records: int

    def __post_init__(self):
        for name, members in self.groups.items():
            if members.size and (members.min() < 0 or members.max() >= self.n_records):
                raise ValueError(f"group {name!r} has out-of-range member indices")

    @property
    def names(self) -> list[str]:
        return list(self.groups)

    def __len__(self) -> int:
        return len(self.groups)

    def __getitem__(self, name: str) -> NDArray[np.intp]:
        return self.groups[name]

    def with_group(self, name: str, members: Iterable[int]) -> "GroupAssignment":
        """Copy with one extra group; keeps lexicographic name order."""
        if name in self.groups:
            raise ConfigError(f"duplicate group name {name!r}")
        groups = dict(self.groups)
        groups[name] = np.unique(np.asarray(list(members), dtype=np.intp))
        return GroupAssignment(dict(sorted(groups.items())), self.n_records)


@dataclass(frozen=True)
class GroupValidity:
    group: str
    status: str  # "valid" | "excluded"
    reason: Optional[str] = None
    n: int = 0
    n_pos: int = 0
    n_neg: int = 0

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"


def record_arrays(records: Sequence[EvaluationRecord]):
    """Columnar view ``(scores, labels, fold_ids)``; ``fold_ids`` is None when unused.

    Fold ids must be present on every record or on none.
    """
    scores = np.fromiter((r.score for r in records), dtype=np.float64, count=len(records))
    labels = np.fromiter((bool(r.label) for r in records), dtype=bool, count=len(records))
    folds = [r.fold_id for r in records]
    has = [f is not None for f in folds]
    if any(has):
        if not all(has):
            raise ConfigError("fold_id must be set on all records or on none")
        fold_ids = np.asarray([str(f) for f in folds], dtype=object)
    else:
        fold_ids = None
    return scores, labels, fold_ids


def _attribute_column(
    records: Sequence[EvaluationRecord], attribute: str, allow_missing: bool
) -> list[str]:
    values = [r.attributes.get(attribute) for r in records]
    if records and all(attribute not in r.attributes for r in records):
        raise ConfigError(f"unknown attribute {attribute!r}")
    out = []
    for i, v in enumerate(values):
        if v is None or v == "":
            if not allow_missing:
                raise ConfigError(
                    f"record {i} has no value for attribute {attribute!r} "
                    "(use allow_missing to group these as '(missing)')"
                )
            v = MISSING
        out.append(str(v))
    return out


def build_groups(
    records: Sequence[EvaluationRecord],
    specs: Sequence[GroupSpec],
    allow_missing: bool = False,
) -> GroupAssignment:
    """Expand group specs into a :class:`GroupAssignment`.

    Single-attribute groups are named ``attr=value``; intersections join their
    parts with ``∧`` in the attribute order given by the spec. Only observed
    value combinations produce groups. The result is ordered by group name.

    Raises
    ------
    ConfigError
        Unknown attribute, missing value without ``allow_missing``, or a group
        name produced twice.
    """
    if not specs:
        raise ConfigError("at least one group spec is required")

    columns: dict[str, list[str]] = {}

    def column(attr: str) -> list[str]:
        if attr not in columns:
            columns[attr] = _attribute_column(records, attr, allow_missing)
        return columns[attr]

    groups: dict[str, list[int]] = {}

    def add(name: str, members: list[int], origin: GroupSpec) -> None:
        if name in groups:
            raise ConfigError(f"duplicate group name {name!r} (from {origin})")
        groups[name] = members

    for spec in specs:
        if isinstance(spec, SingleAttribute):
            attrs = (spec.attribute,)
        elif isinstance(spec, Intersection):
            attrs = spec.attributes
        elif isinstance(spec, Explicit):
            cols = {a: column(a) for a in spec.where}
            want = {a: str(v) for a, v in spec.where.items()}
            members = [
                i for i in range(len(records)) if all(cols[a][i] == want[a] for a in cols)
            ]
            add(spec.name, members, spec)
            continue
        else:
            raise ConfigError(f"unsupported group spec {spec!r}")

        cols = [column(a) for a in attrs]
        local: dict[str, list[int]] = {}
        for i in range(len(records)):
            name = INTERSECTION_JOIN.join(f"{a}={c[i]}" for a, c in zip(attrs, cols))
            local.setdefault(name, []).append(i)
        for name, members in local.items():
            add(name, members, spec)

    ordered = {
        name: np.asarray(groups[name], dtype=np.intp) for name in sorted(groups)
    }
    return GroupAssignment(ordered, len(records))


def validate_groups(
    assignment: GroupAssignment,
    records: Sequence[EvaluationRecord],
    min_pos: int = 1,
    min_neg: int = 1,
) -> list[GroupValidity]:
    """Annotate every group as valid or excluded, in assignment order.

    A group lacking a class entirely is excluded as ``no-positives`` or
    ``no-negatives``; one with some of each but fewer than the minimums is
    ``below-min-size``.
    """
    if min_pos < 1 or min_neg < 1:
        raise ValueError("min_pos and min_neg must be >= 1")
    labels = np.fromiter((bool(r.label) for r in records), dtype=bool, count=len(records))
    return [_validity(name, labels[idx], min_pos, min_neg) for name, idx in assignment.groups.items()]


def _validity(name: str, labels: NDArray[np.bool_], min_pos: int, min_neg: int) -> GroupValidity:
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    reason = None
    if n_pos == 0:
        reason = NO_POSITIVES
    elif n_neg == 0:
        reason = NO_NEGATIVES
    elif n_pos < min_pos or n_neg < min_neg:
        reason = BELOW_MIN_SIZE
    status = "valid" if reason is None else "excluded"
    return GroupValidity(name, status, reason, labels.size, n_pos, n_neg)
