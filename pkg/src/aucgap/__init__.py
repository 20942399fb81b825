"""AUC and AUC-gap auditing for scored predictions over overlapping subgroups."""

__version__ = "0.1.0"

from aucgap.adapters import (  # noqa: E402
    MulticlassRecord,
    RealTargetRecord,
    one_vs_rest,
    per_class_gap_sweep,
    threshold_real,
)
from aucgap.gap import (  # noqa: E402
    GapInterval,
    GapValue,
    SubgroupAucTable,
    auc_gap,
    bootstrap_gap,
    subgroup_aucs,
)
from aucgap.grouping import (  # noqa: E402
    EvaluationRecord,
    Explicit,
    GroupAssignment,
    GroupValidity,
    Intersection,
    SingleAttribute,
    build_groups,
    validate_groups,
)
from aucgap.report import GapReport, evaluate  # noqa: E402
from aucgap.roc import AucValue, RocCurve, auc_rank, auc_trapezoid, roc_curve  # noqa: E402

__all__ = [
    "AucValue",
    "EvaluationRecord",
    "Explicit",
    "GapInterval",
    "GapReport",
    "GapValue",
    "GroupAssignment",
    "GroupValidity",
    "Intersection",
    "MulticlassRecord",
    "RealTargetRecord",
    "RocCurve",
    "SingleAttribute",
    "SubgroupAucTable",
    "auc_gap",
    "auc_rank",
    "auc_trapezoid",
    "bootstrap_gap",
    "build_groups",
    "evaluate",
    "one_vs_rest",
    "per_class_gap_sweep",
    "roc_curve",
    "subgroup_aucs",
    "threshold_real",
    "validate_groups",
]
