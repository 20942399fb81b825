"""Batch audit: config, strict CSV ingest, and versioned JSON report documents."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import yaml

from aucgap import __version__
from aucgap.adapters import (
    ClassGapSweep,
    MulticlassRecord,
    RealTargetRecord,
    per_class_gap_sweep,
    threshold_real,
)
from aucgap.exceptions import ConfigError, InputIOError, ParseError
from aucgap.grouping import MISSING, EvaluationRecord, Explicit, GroupSpec, Intersection, SingleAttribute
from aucgap.report import GapReport, evaluate

__all__ = [
    "REPORT_SCHEMA",
    "REPORT_SCHEMA_VERSION",
    "AuditConfig",
    "AuditOutcome",
    "ingest",
    "load_config",
    "render_table",
    "run_audit",
]

REPORT_SCHEMA = "aucgap.report"
REPORT_SCHEMA_VERSION = 1
TASKS = ("binary", "multiclass", "real-threshold")
# keys excluded from the config digest: where things live, not what is computed
_LOCATION_KEYS = ("input", "report_out", "plot_out")


@dataclass
class BootstrapConfig:
    enabled: bool = False
    n_resamples: int = 1000
    seed: int = 0


@dataclass
class AuditConfig:
    input: Optional[str] = None
    task: str = "binary"
    threshold: Optional[float] = None
    score_column: str = "score"
    # multiclass: class name -> score column
    score_columns: Optional[dict[str, str]] = None
    label_column: str = "label"
    positive_label: str = "1"
    negative_label: Optional[str] = None
    attribute_columns: list[str] = field(default_factory=list)
    group_by: list[str] = field(default_factory=list)
    intersect: list[list[str]] = field(default_factory=list)
    groups: list[dict] = field(default_factory=list)
    fold_column: Optional[str] = None
    classes: Optional[list[str]] = None
    min_pos: int = 10
    min_neg: int = 10
    allow_missing: bool = False
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    report_out: Optional[str] = None
    plot_out: Optional[str] = None
    model_name: Optional[str] = None

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "AuditConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        data = dict(data)
        boot = data.pop("bootstrap", None) or {}
        if not isinstance(boot, Mapping):
            raise ConfigError("bootstrap must be a mapping")
        bad = sorted(set(boot) - {"enabled", "n_resamples", "seed"})
        if bad:
            raise ConfigError(f"unknown bootstrap keys: {', '.join(bad)}")
        cfg = cls(**data, bootstrap=BootstrapConfig(**boot))
        cfg.normalize()
        return cfg

    def normalize(self) -> None:
        """Coerce loose forms (comma strings, class lists) and check task fields."""
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {', '.join(TASKS)}, got {self.task!r}")
        self.intersect = [
            [a.strip() for a in item.split(",")] if isinstance(item, str) else list(item)
            for item in self.intersect
        ]
        if isinstance(self.score_columns, (list, tuple)):
            self.score_columns = {c: c for c in self.score_columns}
        self.positive_label = str(self.positive_label)
        if self.negative_label is not None:
            self.negative_label = str(self.negative_label)
        if self.task == "real-threshold":
            if self.threshold is None:
                raise ConfigError("task real-threshold requires a threshold (no default)")
            self.threshold = float(self.threshold)
            if not math.isfinite(self.threshold):
                raise ConfigError("threshold must be finite")
        if self.task == "multiclass" and (not self.score_columns or len(self.score_columns) < 2):
            raise ConfigError("task multiclass requires score_columns for at least 2 classes")
        if self.min_pos < 1 or self.min_neg < 1:
            raise ConfigError("min_pos and min_neg must be >= 1")
        if self.bootstrap.enabled and self.bootstrap.n_resamples < 100:
            raise ConfigError("bootstrap n_resamples must be >= 100")
        for g in self.groups:
            if not isinstance(g, Mapping) or set(g) != {"name", "where"}:
                raise ConfigError("each explicit group needs exactly the keys 'name' and 'where'")

    def group_specs(self) -> list[GroupSpec]:
        specs: list[GroupSpec] = [SingleAttribute(a) for a in self.group_by]
        specs += [Intersection(tuple(a)) for a in self.intersect]
        specs += [
            Explicit(str(g["name"]), {str(k): str(v) for k, v in g["where"].items()})
            for g in self.groups
        ]
        if not specs:
            raise ConfigError("no groups declared (use group_by, intersect or groups)")
        return specs

    def referenced_attributes(self) -> list[str]:
        seen = dict.fromkeys(self.attribute_columns)
        seen.update(dict.fromkeys(self.group_by))
        for item in self.intersect:
            seen.update(dict.fromkeys(item))
        for g in self.groups:
            seen.update(dict.fromkeys(str(k) for k in g["where"]))
        return list(seen)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        d = self.to_dict()
        for k in _LOCATION_KEYS:
            d.pop(k, None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path: Union[str, os.PathLike]) -> AuditConfig:
    """Read a YAML or JSON config document."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputIOError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML/JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError(f"config {path} must be a mapping")
    return AuditConfig.from_mapping(data)


def _number(cell: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError("not numeric", line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"not finite ({cell})", line, column)
    return value


def ingest(path: Union[str, os.PathLike], config: AuditConfig):
    """Parse the prediction CSV into typed records, preserving row order.

    Returns EvaluationRecords (binary), MulticlassRecords or RealTargetRecords
    according to ``config.task``. Lines are numbered from 1 at the header.
    """
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise InputIOError(f"cannot read input {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, strict=True)
        try:
            header = next(reader, None)
            if header is None:
                raise ParseError(f"empty file {path}")
            rows = [(reader.line_num, row) for row in reader if row]
        except csv.Error as exc:
            raise ParseError(f"malformed CSV: {exc}", reader.line_num) from None

    header = [h.strip() for h in header]
    dupes = sorted({h for h in header if header.count(h) > 1})
    if dupes:
        raise ParseError(f"duplicate header columns: {', '.join(dupes)}", 1)
    col = {h: i for i, h in enumerate(header)}

    attrs = config.referenced_attributes()
    if config.task == "multiclass":
        score_cols = dict(config.score_columns)
    else:
        score_cols = {"": config.score_column}
    required = list(score_cols.values()) + [config.label_column] + attrs
    if config.fold_column:
        required.append(config.fold_column)
    absent = [c for c in dict.fromkeys(required) if c not in col]
    if absent:
        raise ConfigError(
            f"columns not in input header: {', '.join(absent)} (header: {', '.join(header)})"
        )
    if not rows:
        raise ParseError(f"no data rows in {path}")

    def cell(row, line, name, required=True):
        value = row[col[name]].strip()
        if value == "" and required:
            raise ParseError("missing value", line, name)
        return value

    out = []
    label_lines: dict[str, int] = {}
    for line, row in rows:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
        attributes = {}
        for a in attrs:
            v = cell(row, line, a, required=not config.allow_missing)
            attributes[a] = v if v != "" else MISSING
        fold = cell(row, line, config.fold_column) if config.fold_column else None
        label = cell(row, line, config.label_column)

        if config.task == "binary":
            label_lines.setdefault(label, line)
            score = _number(cell(row, line, config.score_column), line, config.score_column)
            out.append(EvaluationRecord(score, label == config.positive_label, attributes, fold))
        elif config.task == "real-threshold":
            score = _number(cell(row, line, config.score_column), line, config.score_column)
            truth = _number(label, line, config.label_column)
            out.append(RealTargetRecord(score, truth, attributes, fold))
        else:
            if label not in score_cols:
                raise ParseError(
                    f"unknown class {label!r}; expected one of {', '.join(sorted(score_cols))}",
                    line,
                    config.label_column,
                )
            scores = {c: _number(cell(row, line, s), line, s) for c, s in score_cols.items()}
            out.append(MulticlassRecord(scores, label, attributes, fold))

    if config.task == "binary":
        _check_binary_literals(label_lines, config)
    return out


def _check_binary_literals(label_lines: dict[str, int], config: AuditConfig) -> None:
    others = [lit for lit in label_lines if lit != config.positive_label]
    allowed_neg = config.negative_label
    bad = [lit for lit in others if allowed_neg is not None and lit != allowed_neg]
    if allowed_neg is None and len(others) > 1:
        bad = others[1:]
    if bad:
        observed = ", ".join(repr(x) for x in sorted(label_lines))
        raise ParseError(
            f"unexpected label literal {bad[0]!r}; positive literal is "
            f"{config.positive_label!r}, observed literals: {observed}",
            label_lines[bad[0]],
            config.label_column,
        )


@dataclass
class AuditOutcome:
    document: dict
    report: Optional[GapReport] = None
    sweep: Optional[ClassGapSweep] = None


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.isoformat(timespec="seconds")


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def run_audit(config: AuditConfig) -> AuditOutcome:
    """Ingest, adapt, group, score and gap; returns the report document.

    Degenerate data (overall AUC undefined, degenerate thresholding) raises
    :class:`~aucgap.exceptions.DegenerateDataError`; per-group and per-class
    degeneracies are recorded in the document instead.
    """
    if not config.input:
        raise ConfigError("no input file given")
    specs = config.group_specs()
    records = ingest(config.input, config)
    kwargs = dict(
        min_pos=config.min_pos,
        min_neg=config.min_neg,
        allow_missing=config.allow_missing,
        n_resamples=config.bootstrap.n_resamples if config.bootstrap.enabled else None,
        seed=config.bootstrap.seed,
    )

    model_name = config.model_name or Path(config.input).stem
    document = {
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_SCHEMA_VERSION,
        "metadata": {
            "tool": "aucgap",
            "tool_version": __version__,
            "model_name": model_name,
            "input_sha256": _file_digest(config.input),
            "config_sha256": config.digest(),
            "timestamp": _timestamp(),
        },
        "task": config.task,
        "threshold": config.threshold,
    }

    if config.task == "multiclass":
        sweep = per_class_gap_sweep(records, specs, classes=config.classes, **kwargs)
        document["classes"] = {c: r.to_dict() for c, r in sweep.reports.items()}
        document["class_errors"] = dict(sorted(sweep.errors.items()))
        document["max_gap_over_classes"] = {
            "value": sweep.max_gap_over_classes,
            "class": sweep.max_gap_class,
        }
        warnings = [f"class {c}: {msg}" for c, msg in sorted(sweep.errors.items())]
        document["warnings"] = warnings
        return AuditOutcome(document, sweep=sweep)

    if config.task == "real-threshold":
        records = threshold_real(records, config.threshold)
    report = evaluate(records, specs, **kwargs)
    document["result"] = report.to_dict()
    document["warnings"] = list(report.warnings)
    return AuditOutcome(document, report=report)


def dump_document(document: dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _result_lines(body: dict) -> list[str]:
    lines = []
    o = body["overall_auc"]
    lines.append(f"overall AUC  {o['value']:.4f}  (pos={o['n_pos']}, neg={o['n_neg']})")
    rows = [("group", "n", "pos", "neg", "status", "AUC")]
    for g in body["groups"]:
        status = g["status"] if g["reason"] is None else f"excluded: {g['reason']}"
        auc = "-" if g["auc"] is None else f"{g['auc']:.4f}"
        rows.append((g["name"], str(g["n"]), str(g["n_pos"]), str(g["n_neg"]), status, auc))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:4], widths[1:4])]
        cells += [r[4].ljust(widths[4]), r[5].rjust(widths[5])]
        lines.append("  ".join(cells).rstrip())
    gap = body["gap"]
    lines.append(
        f"AUC gap      {gap['value']:.4f}  (max {gap['arg_max_group']}, "
        f"min {gap['arg_min_group']}, {gap['n_valid_groups']} valid groups)"
    )
    ci = body["interval"]
    if ci is not None:
        lines.append(
            f"{ci['confidence']:.0%} CI       [{ci['lower']:.4f}, {ci['upper']:.4f}]  "
            f"({ci['n_resamples']} resamples, seed {ci['seed']})"
        )
    return lines


def render_table(document: dict) -> str:
    """Aligned plain-text summary, values rounded to 4 decimals."""
    meta = document["metadata"]
    lines = [f"model: {meta['model_name']}  task: {document['task']}"]
    if "result" in document:
        lines += _result_lines(document["result"])
    else:
        for cls, body in document["classes"].items():
            lines.append("")
            lines.append(f"[class {cls}]")
            lines += _result_lines(body)
        m = document["max_gap_over_classes"]
        if m["value"] is not None:
            lines.append("")
            lines.append(f"max over classes: AUC gap {m['value']:.4f} (class {m['class']})")
    for w in document["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
