"""Three-panel plot data: overall AUC, subgroup AUCs and AUC gap per model.

The file is plain JSON (see ``PLOT_DATA_SCHEMA``); no rendering happens here.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from aucgap.exceptions import ConfigError

__all__ = [
    "PLOT_DATA_SCHEMA",
    "PlotData",
    "emit_plot_data",
    "load_plot_data",
    "plot_data_from_reports",
]

PLOT_SCHEMA_NAME = "aucgap.plotdata"
PLOT_SCHEMA_VERSION = 1

_point = {
    "type": "object",
    "required": ["model", "value"],
    "properties": {"model": {"type": "string"}, "value": {"type": "number"}},
}

PLOT_DATA_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "schema_version", "models", "panels"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": PLOT_SCHEMA_NAME},
        "schema_version": {"const": PLOT_SCHEMA_VERSION},
        "models": {"type": "array", "items": {"type": "string"}, "uniqueItems": True},
        "panels": {
            "type": "object",
            "required": ["overall_auc", "subgroup_auc", "auc_gap"],
            "additionalProperties": False,
            "properties": {
                "overall_auc": {"type": "array", "items": _point},
                "subgroup_auc": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["model", "group", "value"],
                        "properties": {
                            "model": {"type": "string"},
                            "group": {"type": "string"},
                            "value": {"type": "number", "minimum": 0, "maximum": 1},
                        },
                    },
                },
                "auc_gap": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["model", "value", "arg_max_group", "arg_min_group"],
                        "properties": {
                            "model": {"type": "string"},
                            "value": {"type": "number", "minimum": 0, "maximum": 1},
                            "arg_max_group": {"type": ["string", "null"]},
                            "arg_min_group": {"type": ["string", "null"]},
                            "lower": {"type": "number"},
                            "upper": {"type": "number"},
                        },
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True)
class PlotData:
    models: tuple[str, ...]
    overall_auc: tuple[dict, ...]
    subgroup_auc: tuple[dict, ...]
    auc_gap: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "schema": PLOT_SCHEMA_NAME,
            "schema_version": PLOT_SCHEMA_VERSION,
            "models": list(self.models),
            "panels": {
                "overall_auc": [dict(p) for p in self.overall_auc],
                "subgroup_auc": [dict(p) for p in self.subgroup_auc],
                "auc_gap": [dict(p) for p in self.auc_gap],
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlotData":
        if data.get("schema") != PLOT_SCHEMA_NAME or data.get("schema_version") != PLOT_SCHEMA_VERSION:
            raise ConfigError("not an aucgap plot-data document (schema/version mismatch)")
        panels = data["panels"]
        return cls(
            tuple(data["models"]),
            tuple(panels["overall_auc"]),
            tuple(panels["subgroup_auc"]),
            tuple(panels["auc_gap"]),
        )


def _series(document: dict) -> Iterable[tuple[str, dict]]:
    """(model label, result body) pairs; multiclass reports yield one per class."""
    name = document["metadata"]["model_name"]
    if "result" in document:
        yield name, document["result"]
    else:
        for cls, body in document["classes"].items():
            yield f"{name}[{cls}]", body


def plot_data_from_reports(documents: Sequence[dict], names: Optional[Sequence[str]] = None) -> PlotData:
    """Build plot data from report documents as written by ``aucgap audit``.

    ``names`` overrides the models' names (one per document). The subgroup
    panel holds only valid groups, so each gap equals max - min of its points.
    """
    if not documents:
        raise ConfigError("at least one report is required")
    if names is not None and len(names) != len(documents):
        raise ConfigError("need exactly one model name per report")

    models, overall, subgroup, gaps = [], [], [], []
    for i, doc in enumerate(documents):
        if doc.get("schema") != "aucgap.report":
            raise ConfigError(f"report {i} is not an aucgap report document")
        if names is not None:
            doc = {**doc, "metadata": {**doc["metadata"], "model_name": names[i]}}
        for model, body in _series(doc):
            if model in models:
                raise ConfigError(f"duplicate model name {model!r}")
            models.append(model)
            overall.append({"model": model, "value": body["overall_auc"]["value"]})
            for g in body["groups"]:
                if g["status"] == "valid":
                    subgroup.append({"model": model, "group": g["name"], "value": g["auc"]})
            gap = {
                "model": model,
                "value": body["gap"]["value"],
                "arg_max_group": body["gap"]["arg_max_group"],
                "arg_min_group": body["gap"]["arg_min_group"],
            }
            if body.get("interval"):
                gap["lower"] = body["interval"]["lower"]
                gap["upper"] = body["interval"]["upper"]
            gaps.append(gap)
    return PlotData(tuple(models), tuple(overall), tuple(subgroup), tuple(gaps))


def emit_plot_data(
    documents: Sequence[dict],
    path: Union[str, os.PathLike],
    names: Optional[Sequence[str]] = None,
) -> PlotData:
    data = plot_data_from_reports(documents, names)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data.to_dict(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return data


def load_plot_data(path: Union[str, os.PathLike]) -> PlotData:
    with open(path, encoding="utf-8") as fh:
        return PlotData.from_dict(json.load(fh))
