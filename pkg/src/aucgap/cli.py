"""Command line entry point: ``aucgap audit | synth | plot-data``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

from aucgap import __version__
from aucgap.audit import AuditConfig, dump_document, load_config, render_table, run_audit
from aucgap.exceptions import AuditError, ConfigError, InputIOError
from aucgap.plotdata import emit_plot_data
from aucgap.synthetic import GroupRecipe, generate


def _add_audit_parser(sub) -> None:
    p = sub.add_parser(
        "audit",
        help="compute subgroup AUCs and the AUC gap for a prediction file",
        description=(
            "Flags override keys of the --config document. Labels: for the binary task a "
            "row is positive iff its label equals --positive-label; for real-threshold a "
            "row is positive iff its true value is >= --threshold; a prediction is "
            "positive at threshold t iff score >= t."
        ),
    )
    p.add_argument("--config", help="YAML or JSON config document")
    p.add_argument("--input", help="prediction CSV (UTF-8, header row)")
    p.add_argument("--task", choices=["binary", "multiclass", "real-threshold"])
    p.add_argument("--threshold", type=float, help="cut point for real-threshold (true >= t is positive)")
    p.add_argument("--score-column")
    p.add_argument(
        "--score-columns",
        help="multiclass score columns, comma-joined; each item CLASS=COLUMN or COLUMN",
    )
    p.add_argument("--label-column")
    p.add_argument("--positive-label")
    p.add_argument("--negative-label")
    p.add_argument("--group-by", action="append", metavar="ATTR", help="repeatable")
    p.add_argument("--intersect", action="append", metavar="A,B", help="repeatable, comma-joined attributes")
    p.add_argument("--fold-column")
    p.add_argument("--classes", help="multiclass: comma-joined subset of classes to audit")
    p.add_argument("--min-pos", type=int)
    p.add_argument("--min-neg", type=int)
    p.add_argument("--bootstrap", action="store_true", default=None, help="add a bootstrap interval")
    p.add_argument("--resamples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--report-out", help="write the JSON report here")
    p.add_argument("--plot-out", help="write three-panel plot data for this report here")
    p.add_argument("--allow-missing", action="store_true", default=None,
                   help="group empty attribute cells as '(missing)' instead of failing")
    p.add_argument("--model-name", help="name used in reports and plot data (default: input file stem)")
    p.set_defaults(func=cmd_audit)


def _build_config(args) -> AuditConfig:
    cfg = load_config(args.config) if args.config else AuditConfig()
    simple = {
        "input": args.input,
        "task": args.task,
        "threshold": args.threshold,
        "score_column": args.score_column,
        "label_column": args.label_column,
        "positive_label": args.positive_label,
        "negative_label": args.negative_label,
        "fold_column": args.fold_column,
        "min_pos": args.min_pos,
        "min_neg": args.min_neg,
        "allow_missing": args.allow_missing,
        "report_out": args.report_out,
        "plot_out": args.plot_out,
        "model_name": args.model_name,
    }
    for key, value in simple.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.group_by:
        cfg.group_by = list(args.group_by)
    if args.intersect:
        cfg.intersect = list(args.intersect)
    if args.classes:
        cfg.classes = [c.strip() for c in args.classes.split(",")]
    if args.score_columns:
        cols = {}
        for item in args.score_columns.split(","):
            cls, _, column = item.strip().partition("=")
            cols[cls] = column or cls
        cfg.score_columns = cols
    if args.bootstrap is not None:
        cfg.bootstrap.enabled = True
    if args.resamples is not None:
        cfg.bootstrap.n_resamples = args.resamples
    if args.seed is not None:
        cfg.bootstrap.seed = args.seed
    cfg.normalize()
    return cfg


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputIOError(f"cannot write {path}: {exc}") from exc


def cmd_audit(args) -> int:
    cfg = _build_config(args)
    outcome = run_audit(cfg)
    text = dump_document(outcome.document)
    if cfg.report_out:
        _write(cfg.report_out, text)
    if cfg.plot_out:
        emit_plot_data([outcome.document], cfg.plot_out)
    sys.stdout.write(render_table(outcome.document))
    return 0


def _recipe(text: str) -> GroupRecipe:
    try:
        name, n_pos, n_neg, d = text.split(":")
        return GroupRecipe(name, int(n_pos), int(n_neg), float(d))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected NAME:N_POS:N_NEG:D_PRIME, got {text!r} ({exc})")


def cmd_synth(args) -> int:
    records = generate(args.group, seed=args.seed)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["score", "label", "group"])
        for r in records:
            writer.writerow([repr(r.score), "1" if r.label else "0", r.attributes["group"]])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_plot_data(args) -> int:
    documents = []
    for path in args.reports:
        try:
            with open(path, encoding="utf-8") as fh:
                documents.append(json.load(fh))
        except OSError as exc:
            raise InputIOError(f"cannot read report {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"report {path} is not valid JSON: {exc}") from exc
    names = args.names.split(",") if args.names else None
    data = emit_plot_data(documents, args.out, names)
    sys.stdout.write(
        f"wrote {args.out}: {len(data.models)} models, "
        f"{len(data.subgroup_auc)} subgroup points\n"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aucgap", description="AUC gap model-bias audits")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_audit_parser(sub)

    s = sub.add_parser("synth", help="write a binormal synthetic cohort as a prediction CSV")
    s.add_argument("--group", type=_recipe, action="append", required=True,
                   metavar="NAME:N_POS:N_NEG:D_PRIME", help="repeatable")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="output CSV (default: stdout)")
    s.set_defaults(func=cmd_synth)

    pd = sub.add_parser("plot-data", help="merge report JSON files into three-panel plot data")
    pd.add_argument("reports", nargs="+")
    pd.add_argument("--out", required=True)
    pd.add_argument("--names", help="comma-joined model names overriding the reports' own")
    pd.set_defaults(func=cmd_plot_data)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"aucgap: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
