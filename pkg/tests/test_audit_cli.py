import csv
import json

import pytest

from aucgap.audit import AuditConfig, ingest, load_config, render_table, run_audit
from aucgap.cli import main
from aucgap.exceptions import ConfigError, ParseError
from aucgap.grouping import EvaluationRecord


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


@pytest.fixture
def binary_csv(tmp_path):
    rows = []
    # two genders x two ses levels, 10 records each
    for gender in "FM":
        for ses in ("low", "high"):
            for k in range(10):
                label = "1" if k % 2 else "0"
                score = k / 10 + (0.05 if gender == "F" else -0.3 * (k % 3 == 0))
                rows.append([f"{score:.3f}", label, gender, ses])
    return write_csv(tmp_path / "preds.csv", ["score", "label", "gender", "ses"], rows)


class TestIngest:
    def test_three_rows(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["score", "label", "gender"],
                      [["0.9", "1", "F"], ["0.2", "0", "M"], ["0.4", "1", "M"]])
        recs = ingest(p, AuditConfig(group_by=["gender"]))
        assert recs == [
            EvaluationRecord(0.9, True, {"gender": "F"}),
            EvaluationRecord(0.2, False, {"gender": "M"}),
            EvaluationRecord(0.4, True, {"gender": "M"}),
        ]

    def test_not_numeric_names_line_and_column(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["score", "label", "g"], [["abc", "1", "x"]])
        with pytest.raises(ParseError, match=r"^line 2, column score: not numeric$"):
            ingest(p, AuditConfig(group_by=["g"]))

    def test_non_finite_score(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["score", "label", "g"], [["0.1", "1", "x"], ["nan", "0", "x"]])
        with pytest.raises(ParseError, match="line 3, column score: not finite"):
            ingest(p, AuditConfig(group_by=["g"]))

    def test_unknown_label_literal_lists_observed(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["score", "label", "g"],
                      [["0.1", "1", "x"], ["0.2", "0", "x"], ["0.3", "yes", "x"]])
        with pytest.raises(ParseError, match=r"line 4, column label: .*'0', '1', 'yes'"):
            ingest(p, AuditConfig(group_by=["g"]))
        cfg = AuditConfig(group_by=["g"], negative_label="no")
        with pytest.raises(ParseError, match="unexpected label literal '0'"):
            ingest(p, cfg)

    def test_missing_cells(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["score", "label", "g"], [["0.1", "1", "x"], ["", "0", "x"]])
        with pytest.raises(ParseError, match="line 3, column score: missing value"):
            ingest(p, AuditConfig(group_by=["g"]))
        p = write_csv(tmp_path / "b.csv", ["score", "label", "g"], [["0.1", "1", ""], ["0.2", "0", "x"]])
        with pytest.raises(ParseError, match="line 2, column g: missing value"):
            ingest(p, AuditConfig(group_by=["g"]))
        recs = ingest(p, AuditConfig(group_by=["g"], allow_missing=True))
        assert recs[0].attributes["g"] == "(missing)"

    def test_structural_errors(self, tmp_path):
        empty = tmp_path / "e.csv"
        empty.write_text("")
        with pytest.raises(ParseError, match="empty file"):
            ingest(empty, AuditConfig(group_by=["g"]))
        p = write_csv(tmp_path / "a.csv", ["score", "label"], [["0.1", "1"]])
        with pytest.raises(ConfigError, match="columns not in input header: g"):
            ingest(p, AuditConfig(group_by=["g"]))
        ragged = tmp_path / "r.csv"
        ragged.write_text("score,label,g\n0.1,1,x\n0.2,0\n")
        with pytest.raises(ParseError, match="line 3: expected 3 fields"):
            ingest(ragged, AuditConfig(group_by=["g"]))

    def test_rfc4180_quoting(self, tmp_path):
        p = tmp_path / "q.csv"
        p.write_text('score,label,school\n0.5,1,"Lincoln, Jr. High"\n0.1,0,"say ""hi"""\n', encoding="utf-8")
        recs = ingest(p, AuditConfig(group_by=["school"]))
        assert [r.attributes["school"] for r in recs] == ["Lincoln, Jr. High", 'say "hi"']

    def test_columns_by_name_not_position(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["g", "y", "s"], [["x", "pos", "0.3"], ["x", "neg", "0.1"]])
        cfg = AuditConfig(group_by=["g"], score_column="s", label_column="y", positive_label="pos")
        assert [(r.score, r.label) for r in ingest(p, cfg)] == [(0.3, True), (0.1, False)]


class TestConfig:
    def test_yaml_and_unknown_keys(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("task: binary\ngroup_by: [gender]\nintersect: ['gender,ses']\n"
                     "bootstrap: {enabled: true, n_resamples: 200, seed: 3}\n")
        cfg = load_config(p)
        assert cfg.intersect == [["gender", "ses"]] and cfg.bootstrap.n_resamples == 200
        p.write_text("group_by: [g]\ncolour: red\n")
        with pytest.raises(ConfigError, match="colour"):
            load_config(p)

    def test_task_fields(self):
        with pytest.raises(ConfigError, match="threshold"):
            AuditConfig.from_mapping({"task": "real-threshold"})
        with pytest.raises(ConfigError, match="score_columns"):
            AuditConfig.from_mapping({"task": "multiclass"})
        with pytest.raises(ConfigError):
            AuditConfig.from_mapping({"task": "ranking"})

    def test_digest_ignores_locations(self):
        a = AuditConfig(input="a.csv", group_by=["g"], report_out="x.json")
        b = AuditConfig(input="b.csv", group_by=["g"], report_out="y.json")
        assert a.digest() == b.digest()
        assert a.digest() != AuditConfig(group_by=["h"]).digest()


def audit_json(tmp_path, *args, name="r.json"):
    out = tmp_path / name
    code = main(["audit", *args, "--report-out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


class TestAuditCommand:
    def test_basic_report(self, tmp_path, binary_csv, capsys):
        code, doc = audit_json(tmp_path, "--input", binary_csv, "--group-by", "gender",
                               "--intersect", "gender,ses", "--min-pos", "1", "--min-neg", "1")
        assert code == 0
        assert doc["schema"] == "aucgap.report" and doc["schema_version"] == 1
        names = [g["name"] for g in doc["result"]["groups"]]
        assert names == sorted(names) and "gender=F∧ses=low" in names
        valid = [g["auc"] for g in doc["result"]["groups"] if g["status"] == "valid"]
        assert doc["result"]["gap"]["value"] == max(valid) - min(valid)
        out = capsys.readouterr().out
        assert "AUC gap" in out and f"{doc['result']['gap']['value']:.4f}" in out

    def test_cli_default_minimums_exclude_small_groups(self, tmp_path, binary_csv):
        code, doc = audit_json(tmp_path, "--input", binary_csv, "--intersect", "gender,ses")
        assert code == 0
        assert {g["reason"] for g in doc["result"]["groups"]} == {"below-min-size"}
        assert "fewer than 2 valid groups" in doc["warnings"]

    def test_deterministic_modulo_timestamp(self, tmp_path, binary_csv):
        args = ["--input", binary_csv, "--group-by", "gender", "--min-pos", "2", "--min-neg", "2",
                "--bootstrap", "--resamples", "100", "--seed", "4"]
        _, a = audit_json(tmp_path, *args, name="a.json")
        _, b = audit_json(tmp_path, *args, name="b.json")
        assert a["metadata"].pop("timestamp") and b["metadata"].pop("timestamp")
        assert json.dumps(a) == json.dumps(b)

    def test_source_date_epoch_makes_bytes_identical(self, tmp_path, binary_csv, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        args = ["--input", binary_csv, "--group-by", "gender"]
        main(["audit", *args, "--report-out", str(tmp_path / "a.json")])
        main(["audit", *args, "--report-out", str(tmp_path / "b.json")])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_row_order_invariance(self, tmp_path, binary_csv):
        with open(binary_csv, newline="") as fh:
            header, *rows = list(csv.reader(fh))
        shuffled = write_csv(tmp_path / "shuffled.csv", header, rows[::-1])
        args = ["--group-by", "gender", "--min-pos", "1", "--min-neg", "1"]
        _, a = audit_json(tmp_path, "--input", binary_csv, *args, name="a.json")
        _, b = audit_json(tmp_path, "--input", shuffled, *args, name="b.json")
        assert a["result"]["groups"] == b["result"]["groups"]
        assert a["result"]["overall_auc"] == b["result"]["overall_auc"]

    def test_flags_override_config(self, tmp_path, binary_csv):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"input": "nowhere.csv", "group_by": ["ses"], "min_pos": 1, "min_neg": 1}))
        code, doc = audit_json(tmp_path, "--config", str(cfg), "--input", binary_csv, "--group-by", "gender")
        assert code == 0
        assert [g["name"] for g in doc["result"]["groups"]] == ["gender=F", "gender=M"]

    def test_exit_codes(self, tmp_path, binary_csv, capsys):
        assert main(["audit", "--input", binary_csv, "--group-by", "nope"]) == 2
        bad = write_csv(tmp_path / "bad.csv", ["score", "label", "g"], [["x", "1", "a"]])
        assert main(["audit", "--input", bad, "--group-by", "g"]) == 3
        onecls = write_csv(tmp_path / "one.csv", ["score", "label", "g"], [["0.1", "1", "a"], ["0.2", "1", "b"]])
        assert main(["audit", "--input", onecls, "--group-by", "g"]) == 4
        assert main(["audit", "--input", str(tmp_path / "missing.csv"), "--group-by", "g"]) == 5
        assert main(["audit", "--input", binary_csv, "--task", "real-threshold", "--group-by", "g"]) == 2
        err = capsys.readouterr().err
        assert "line 2, column score: not numeric" in err

    def test_real_threshold_task(self, tmp_path):
        rows = [[str(p), str(t), g] for p, t, g in
                [(1.0, 1.2, "a"), (3.0, 3.4, "a"), (2.5, 2.0, "a"), (0.5, 0.7, "b"), (2.2, 2.9, "b")]]
        p = write_csv(tmp_path / "real.csv", ["pred", "truth", "g"], rows)
        code, doc = audit_json(tmp_path, "--input", p, "--task", "real-threshold", "--threshold", "2.0",
                               "--score-column", "pred", "--label-column", "truth", "--group-by", "g",
                               "--min-pos", "1", "--min-neg", "1")
        assert code == 0 and doc["threshold"] == 2.0
        assert doc["result"]["overall_auc"]["n_pos"] == 3

    def test_multiclass_task(self, tmp_path):
        rows = []
        for i in range(24):
            true = "ABC"[i % 3]
            scores = [("0.9" if c == true else f"0.{i % 3 + 1}") for c in "ABC"]
            rows.append([*scores, true, "g1" if i < 12 else "g2"])
        p = write_csv(tmp_path / "mc.csv", ["pA", "pB", "pC", "y", "grp"], rows)
        code, doc = audit_json(tmp_path, "--input", p, "--task", "multiclass",
                               "--score-columns", "A=pA,B=pB,C=pC", "--label-column", "y",
                               "--group-by", "grp", "--min-pos", "1", "--min-neg", "1")
        assert code == 0
        assert sorted(doc["classes"]) == ["A", "B", "C"]
        assert doc["max_gap_over_classes"] == {"value": 0.0, "class": "A"}
        bad = write_csv(tmp_path / "bad.csv", ["pA", "pB", "y", "grp"], [["0.1", "0.9", "Z", "g"]])
        assert main(["audit", "--input", bad, "--task", "multiclass", "--score-columns", "A=pA,B=pB",
                     "--label-column", "y", "--group-by", "grp"]) == 3

    def test_synth_roundtrip(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["synth", "--group", "a:300:300:0", "--group", "b:300:300:2", "--seed", "1", "--out", str(out)]) == 0
        code, doc = audit_json(tmp_path, "--input", str(out), "--group-by", "group")
        assert code == 0
        aucs = {g["name"]: g["auc"] for g in doc["result"]["groups"]}
        assert aucs["group=b"] - aucs["group=a"] == pytest.approx(0.4214, abs=0.06)


def test_render_table_rounds_to_four_decimals(tmp_path, binary_csv):
    cfg = AuditConfig(input=binary_csv, group_by=["gender"], min_pos=1, min_neg=1)
    doc = run_audit(cfg).document
    text = render_table(doc)
    gap = doc["result"]["gap"]["value"]
    assert f"{gap:.4f}" in text and repr(gap) not in text


def test_synth_rejects_malformed_recipe(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--group", "a:1:1"])
    assert exc.value.code == 2
