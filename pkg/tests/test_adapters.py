import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aucgap.adapters import (
    MulticlassRecord,
    RealTargetRecord,
    one_vs_rest,
    per_class_gap_sweep,
    threshold_real,
)
from aucgap.exceptions import AucUndefinedError, ConfigError, DegenerateDataError
from aucgap.grouping import SingleAttribute
from aucgap.report import evaluate
from aucgap.roc import auc_rank
from aucgap.synthetic import binormal_auc

CLASSES = ("A", "B", "C")


def mc(scores, true, **attrs):
    return MulticlassRecord(scores, true, attrs)


def binary_auc(records):
    return auc_rank([r.score for r in records], [r.label for r in records]).value


def perfect_records(n=30, groups=("g1",)):
    rng = np.random.default_rng(0)
    out = []
    for i in range(n):
        true = CLASSES[i % 3]
        scores = {c: float(rng.uniform(0.6, 1.0) if c == true else rng.uniform(0.0, 0.4)) for c in CLASSES}
        out.append(mc(scores, true, group=groups[i % len(groups)]))
    return out


class TestOneVsRest:
    record = mc({"A": 0.7, "B": 0.2, "C": 0.1}, "A", school="x")

    def test_target_true_class(self):
        (r,) = one_vs_rest([self.record, mc({"A": 0.1, "B": 0.5, "C": 0.4}, "B")], "A")[:1]
        assert (r.score, r.label, dict(r.attributes)) == (0.7, True, {"school": "x"})

    def test_target_other_class(self):
        r = one_vs_rest([self.record, mc({"A": 0.1, "B": 0.5, "C": 0.4}, "B")], "B")[0]
        assert (r.score, r.label) == (0.2, False)

    def test_perfect_ranking_gives_auc_one(self):
        recs = perfect_records()
        for c in CLASSES:
            assert binary_auc(one_vs_rest(recs, c)) == 1.0

    def test_errors(self):
        with pytest.raises(ConfigError):
            one_vs_rest([self.record], "D")
        with pytest.raises(AucUndefinedError):
            one_vs_rest([self.record, self.record], "B")
        with pytest.raises(ValueError):
            MulticlassRecord({"A": 1.0}, "A")
        with pytest.raises(ValueError):
            MulticlassRecord({"A": 1.0, "B": 0.0}, "C")
        with pytest.raises(ValueError):
            MulticlassRecord({"A": math.nan, "B": 0.0}, "A")

    def test_preserves_count_and_attributes(self):
        recs = perfect_records()
        out = one_vs_rest(recs, "B")
        assert len(out) == len(recs)
        assert all(o.attributes == r.attributes and o.fold_id == r.fold_id for o, r in zip(out, recs))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 64), st.booleans()), min_size=2, max_size=40))
    def test_complementary_two_class_scores(self, rows):
        # multiples of 1/64 keep 1 - s exact, so ties survive the complement
        rows[0], rows[1] = (rows[0][0], True), (rows[1][0], False)
        recs = [mc({"A": k / 64, "B": 1 - k / 64}, "A" if a else "B") for k, a in rows]
        a_vs_rest = one_vs_rest(recs, "A")
        b_vs_rest = one_vs_rest(recs, "B")
        # B-vs-rest flips both scores and labels of A-vs-rest: same AUC
        assert abs(binary_auc(a_vs_rest) - binary_auc(b_vs_rest)) <= 1e-12
        # flipping only the labels is the complement
        a_scores_b_labels = auc_rank([r.score for r in a_vs_rest], [r.label for r in b_vs_rest]).value
        assert abs(binary_auc(a_vs_rest) + a_scores_b_labels - 1) <= 1e-12


class TestThreshold:
    def test_example(self):
        recs = [RealTargetRecord(p, t) for p, t in [(1.0, 1.2), (3.0, 3.4), (2.5, 2.0)]]
        assert [r.label for r in threshold_real(recs, 2.0)] == [False, True, True]

    def test_degenerate(self):
        recs = [RealTargetRecord(0.0, t) for t in (1.2, 3.4, 2.0)]
        with pytest.raises(DegenerateDataError, match="degenerate labeling"):
            threshold_real(recs, 0.5)
        with pytest.raises(DegenerateDataError):
            threshold_real(recs, 10.0)
        with pytest.raises(ConfigError):
            threshold_real(recs, math.inf)

    def test_noisy_predictions_rank_well(self):
        rng = np.random.default_rng(7)
        truth = rng.normal(50, 10, size=1000)
        pred = truth + rng.normal(0, 0.05 * truth.std(), size=1000)
        recs = [RealTargetRecord(float(p), float(t)) for p, t in zip(pred, truth)]
        assert binary_auc(threshold_real(recs, float(np.median(truth)))) > 0.9

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(-100, 100), min_size=2, max_size=30), st.integers(-100, 100),
           st.sampled_from([lambda v: 3 * v + 7, lambda v: v**3, lambda v: 2.0**v]))
    def test_labels_invariant_to_joint_monotone_transform(self, truths, t, f):
        if all(v >= t for v in truths) or all(v < t for v in truths):
            return
        a = [r.label for r in threshold_real([RealTargetRecord(0.0, float(v)) for v in truths], float(t))]
        moved = [RealTargetRecord(0.0, float(f(v))) for v in truths]
        b = [r.label for r in threshold_real(moved, float(f(t)))]
        assert a == b


class TestSweep:
    specs = [SingleAttribute("group")]

    def test_perfect_data_zero_gaps(self):
        sweep = per_class_gap_sweep(perfect_records(60, ("g1", "g2")), self.specs)
        assert sorted(sweep.reports) == list(CLASSES)
        for r in sweep.reports.values():
            assert r.gap.value == 0.0
            assert set(r.table.valid().values()) == {1.0}
        assert sweep.max_gap_over_classes == 0.0

    def test_class_predicted_well_for_one_group_only(self):
        # one-vs-rest AUC for class k in group g is binormal_auc(d[k, g])
        d = {("A", "g1"): 3.0, ("A", "g2"): 0.0, ("B", "g1"): 1.5, ("B", "g2"): 1.5,
             ("C", "g1"): 1.0, ("C", "g2"): 1.0}
        rng = np.random.default_rng(5)
        recs = []
        for g in ("g1", "g2"):
            for _ in range(6000):
                true = CLASSES[rng.integers(3)]
                scores = {c: float(rng.normal() + (d[c, g] if c == true else 0.0)) for c in CLASSES}
                recs.append(mc(scores, true, group=g))
        sweep = per_class_gap_sweep(recs, self.specs)
        for c in CLASSES:
            table = sweep.reports[c].table.valid()
            for g in ("g1", "g2"):
                assert table[f"group={g}"] == pytest.approx(binormal_auc(d[c, g]), abs=0.03)
        gaps = {c: r.gap.value for c, r in sweep.reports.items()}
        assert gaps["A"] > max(gaps["B"], gaps["C"])
        assert sweep.max_gap_class == "A" and sweep.max_gap_over_classes == gaps["A"]

    def test_single_class_filter_matches_plain_pipeline(self):
        recs = perfect_records(60, ("g1", "g2"))
        recs[0] = mc({"A": 0.1, "B": 0.9, "C": 0.3}, "A", group="g1")
        sweep = per_class_gap_sweep(recs, self.specs, classes=["A"])
        assert list(sweep.reports) == ["A"]
        plain = evaluate(one_vs_rest(recs, "A"), self.specs)
        assert sweep.reports["A"] == plain

    def test_degenerate_class_reported_not_raised(self):
        recs = [mc({"A": 0.9, "B": 0.1, "C": 0.0}, "A", group="g"), mc({"A": 0.2, "B": 0.8, "C": 0.0}, "B", group="g")]
        sweep = per_class_gap_sweep(recs, self.specs)
        assert "C" in sweep.errors and set(sweep.reports) == {"A", "B"}

    def test_unknown_class_filter(self):
        with pytest.raises(ConfigError):
            per_class_gap_sweep(perfect_records(), self.specs, classes=["Z"])
