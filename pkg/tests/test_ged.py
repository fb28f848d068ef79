import pytest
from hypothesis import given, strategies as st
from sklearn.metrics import accuracy_score, precision_recall_fscore_support

from arabgec.corpus import GedRecord
from arabgec.scoring import ged_report, ged_score


def rec(labels):
    return GedRecord(tuple(f"w{i}" for i in range(len(labels))), tuple(labels))


def test_identical_predictions():
    gold = [rec(["C", "O", "C"]), rec(["P", "C"])]
    s = ged_score(gold, gold)
    assert (s.precision, s.recall, s.f, s.accuracy) == (1, 1, 1, 1)


def test_all_c_prediction():
    gold = [rec(["C"] * 4 + ["O"] + ["C"] * 5)]
    pred = [rec(["C"] * 10)]
    s = ged_score(gold, pred)
    assert s.accuracy == pytest.approx(0.9)
    o = s.by_label()["O"]
    assert (o.precision, o.recall) == (0, 0)


def test_two_class_confusion():
    # E: TP=8 FP=2 FN=2, C: TP=88
    gold = ["E"] * 8 + ["C"] * 2 + ["E"] * 2 + ["C"] * 88
    pred = ["E"] * 8 + ["E"] * 2 + ["C"] * 2 + ["C"] * 88
    s = ged_score([rec(gold)], [rec(pred)])
    e = s.by_label()["E"]
    assert (e.tp, e.fp, e.fn) == (8, 2, 2)
    assert e.precision == pytest.approx(0.8)
    assert e.recall == pytest.approx(0.8)
    assert e.f == pytest.approx(0.8)


def test_length_mismatch_names_sentence():
    with pytest.raises(ValueError, match="sentence 2"):
        ged_score([rec(["C"]), rec(["C", "C"])], [rec(["C"]), rec(["C"])])


def test_report_lists_classes():
    s = ged_score([rec(["C", "O"])], [rec(["C", "C"])])
    text = ged_report(s)
    assert "\nO " in text and "accuracy: 50.00" in text and "F0.5" in text
    tsv = ged_report(s, "tsv")
    assert tsv.splitlines()[0].startswith("label\t")


labels = st.sampled_from(["C", "O", "P", "X", "Merge-B"])


@given(st.lists(st.tuples(labels, labels), min_size=1, max_size=40))
def test_macro_metrics_match_sklearn(pairs):
    gold = [g for g, _ in pairs]
    pred = [p for _, p in pairs]
    s = ged_score([rec(gold)], [rec(pred)])
    classes = sorted(set(gold) | set(pred))
    p, r, f, _ = precision_recall_fscore_support(
        gold, pred, labels=classes, beta=0.5, average="macro", zero_division=0
    )
    assert s.precision == pytest.approx(p)
    assert s.recall == pytest.approx(r)
    assert s.f == pytest.approx(f)
    assert s.accuracy == pytest.approx(accuracy_score(gold, pred))
