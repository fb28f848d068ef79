import random

import pytest
from hypothesis import given, strategies as st

from arabgec.align import extract_edits
from arabgec.annotate import annotate_builtin, ingest_annotations, project_ged_labels
from arabgec.corpus import FormatError, Sentence, SentencePair
from arabgec.mle import BOS, MleModel, mle_apply, mle_train

# erroneous word -> correction; every other word is already correct
FIXES = {
    "انا": "أنا",
    "الى": "إلى",
    "مدرسه": "مدرسة",
    "علي": "على",
    "اكل": "أكل",
    "اخي": "أخي",
}
MERGES = {("عبد", "الله"): "عبدالله", ("ابو", "بكر"): "أبوبكر"}
CLEAN = ["ذهب", "محمد", "في", "الصباح", "كتب", "الدرس", "مع", "البيت", "جميل", "قرأ"]


def synthetic_corpus(n: int = 20, seed: int = 7) -> list[SentencePair]:
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        src, tgt = [], []
        for _ in range(rng.randint(3, 7)):
            r = rng.random()
            if r < 0.3:
                w = rng.choice(sorted(FIXES))
                src.append(w)
                tgt.append(FIXES[w])
            elif r < 0.4:
                m = rng.choice(sorted(MERGES))
                src.extend(m)
                tgt.append(MERGES[m])
            else:
                w = rng.choice(CLEAN)
                src.append(w)
                tgt.append(w)
        pairs.append(SentencePair(Sentence.from_words(src), Sentence.from_words(tgt)))
    return pairs


def annotate(pairs):
    return [annotate_builtin(p, extract_edits(p)) for p in pairs]


def test_single_edit_bigram_key():
    corpus = annotate([SentencePair.from_text("قال انا", "قال أنا")])
    model = mle_train(corpus)
    assert model.bigram[("قال", "انا", "O")] == {"أنا": 1}
    assert model.bigram[(BOS, "قال", "C")] == {"قال": 1}


def test_argmax_probability():
    model = MleModel()
    model.add("p", "w", "O", "a", 3)
    model.add("p", "w", "O", "b", 1)
    assert model.lookup("p", "w", "O") == ("a", 0.75)


def test_ties_break_lexicographically():
    model = MleModel()
    model.add("p", "w", "O", "b", 2)
    model.add("p", "w", "O", "a", 2)
    assert model.lookup("p", "w", "O") == ("a", 0.5)


def test_training_closure():
    pairs = synthetic_corpus()
    corpus = annotate(pairs)
    assert any(op.kind == "M" for ann in corpus for op in ann.alignment.ops)
    assert not any(op.kind == "I" for ann in corpus for op in ann.alignment.ops)
    model = mle_train(corpus)
    for ann in corpus:
        labels = project_ged_labels(ann, 43)
        assert mle_apply(model, ann.pair.source, labels).words == ann.pair.target.words
        # without labels only merges stay unresolved
        if not any(op.kind == "M" for op in ann.alignment.ops):
            assert mle_apply(model, ann.pair.source).words == ann.pair.target.words


def test_bigram_beats_unigram():
    # unigram argmax of "w" is "x" (2 vs 1) but after "a" it is "y"
    corpus = annotate([
        SentencePair.from_text("b w", "b x"),
        SentencePair.from_text("c w", "c x"),
        SentencePair.from_text("a w", "a y"),
    ])
    model = mle_train(corpus, granularity=2)
    assert model.lookup("z", "w", "E")[0] == "x"
    assert mle_apply(model, Sentence.from_words(["a", "w"])).words == ("a", "y")
    assert mle_apply(model, Sentence.from_words(["a", "w"]), ["C", "E"]).words == ("a", "y")
    assert mle_apply(model, Sentence.from_words(["q", "w"])).words == ("q", "x")


def test_bigram_hit_never_consults_unigram():
    model = MleModel()
    model.add("a", "w", "O", "bigram")
    model.unigram[("w", "O")].clear()
    model.unigram[("w", "O")]["unigram"] = 100
    assert model.lookup("a", "w", "O")[0] == "bigram"
    assert model.lookup("b", "w", "O")[0] == "unigram"


def test_label_conditions_lookup():
    model = MleModel()
    model.add("a", "w", "O", "x")
    model.add("a", "w", "X", "y", 5)
    assert model.lookup("a", "w", "O")[0] == "x"
    assert model.lookup("a", "w")[0] == "y"
    assert model.lookup("a", "w", "P") is None


def test_empty_sentence():
    model = mle_train(annotate(synthetic_corpus()))
    assert mle_apply(model, Sentence(())).words == ()


def test_deletion_is_applied():
    corpus = annotate([SentencePair.from_text("alpha beta gamma", "alpha gamma")])
    model = mle_train(corpus)
    assert mle_apply(model, Sentence.from_words(["alpha", "beta", "gamma"])).words == ("alpha", "gamma")


def test_idempotent_on_clean_text():
    targets = [p.target for p in synthetic_corpus()]
    model = mle_train(annotate([SentencePair(t, t) for t in targets]))
    for t in targets:
        assert mle_apply(model, t) == t


def test_external_labels_used_for_keys():
    p = SentencePair.from_text("قال انا", "قال أنا")
    ann = ingest_annotations(p, extract_edits(p), ["OH"])
    model = mle_train([ann], granularity=43, modeled=frozenset({"OH"}))
    assert ("قال", "انا", "OH") in model.bigram
    model13 = mle_train([ann], granularity=13, modeled=frozenset({"OH"}))
    assert ("قال", "انا", "O") in model13.bigram


def test_model_round_trip():
    model = mle_train(annotate(synthetic_corpus()))
    text = model.dumps()
    again = MleModel.loads(text)
    assert again.dumps() == text
    assert again.bigram == model.bigram


@pytest.mark.parametrize("text", ["", "wrong header\n", "#arabgec-mle\tv1\nB\tonly\n"])
def test_model_rejects_bad_files(text):
    with pytest.raises(FormatError):
        MleModel.loads(text)


oov = st.text(alphabet="qrstuvwxyz", min_size=1, max_size=6)


@given(st.lists(oov, min_size=1, max_size=8))
def test_unseen_tokens_pass_through(words):
    model = mle_train(annotate(synthetic_corpus()))
    s = Sentence.from_words(words)
    assert mle_apply(model, s) == s
