"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL/SKIP line that is repeated in the terminal
summary. Criteria 3 and 8 need corpora that are not bundled; point the
environment variables below at them to run those checks:

* ``ARABGEC_QALB2014_DEV_ALIGN`` / ``ARABGEC_QALB2015_DEV_ALIGN``: directory with
  ``src.txt``, ``tgt.txt`` and ``links.txt`` (one line of ``s-t`` links per
  sentence pair).
* ``ARABGEC_QALB2014_TRAIN``: directory with ``src.txt``, ``tgt.txt`` and
  optionally ``tags.txt`` (external edit tags, one line per sentence).
"""

import os
import random
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import pytest

from arabgec import taxonomy as tx
from arabgec.align import MERGE, SPLIT, align_basic, corpus_alignment_eval, extract_edits, parse_links
from arabgec.annotate import error_distribution, orphan_merge_count, project_ged_labels
from arabgec.corpus import Sentence, SentencePair, read_parallel
from arabgec.costs import CostMatrix
from arabgec.mle import MleModel, mle_apply, mle_train
from arabgec.pipeline import annotate_corpus, parse_tag_lines
from arabgec.scoring import m2_score
from arabgec.scoring.m2 import best_edit_sequence, build_lattice, count_matches, gold_edits_of

from oracles import brute_align_cost, brute_m2_best
from pipeline_harness import CORPUS, GOLDEN, run_pipeline
from test_m2 import load_fixture, random_case, record
from test_mle import annotate, synthetic_corpus

COSTS = CostMatrix()

WORDS = [
    "كتاب", "بيت", "ولد", "مدرسة", "قلم", "شمس", "باب", "نور", "علم", "سماء",
    "بحر", "جبل", "طريق", "مدينة", "حديقة", "سوق", "نهر", "ليل", "صباح", "ورد",
]


def status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# -- 1 -----------------------------------------------------------------------

def test_criterion_1_alignment_oracle(criterion):
    rng = random.Random(1)
    alphabet = "abcdef"

    def sentence():
        return [
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 4)))
            for _ in range(rng.randint(1, 5))
        ]

    cases = [(sentence(), sentence()) for _ in range(1000)]
    start = time.perf_counter()
    costs = [
        align_basic(SentencePair(Sentence.from_words(s), Sentence.from_words(t)), COSTS).total_cost
        for s, t in cases
    ]
    elapsed = time.perf_counter() - start
    mismatches = sum(
        abs(c - brute_align_cost(s, t, COSTS)) > 1e-9 for c, (s, t) in zip(costs, cases)
    )
    ok = mismatches == 0 and elapsed < 10
    criterion(1, status(ok), f"1000 pairs, {mismatches} cost mismatches, aligner {elapsed:.2f}s")
    assert ok


# -- 2 -----------------------------------------------------------------------

def _words(rng, n):
    return rng.sample(WORDS, n)


def merge_case(rng):
    n, k = rng.randint(3, 6), rng.choice([2, 2, 3])
    src = _words(rng, n + k - 1)
    i = rng.randrange(n)
    tgt = src[:i] + ["".join(src[i:i + k])] + src[i + k:]
    gold_ops = {(MERGE, (i, i + k), (i, i + 1))}
    links = {(s, s if s < i else (i if s < i + k else s - k + 1)) for s in range(len(src))}
    return src, tgt, gold_ops, links


def split_case(rng):
    src, tgt, ops, links = merge_case(rng)
    ((_, (s0, s1), (t0, t1)),) = ops
    return tgt, src, {(SPLIT, (t0, t1), (s0, s1))}, {(t, s) for s, t in links}


def mixed_case(rng):
    # a merge and a split separated by two unchanged words, sometimes with an
    # orthographic change on one of the unchanged words
    pre, a, b, m1, m2, c, d = _words(rng, 7)
    mid = [m1, m2]
    p, n = 1, len(mid)
    src = [pre, a, b] + mid + [c + d]
    tgt = [pre, a + b] + mid + [c, d]
    ops = {
        (MERGE, (p, p + 2), (p, p + 1)),
        (SPLIT, (p + 2 + n, p + 3 + n), (p + 1 + n, p + 3 + n)),
    }
    if rng.random() < 0.5:
        src, tgt = tgt, src
        ops = {(SPLIT if k == MERGE else MERGE, t, s) for k, s, t in ops}
    if rng.random() < 0.5 and "ا" in tgt[0]:
        tgt[0] = tgt[0].replace("ا", "أ", 1)
    return src, tgt, ops, None


def test_criterion_2_merge_split_suite(criterion):
    rng = random.Random(2)
    suite = (
        [("merge",) + merge_case(rng) for _ in range(20)]
        + [("split",) + split_case(rng) for _ in range(20)]
        + [("mixed",) + mixed_case(rng) for _ in range(10)]
    )
    recovered = cost_increases = 0
    pure = []
    for _family, src, tgt, gold_ops, links in suite:
        pair = SentencePair(Sentence.from_words(src), Sentence.from_words(tgt))
        basic = align_basic(pair, COSTS)
        refined = extract_edits(pair, COSTS)
        cost_increases += refined.total_cost > basic.total_cost + 1e-9
        got = {(op.kind, op.source_span, op.target_span) for op in refined.ops if op.kind in (MERGE, SPLIT)}
        recovered += got == gold_ops
        if links is not None:
            pure.append((refined, links))
    score = corpus_alignment_eval(pure)
    ok = recovered >= 49 and cost_increases == 0 and score.aer == 0
    criterion(
        2, status(ok),
        f"recovered {recovered}/50, cost increases {cost_increases}, "
        f"pure-subset AER {score.aer:.4f} over {len(pure)} pairs",
    )
    assert ok


# -- 3 (conditional) ---------------------------------------------------------------

REFERENCE_ALIGNMENT_SCORES = {
    "ARABGEC_QALB2014_DEV_ALIGN": (99.6, 99.7, 0.00),
    "ARABGEC_QALB2015_DEV_ALIGN": (97.7, 98.0, 0.02),
}


def test_criterion_3_gold_alignment_reproduction(criterion):
    available = {k: v for k, v in REFERENCE_ALIGNMENT_SCORES.items() if os.environ.get(k)}
    if not available:
        criterion(3, "SKIP", "conditional: no gold alignment data supplied (criteria 1-2 stand in)")
        pytest.skip("gold alignment data not supplied")
    details, ok = [], True
    for var, (p_ref, r_ref, aer_ref) in available.items():
        root = Path(os.environ[var])
        pairs = read_parallel(root / "src.txt", root / "tgt.txt")
        gold = [parse_links(line) for line in (root / "links.txt").read_text(encoding="utf-8").splitlines()]
        score = corpus_alignment_eval((extract_edits(p, COSTS), g) for p, g in zip(pairs, gold))
        p, r = 100 * score.precision, 100 * score.recall
        good = abs(p - p_ref) <= 1.0 and abs(r - r_ref) <= 1.0 and abs(score.aer - aer_ref) <= 0.02
        ok &= good
        details.append(f"{var}: P {p:.1f} R {r:.1f} AER {score.aer:.3f}")
    criterion(3, status(ok), "; ".join(details))
    assert ok


# -- 4 -----------------------------------------------------------------------

def test_criterion_4_ged_projection(criterion):
    pairs = read_parallel(CORPUS / "src.txt", CORPUS / "tgt.txt")
    tags = parse_tag_lines((CORPUS / "tags.txt").read_text(encoding="utf-8"))
    corpora = [annotate_corpus(pairs, COSTS), annotate_corpus(pairs, COSTS, tags)]
    sentences = length_ok = merge_spans = merge_ok = 0
    seen = set()
    for corpus in corpora:
        for ann in corpus:
            sentences += 1
            per_g = {g: project_ged_labels(ann, g).labels for g in tx.GRANULARITIES}
            length_ok += all(len(labels) == len(ann.pair.source) for labels in per_g.values())
            fine = per_g[43]
            seen.update(fine)
            for te in ann.typed_edits:
                if te.kind == MERGE:
                    s0, s1 = te.edit.source_span
                    merge_spans += 1
                    merge_ok += fine[s0:s1] == ("Merge-B",) + ("Merge-I",) * (s1 - s0 - 1)
            merge_ok -= orphan_merge_count(fine)
    # every label seen on the fixtures plus every combination of up to three tags
    pool = ["OH", "OT", "OA", "OD", "MI", "MT", "XG", "XN", "XM", "SW", "SF", "PT", "PM", "Split", "UNK"]
    space = set(seen) | {"C", "Delete", "Merge-B", "Merge-I"}
    for k in (1, 2, 3):
        space.update(tx.join_tags(c) for c in combinations(pool, k))
    bad = [
        lab for lab in space
        if tx.project_label(lab, 2) != tx.project_label(tx.project_label(lab, 13), 2)
        or (tx.project_label(lab, 13) == "C") != (lab == "C")
        or (tx.project_label(lab, 2) == "C") != (lab == "C")
        or tx.project_label(lab, 13) not in tx.COARSE_LABELS
    ]
    ok = length_ok == sentences and merge_ok == merge_spans and merge_spans > 0 and not bad
    criterion(
        4, status(ok),
        f"length {length_ok}/{sentences}, merge spans {merge_ok}/{merge_spans}, "
        f"monotonicity violations {len(bad)} of {len(space)} labels",
    )
    assert ok


# -- 5 -----------------------------------------------------------------------

def test_criterion_5_m2_scorer(criterion):
    src, hyp, gold = load_fixture()
    score = m2_score(src, hyp, gold)
    exact = (score.precision, score.recall, score.f) == (Fraction(2, 3), Fraction(1, 2), Fraction(5, 8))

    rng = random.Random(5)
    cases = [(s, h, [(e.start, e.end, e.correction) for e in r.edits_for(0)]) for s, h, r in zip(src, hyp, gold)]
    cases += [random_case(rng) for _ in range(300)]
    disagree = 0
    for s, h, g in cases:
        rec = record(" ".join(s), *g)
        ge = gold_edits_of(rec, 0)
        edits = best_edit_sequence(build_lattice(s, h, 2), ge)
        got = (count_matches(edits, ge), len(edits))
        disagree += got != brute_m2_best(s, h, [(a, b, tuple(c.split("||"))) for a, b, c in g])[1]

    timed = m2_score(src, hyp, gold, timeout=0)
    timeout_ok = timed.recall == 0 and timed.timeouts == timed.sentences == len(src)

    ok = exact and disagree == 0 and timeout_ok
    criterion(
        5, status(ok),
        f"P={score.precision} R={score.recall} F0.5={score.f}; "
        f"{disagree} oracle disagreements on {len(cases)} sentences; "
        f"timeout 0: R={timed.recall} timeouts={timed.timeouts}/{timed.sentences}",
    )
    assert ok


# -- 6 -----------------------------------------------------------------------

def test_criterion_6_mle(criterion):
    corpus = annotate(synthetic_corpus())
    model = mle_train(corpus)
    closure = sum(
        mle_apply(model, ann.pair.source, project_ged_labels(ann, 43)).words == ann.pair.target.words
        for ann in corpus
    )

    backoff = MleModel()
    backoff.add("a", "w", "O", "from-bigram")
    backoff.unigram[("w", "O")].clear()
    backoff.unigram[("w", "O")]["from-unigram"] = 99
    backoff_ok = (
        backoff.lookup("a", "w", "O")[0] == "from-bigram"
        and backoff.lookup("z", "w", "O")[0] == "from-unigram"
        and backoff.lookup("a", "v", "O") is None
    )

    rng = random.Random(6)
    oov = [
        Sentence.from_words(
            "".join(rng.choice("qrstuvwxyz") for _ in range(rng.randint(1, 6)))
            for _ in range(rng.randint(1, 8))
        )
        for _ in range(500)
    ]
    passed = sum(mle_apply(model, s) == s for s in oov)
    ok = closure == len(corpus) == 20 and backoff_ok and passed == len(oov)
    criterion(
        6, status(ok),
        f"closure {closure}/{len(corpus)}, backoff order {'ok' if backoff_ok else 'broken'}, "
        f"OOV pass-through {passed}/{len(oov)}",
    )
    assert ok


# -- 7 -----------------------------------------------------------------------

def test_criterion_7_determinism(criterion, tmp_path):
    first = run_pipeline(tmp_path / "run1", jobs=1)
    second = run_pipeline(tmp_path / "run2", jobs=1)
    parallel = run_pipeline(tmp_path / "run3", jobs=4)
    golden = {name: (GOLDEN / name).read_bytes() for name in first}
    differing = sorted(n for n in first if not (first[n] == second[n] == parallel[n] == golden[n]))
    ok = not differing
    criterion(
        7, status(ok),
        f"{len(first)} output files identical across two runs, --jobs 4 and golden files"
        if ok else f"differing outputs: {', '.join(differing)}",
    )
    assert ok


# -- 8 (conditional) ---------------------------------------------------------------

def test_criterion_8_punctuation_share(criterion):
    root = os.environ.get("ARABGEC_QALB2014_TRAIN")
    if not root:
        criterion(8, "SKIP", "conditional: QALB-2014 Train not supplied")
        pytest.skip("training corpus not supplied")
    root = Path(root)
    pairs = read_parallel(root / "src.txt", root / "tgt.txt")
    tags_path = root / "tags.txt"
    tags = parse_tag_lines(tags_path.read_text(encoding="utf-8")) if tags_path.exists() else None
    dist = error_distribution(annotate_corpus(pairs, COSTS, tags, jobs=os.cpu_count() or 1), 13)
    share = dist.punctuation_share
    ok = 0.35 <= share <= 0.45
    criterion(8, status(ok), f"punctuation share {100 * share:.1f}% of {dist.total} edits")
    assert ok
