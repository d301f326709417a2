import csv
import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from stparse.corpus import Corpus, DependencyTriple
from stparse.evaluation import (AVERAGE, CSV_COLUMNS, EvaluationError, bench,
                                eval_edm, eval_parses, eval_tagging, exact_match_rate,
                                pareto_frontier, score_parses)
from stparse.parser import PruneConfig, parse
from stparse.taggers import ExternalPredictions

from conftest import sent


def T(h, r, d, hs=(0, 1), ds=(1, 2)):
    return DependencyTriple(h, r, d, hs, ds)


def _corpus(name, n_tokens, n_sent=1):
    per = n_tokens // n_sent
    return Corpus(name, tuple(sent(f"{name}{k}", " ".join(["w"] * per), tags=["a"] * per)
                              for k in range(n_sent)))


def _preds(corpus, n_wrong):
    out, left = {}, n_wrong
    for s in corpus:
        tags = []
        for _ in s.tokens:
            tags.append("b" if left > 0 else "a")
            left -= 1
        out[s.id] = tags
    return out


def test_perfect_tagging():
    c = _corpus("c", 10)
    r = eval_tagging(c, _preds(c, 0))
    assert r.overall == r.macro == r.per_corpus["c"] == 100.0
    assert r.top_mistaken_tokens == [] and r.top_under_predicted == []


def test_nine_of_ten():
    c = _corpus("c", 10)
    assert eval_tagging(c, _preds(c, 1)).overall == 90.0


def test_overall_vs_macro():
    a, b = _corpus("a", 10), _corpus("b", 30, 3)
    r = eval_tagging([a, b], [_preds(a, 1), _preds(b, 9)])
    assert r.per_corpus == {"a": 90.0, "b": 70.0}
    assert r.overall == 75.0
    assert r.macro == 80.0
    assert r.confusion[("a", "b")] == 10
    assert r.top_over_predicted == [("b", 10)]


def test_tagging_concat_order_invariant():
    a, b = _corpus("a", 10), _corpus("b", 30, 3)
    pa, pb = _preds(a, 4), _preds(b, 2)
    assert eval_tagging([a, b], [pa, pb]).overall == eval_tagging([b, a], [pb, pa]).overall


def test_tagging_misalignment_names_sentence():
    c = _corpus("c", 4)
    with pytest.raises(EvaluationError, match="c0"):
        eval_tagging(c, {"c0": ["a"]})


def test_edm_examples():
    A, B, C = T("h", "ARG1", "a"), T("h", "ARG2", "b"), T("h", "ARG2", "c")
    s = eval_edm({"1": {A, B}}, {"1": {A, B}})
    assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)
    s = eval_edm({"1": {A, B}}, {"1": {A, C}})
    assert (s.precision, s.recall, s.f1) == (0.5, 0.5, 0.5)


def test_edm_unparsed_sentence_counts_in_recall():
    A, B = T("h", "ARG1", "a"), T("h", "ARG2", "b")
    X, Y, Z = T("x", "R", "y"), T("x", "R", "z"), T("y", "R", "z")
    s = eval_edm({"1": {A, B}, "2": {X, Y, Z}}, {"1": {A, B}})
    assert s.precision == 1.0
    assert s.recall == pytest.approx(2 / 5)
    assert s.f1 == pytest.approx(2 * 0.4 / 1.4)


def test_edm_span_matters():
    a = DependencyTriple("h", "R", "d", (0, 1), (1, 2))
    b = DependencyTriple("h", "R", "d", (0, 1), (2, 3))
    assert eval_edm({"1": {a}}, {"1": {b}}).matched == 0


def test_edm_rejects_unknown_ids():
    with pytest.raises(EvaluationError):
        eval_edm({"1": set()}, {"2": set()})


TRIPLES = [T("h", r, d) for r in ("A", "B") for d in ("x", "y", "z")]


@given(st.lists(st.tuples(st.sets(st.sampled_from(TRIPLES)),
                          st.sets(st.sampled_from(TRIPLES))), min_size=1, max_size=6))
def test_edm_is_micro_averaged(pairs):
    gold = {str(i): g for i, (g, _) in enumerate(pairs)}
    pred = {str(i): p for i, (_, p) in enumerate(pairs)}
    s = eval_edm(gold, pred)
    tp = sum(len(g & p) for g, p in pairs)
    fp = sum(len(p - g) for g, p in pairs)
    fn = sum(len(g - p) for g, p in pairs)
    assert s.f1 == pytest.approx(2 * tp / (2 * tp + fp + fn) if tp else 0.0)


def test_exact_match():
    A, B = T("h", "R", "a"), T("h", "R", "b")
    gold = {str(i): {A} for i in range(4)}
    assert exact_match_rate(gold, dict(gold)) == 1.0
    pred = dict(gold)
    pred["3"] = {B}
    assert exact_match_rate(gold, pred) == 0.75
    assert exact_match_rate(gold, gold, {k: "no_parse" for k in gold}) == 0.0


def test_pareto():
    rows = pareto_frontier([("slow", 2.0, 0.9), ("fast", 1.0, 0.8), ("bad", 2.0, 0.7)])
    assert [r.on_frontier for r in rows] == [True, True, False]


@pytest.fixture(scope="module")
def bench_corpus(toy_splits):
    return Corpus("mini", tuple(list(toy_splits["test"])[:15]))


def test_score_parses_coverage(toy_grammar, bench_corpus):
    results = {s.id: parse(toy_grammar, s) for s in bench_corpus}
    sc = score_parses(bench_corpus, results)
    assert sc.coverage == 1.0 and sc.f1 == 1.0 and sc.exact_match == 1.0
    missing = dict(results)
    missing.pop(bench_corpus.sentences[0].id)
    sc2 = score_parses(bench_corpus, missing)
    assert sc2.recall < 1.0 and sc2.precision == 1.0
    assert sc2.coverage == pytest.approx(14 / 15)


def test_bench_repetitions_do_not_change_accuracy(toy_grammar, bench_corpus):
    oracle = ExternalPredictions.from_tags(bench_corpus)
    configs = {"none": PruneConfig("none"), "oracle": PruneConfig("supertag", oracle),
               "oracle-again": PruneConfig("supertag", oracle)}
    one = bench([bench_corpus], toy_grammar, configs, repetitions=1)
    five = bench([bench_corpus], toy_grammar, configs, repetitions=5)
    for r1, r5 in zip(one.rows, five.rows):
        assert (r1.dataset, r1.system) == (r5.dataset, r5.system)
        assert (r1.precision, r1.recall, r1.f1, r1.exact_match, r1.coverage) == \
               (r5.precision, r5.recall, r5.f1, r5.exact_match, r5.coverage)
    a, b = one.row("mini", "oracle"), one.row("mini", "oracle-again")
    assert (a.precision, a.recall, a.f1) == (b.precision, b.recall, b.f1)
    rows = list(csv.reader(io.StringIO(one.to_csv())))
    assert rows[0] == CSV_COLUMNS
    assert {r[0] for r in rows[1:]} == {"mini", AVERAGE}
    assert len(rows) == 1 + 2 * len(configs)
    assert one.speedup("mini", "none", "oracle") > 0


def test_eval_parses_average_and_pooled(toy_grammar, toy_splits):
    a = Corpus("a", tuple(list(toy_splits["test"])[:6]))
    b = Corpus("b", tuple(list(toy_splits["dev"])[:4]))
    results = {s.id: parse(toy_grammar, s) for c in (a, b) for s in c}
    results.pop(a.sentences[0].id)
    rep = eval_parses([a, b], results)
    assert rep.average.recall == pytest.approx(
        (rep.per_corpus["a"].recall + rep.per_corpus["b"].recall) / 2)
    m = rep.per_corpus["a"].matched + rep.per_corpus["b"].matched
    g = rep.per_corpus["a"].n_gold + rep.per_corpus["b"].n_gold
    assert rep.pooled.recall == pytest.approx(m / g)
    assert "all as one" in rep.table()
