import logging
import random

import pytest
from hypothesis import given, settings, strategies as st

from stparse.corpus import Corpus, DependencyTriple
from stparse.parser import (Budget, ChartEdge, ParseResult, PruneConfig, best_triples,
                            build_lexical_chart, compile_exceptions, extract_triples,
                            load_exceptions, parse, read_parse_results, select_best,
                            write_exceptions, write_parse_results)
from stparse.taggers import ExternalPredictions

from conftest import sent

DOG = sent("d", "The dog barks", ["DT", "NN", "VBZ"], ["d-the", "n-c", "main-verb"])


class FixedTags:
    def __init__(self, tags):
        self.tags_ = tags

    def tag(self, s):
        return self.tags_


def test_prune_noun_reading_of_barks(toy_grammar):
    cfg = PruneConfig("supertag", FixedTags([None, None, "main-verb"]))
    chart = build_lexical_chart(toy_grammar, DOG, cfg)
    barks = chart.for_token(2)
    assert [e.source for e in barks] == ["bark-v1"]
    assert chart.pruned == 1 and chart.prune_miss == 0


def test_fail_soft_keeps_all(toy_grammar):
    cfg = PruneConfig("supertag", FixedTags([None, None, "adj-i"]))
    chart = build_lexical_chart(toy_grammar, DOG, cfg)
    assert sorted(e.source for e in chart.for_token(2)) == ["bark-n1", "bark-v1"]
    assert chart.prune_miss == 1


def test_exception_exempts_token(toy_grammar):
    cfg = PruneConfig("supertag", FixedTags(["d-the", "v-np", "main-verb"]),
                      exceptions={"n-c"})
    chart = build_lexical_chart(toy_grammar, DOG, cfg)
    full = build_lexical_chart(toy_grammar, DOG)
    assert len(chart.for_token(1)) == len(full.for_token(1)) > 1
    assert chart.exempt == 1


def test_lexical_gap_is_no_parse(toy_grammar):
    r = parse(toy_grammar, sent("g", "The zzyzx barks"))
    assert r.status == "no_parse" and r.stats.lexical_gaps == 1
    assert parse(toy_grammar, sent("e", "")).status == "no_parse"


def test_prune_config_validation():
    with pytest.raises(ValueError):
        PruneConfig("supertag")
    with pytest.raises(ValueError):
        PruneConfig("aggressive", FixedTags([]))
    assert PruneConfig.none().mode == "none"


def test_dog_barks_derivations(toy_grammar):
    r = parse(toy_grammar, DOG)
    assert r.status == "parsed"
    sigs = {d.signature() for d in r.derivations}
    assert "(sb-hd (sp-hd the-q1 dog-n1) bark-v1)" in sigs
    assert any(s.startswith("(np-frag") for s in sigs)
    assert len(r.derivations) >= 2


def test_dog_barks_triples(toy_grammar):
    best = select_best(parse(toy_grammar, DOG))
    assert best.signature() == "(sb-hd (sp-hd the-q1 dog-n1) bark-v1)"
    assert extract_triples(best) == {
        DependencyTriple("_bark_v", "ARG1", "_dog_n", (2, 3), (1, 2)),
        DependencyTriple("_dog_n", "SPEC", "_the_q", (1, 2), (0, 1))}


def test_oracle_keeps_only_sentential_reading(toy_grammar):
    oracle = PruneConfig("supertag", ExternalPredictions.from_tags([DOG]))
    r = parse(toy_grammar, DOG, oracle)
    assert {d.signature() for d in r.derivations} == {"(sb-hd (sp-hd the-q1 dog-n1) bark-v1)"}
    assert best_triples(r) == best_triples(parse(toy_grammar, DOG))


def test_single_word_and_unary(toy_grammar):
    r = parse(toy_grammar, sent("w", "dogs"))
    assert r.status == "parsed"
    for d in r.derivations:
        assert d.source in ("np-frag", "bare-np") or d.daughters
        assert extract_triples(d) == frozenset()


def test_minimum_budget_exceeded(toy_grammar):
    r = parse(toy_grammar, DOG, budget=len(DOG))
    assert r.status == "budget_exceeded" and r.derivations == []
    assert r.stats.total_edges == len(DOG)
    with pytest.raises(ValueError):
        parse(toy_grammar, DOG, budget=2)
    with pytest.raises(ValueError):
        Budget(0)


def test_select_best_tie_break_is_stable(toy_grammar):
    r = parse(toy_grammar, DOG)
    sizes = sorted(d.size() for d in r.derivations)
    assert sizes[0] == sizes[1]  # dog-n1 and dog-n3 readings tie on size
    picks = {select_best(parse(toy_grammar, DOG)).signature() for _ in range(3)}
    assert picks == {"(sb-hd (sp-hd the-q1 dog-n1) bark-v1)"}
    rev = ParseResult("parsed", list(reversed(r.derivations)), r.stats)
    assert select_best(rev) is not None
    assert select_best(rev).signature() == select_best(r).signature()
    assert select_best(ParseResult("no_parse")) is None


def test_parse_result_invariant():
    with pytest.raises(ValueError):
        ParseResult("parsed", [])
    with pytest.raises(ValueError):
        ParseResult("done")


def test_edge_adjacency(toy_grammar):
    chart = build_lexical_chart(toy_grammar, DOG)
    a, c = chart.for_token(0)[0], chart.for_token(2)[0]
    with pytest.raises(ValueError):
        ChartEdge(0, 3, a.fs, "x", (a, c))


def test_compile_exceptions_counts():
    dev = Corpus("dev", (
        sent("1", "a b c d", tags=["X", "X", "Y", "Z"]),
        sent("2", "e f", tags=["X", "Z"])))
    wrong = {"1": ["Q", "Q", "Q", "Z"], "2": ["Q", "Z"]}
    tagger = ExternalPredictions.from_tags(dev, wrong)
    assert compile_exceptions(dev, tagger, k=1) == ["X"]
    assert compile_exceptions(dev, tagger, k=2) == ["X", "Y"]
    perfect = ExternalPredictions.from_tags(dev)
    assert compile_exceptions(dev, perfect) == []


def test_compile_exceptions_clamps(caplog):
    dev = Corpus("dev", (sent("1", "a b", tags=["X", "Y"]),))
    with caplog.at_level(logging.WARNING):
        out = compile_exceptions(dev, FixedTags(["Y", "X"]), k=15)
    assert out == ["X", "Y"]
    assert "exceeds" in caplog.text


def test_exception_file_roundtrip(tmp_path):
    p = tmp_path / "exc.txt"
    write_exceptions(p, ["n-c", "adj-i"], "top mistakes")
    assert p.read_text().startswith("# top mistakes\n")
    assert load_exceptions(p) == ["n-c", "adj-i"]


def test_parse_output_roundtrip(toy_grammar, tmp_path):
    p = tmp_path / "out.jsonl"
    r = parse(toy_grammar, DOG)
    write_parse_results(p, [("d", r), ("g", parse(toy_grammar, sent("g", "zzyzx")))])
    back = read_parse_results(p)
    assert back["d"]["triples"] == best_triples(r)
    assert back["d"]["status"] == "parsed" and back["g"]["status"] == "no_parse"
    assert back["d"]["stats"]["total_edges"] == r.stats.total_edges


@pytest.fixture(scope="module")
def short_sentences(toy_corpus):
    return [s for s in toy_corpus if len(s) <= 7][:120]


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_pruning_never_adds_edges(toy_grammar, short_sentences, d):
    s = d.draw(st.sampled_from(short_sentences))
    rng = random.Random(d.draw(st.integers(0, 10**6)))
    lextypes = toy_grammar.lextypes
    tags = [rng.choice([s.gold_tags[i], rng.choice(lextypes), None])
            for i in range(len(s))]
    exc = frozenset(rng.sample(lextypes, rng.randint(0, 2)))
    cfg = PruneConfig("supertag", FixedTags(tags), exc)
    none, pruned = parse(toy_grammar, s), parse(toy_grammar, s, cfg)
    assert pruned.stats.lexical_edges_kept <= none.stats.lexical_edges_kept
    assert pruned.stats.total_edges <= none.stats.total_edges
    chart = build_lexical_chart(toy_grammar, s, cfg)
    full = build_lexical_chart(toy_grammar, s)
    all_exempt = all(len(full.for_token(i)) == 1
                     or any(e.lextype in exc for e in full.for_token(i))
                     for i in range(len(s)))
    if all_exempt:
        assert chart.kept == full.kept
    if chart.kept == full.kept:
        # nothing dropped: every token either exempt, single, unpredicted or a miss
        assert chart.pruned == 0


def test_budget_monotone_small(toy_grammar, short_sentences):
    order = {"budget_exceeded": 0, "no_parse": 0, "parsed": 1}
    for s in short_sentences[:25]:
        L = len(s)
        st_ = [parse(toy_grammar, s, budget=b).status for b in (L, 2 * L, 20000)]
        ranks = [order[x] for x in st_]
        assert ranks == sorted(ranks)
