import random

import pytest
from hypothesis import given, settings, strategies as st

from stparse.grammar import (BOTTOM, FeatureStructure, GrammarError, HierarchyError,
                             TypeHierarchy, format_fs, glb, lexical_lookup, parse_fs,
                             parse_grammar, subsumes, unify)

from fsgen import brute_glb, random_fs, subsumes_by_paths, unifier_law_violations

MINI = """\
START s
TYPES
sign < top
s < sign
w < sign
n < w
v < w
head < top
nh < head
vh < head
list < top
null < list
CONSTRAINTS
n: HEAD = nh
v: HEAD = vh
RULES
sv := 2 head=1 roles=[ARG1]
  M s[HEAD #h]
  D1 sign[HEAD nh]
  D2 sign[HEAD #h vh]
LEXICON
dog\tn\t_dog_n
bark\tn\t_bark_n
bark\tv\t_bark_v
barks\tv\t_bark_v
"""


def test_mini_grammar_loads():
    g = parse_grammar(MINI)
    assert len(g.rules) == 1 and g.rules[0].roles == ("ARG1",)
    assert [e.id for e in lexical_lookup(g, "bark")] == ["bark-n1", "bark-v1"]
    assert lexical_lookup(g, "dog")[0].fs.type_at("HEAD") == "nh"


def test_toy_grammar_shape(toy_grammar):
    h = toy_grammar.hierarchy
    assert len(h) == 42 and len(toy_grammar.rules) == 12
    assert glb(h, "verb", "main-verb") == "main-verb"
    assert glb(h, "noun", "verb") is None
    assert glb(h, "word", "verb") == "verb"


def test_bark_has_two_senses(toy_grammar):
    hits = lexical_lookup(toy_grammar, "bark")
    assert sorted(e.id for e in hits) == ["bark-n1", "bark-v1"]
    assert lexical_lookup(toy_grammar, "qwertyuiop") == []
    assert lexical_lookup(toy_grammar, "Bark") == hits


def test_case_sensitive_first():
    g = parse_grammar(MINI + "Dog\tn\t_dog_n\tDog-special\n")
    assert [e.id for e in lexical_lookup(g, "Dog")] == ["Dog-special"]
    assert [e.id for e in lexical_lookup(g, "dog")] == ["dog-n1"]


def test_diamond_without_unique_meet():
    text = MINI.replace("list < top", "list < top\na < top\nb < top\nc < a b\nd < a b")
    with pytest.raises(GrammarError, match="'a' and 'b'.*c, d"):
        parse_grammar(text)


def test_cycle_rejected():
    text = MINI.replace("sign < top", "sign < top s")
    with pytest.raises(GrammarError, match="cycle"):
        parse_grammar(text)


def test_lexicon_errors():
    with pytest.raises(GrammarError, match="line"):
        parse_grammar(MINI + "oops\tn\n")
    with pytest.raises(GrammarError):
        parse_grammar(MINI + "cat\tnope\t_cat_n\n")
    with pytest.raises(GrammarError, match="START"):
        parse_grammar(MINI.replace("START s\n", ""))


def test_unknown_type_in_glb(toy_grammar):
    with pytest.raises(HierarchyError):
        toy_grammar.hierarchy.glb("verb", "no-such-type")


def test_glb_matches_brute_force_mini():
    h = parse_grammar(MINI).hierarchy
    for a in h.types:
        for b in h.types:
            m = brute_glb(h, a, b)
            assert h.glb(a, b) == (m[0] if m else None)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_glb_properties(toy_grammar, d):
    h = toy_grammar.hierarchy
    a = d.draw(st.sampled_from(h.types))
    b = d.draw(st.sampled_from(h.types))
    g = h.glb(a, b)
    assert h.glb(a, a) == a
    assert g == h.glb(b, a)
    if g is not None:
        assert h.is_subtype(g, a) and h.is_subtype(g, b)


def test_head_clash(toy_grammar):
    h = toy_grammar.hierarchy
    n = FeatureStructure.from_equations(h, "sign", [("HEAD", "noun-head")])
    v = FeatureStructure.from_equations(h, "sign", [("HEAD", "verb-head")])
    assert unify(n, v) is None
    assert not subsumes(v, n)
    assert subsumes(FeatureStructure.atom(h, "top"), n)


def test_reentrancy_clash(toy_grammar):
    h = toy_grammar.hierarchy
    shared = parse_fs(h, "sign[SUBJ #1 top, COMPS #1]")
    apart = parse_fs(h, "sign[SUBJ null, COMPS cons]")
    assert unify(shared, apart) is None
    ok = unify(shared, parse_fs(h, "sign[SUBJ null]"))
    assert ok.type_at("COMPS") == "null"
    assert ok.follow(("SUBJ",)) == ok.follow(("COMPS",))


def test_format_parse_roundtrip(toy_grammar):
    rng = random.Random(0)
    h = toy_grammar.hierarchy
    for _ in range(200):
        fs = random_fs(h, rng)
        assert parse_fs(h, format_fs(fs)) == fs


def test_parse_fs_errors(toy_grammar):
    h = toy_grammar.hierarchy
    for bad in ["sign[HEAD", "sign[HEAD verb, HEAD noun]", "sign junk", "#1 #2"]:
        with pytest.raises((ValueError, HierarchyError)):
            parse_fs(h, bad)
    with pytest.raises(ValueError, match="inconsistent"):
        parse_fs(h, "sign[HEAD #1 noun-head, SPR #1 verb-head]")


def test_unify_laws_sample(toy_grammar):
    rng = random.Random(11)
    h = toy_grammar.hierarchy
    pairs = [(random_fs(h, rng), random_fs(h, rng)) for _ in range(150)]
    bad, ok = unifier_law_violations(h, pairs)
    assert ok > 20
    assert sum(bad.values()) == 0, bad


def test_associativity(toy_grammar):
    rng = random.Random(12)
    h = toy_grammar.hierarchy
    checked = 0
    for _ in range(800):
        a, b, c = (random_fs(h, rng, p_top=0.7) for _ in range(3))
        ab, bc, ac = unify(a, b), unify(b, c), unify(a, c)
        if None in (ab, bc, ac):
            continue
        left, right = unify(ab, c), unify(a, bc)
        assert (left is None) == (right is None)
        assert left == right
        checked += 1
    assert checked > 30


def test_path_oracle_agrees_with_subsumes(toy_grammar):
    rng = random.Random(13)
    h = toy_grammar.hierarchy
    agree = 0
    for _ in range(400):
        a, b = random_fs(h, rng, p_top=0.8), random_fs(h, rng, p_top=0.3)
        assert subsumes(a, b) == subsumes_by_paths(a, b)
        agree += subsumes(a, b)
    assert agree > 5


def test_rules_and_lexicon_are_expanded(toy_grammar):
    dog = [e for e in lexical_lookup(toy_grammar, "dog") if e.lextype == "n-c"][0]
    assert dog.fs.type_at("HEAD") == "noun-head"
    assert dog.fs.type_at("HEAD.DIV") == "-"
    assert dog.fs.type_at("SPR.FIRST.HEAD") == "det-head"
    r = toy_grammar.rule("sb-hd")
    assert r.arity == 2 and r.head_index == 1
    assert r.mother_fs().root_type == "clause"
    with pytest.raises(KeyError):
        toy_grammar.rule("nope")
