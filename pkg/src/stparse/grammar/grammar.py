"""Grammar files: type hierarchy, type constraints, rules and lexicon.

File layout (UTF-8, ``;`` starts a comment)::

    START root
    TYPES
    word < sign
    clause < root-phrase
    CONSTRAINTS
    verb: HEAD = verb-head
    cons: FIRST.HEAD = REST.FIRST.HEAD
    RULES
    sb-hd := 2 head=1 roles=[ARG1]
      M clause[HEAD #h, SUBJ null]
      D1 #s sign[HEAD noun-head]
      D2 sign[HEAD #h, SUBJ cons[FIRST #s, REST null]]
    LEXICON
    bark<TAB>main-verb<TAB>_bark_v

Rule skeletons use the bracketed notation of :func:`parse_fs`; ``#tags``
are shared across the ``M``/``D1``/``D2`` lines of one rule.  A lexicon
line may carry a fourth column with an explicit entry id; otherwise the id
is built from the predicate's lemma, its part-of-speech letter and a sense
number (``bark-v1``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .fs import (FeatureStructure, parse_fs, split_path, subsumes, unify,
                 unify_at)
from .hierarchy import BOTTOM, TOP, HierarchyError, TypeHierarchy


class GrammarError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


SLOTS = ("M", "D1", "D2")
MAX_EXPANSION_STEPS = 500


@dataclass(frozen=True)
class LexicalEntry:
    id: str
    orthography: str
    lextype: str
    predicate: str
    fs: FeatureStructure = field(compare=False, repr=False)


@dataclass(frozen=True)
class Rule:
    name: str
    arity: int
    head_index: int
    roles: tuple[str, ...]
    fs: FeatureStructure = field(repr=False)
    mother: int = field(repr=False)
    daughters: tuple[int, ...] = field(repr=False)
    # per daughter: type ids expected at the grammar's quick-check paths
    qc: tuple[tuple[int, ...], ...] = field(default=(), repr=False, compare=False)

    def daughter_fs(self, k: int) -> FeatureStructure:
        return self.fs.subgraph(self.daughters[k])

    def mother_fs(self) -> FeatureStructure:
        return self.fs.subgraph(self.mother)


@dataclass
class Grammar:
    hierarchy: TypeHierarchy
    lexicon: dict[str, list[LexicalEntry]]
    rules: list[Rule]
    start_symbol: str
    constraints: dict[str, FeatureStructure] = field(default_factory=dict)
    qc_paths: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        self._folded: dict[str, list[LexicalEntry]] = {}
        for orth, entries in self.lexicon.items():
            self._folded.setdefault(orth.casefold(), []).extend(entries)

    @property
    def lextypes(self) -> list[str]:
        return sorted({e.lextype for es in self.lexicon.values() for e in es})

    def entries(self) -> list[LexicalEntry]:
        return [e for es in self.lexicon.values() for e in es]

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def qc_vector(self, fs: FeatureStructure) -> tuple[int, ...]:
        out = []
        for path in self.qc_paths:
            n = fs.follow(path)
            out.append(0 if n is None else fs.types[n])
        return tuple(out)


def glb(h: TypeHierarchy, a: str, b: str) -> str | None:
    return h.glb(a, b)


def lexical_lookup(g: Grammar, form: str) -> list[LexicalEntry]:
    """Entries whose orthography equals ``form``; if none, entries that
    match after case folding."""
    hits = g.lexicon.get(form)
    if hits:
        return list(hits)
    return list(g._folded.get(form.casefold(), []))


# ---------------------------------------------------------------------------
# Loading


_SECTIONS = {"TYPES", "CONSTRAINTS", "RULES", "LEXICON"}
_RULE_HEAD = re.compile(
    r"^(\S+)\s*:=\s*(\d+)\s+head=(\d+)\s+roles=\[([^\]]*)\]\s*$")


def load_grammar(path: str | Path) -> Grammar:
    return parse_grammar(Path(path).read_text(encoding="utf-8"))


def parse_grammar(text: str) -> Grammar:
    section = None
    start = None
    parents: dict[str, list[str]] = {}
    constraint_lines: list[tuple[int, str, str, str]] = []
    rule_specs: list[dict] = []
    lex_lines: list[tuple[int, list[str]]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].rstrip() if section != "LEXICON" else raw.rstrip("\n")
        if section == "LEXICON" and line.lstrip().startswith(";"):
            continue
        if not line.strip():
            continue
        word = line.strip()
        if word in _SECTIONS:
            section = word
            continue
        if word.startswith("START "):
            start = word.split(None, 1)[1].strip()
            continue
        if section is None:
            raise GrammarError(f"text outside any section: {word!r}", lineno)
        if section == "TYPES":
            m = re.fullmatch(r"(\S+)\s*<\s*(.+)", word)
            if not m:
                raise GrammarError(f"expected 'child < parent', got {word!r}", lineno)
            child, ps = m.group(1), m.group(2).split()
            if child in parents:
                raise GrammarError(f"type {child!r} declared twice", lineno)
            parents[child] = ps
        elif section == "CONSTRAINTS":
            m = re.fullmatch(r"(\S+)\s*:\s*(\S*)\s*=\s*(\S+)", word)
            if not m:
                raise GrammarError(f"expected 'type: PATH = value', got {word!r}", lineno)
            constraint_lines.append((lineno, m.group(1), m.group(2), m.group(3)))
        elif section == "RULES":
            if not raw[:1].isspace():
                m = _RULE_HEAD.match(word)
                if not m:
                    raise GrammarError(f"bad rule header {word!r}", lineno)
                roles = tuple(r.strip() for r in m.group(4).split(",") if r.strip())
                rule_specs.append({"name": m.group(1), "arity": int(m.group(2)),
                                   "head": int(m.group(3)), "roles": roles,
                                   "slots": {}, "line": lineno, "last": None})
            else:
                if not rule_specs:
                    raise GrammarError("rule body before any rule header", lineno)
                spec = rule_specs[-1]
                first, _, rest = word.partition(" ")
                if first in SLOTS:
                    if first in spec["slots"]:
                        raise GrammarError(f"{first} given twice in rule {spec['name']}", lineno)
                    spec["slots"][first] = rest
                    spec["last"] = first
                elif spec["last"] is not None:
                    spec["slots"][spec["last"]] += " " + word
                else:
                    raise GrammarError("rule body must start with M, D1 or D2", lineno)
        else:
            cols = line.split("\t")
            if len(cols) not in (3, 4) or not all(c.strip() for c in cols):
                raise GrammarError("lexicon lines need orth, lextype, predicate[, id]", lineno)
            lex_lines.append((lineno, [c.strip() for c in cols]))

    try:
        h = TypeHierarchy(parents)
    except HierarchyError as e:
        raise GrammarError(str(e)) from None
    if start is None:
        raise GrammarError("missing START declaration")
    if start not in h:
        raise GrammarError(f"start symbol {start!r} is not a declared type")

    own: dict[str, FeatureStructure] = {}
    for lineno, t, path, value in constraint_lines:
        if t not in h:
            raise GrammarError(f"constraint on unknown type {t!r}", lineno)
        try:
            piece = FeatureStructure.from_equations(h, t, [(path, value)])
        except (HierarchyError, ValueError) as e:
            raise GrammarError(str(e), lineno) from None
        merged = unify(own[t], piece) if t in own else piece
        if merged is None:
            raise GrammarError(f"constraints on {t!r} are inconsistent", lineno)
        own[t] = merged

    expander = _Expander(h, own)
    rules = [_build_rule(h, spec, expander) for spec in rule_specs]
    qc_paths = _quick_check_paths(rules)
    rules = [_with_qc(r, qc_paths) for r in rules]
    lexicon = _build_lexicon(h, lex_lines, expander)
    return Grammar(h, lexicon, rules, start, expander.full_constraints(), qc_paths)


class _Expander:
    """Applies inherited type constraints to every node of a structure
    until nothing changes."""

    def __init__(self, h: TypeHierarchy, own: dict[str, FeatureStructure]):
        self.h = h
        self.own = own
        self._full: dict[int, FeatureStructure | None] = {}

    def constraint(self, tid: int) -> FeatureStructure | None:
        if tid not in self._full:
            name = self.h.types[tid]
            acc = None
            for anc in self.h.ancestors(name):
                c = self.own.get(anc)
                if c is None:
                    continue
                if acc is None:
                    acc = FeatureStructure(self.h, (tid,) + c.types[1:], c.arcs)
                else:
                    acc = unify(acc, c)
                    if acc is None:
                        raise GrammarError(f"inherited constraints of {name!r} clash")
            self._full[tid] = acc
        return self._full[tid]

    def full_constraints(self) -> dict[str, FeatureStructure]:
        out = {}
        for tid, t in enumerate(self.h.types):
            c = self.constraint(tid)
            if c is not None:
                out[t] = c
        return out

    def expand(self, fs: FeatureStructure) -> FeatureStructure | None:
        for _ in range(MAX_EXPANSION_STEPS):
            for node in range(len(fs)):
                c = self.constraint(fs.types[node])
                if c is None or subsumes(c, fs.subgraph(node)):
                    continue
                fs = unify_at(fs, node, c)
                if fs is None:
                    return None
                break
            else:
                return fs
        raise GrammarError("type constraint expansion does not terminate "
                           "(recursive constraints?)")


def _build_rule(h, spec, expander) -> Rule:
    name, arity, head = spec["name"], spec["arity"], spec["head"]
    line = spec["line"]
    if arity not in (1, 2):
        raise GrammarError(f"rule {name}: arity must be 1 or 2", line)
    if not 0 <= head < arity:
        raise GrammarError(f"rule {name}: head index {head} out of range", line)
    if len(spec["roles"]) != arity - 1:
        raise GrammarError(f"rule {name}: needs {arity - 1} role label(s)", line)
    want = SLOTS[:arity + 1]
    if set(spec["slots"]) != set(want):
        raise GrammarError(f"rule {name}: expected slots {', '.join(want)}", line)
    body = ", ".join(f"{s} {spec['slots'][s]}" for s in want)
    try:
        fs = parse_fs(h, f"{TOP}[{body}]")
    except (HierarchyError, ValueError) as e:
        raise GrammarError(f"rule {name}: {e}", line) from None
    fs = expander.expand(fs)
    if fs is None:
        raise GrammarError(f"rule {name}: skeleton violates type constraints", line)
    nodes = [fs.follow((s,)) for s in want]
    if len(set(nodes)) != len(nodes):
        raise GrammarError(f"rule {name}: mother and daughters must be distinct", line)
    return Rule(name, arity, head, spec["roles"], fs, nodes[0], tuple(nodes[1:]))


def _quick_check_paths(rules: list[Rule], limit: int = 8) -> tuple[tuple[str, ...], ...]:
    # paths (depth <= 2) where some daughter skeleton already commits to a type
    counts: dict[tuple[str, ...], int] = {}
    for r in rules:
        for d in r.daughters:
            sub = r.fs.subgraph(d)
            for p in sub.paths(max_depth=2):
                if p and sub.types[sub.follow(p)] != 0:
                    counts[p] = counts.get(p, 0) + 1
    ranked = sorted(counts, key=lambda p: (-counts[p], len(p), p))
    return tuple(ranked[:limit])


def _with_qc(rule: Rule, paths) -> Rule:
    vecs = []
    for d in rule.daughters:
        row = []
        for p in paths:
            n = rule.fs.follow(p, d)
            row.append(0 if n is None else rule.fs.types[n])
        vecs.append(tuple(row))
    return Rule(rule.name, rule.arity, rule.head_index, rule.roles, rule.fs,
                rule.mother, rule.daughters, tuple(vecs))


def quick_check(glb_table, a: Iterable[int], b: Iterable[int]) -> bool:
    """False when some quick-check path has incompatible types."""
    for x, y in zip(a, b):
        if glb_table[x][y] == BOTTOM:
            return False
    return True


def _lemma_key(predicate: str) -> tuple[str, str]:
    parts = [p for p in predicate.split("_") if p]
    if len(parts) >= 2:
        return parts[0], parts[1][0]
    return (parts[0] if parts else predicate), "x"


def _build_lexicon(h, lex_lines, expander) -> dict[str, list[LexicalEntry]]:
    word_id = h.index.get("word")
    cache: dict[str, FeatureStructure] = {}
    senses: dict[tuple[str, str], list[str]] = {}
    lexicon: dict[str, list[LexicalEntry]] = {}
    seen = set()
    for lineno, cols in lex_lines:
        orth, lextype, pred = cols[:3]
        if lextype not in h:
            raise GrammarError(f"unknown lexical type {lextype!r}", lineno)
        if not h.is_leaf(lextype) or (word_id is not None
                                      and not h.is_subtype(lextype, "word")):
            raise GrammarError(f"{lextype!r} is not a lexical (leaf word) type", lineno)
        if len(cols) == 4:
            eid = cols[3]
        else:
            lemma, pos = _lemma_key(pred)
            known = senses.setdefault((lemma, pos), [])
            if lextype not in known:
                known.append(lextype)
            eid = f"{lemma}-{pos}{known.index(lextype) + 1}"
        if (orth, eid) in seen:
            raise GrammarError(f"duplicate lexical entry {eid} for {orth!r}", lineno)
        seen.add((orth, eid))
        if lextype not in cache:
            fs = expander.expand(FeatureStructure.atom(h, lextype))
            if fs is None:
                raise GrammarError(f"constraints of {lextype!r} are unsatisfiable", lineno)
            cache[lextype] = fs
        lexicon.setdefault(orth, []).append(
            LexicalEntry(eid, orth, lextype, pred, cache[lextype]))
    return lexicon


__all__ = ["Grammar", "GrammarError", "LexicalEntry", "Rule", "glb",
           "lexical_lookup", "load_grammar", "parse_grammar", "quick_check",
           "split_path"]
