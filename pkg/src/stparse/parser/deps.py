"""Dependency triples from derivations, best-derivation choice and the
per-sentence parse output format."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from ..corpus import DependencyTriple
from .chart import ParseResult
from .edges import ChartEdge


def extract_triples(d: ChartEdge) -> frozenset[DependencyTriple]:
    """One triple per non-head daughter of each binary rule application,
    linking the lexical heads of the head and non-head daughters."""
    out = set()
    stack = [d]
    while stack:
        e = stack.pop()
        if not e.daughters:
            continue
        stack.extend(e.daughters)
        rule = e.rule
        head = e.daughters[rule.head_index].lexical_head()
        roles = iter(rule.roles)
        for k, dep in enumerate(e.daughters):
            if k == rule.head_index:
                continue
            anchor = dep.lexical_head()
            out.add(DependencyTriple(head.predicate, next(roles), anchor.predicate,
                                     head.span, anchor.span))
    return frozenset(out)


def select_best(result: ParseResult) -> ChartEdge | None:
    """Fewest edges first, then the smallest derivation signature."""
    if not result.derivations:
        return None
    return min(result.derivations, key=lambda e: (e.size(), e.signature()))


def best_triples(result: ParseResult) -> frozenset[DependencyTriple]:
    best = select_best(result)
    return extract_triples(best) if best is not None else frozenset()


def _triple_key(t: DependencyTriple):
    return (t.head_span or (-1, -1), t.role, t.dep_span or (-1, -1),
            t.head_pred, t.dep_pred)


def result_to_json(sentence_id: str, result: ParseResult) -> dict:
    triples = sorted(best_triples(result), key=_triple_key)
    best = select_best(result)
    return {"id": sentence_id, "status": result.status,
            "triples": [t.to_json() for t in triples],
            "derivation": best.signature() if best is not None else None,
            "stats": result.stats.to_json()}


def write_parse_results(path: str | Path,
                        results: Iterable[tuple[str, ParseResult]]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for sid, res in results:
            f.write(json.dumps(result_to_json(sid, res)) + "\n")


def read_parse_results(path: str | Path) -> dict[str, dict]:
    """Parse-output JSONL keyed by sentence id; triples are decoded to
    :class:`DependencyTriple` sets."""
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                d["triples"] = frozenset(DependencyTriple.from_json(t)
                                         for t in d["triples"])
                out[d["id"]] = d
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ValueError(f"{path}: line {lineno}: {e}") from None
    return out
