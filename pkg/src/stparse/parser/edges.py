"""Chart edges."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..grammar import FeatureStructure, Grammar, LexicalEntry, Rule


class ChartEdge:
    """A feature structure over the token range ``[start, end)``.

    Lexical edges carry the entry's id, lexical type and predicate and have
    no daughters; phrasal edges record the rule and their daughter edges.
    """

    __slots__ = ("start", "end", "fs", "source", "daughters", "lextype",
                 "predicate", "rule", "qc", "_size", "_sig", "_head")

    def __init__(self, start: int, end: int, fs: "FeatureStructure", source: str,
                 daughters: tuple["ChartEdge", ...] = (), lextype: str | None = None,
                 predicate: str | None = None, rule: "Rule | None" = None,
                 qc: tuple[int, ...] = ()):
        if daughters:
            if daughters[0].start != start or daughters[-1].end != end:
                raise ValueError("daughters do not cover the edge span")
            for a, b in zip(daughters, daughters[1:]):
                if a.end != b.start:
                    raise ValueError("daughter spans are not adjacent")
        self.start = start
        self.end = end
        self.fs = fs
        self.source = source
        self.daughters = daughters
        self.lextype = lextype
        self.predicate = predicate
        self.rule = rule
        self.qc = qc
        self._size = None
        self._sig = None
        self._head = None

    @classmethod
    def lexical(cls, g: "Grammar", entry: "LexicalEntry", i: int) -> "ChartEdge":
        return cls(i, i + 1, entry.fs, entry.id, (), entry.lextype,
                   entry.predicate, None, g.qc_vector(entry.fs))

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_lexical(self) -> bool:
        return not self.daughters

    def size(self) -> int:
        """Number of edges in the derivation rooted here."""
        if self._size is None:
            self._size = 1 + sum(d.size() for d in self.daughters)
        return self._size

    def signature(self) -> str:
        """Bracketed derivation tree, e.g. ``(sb-hd (sp-hd the-q1 dog-n1) bark-v1)``."""
        if self._sig is None:
            if self.daughters:
                inner = " ".join(d.signature() for d in self.daughters)
                self._sig = f"({self.source} {inner})"
            else:
                self._sig = self.source
        return self._sig

    def lexical_head(self) -> "ChartEdge":
        """The lexical edge reached by following head daughters."""
        if self._head is None:
            e = self
            while e.daughters:
                e = e.daughters[e.rule.head_index]
            self._head = e
        return self._head

    def lexical_edges(self) -> list["ChartEdge"]:
        if not self.daughters:
            return [self]
        return [x for d in self.daughters for x in d.lexical_edges()]

    def __repr__(self):
        return f"<ChartEdge {self.start}-{self.end} {self.signature()}>"
