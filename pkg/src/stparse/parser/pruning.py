"""Lexical chart construction with supertag pruning and exception lists."""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from ..corpus import Corpus, Sentence, tag_inventory
from ..grammar import Grammar, lexical_lookup
from .edges import ChartEdge

log = logging.getLogger(__name__)

MODES = ("none", "supertag")


class Tagger(Protocol):
    def tag(self, sentence: Sentence) -> Sequence[str | None]: ...


@dataclass(frozen=True)
class PruneConfig:
    """``predictions`` is anything with ``tag(sentence)`` returning one tag
    (or ``None``) per token: an :class:`ExternalPredictions` file or an
    in-process tagger."""

    mode: str = "none"
    predictions: Tagger | None = None
    exceptions: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown pruning mode {self.mode!r}")
        if self.mode == "supertag" and self.predictions is None:
            raise ValueError("mode=supertag requires predictions")
        object.__setattr__(self, "exceptions", frozenset(self.exceptions))

    @classmethod
    def none(cls) -> "PruneConfig":
        return cls("none")


@dataclass
class LexicalChart:
    edges: list[ChartEdge]
    kept: int = 0
    pruned: int = 0
    prune_miss: int = 0
    exempt: int = 0
    gaps: list[int] = field(default_factory=list)
    tag_time: float = 0.0

    def __iter__(self):
        return iter(self.edges)

    def __len__(self):
        return len(self.edges)

    def for_token(self, i: int) -> list[ChartEdge]:
        return [e for e in self.edges if e.start == i]


def build_lexical_chart(g: Grammar, s: Sentence,
                        p: PruneConfig | None = None) -> LexicalChart:
    """One edge per surviving lexical entry of each token.

    Under ``supertag`` pruning a token whose candidates include an
    exception type keeps every candidate.  Other tokens keep only the
    candidates whose lexical type equals the prediction; if none does, all
    are kept and a prune miss is counted.
    """
    p = p or PruneConfig()
    predicted: Sequence[str | None] = [None] * len(s)
    tag_time = 0.0
    if p.mode == "supertag":
        t0 = time.perf_counter()
        predicted = list(p.predictions.tag(s))
        tag_time = time.perf_counter() - t0
        if len(predicted) != len(s):
            raise ValueError(f"sentence {s.id}: {len(predicted)} predictions "
                             f"for {len(s)} tokens")
    chart = LexicalChart([], tag_time=tag_time)
    for i, tok in enumerate(s.tokens):
        cands = lexical_lookup(g, tok.form)
        if not cands:
            chart.gaps.append(i)
            continue
        keep = cands
        if p.mode == "supertag" and len(cands) > 1:
            if any(c.lextype in p.exceptions for c in cands):
                chart.exempt += 1
            elif predicted[i] is not None:
                match = [c for c in cands if c.lextype == predicted[i]]
                if match:
                    keep = match
                else:
                    chart.prune_miss += 1
        chart.kept += len(keep)
        chart.pruned += len(cands) - len(keep)
        for c in keep:
            chart.edges.append(ChartEdge.lexical(g, c, i))
    return chart


def compile_exceptions(dev: Corpus | Iterable[Sentence], tagger: Tagger,
                       k: int = 15, tagset: Sequence[str] | None = None) -> list[str]:
    """The ``k`` gold lexical types mispredicted most often on ``dev``
    (ties by name; types never mispredicted are left out)."""
    sentences = list(dev)
    if tagset is None:
        tagset = getattr(tagger, "tags", None) or tag_inventory(sentences)
    if k > len(tagset):
        log.warning("k=%d exceeds the tagset size %d; using %d", k, len(tagset),
                    len(tagset))
        k = len(tagset)
    errors: Counter[str] = Counter()
    for sent in sentences:
        for gold, pred in zip(sent.gold_tags, tagger.tag(sent)):
            if pred != gold:
                errors[gold] += 1
    ranked = sorted(errors, key=lambda t: (-errors[t], t))
    return ranked[:k]


def load_exceptions(path: str | Path) -> list[str]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(line)
    return out


def write_exceptions(path: str | Path, types: Iterable[str],
                     header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if header:
            for h in header.splitlines():
                f.write(f"# {h}\n")
        for t in types:
            f.write(t + "\n")
