"""Tag predictions exchanged as character-span TSV files.

Each line is ``sentence_id<TAB>start<TAB>end<TAB>tag<TAB>score`` with
character offsets into the sentence's raw text.  This lets predictions
from any tagger, including ones outside this package, drive pruning.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..corpus import Corpus, Sentence


class AlignmentError(ValueError):
    def __init__(self, sentence_id: str, message: str):
        super().__init__(f"sentence {sentence_id}: {message}")
        self.sentence_id = sentence_id


@dataclass
class ExternalPredictions:
    by_sentence: dict[str, list[tuple[tuple[int, int], str, float]]] = field(
        default_factory=dict)

    def __post_init__(self):
        for sid, preds in self.by_sentence.items():
            preds.sort(key=lambda p: p[0])
            for (a, b), (c, d) in zip((p[0] for p in preds), (p[0] for p in preds[1:])):
                if c < b:
                    raise AlignmentError(sid, f"overlapping spans ({a},{b}) and ({c},{d})")
            for (a, b), _, _ in preds:
                if not 0 <= a < b:
                    raise AlignmentError(sid, f"invalid span ({a},{b})")

    def tags_for(self, sentence: Sentence) -> list[str | None]:
        """Predicted tag per token; ``None`` where nothing was predicted."""
        out: list[str | None] = [None] * len(sentence)
        preds = self.by_sentence.get(sentence.id, [])
        if not preds:
            return out
        pos = {t.span: i for i, t in enumerate(sentence.tokens)}
        for span, tag, _ in preds:
            i = pos.get(span)
            if i is None:
                raise AlignmentError(
                    sentence.id, f"span {span} matches no token")
            out[i] = tag
        return out

    def tag(self, sentence: Sentence) -> list[str | None]:
        return self.tags_for(sentence)

    def align(self, corpus: Corpus) -> "ExternalPredictions":
        """Check every predicted span against ``corpus``; returns self."""
        known = corpus.by_id()
        for sid in self.by_sentence:
            if sid not in known:
                raise AlignmentError(sid, "not in corpus")
            self.tags_for(known[sid])
        return self

    @classmethod
    def from_tags(cls, corpus: Iterable[Sentence],
                  tags: Mapping[str, Sequence[str]] | None = None,
                  scores: Mapping[str, Sequence[float]] | None = None
                  ) -> "ExternalPredictions":
        """Wrap per-token tags (default: the gold tags) as span predictions."""
        by = {}
        for sent in corpus:
            seq = tags[sent.id] if tags is not None else sent.gold_tags
            sc = scores[sent.id] if scores is not None else [1.0] * len(sent)
            by[sent.id] = [(tok.span, t, float(s))
                           for tok, t, s in zip(sent.tokens, seq, sc) if t is not None]
        return cls(by)


def load_external_predictions(path: str | Path,
                              corpus: Corpus | None = None) -> ExternalPredictions:
    by: dict[str, list] = defaultdict(list)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise ValueError(f"line {lineno}: expected 5 tab-separated columns")
            sid, start, end, tag, score = cols
            try:
                by[sid].append(((int(start), int(end)), tag, float(score)))
            except ValueError:
                raise ValueError(f"line {lineno}: bad span or score") from None
    preds = ExternalPredictions(dict(by))
    if corpus is not None:
        preds.align(corpus)
    return preds


def write_predictions(path: str | Path, preds: ExternalPredictions,
                      order: Iterable[str] | None = None) -> None:
    ids = list(order) if order is not None else list(preds.by_sentence)
    with open(path, "w", encoding="utf-8") as f:
        for sid in ids:
            for (a, b), tag, score in preds.by_sentence.get(sid, []):
                f.write(f"{sid}\t{a}\t{b}\t{tag}\t{score!r}\n")
