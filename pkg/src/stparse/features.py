"""Sparse binary feature template for supertagging.

Each token is described by its form, the two forms on either side, its
POS tag and, for autoregressive taggers, the two preceding lexical types.
Out-of-sentence positions get a sentinel that is distinct per offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus, Sentence

BOS = ("<BOS1>", "<BOS2>")
EOS = ("<EOS1>", "<EOS2>")
BOS_TAGS = ("<BOS-T1>", "<BOS-T2>")

WINDOW = 2


@dataclass(frozen=True)
class TemplateConfig:
    autoregressive: bool = False
    use_pos: bool = True

    @property
    def window(self) -> int:
        return WINDOW

    @property
    def n_features(self) -> int:
        return 5 + int(self.use_pos) + 2 * int(self.autoregressive)

    def to_json(self) -> dict:
        return {"autoregressive": self.autoregressive, "use_pos": self.use_pos,
                "window": WINDOW}

    @classmethod
    def from_json(cls, d: dict) -> "TemplateConfig":
        if d.get("window", WINDOW) != WINDOW:
            raise ValueError(f"unsupported feature window {d['window']}")
        return cls(bool(d["autoregressive"]), bool(d.get("use_pos", True)))


class Interner:
    """String <-> dense integer id map.  Once frozen, unknown strings are
    reported as ``None`` instead of being allocated."""

    def __init__(self, strings: Iterable[str] = ()):
        self.forward: dict[str, int] = {}
        self.reverse: list[str] = []
        self.frozen = False
        for s in strings:
            self.intern(s)

    def __len__(self) -> int:
        return len(self.reverse)

    def __contains__(self, s: str) -> bool:
        return s in self.forward

    def intern(self, s: str) -> int | None:
        i = self.forward.get(s)
        if i is None and not self.frozen:
            i = len(self.reverse)
            self.forward[s] = i
            self.reverse.append(s)
        return i

    def get(self, s: str) -> int | None:
        return self.forward.get(s)

    def freeze(self) -> "Interner":
        self.frozen = True
        return self


@dataclass(frozen=True)
class FeatureVector:
    ids: tuple[int, ...]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.ids, self.ids[1:])):
            raise ValueError("feature ids must be strictly increasing")

    def __len__(self) -> int:
        return len(self.ids)


def previous_tags(tags: Sequence[str], index: int) -> tuple[str, str]:
    """The (t-1, t-2) pair for position ``index`` given tags so far."""
    t1 = tags[index - 1] if index >= 1 else BOS_TAGS[0]
    t2 = tags[index - 2] if index >= 2 else BOS_TAGS[1]
    return t1, t2


def feature_strings(sentence: Sentence, index: int,
                    prev_tags: tuple[str, str] | None,
                    config: TemplateConfig) -> list[str]:
    n = len(sentence.tokens)
    if not 0 <= index < n:
        raise IndexError(f"token index {index} out of range for sentence "
                         f"{sentence.id} of length {n}")
    if config.autoregressive != (prev_tags is not None):
        raise ValueError("prev_tags must be given exactly when the template "
                         "is autoregressive")
    toks = sentence.tokens
    feats = [f"w0={toks[index].form}"]
    for k in (1, 2):
        j = index - k
        feats.append(f"w-{k}={toks[j].form if j >= 0 else BOS[k - 1]}")
    for k in (1, 2):
        j = index + k
        feats.append(f"w+{k}={toks[j].form if j < n else EOS[k - 1]}")
    if config.use_pos:
        feats.append(f"p0={toks[index].pos}")
    if prev_tags is not None:
        feats.append(f"t-1={prev_tags[0]}")
        feats.append(f"t-2={prev_tags[1]}")
    return feats


def extract_features(sentence: Sentence, index: int,
                     prev_tags: tuple[str, str] | None,
                     config: TemplateConfig, interner: Interner) -> FeatureVector:
    ids = set()
    for s in feature_strings(sentence, index, prev_tags, config):
        i = interner.intern(s)
        if i is not None:
            ids.add(i)
    return FeatureVector(tuple(sorted(ids)))


def build_vocabulary(train: Corpus | Iterable[Sentence],
                     config: TemplateConfig) -> Interner:
    """Collect every training feature string (cutoff 1) and freeze.

    Ids are assigned in sorted string order so the vocabulary does not
    depend on sentence order.
    """
    strings = set()
    for sent in train:
        tags = sent.gold_tags
        for i in range(len(sent)):
            prev = previous_tags(tags, i) if config.autoregressive else None
            strings.update(feature_strings(sent, i, prev, config))
    return Interner(sorted(strings)).freeze()


def training_matrix(sentences: Iterable[Sentence], config: TemplateConfig,
                    interner: Interner, tag_index: dict[str, int]
                    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR-style (indptr, indices, labels) over all tokens, gold previous
    tags feeding the autoregressive features."""
    indptr, indices, labels = [0], [], []
    for sent in sentences:
        tags = sent.gold_tags
        for i in range(len(sent)):
            prev = previous_tags(tags, i) if config.autoregressive else None
            fv = extract_features(sent, i, prev, config, interner)
            indices.extend(fv.ids)
            indptr.append(len(indices))
            labels.append(tag_index[tags[i]])
    return (np.asarray(indptr, dtype=np.int64),
            np.asarray(indices, dtype=np.int64),
            np.asarray(labels, dtype=np.int64))
