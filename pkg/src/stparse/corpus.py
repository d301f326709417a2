"""Token-classification corpora: loading, writing, POS-combination mapping
and id-based splitting.

Two on-disk formats are supported.  TSV carries one token per line
(``FORM<TAB>POS[<TAB>TAG]``), a ``# id = X`` comment before each sentence
and blank lines between sentences; it has no raw text, so character spans
are synthesized by joining forms with single spaces.  JSONL carries one
sentence object per line with explicit spans and optional gold
dependency triples.
"""

from __future__ import annotations

import fnmatch
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class CorpusError(ValueError):
    """Malformed corpus input or an invalid corpus operation."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Token:
    form: str
    pos: str
    gold_tag: str | None
    span: tuple[int, int]

    def __post_init__(self):
        if not self.form:
            raise CorpusError("empty token form")
        if not self.span[0] < self.span[1]:
            raise CorpusError(f"bad span {self.span} for token {self.form!r}")


@dataclass(frozen=True)
class DependencyTriple:
    """A head-role-dependent predication.  Spans are token index ranges of
    the lexical anchors; ``None`` spans come from span-less gold files."""

    head_pred: str
    role: str
    dep_pred: str
    head_span: tuple[int, int] | None = None
    dep_span: tuple[int, int] | None = None

    def to_json(self) -> dict:
        d = {"head": self.head_pred, "role": self.role, "dep": self.dep_pred}
        if self.head_span is not None:
            d["head_span"] = list(self.head_span)
        if self.dep_span is not None:
            d["dep_span"] = list(self.dep_span)
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "DependencyTriple":
        hs, ds = d.get("head_span"), d.get("dep_span")
        return cls(d["head"], d["role"], d["dep"],
                   tuple(hs) if hs is not None else None,
                   tuple(ds) if ds is not None else None)


@dataclass(frozen=True)
class Sentence:
    id: str
    raw_text: str
    tokens: tuple[Token, ...]
    gold_triples: frozenset[DependencyTriple] | None = None

    def __post_init__(self):
        prev_end = 0
        for tok in self.tokens:
            start, end = tok.span
            if start < prev_end:
                raise CorpusError(
                    f"sentence {self.id}: overlapping or unordered span {tok.span}")
            if end > len(self.raw_text):
                raise CorpusError(
                    f"sentence {self.id}: span {tok.span} exceeds raw text")
            if " ".join(self.raw_text[start:end].split()) != tok.form:
                raise CorpusError(
                    f"sentence {self.id}: span {tok.span} does not match "
                    f"form {tok.form!r}")
            prev_end = end

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def gold_tags(self) -> list[str | None]:
        return [t.gold_tag for t in self.tokens]

    @classmethod
    def from_forms(cls, id: str, forms: Sequence[str], pos: Sequence[str],
                   tags: Sequence[str | None] | None = None,
                   triples: Iterable[DependencyTriple] | None = None
                   ) -> "Sentence":
        """Build a sentence whose raw text is the forms joined by spaces."""
        tokens, offset = [], 0
        for i, form in enumerate(forms):
            tag = tags[i] if tags is not None else None
            tokens.append(Token(form, pos[i], tag, (offset, offset + len(form))))
            offset += len(form) + 1
        return cls(id, " ".join(forms), tuple(tokens),
                   frozenset(triples) if triples is not None else None)


@dataclass(frozen=True)
class Corpus:
    name: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for s in self.sentences:
            if s.id in seen:
                raise CorpusError(f"duplicate sentence id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def by_id(self) -> dict[str, Sentence]:
        return {s.id: s for s in self.sentences}


# ---------------------------------------------------------------------------
# POS combinations

@dataclass(frozen=True)
class PosComboMap:
    entries: Mapping[tuple[str, ...], str] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.entries:
            if len(key) < 2:
                raise CorpusError(f"POS combination {key!r} has fewer than 2 tags")


def map_pos_combo(combo: Sequence[str], pos_map: PosComboMap | None = None) -> str:
    """Collapse a multi-token POS sequence to one tag.  Unknown
    combinations fall back to their first tag."""
    if not combo:
        raise ValueError("empty POS combination")
    if len(combo) == 1:
        return combo[0]
    if pos_map is not None:
        mapped = pos_map.entries.get(tuple(combo))
        if mapped is not None:
            return mapped
    return combo[0]


def load_pos_combo_map(path: str | Path) -> PosComboMap:
    entries = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[1]:
                raise CorpusError("expected 'POS1+POS2<TAB>POS'", lineno)
            key = tuple(parts[0].split("+"))
            if len(key) < 2:
                raise CorpusError(f"combination {parts[0]!r} needs 2+ tags", lineno)
            entries[key] = parts[1]
    return PosComboMap(entries)


def _normalize_pos(pos: str, pos_map: PosComboMap | None) -> str:
    if "+" in pos and pos != "+":
        return map_pos_combo(pos.split("+"), pos_map)
    return pos


# ---------------------------------------------------------------------------
# Reading and writing

def load_token_corpus(path: str | Path, format: str | None = None,
                      name: str | None = None,
                      pos_map: PosComboMap | None = None) -> Corpus:
    """Load a TSV or JSONL token corpus.

    The format is inferred from the file suffix when not given.  POS
    fields written as ``A+B`` combinations are collapsed with
    :func:`map_pos_combo` only when ``pos_map`` is supplied.
    """
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix in (".jsonl", ".json") else "tsv"
    if name is None:
        name = path.stem
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if format == "tsv":
        sentences = _parse_tsv(text, pos_map)
    elif format == "jsonl":
        sentences = _parse_jsonl(text, pos_map)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return Corpus(name, tuple(sentences))


def _parse_tsv(text: str, pos_map: PosComboMap | None) -> list[Sentence]:
    sentences = []
    sent_id, rows, start_line = None, [], 0

    def flush():
        nonlocal sent_id, rows
        if rows:
            sid = sent_id if sent_id is not None else str(len(sentences))
            forms = [r[0] for r in rows]
            pos = [r[1] for r in rows]
            tags = [r[2] for r in rows]
            try:
                sentences.append(Sentence.from_forms(sid, forms, pos, tags))
            except CorpusError as e:
                raise CorpusError(str(e), start_line) from None
        sent_id, rows = None, []

    for lineno, line in enumerate(text.split("\n"), 1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*id\s*=\s*(.+?)\s*$", line)
            if m:
                if rows:
                    flush()
                sent_id = m.group(1)
            continue
        cols = line.split("\t")
        if len(cols) not in (2, 3) or not cols[0] or not cols[1]:
            raise CorpusError(
                f"expected FORM<TAB>POS[<TAB>TAG], got {len(cols)} column(s)",
                lineno)
        if not rows:
            start_line = lineno
        tag = cols[2] if len(cols) == 3 and cols[2] else None
        rows.append((cols[0], _normalize_pos(cols[1], pos_map), tag))
    flush()
    ids = [s.id for s in sentences]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise CorpusError(f"duplicate sentence id(s): {', '.join(dup)}")
    return sentences


def _parse_jsonl(text: str, pos_map: PosComboMap | None) -> list[Sentence]:
    sentences = []
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            tokens = tuple(
                Token(t["form"], _normalize_pos(t["pos"], pos_map), t.get("tag"),
                      (int(t["start"]), int(t["end"])))
                for t in obj["tokens"])
            triples = obj.get("triples")
            if triples is not None:
                triples = frozenset(DependencyTriple.from_json(d) for d in triples)
            sentences.append(Sentence(str(obj["id"]), obj["text"], tokens, triples))
        except CorpusError as e:
            raise CorpusError(str(e), lineno) from None
        except (ValueError, KeyError, TypeError) as e:
            raise CorpusError(f"malformed JSONL record: {e}", lineno) from None
    ids = [s.id for s in sentences]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise CorpusError(f"duplicate sentence id(s): {', '.join(dup)}")
    return sentences


def format_tsv(corpus: Corpus) -> str:
    out = []
    for s in corpus.sentences:
        out.append(f"# id = {s.id}")
        for t in s.tokens:
            cols = [t.form, t.pos] + ([t.gold_tag] if t.gold_tag is not None else [])
            out.append("\t".join(cols))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def format_jsonl(corpus: Corpus) -> str:
    lines = []
    for s in corpus.sentences:
        toks = []
        for t in s.tokens:
            d = {"form": t.form, "pos": t.pos}
            if t.gold_tag is not None:
                d["tag"] = t.gold_tag
            d["start"], d["end"] = t.span
            toks.append(d)
        obj = {"id": s.id, "text": s.raw_text, "tokens": toks}
        if s.gold_triples is not None:
            obj["triples"] = [tr.to_json() for tr in sorted(
                s.gold_triples, key=_triple_sort_key)]
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def _triple_sort_key(t: DependencyTriple):
    return (t.head_span or (-1, -1), t.role, t.dep_span or (-1, -1),
            t.head_pred, t.dep_pred)


def write_token_corpus(corpus: Corpus, path: str | Path,
                       format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix in (".jsonl", ".json") else "tsv"
    text = format_tsv(corpus) if format == "tsv" else format_jsonl(corpus)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


# ---------------------------------------------------------------------------
# Inventory and splits

def tag_inventory(corpus: Corpus | Iterable[Sentence]) -> list[str]:
    """Sorted list of distinct gold lexical types."""
    tags = set()
    for s in corpus:
        for t in s.tokens:
            if t.gold_tag is None:
                raise CorpusError(f"sentence {s.id}: token {t.form!r} has no gold tag")
            tags.add(t.gold_tag)
    return sorted(tags)


def parse_split_spec(text: str) -> list[tuple[str, str]]:
    """``"train:0-7,dev:8,test:9"`` -> ``[("train", "0-7"), ...]``."""
    out = []
    for part in text.split(","):
        name, sep, pattern = part.partition(":")
        if not sep or not name.strip() or not pattern.strip():
            raise CorpusError(f"bad split item {part!r}; expected NAME:PATTERN")
        out.append((name.strip(), pattern.strip()))
    return out


def _id_matches(sid: str, pattern: str) -> bool:
    for alt in pattern.split("|"):
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", alt)
        if m:
            lo = int(m.group(1))
            hi = int(m.group(2)) if m.group(2) else lo
            if sid.isdigit() and lo <= int(sid) <= hi:
                return True
        elif fnmatch.fnmatchcase(sid, alt):
            return True
    return False


def split_corpus(corpus: Corpus, spec: Sequence[tuple[str, str]] | str
                 ) -> list[Corpus]:
    """Partition sentences by id pattern.

    A pattern is a ``|``-separated list of alternatives; an alternative is
    either an integer range ``lo-hi`` (matching integer ids) or a
    shell-style glob on the id.  Every sentence must match exactly one
    split.
    """
    if isinstance(spec, str):
        spec = parse_split_spec(spec)
    names = [n for n, _ in spec]
    if len(set(names)) != len(names):
        raise CorpusError("split names must be unique")
    buckets: dict[str, list[Sentence]] = {n: [] for n in names}
    unmatched, overlapping = [], []
    for s in corpus.sentences:
        hits = [n for n, p in spec if _id_matches(s.id, p)]
        if not hits:
            unmatched.append(s.id)
        elif len(hits) > 1:
            overlapping.append(f"{s.id} ({'/'.join(hits)})")
        else:
            buckets[hits[0]].append(s)
    if overlapping:
        raise CorpusError("ids matched by several splits: " + ", ".join(overlapping))
    if unmatched:
        raise CorpusError("ids matched by no split: " + ", ".join(unmatched))
    return [Corpus(n, tuple(buckets[n])) for n in names]


def concat_corpora(corpora: Sequence[Corpus], name: str = "all") -> Corpus:
    return Corpus(name, tuple(s for c in corpora for s in c.sentences))
