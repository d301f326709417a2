"""Bundled toy grammar and corpora."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..corpus import Corpus, load_token_corpus, split_corpus


def data_path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


@lru_cache(maxsize=None)
def manifest() -> dict:
    return json.loads(data_path("manifest.json").read_text(encoding="utf-8"))


def toy_grammar():
    from ..grammar import load_grammar
    return load_grammar(data_path(manifest()["grammar"]))


def toy_corpus() -> Corpus:
    return load_token_corpus(data_path(manifest()["corpora"]["toy"]["file"]), name="toy")


def stress_corpus() -> Corpus:
    return load_token_corpus(data_path(manifest()["corpora"]["stress"]["file"]),
                             name="stress")


def toy_splits() -> dict[str, Corpus]:
    parts = split_corpus(toy_corpus(), manifest()["corpora"]["toy"]["splits"])
    return {c.name: c for c in parts}
