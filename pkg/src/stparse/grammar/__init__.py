"""Typed feature structures, type hierarchies and grammar files."""

from .fs import (FeatureStructure, format_fs, isomorphic, parse_fs, subsumes,
                 unify, unify_at, unify_slots)
from .grammar import (Grammar, GrammarError, LexicalEntry, Rule, glb,
                      lexical_lookup, load_grammar, parse_grammar, quick_check)
from .hierarchy import BOTTOM, TOP, HierarchyError, TypeHierarchy

__all__ = [
    "BOTTOM", "TOP", "FeatureStructure", "Grammar", "GrammarError",
    "HierarchyError", "LexicalEntry", "Rule", "TypeHierarchy", "format_fs",
    "glb", "isomorphic", "lexical_lookup", "load_grammar", "parse_fs",
    "parse_grammar", "quick_check", "subsumes", "unify", "unify_at",
    "unify_slots",
]
