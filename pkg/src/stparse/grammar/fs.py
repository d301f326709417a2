"""Typed feature structures and unification.

A :class:`FeatureStructure` is a rooted graph whose nodes carry a type id
and a sorted tuple of ``(attribute, child)`` arcs.  Shared children
express reentrancy.  Structures are kept in a canonical numbering
(breadth-first from the root, arcs in attribute order), so two structures
are isomorphic exactly when they compare equal.

Unification merges node equivalence classes with union-find over a
scratch copy of both inputs, then copies the result out; inputs are never
modified.  Failure is reported as ``None``.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .hierarchy import BOTTOM, HierarchyError, TypeHierarchy

Path = tuple[str, ...]


class FeatureStructure:
    __slots__ = ("hierarchy", "types", "arcs", "_hash")

    def __init__(self, hierarchy: TypeHierarchy, types: Sequence[int],
                 arcs: Sequence[Sequence[tuple[str, int]]]):
        self.hierarchy = hierarchy
        self.types = tuple(types)
        self.arcs = tuple(tuple(a) for a in arcs)
        self._hash = None

    # -- construction ------------------------------------------------------

    @classmethod
    def atom(cls, hierarchy: TypeHierarchy, type_name: str) -> "FeatureStructure":
        return cls(hierarchy, (hierarchy.id(type_name),), ((),))

    @classmethod
    def from_equations(cls, hierarchy: TypeHierarchy, root_type: str,
                       equations: Iterable[tuple[str, str]]) -> "FeatureStructure | None":
        """Build the most general structure satisfying path equations.

        Each equation is ``(path, value)`` where ``path`` is a dotted
        attribute path (``""`` for the root) and ``value`` is a type name,
        another dotted path in upper case, or both (``"type = PATH"`` is
        not supported; write two equations).  Returns ``None`` when the
        equations are inconsistent.
        """
        fs = cls.atom(hierarchy, root_type)
        for path, value in equations:
            p = split_path(path)
            if _looks_like_path(value):
                piece = path_equality(hierarchy, p, split_path(value))
            else:
                piece = path_value(hierarchy, p, value)
            fs = unify(fs, piece)
            if fs is None:
                return None
        return fs

    # -- inspection --------------------------------------------------------

    def __len__(self) -> int:
        return len(self.types)

    @property
    def root_type(self) -> str:
        return self.hierarchy.types[self.types[0]]

    def type_name(self, node: int) -> str:
        return self.hierarchy.types[self.types[node]]

    def follow(self, path: Sequence[str], node: int = 0) -> int | None:
        for attr in path:
            for a, c in self.arcs[node]:
                if a == attr:
                    node = c
                    break
            else:
                return None
        return node

    def type_at(self, path: Sequence[str] | str) -> str | None:
        if isinstance(path, str):
            path = split_path(path)
        n = self.follow(path)
        return None if n is None else self.type_name(n)

    def subgraph(self, node: int) -> "FeatureStructure":
        return _copy_out(self.hierarchy, self.types, [dict(a) for a in self.arcs],
                         lambda x: x, node)

    def at(self, path: Sequence[str] | str) -> "FeatureStructure | None":
        if isinstance(path, str):
            path = split_path(path)
        n = self.follow(path)
        return None if n is None else self.subgraph(n)

    def paths(self, max_depth: int | None = None) -> list[Path]:
        """Every path from the root (breadth first, each node once per path)."""
        out: list[Path] = [()]
        frontier = [((), 0)]
        depth = 0
        while frontier and (max_depth is None or depth < max_depth):
            nxt = []
            for p, n in frontier:
                for a, c in self.arcs[n]:
                    q = p + (a,)
                    out.append(q)
                    nxt.append((q, c))
            frontier = nxt
            depth += 1
            if len(out) > 100000:
                raise ValueError("structure is cyclic or too large to enumerate")
        return out

    def __eq__(self, other):
        if not isinstance(other, FeatureStructure):
            return NotImplemented
        return (self.hierarchy is other.hierarchy and self.types == other.types
                and self.arcs == other.arcs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.types, self.arcs))
        return self._hash

    def __repr__(self):
        return f"<FS {self}>"

    def __str__(self):
        return format_fs(self)


def split_path(path: str | Sequence[str]) -> Path:
    if not isinstance(path, str):
        return tuple(path)
    path = path.strip()
    return tuple(p for p in path.split(".") if p) if path else ()


def _looks_like_path(value: str) -> bool:
    head = value.split(".")[0]
    return bool(head) and head.isupper() and head[0].isalpha()


def path_value(h: TypeHierarchy, path: Path, type_name: str) -> FeatureStructure:
    """Chain of ``top`` nodes along ``path`` ending in ``type_name``."""
    n = len(path)
    types = [0] * n + [h.id(type_name)]
    arcs = [((path[i], i + 1),) for i in range(n)] + [()]
    return FeatureStructure(h, types, arcs)


def path_equality(h: TypeHierarchy, p: Path, q: Path) -> FeatureStructure:
    """Minimal structure in which paths ``p`` and ``q`` share a node."""
    nodes_types: list[int] = [0]
    arcs: list[dict[str, int]] = [{}]

    def extend(path, target=None):
        node = 0
        for i, attr in enumerate(path):
            last = i == len(path) - 1
            nxt = arcs[node].get(attr)
            if nxt is None:
                if last and target is not None:
                    nxt = target
                else:
                    nxt = len(nodes_types)
                    nodes_types.append(0)
                    arcs.append({})
                arcs[node][attr] = nxt
            elif last and target is not None and nxt != target:
                raise ValueError(f"cannot share paths {p} and {q}")
            node = nxt
        return node

    if not p or not q:
        if p == q:
            return FeatureStructure(h, [0], [()])
        raise ValueError("the root cannot be reentrant with one of its own paths")
    shared = extend(p)
    extend(q, shared)
    return _copy_out(h, nodes_types, arcs, lambda x: x, 0)


# ---------------------------------------------------------------------------
# Unification


class _Workspace:
    """Scratch union-find state over the disjoint union of several
    structures."""

    __slots__ = ("glb", "types", "arcs", "parent", "offsets")

    def __init__(self, parts: Sequence[FeatureStructure]):
        self.glb = parts[0].hierarchy.glb_table
        types: list[int] = []
        arcs: list[dict[str, int] | None] = []
        offsets = []
        for fs in parts:
            off = len(types)
            offsets.append(off)
            types.extend(fs.types)
            if off:
                arcs.extend({a: c + off for a, c in node} if node else None
                            for node in fs.arcs)
            else:
                arcs.extend(dict(node) if node else None for node in fs.arcs)
        self.types = types
        self.arcs = arcs
        self.parent = list(range(len(types)))
        self.offsets = offsets

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def unify(self, x: int, y: int) -> bool:
        find, glb, types, arcs, parent = (self.find, self.glb, self.types,
                                          self.arcs, self.parent)
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            x = find(x)
            y = find(y)
            if x == y:
                continue
            t = glb[types[x]][types[y]]
            if t == BOTTOM:
                return False
            parent[y] = x
            types[x] = t
            ay = arcs[y]
            if ay:
                ax = arcs[x]
                if ax is None:
                    arcs[x] = ay
                else:
                    for attr, c in ay.items():
                        cx = ax.get(attr)
                        if cx is None:
                            ax[attr] = c
                        else:
                            stack.append((cx, c))
                arcs[y] = None
        return True

    def extract(self, node: int, hierarchy: TypeHierarchy) -> FeatureStructure:
        return _copy_out(hierarchy, self.types, self.arcs, self.find, node)


def _copy_out(h, types, arcs, find, start) -> FeatureStructure:
    start = find(start)
    number = {start: 0}
    order = [start]
    out_types = []
    out_arcs = []
    i = 0
    while i < len(order):
        n = order[i]
        i += 1
        out_types.append(types[n])
        node_arcs = arcs[n]
        if not node_arcs:
            out_arcs.append(())
            continue
        row = []
        for attr in sorted(node_arcs):
            c = find(node_arcs[attr])
            k = number.get(c)
            if k is None:
                k = number[c] = len(order)
                order.append(c)
            row.append((attr, k))
        out_arcs.append(tuple(row))
    return FeatureStructure(h, out_types, out_arcs)


def unify(a: FeatureStructure, b: FeatureStructure) -> FeatureStructure | None:
    """Most general structure subsumed by both ``a`` and ``b``, or
    ``None`` on a type clash."""
    if a.hierarchy is not b.hierarchy:
        raise HierarchyError("structures come from different hierarchies")
    ws = _Workspace((a, b))
    if not ws.unify(0, ws.offsets[1]):
        return None
    return ws.extract(0, a.hierarchy)


def unify_at(base: FeatureStructure, node: int,
             fs: FeatureStructure) -> FeatureStructure | None:
    """Unify ``fs`` into ``base`` at node ``node``; returns the whole
    result rooted at base's root."""
    ws = _Workspace((base, fs))
    if not ws.unify(node, ws.offsets[1]):
        return None
    return ws.extract(0, base.hierarchy)


def unify_slots(base: FeatureStructure, slots: Sequence[tuple[int, FeatureStructure]],
                extract: int) -> FeatureStructure | None:
    """Unify each ``(node, fs)`` of ``slots`` into ``base`` at ``node`` and
    return the substructure at ``extract`` (a node of ``base``)."""
    ws = _Workspace([base] + [fs for _, fs in slots])
    for k, (node, _) in enumerate(slots, 1):
        if not ws.unify(node, ws.offsets[k]):
            return None
    return ws.extract(extract, base.hierarchy)


def subsumes(a: FeatureStructure, b: FeatureStructure) -> bool:
    """True when ``a`` is at least as general as ``b``: every path, type
    and reentrancy of ``a`` also holds in ``b``."""
    h = a.hierarchy
    mapping = {0: 0}
    stack = [(0, 0)]
    while stack:
        x, y = stack.pop()
        if not h.is_subtype(b.types[y], a.types[x]):
            return False
        yarcs = dict(b.arcs[y])
        for attr, cx in a.arcs[x]:
            cy = yarcs.get(attr)
            if cy is None:
                return False
            prev = mapping.get(cx)
            if prev is None:
                mapping[cx] = cy
                stack.append((cx, cy))
            elif prev != cy:
                return False
    return True


def isomorphic(a: FeatureStructure, b: FeatureStructure) -> bool:
    return a == b


# ---------------------------------------------------------------------------
# Text form:  type[ATTR value, ...] with #tags for shared nodes


def format_fs(fs: FeatureStructure) -> str:
    indegree = [0] * len(fs)
    for node in fs.arcs:
        for _, c in node:
            indegree[c] += 1
    tags = {n: i for i, n in enumerate(
        (n for n in range(len(fs)) if indegree[n] > 1), 1)}
    printed = set()

    def render(n):
        prefix = ""
        if n in tags:
            prefix = f"#{tags[n]} "
            if n in printed:
                return f"#{tags[n]}"
            printed.add(n)
        body = fs.type_name(n)
        if fs.arcs[n]:
            body += "[" + ", ".join(f"{a} {render(c)}" for a, c in fs.arcs[n]) + "]"
        return prefix + body

    return render(0)


_TOKEN = re.compile(r"\s*(#\w+|[\[\],]|[^\s\[\],#]+)")


def parse_fs(hierarchy: TypeHierarchy, text: str) -> FeatureStructure:
    """Inverse of :func:`format_fs`.  Raises ``ValueError`` on syntax
    errors or inconsistent tags."""
    toks = _TOKEN.findall(text)
    pos = 0
    types: list[int] = []
    arcs: list[dict[str, int]] = []
    tagged: dict[str, int] = {}
    merges: list[tuple[int, int]] = []

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise ValueError("unexpected end of feature structure text")
        pos += 1
        return toks[pos - 1]

    def node():
        tag = None
        if peek() and peek().startswith("#"):
            tag = take()
        t = peek()
        if t is None or t in "[],":
            if tag is None:
                raise ValueError(f"expected a type near token {pos}")
            if tag not in tagged:
                n = len(types)
                types.append(0)
                arcs.append({})
                tagged[tag] = n
            return tagged[tag]
        if t.startswith("#"):
            raise ValueError("two tags in a row")
        take()
        n = len(types)
        types.append(hierarchy.id(t))
        arcs.append({})
        if tag is not None:
            if tag in tagged:
                merges.append((tagged[tag], n))
            else:
                tagged[tag] = n
        if peek() == "[":
            take()
            while True:
                attr = take()
                if not _looks_like_path(attr):
                    raise ValueError(f"bad attribute {attr!r}")
                child = node()
                if attr in arcs[n]:
                    raise ValueError(f"duplicate attribute {attr}")
                arcs[n][attr] = child
                sep = take()
                if sep == "]":
                    break
                if sep != ",":
                    raise ValueError(f"expected ',' or ']' but got {sep!r}")
        return n

    root = node()
    if pos != len(toks):
        raise ValueError(f"trailing text: {' '.join(toks[pos:])}")
    if not merges:
        return _copy_out(hierarchy, types, arcs, lambda x: x, root)
    # a tag given a type more than once: unify the occurrences
    flat = FeatureStructure(hierarchy, types, [tuple(sorted(a.items())) for a in arcs])
    ws = _Workspace([flat])
    for x, y in merges:
        if not ws.unify(x, y):
            raise ValueError("inconsistent types on a shared tag")
    return ws.extract(root, hierarchy)
