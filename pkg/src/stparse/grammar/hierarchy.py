"""Type hierarchy with a precomputed greatest-lower-bound table.

Types are kept as dense integer ids (``top`` is 0).  Each type's set of
subtypes (itself included) is stored as a bitmask; the GLB of two types is
the unique type whose subtype set equals the intersection of theirs.  If
the intersection is non-empty but has no such type, the hierarchy is not
bounded-complete and loading fails.
"""

from __future__ import annotations

from typing import Iterable, Mapping

TOP = "top"
BOTTOM = -1


class HierarchyError(ValueError):
    pass


class TypeHierarchy:
    def __init__(self, parents: Mapping[str, Iterable[str]], top: str = TOP):
        order = [top] + [t for t in parents if t != top]
        for t, ps in parents.items():
            for p in ps:
                if p not in parents and p != top:
                    raise HierarchyError(f"type {t!r} has undeclared parent {p!r}")
        if parents.get(top):
            raise HierarchyError(f"{top!r} cannot have parents")
        self.top = top
        self.types: list[str] = order
        self.index: dict[str, int] = {t: i for i, t in enumerate(order)}
        self.parents: dict[str, tuple[str, ...]] = {
            t: tuple(dict.fromkeys(parents.get(t, ()))) for t in order}
        for t in order[1:]:
            if not self.parents[t]:
                self.parents[t] = (top,)
        self._check_acyclic()
        n = len(order)
        children: list[list[int]] = [[] for _ in range(n)]
        for t, ps in self.parents.items():
            for p in ps:
                children[self.index[p]].append(self.index[t])
        self._children = children
        desc = [0] * n
        for i in reversed(self._topo_order()):
            m = 1 << i
            for c in children[i]:
                m |= desc[c]
            desc[i] = m
        self._desc = desc
        self._glb = self._compute_glb()

    def _check_acyclic(self):
        state: dict[str, int] = {}

        def visit(t, trail):
            s = state.get(t)
            if s == 1:
                cycle = trail[trail.index(t):] + [t]
                raise HierarchyError("cycle in type hierarchy: " + " < ".join(cycle))
            if s == 2:
                return
            state[t] = 1
            for p in self.parents[t]:
                visit(p, trail + [t])
            state[t] = 2

        for t in self.types:
            visit(t, [])

    def _topo_order(self) -> list[int]:
        # parents before children
        seen, out = set(), []

        def visit(i):
            if i in seen:
                return
            seen.add(i)
            for p in self.parents[self.types[i]]:
                visit(self.index[p])
            out.append(i)

        for i in range(len(self.types)):
            visit(i)
        return out

    def _compute_glb(self) -> list[list[int]]:
        n = len(self.types)
        by_mask = {m: i for i, m in enumerate(self._desc)}
        table = [[BOTTOM] * n for _ in range(n)]
        for a in range(n):
            table[a][a] = a
            for b in range(a + 1, n):
                m = self._desc[a] & self._desc[b]
                if m == 0:
                    g = BOTTOM
                else:
                    g = by_mask.get(m)
                    if g is None:
                        maximal = self._maximal(m)
                        raise HierarchyError(
                            f"types {self.types[a]!r} and {self.types[b]!r} have no "
                            f"unique greatest lower bound (candidates: "
                            f"{', '.join(self.types[i] for i in maximal)})")
                table[a][b] = table[b][a] = g
        return table

    def _maximal(self, mask: int) -> list[int]:
        members = [i for i in range(len(self.types)) if mask >> i & 1]
        return [i for i in members
                if not any(j != i and self._desc[j] >> i & 1 for j in members)]

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.types)

    def __contains__(self, t: str) -> bool:
        return t in self.index

    def id(self, t: str) -> int:
        try:
            return self.index[t]
        except KeyError:
            raise HierarchyError(f"unknown type {t!r}") from None

    def glb(self, a: str, b: str) -> str | None:
        g = self._glb[self.id(a)][self.id(b)]
        return None if g == BOTTOM else self.types[g]

    @property
    def glb_table(self) -> list[list[int]]:
        return self._glb

    def is_subtype(self, sub: str | int, sup: str | int) -> bool:
        """True when ``sub`` equals or lies below ``sup``."""
        i = sub if isinstance(sub, int) else self.id(sub)
        j = sup if isinstance(sup, int) else self.id(sup)
        return bool(self._desc[j] >> i & 1)

    def subtypes(self, t: str) -> list[str]:
        m = self._desc[self.id(t)]
        return [s for i, s in enumerate(self.types) if m >> i & 1]

    def ancestors(self, t: str) -> list[str]:
        i = self.id(t)
        return [s for j, s in enumerate(self.types) if self._desc[j] >> i & 1]

    def children(self, t: str) -> list[str]:
        return [self.types[c] for c in self._children[self.id(t)]]

    def is_leaf(self, t: str) -> bool:
        return not self._children[self.id(t)]
