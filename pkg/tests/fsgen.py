"""Random feature structures and brute-force reference checks."""

import random

from stparse.grammar import BOTTOM, FeatureStructure
from stparse.grammar.fs import _copy_out

ATTRS = ("HEAD", "SUBJ", "COMPS", "FIRST")


def random_fs(h, rng: random.Random, max_nodes=5, p_top=0.4, p_share=0.25):
    """An acyclic structure: arcs only point to later nodes, and with
    probability ``p_share`` an arc reuses an existing later node."""
    n = rng.randint(1, max_nodes)
    types = [0 if rng.random() < p_top else rng.randrange(len(h)) for _ in range(n)]
    arcs = [dict() for _ in range(n)]
    for child in range(1, n):
        parent = rng.randrange(child)
        arcs[parent][rng.choice(ATTRS)] = child
    for src in range(n):
        for attr in ATTRS:
            if attr not in arcs[src] and src + 1 < n and rng.random() < p_share:
                arcs[src][attr] = rng.randrange(src + 1, n)
    return _copy_out(h, types, arcs, lambda x: x, 0)


def brute_glb(h, a, b):
    """Maximal common subtypes by walking parent links, no bitmasks."""
    def below(t):
        return {s for s in h.types if t in ancestors(s)}

    memo = {}

    def ancestors(t):
        if t not in memo:
            out = {t}
            for p in h.parents[t]:
                out |= ancestors(p)
            memo[t] = out
        return memo[t]

    common = below(a) & below(b)
    maximal = [c for c in common
               if not any(d != c and c in below(d) for d in common)]
    return maximal


def path_table(fs):
    """Every path of an acyclic structure mapped to its node."""
    out = {(): 0}
    stack = [((), 0)]
    while stack:
        p, n = stack.pop()
        for a, c in fs.arcs[n]:
            out[p + (a,)] = c
            stack.append((p + (a,), c))
    return out


def subsumes_by_paths(a, b):
    """Subsumption restated over path sets: every path of ``a`` exists in
    ``b`` with a subtype, and paths sharing a node in ``a`` share one in
    ``b``."""
    h = a.hierarchy
    pa, pb = path_table(a), path_table(b)
    for p, n in pa.items():
        if p not in pb or not h.is_subtype(b.types[pb[p]], a.types[n]):
            return False
    groups = {}
    for p, n in pa.items():
        groups.setdefault(n, []).append(p)
    return all(len({pb[p] for p in ps}) == 1 for ps in groups.values())


def is_acyclic(fs):
    state = [0] * len(fs)

    def visit(n):
        if state[n] == 1:
            return False
        if state[n] == 2:
            return True
        state[n] = 1
        ok = all(visit(c) for _, c in fs.arcs[n])
        state[n] = 2
        return ok

    return visit(0)


def unifier_law_violations(h, pairs):
    """Count violations of idempotence, commutativity, result-subsumes-
    both and failure symmetry."""
    from stparse.grammar import subsumes, unify
    bad = {"idempotence": 0, "commutativity": 0, "subsumption": 0,
           "failure_symmetry": 0, "input_mutated": 0}
    successes = 0
    for a, b in pairs:
        snap = (a.types, a.arcs, b.types, b.arcs)
        if unify(a, a) != a:
            bad["idempotence"] += 1
        ab, ba = unify(a, b), unify(b, a)
        if (ab is None) != (ba is None):
            bad["failure_symmetry"] += 1
        elif ab is not None:
            successes += 1
            if ab != ba:
                bad["commutativity"] += 1
            if not (subsumes(a, ab) and subsumes(b, ab)):
                bad["subsumption"] += 1
            elif is_acyclic(ab) and not (subsumes_by_paths(a, ab)
                                         and subsumes_by_paths(b, ab)):
                bad["subsumption"] += 1
        if (a.types, a.arcs, b.types, b.arcs) != snap:
            bad["input_mutated"] += 1
    return bad, successes


__all__ = ["BOTTOM", "FeatureStructure", "random_fs", "brute_glb",
           "subsumes_by_paths", "unifier_law_violations"]
