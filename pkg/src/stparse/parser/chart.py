"""Bottom-up agenda chart parser with an edge budget."""

from __future__ import annotations

import heapq
import time
from dataclasses import asdict, dataclass, field

from ..corpus import Sentence
from ..grammar import BOTTOM, Grammar, unify_slots
from .edges import ChartEdge
from .pruning import PruneConfig, build_lexical_chart

DEFAULT_MAX_EDGES = 20000
STATUSES = ("parsed", "no_parse", "budget_exceeded")


@dataclass(frozen=True)
class Budget:
    max_edges: int = DEFAULT_MAX_EDGES

    def __post_init__(self):
        if self.max_edges < 1:
            raise ValueError("max_edges must be positive")


@dataclass
class ParseStats:
    lexical_edges_kept: int = 0
    lexical_edges_pruned: int = 0
    prune_miss: int = 0
    exempt_tokens: int = 0
    lexical_gaps: int = 0
    total_edges: int = 0
    unify_attempts: int = 0
    quick_check_rejects: int = 0
    tag_time: float = 0.0
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ParseResult:
    status: str
    derivations: list[ChartEdge] = field(default_factory=list)
    stats: ParseStats = field(default_factory=ParseStats)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if (self.status == "parsed") != bool(self.derivations):
            raise ValueError("status 'parsed' requires derivations and vice versa")


class _BudgetHit(Exception):
    pass


def parse(g: Grammar, s: Sentence, prune: PruneConfig | None = None,
          budget: Budget | int | None = None) -> ParseResult:
    """Exhaustive bottom-up parse of ``s``.

    Edges are processed in order of (span length, start, creation index).
    Every created edge, lexical ones included, counts against the budget;
    reaching it stops the parse with status ``budget_exceeded`` and no
    derivations.
    """
    if budget is None:
        budget = Budget()
    elif isinstance(budget, int):
        budget = Budget(budget)
    if budget.max_edges < len(s):
        raise ValueError(f"edge budget {budget.max_edges} is below the sentence "
                         f"length {len(s)}")
    t0 = time.perf_counter()
    lex = build_lexical_chart(g, s, prune)
    stats = ParseStats(lexical_edges_kept=lex.kept, lexical_edges_pruned=lex.pruned,
                       prune_miss=lex.prune_miss, exempt_tokens=lex.exempt,
                       lexical_gaps=len(lex.gaps), tag_time=lex.tag_time)
    if lex.gaps or not len(s):
        stats.wall_time = time.perf_counter() - t0
        return ParseResult("no_parse", [], stats)
    parser = _Agenda(g, len(s), budget.max_edges, stats)
    try:
        for e in lex.edges:
            parser.add(e)
        parser.run()
        status = "parsed" if parser.roots else "no_parse"
        roots = parser.roots
    except _BudgetHit:
        status, roots = "budget_exceeded", []
    stats.total_edges = parser.created
    stats.wall_time = time.perf_counter() - t0
    return ParseResult(status, roots, stats)


class _Agenda:
    def __init__(self, g: Grammar, n: int, max_edges: int, stats: ParseStats):
        self.g = g
        self.n = n
        self.max_edges = max_edges
        self.stats = stats
        self.glb = g.hierarchy.glb_table
        self.desc_start = g.hierarchy.id(g.start_symbol)
        self.is_sub = g.hierarchy.is_subtype
        self.unary = [r for r in g.rules if r.arity == 1]
        self.binary = [r for r in g.rules if r.arity == 2]
        self.heap: list = []
        self.created = 0
        self.by_start: list[list[ChartEdge]] = [[] for _ in range(n + 1)]
        self.by_end: list[list[ChartEdge]] = [[] for _ in range(n + 1)]
        self.roots: list[ChartEdge] = []

    def add(self, e: ChartEdge) -> None:
        if self.created >= self.max_edges:
            raise _BudgetHit
        heapq.heappush(self.heap, (e.end - e.start, e.start, self.created, e))
        self.created += 1
        if (e.start == 0 and e.end == self.n
                and self.is_sub(e.fs.types[0], self.desc_start)):
            self.roots.append(e)

    def _qc(self, rule_vec, edge_vec) -> bool:
        glb = self.glb
        for x, y in zip(rule_vec, edge_vec):
            if glb[x][y] == BOTTOM:
                self.stats.quick_check_rejects += 1
                return False
        return True

    def _apply(self, rule, daughters) -> None:
        self.stats.unify_attempts += 1
        slots = [(rule.daughters[k], d.fs) for k, d in enumerate(daughters)]
        fs = unify_slots(rule.fs, slots, rule.mother)
        if fs is None:
            return
        self.add(ChartEdge(daughters[0].start, daughters[-1].end, fs, rule.name,
                           tuple(daughters), rule=rule, qc=self.g.qc_vector(fs)))

    def run(self) -> None:
        heap = self.heap
        while heap:
            e = heapq.heappop(heap)[3]
            for r in self.unary:
                if self._qc(r.qc[0], e.qc):
                    self._apply(r, (e,))
            right = self.by_start[e.end]
            left = self.by_end[e.start]
            for r in self.binary:
                q0, q1 = r.qc
                if right and self._qc(q0, e.qc):
                    for f in right:
                        if self._qc(q1, f.qc):
                            self._apply(r, (e, f))
                if left and self._qc(q1, e.qc):
                    for f in left:
                        if self._qc(q0, f.qc):
                            self._apply(r, (f, e))
            self.by_start[e.start].append(e)
            self.by_end[e.end].append(e)
