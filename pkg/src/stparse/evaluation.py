"""Tagging and parsing metrics, the speed/accuracy benchmark and its
report formats."""

from __future__ import annotations

import csv
import io
import statistics
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, DependencyTriple, Sentence
from .parser import Budget, ParseResult, PruneConfig, best_triples, parse


class EvaluationError(ValueError):
    pass


def _pct(correct: int, total: int) -> float:
    return round(100.0 * correct / total, 2) if total else 0.0


# ---------------------------------------------------------------------------
# Tagging


@dataclass
class TagEvalReport:
    per_corpus: dict[str, float]
    counts: dict[str, tuple[int, int]]
    overall: float
    macro: float
    confusion: Counter = field(default_factory=Counter)
    top_mistaken_tokens: list[tuple[str, int]] = field(default_factory=list)
    top_under_predicted: list[tuple[str, int]] = field(default_factory=list)
    top_over_predicted: list[tuple[str, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["confusion"] = [[g, p, n] for (g, p), n in sorted(self.confusion.items())]
        return d

    def table(self) -> str:
        width = max([len(n) for n in self.per_corpus] + [20])
        lines = [f"{'dataset':<{width}}  {'tokens':>7}  {'accuracy':>8}"]
        for name, acc in self.per_corpus.items():
            lines.append(f"{name:<{width}}  {self.counts[name][1]:>7}  {acc:>8.2f}")
        total = sum(t for _, t in self.counts.values())
        lines.append(f"{'all test sets as one':<{width}}  {total:>7}  {self.overall:>8.2f}")
        lines.append(f"{'average':<{width}}  {'':>7}  {self.macro:>8.2f}")
        for title, rows in (("most mistaken tokens", self.top_mistaken_tokens),
                            ("most under-predicted tags", self.top_under_predicted),
                            ("most over-predicted tags", self.top_over_predicted)):
            if rows:
                lines.append(f"{title}: " + ", ".join(f"{k} ({n})" for k, n in rows))
        return "\n".join(lines)


def eval_tagging(gold: Corpus | Sequence[Corpus],
                 predicted: Mapping[str, Sequence[str | None]]
                 | Sequence[Mapping[str, Sequence[str | None]]],
                 top: int = 10) -> TagEvalReport:
    """Accuracy per corpus, over all corpora pooled, and their unweighted
    mean.  ``predicted`` maps sentence id to tags, either one mapping for
    all corpora or one per corpus."""
    corpora = [gold] if isinstance(gold, Corpus) else list(gold)
    if isinstance(predicted, Mapping):
        preds = [predicted] * len(corpora)
    else:
        preds = list(predicted)
        if len(preds) != len(corpora):
            raise EvaluationError("need one prediction mapping per corpus")
    names = [c.name for c in corpora]
    if len(set(names)) != len(names):
        names = [f"{c.name}#{i}" for i, c in enumerate(corpora)]
    confusion: Counter = Counter()
    mistaken: Counter = Counter()
    counts = {}
    for name, corpus, pred in zip(names, corpora, preds):
        correct = total = 0
        for sent in corpus:
            tags = pred.get(sent.id)
            if tags is None:
                raise EvaluationError(f"sentence {sent.id}: no predictions")
            if len(tags) != len(sent):
                raise EvaluationError(f"sentence {sent.id}: {len(tags)} predicted tags "
                                      f"for {len(sent)} tokens")
            for tok, p in zip(sent.tokens, tags):
                if tok.gold_tag is None:
                    raise EvaluationError(f"sentence {sent.id}: token without gold tag")
                confusion[(tok.gold_tag, p)] += 1
                total += 1
                if p == tok.gold_tag:
                    correct += 1
                else:
                    mistaken[tok.form] += 1
        counts[name] = (correct, total)
    per = {n: _pct(*counts[n]) for n in names}
    c_all = sum(c for c, _ in counts.values())
    t_all = sum(t for _, t in counts.values())
    raw = [100.0 * c / t if t else 0.0 for c, t in counts.values()]
    macro = round(sum(raw) / len(raw), 2) if raw else 0.0
    under: Counter = Counter()
    over: Counter = Counter()
    for (g, p), n in confusion.items():
        if g != p:
            under[g] += n
            if p is not None:
                over[p] += n

    def ranked(c):
        return sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:top]

    return TagEvalReport(per, counts, _pct(c_all, t_all), macro, confusion,
                         ranked(mistaken), ranked(under), ranked(over))


# ---------------------------------------------------------------------------
# Dependency triples


@dataclass(frozen=True)
class EdmScore:
    precision: float
    recall: float
    f1: float
    matched: int
    predicted: int
    gold: int


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def eval_edm(gold: Mapping[str, Iterable[DependencyTriple]],
             predicted: Mapping[str, Iterable[DependencyTriple]]) -> EdmScore:
    """Micro-averaged precision, recall and F1 over pooled triple counts.
    Sentences missing from ``predicted`` count as having no triples."""
    extra = set(predicted) - set(gold)
    if extra:
        raise EvaluationError(f"predictions for unknown sentences: {sorted(extra)[:5]}")
    matched = n_pred = n_gold = 0
    for sid, g in gold.items():
        g = set(g)
        p = set(predicted.get(sid, ()))
        matched += len(g & p)
        n_pred += len(p)
        n_gold += len(g)
    prec = matched / n_pred if n_pred else 0.0
    rec = matched / n_gold if n_gold else 0.0
    return EdmScore(prec, rec, _f1(prec, rec), matched, n_pred, n_gold)


def exact_match_rate(gold: Mapping[str, Iterable[DependencyTriple]],
                     predicted: Mapping[str, Iterable[DependencyTriple]],
                     status: Mapping[str, str] | None = None) -> float:
    """Share of sentences parsed with exactly the gold triple set."""
    if not gold:
        return 0.0
    hits = 0
    for sid, g in gold.items():
        if sid not in predicted:
            continue
        if status is not None and status.get(sid) != "parsed":
            continue
        if set(predicted[sid]) == set(g):
            hits += 1
    return hits / len(gold)


@dataclass(frozen=True)
class ParseScores:
    precision: float
    recall: float
    f1: float
    exact_match: float
    coverage: float
    sec_per_sen: float
    sentences: int
    matched: int = 0
    n_predicted: int = 0
    n_gold: int = 0


def score_parses(corpus: Iterable[Sentence], results: Mapping[str, ParseResult | Mapping],
                 seconds: Mapping[str, float] | None = None) -> ParseScores:
    """Scores for one corpus.  ``results`` holds :class:`ParseResult`
    objects or parse-output records (``{status, triples}``)."""
    sents = list(corpus)
    gold, pred, status = {}, {}, {}
    for s in sents:
        if s.gold_triples is None:
            raise EvaluationError(f"sentence {s.id}: no gold triples")
        gold[s.id] = s.gold_triples
        r = results.get(s.id)
        if r is None:
            status[s.id] = "no_parse"
            continue
        if isinstance(r, ParseResult):
            status[s.id] = r.status
            pred[s.id] = best_triples(r)
        else:
            status[s.id] = r["status"]
            pred[s.id] = frozenset(r["triples"])
    edm = eval_edm(gold, pred)
    n = len(sents)
    cov = sum(status[s.id] == "parsed" for s in sents) / n if n else 0.0
    if seconds is None:
        seconds = {}
        for sid, r in results.items():
            if isinstance(r, ParseResult):
                seconds[sid] = r.stats.wall_time
            elif "stats" in r:
                seconds[sid] = r["stats"].get("wall_time", 0.0)
    sps = sum(seconds.get(s.id, 0.0) for s in sents) / n if n else 0.0
    return ParseScores(edm.precision, edm.recall, edm.f1,
                       exact_match_rate(gold, pred, status), cov, sps, n,
                       edm.matched, edm.predicted, edm.gold)


@dataclass
class ParseEvalReport:
    per_corpus: dict[str, ParseScores]
    pooled: ParseScores
    average: ParseScores

    def table(self) -> str:
        head = (f"{'dataset':<16} {'sec/sen':>8} {'P':>6} {'R':>6} {'F1':>6} "
                f"{'exact':>6} {'cover':>6}")
        lines = [head]
        rows = list(self.per_corpus.items()) + [("all as one", self.pooled),
                                                ("average", self.average)]
        for name, s in rows:
            lines.append(f"{name:<16} {s.sec_per_sen:>8.4f} {s.precision:>6.2f} "
                         f"{s.recall:>6.2f} {s.f1:>6.2f} {s.exact_match:>6.2f} "
                         f"{s.coverage:>6.2f}")
        return "\n".join(lines)


def _pool(scores: Sequence[ParseScores]) -> ParseScores:
    m = sum(s.matched for s in scores)
    p = sum(s.n_predicted for s in scores)
    g = sum(s.n_gold for s in scores)
    n = sum(s.sentences for s in scores)
    prec = m / p if p else 0.0
    rec = m / g if g else 0.0
    w = [s.sentences for s in scores]

    def wmean(attr):
        return sum(getattr(s, attr) * k for s, k in zip(scores, w)) / n if n else 0.0

    return ParseScores(prec, rec, _f1(prec, rec), wmean("exact_match"),
                       wmean("coverage"), wmean("sec_per_sen"), n, m, p, g)


def _average(scores: Sequence[ParseScores]) -> ParseScores:
    k = len(scores)

    def mean(attr):
        return sum(getattr(s, attr) for s in scores) / k if k else 0.0

    return ParseScores(mean("precision"), mean("recall"), mean("f1"),
                       mean("exact_match"), mean("coverage"), mean("sec_per_sen"),
                       sum(s.sentences for s in scores))


def eval_parses(corpora: Sequence[Corpus],
                results: Mapping[str, ParseResult | Mapping]) -> ParseEvalReport:
    per = {c.name: score_parses(c, results) for c in corpora}
    scores = list(per.values())
    return ParseEvalReport(per, _pool(scores), _average(scores))


# ---------------------------------------------------------------------------
# Benchmark

CSV_COLUMNS = ["dataset", "system", "sec_per_sen", "precision", "recall", "f1",
               "exact_match", "coverage"]
AVERAGE = "all average"
POOLED = "all as one"


@dataclass(frozen=True)
class BenchRow:
    dataset: str
    system: str
    sec_per_sen: float
    precision: float
    recall: float
    f1: float
    exact_match: float
    coverage: float
    tag_sec_per_sen: float = 0.0
    budget_exceeded: int = 0


@dataclass(frozen=True)
class ParetoRow:
    system: str
    sec_per_sen: float
    f1: float
    on_frontier: bool = False


@dataclass
class BenchReport:
    rows: list[BenchRow]
    pareto: list[ParetoRow]
    results: dict[str, dict[str, ParseResult]] = field(default_factory=dict, repr=False)

    def row(self, dataset: str, system: str) -> BenchRow:
        for r in self.rows:
            if r.dataset == dataset and r.system == system:
                return r
        raise KeyError((dataset, system))

    def speedup(self, dataset: str, baseline: str, system: str) -> float:
        b = self.row(dataset, baseline).sec_per_sen
        s = self.row(dataset, system).sec_per_sen
        return b / s if s else float("inf")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.dataset, r.system, f"{r.sec_per_sen:.6f}",
                        f"{r.precision:.4f}", f"{r.recall:.4f}", f"{r.f1:.4f}",
                        f"{r.exact_match:.4f}", f"{r.coverage:.4f}"])
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"{'dataset':<14} {'system':<22} {'sec/sen':>8} {'tag s':>7} "
                 f"{'P':>5} {'R':>5} {'F1':>5} {'exact':>5} {'cover':>5} {'over':>4}"]
        for r in self.rows:
            lines.append(
                f"{r.dataset:<14} {r.system:<22} {r.sec_per_sen:>8.4f} "
                f"{r.tag_sec_per_sen:>7.4f} {r.precision:>5.2f} {r.recall:>5.2f} "
                f"{r.f1:>5.2f} {r.exact_match:>5.2f} {r.coverage:>5.2f} "
                f"{r.budget_exceeded:>4}")
        lines.append("Pareto frontier (speed vs F1): " + ", ".join(
            f"{p.system} ({p.sec_per_sen:.4f}s, {p.f1:.2f})"
            for p in self.pareto if p.on_frontier))
        return "\n".join(lines)


def pareto_frontier(points: Sequence[tuple[str, float, float]]) -> list[ParetoRow]:
    """Mark systems not dominated in (lower time, higher F1)."""
    out = []
    for name, t, f in points:
        dominated = any((t2 <= t and f2 >= f) and (t2 < t or f2 > f)
                        for n2, t2, f2 in points if n2 != name)
        out.append(ParetoRow(name, t, f, not dominated))
    return out


def bench(corpora: Sequence[Corpus], grammar, configs: Mapping[str, PruneConfig],
          budget: Budget | int | None = None, repetitions: int = 1) -> BenchReport:
    """Parse every corpus under every pruning configuration.

    Seconds per sentence is the median over ``repetitions`` of the mean
    per-sentence wall time (tagging included, loading excluded).
    Accuracy columns come from the first repetition; parsing is
    deterministic, so later repetitions only add timing samples.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    if isinstance(corpora, Corpus):
        corpora = [corpora]
    rows: list[BenchRow] = []
    all_results: dict[str, dict[str, ParseResult]] = {}
    per_system: dict[str, list[tuple[ParseScores, float, int]]] = {n: [] for n in configs}
    for corpus in corpora:
        for name, cfg in configs.items():
            times = []
            first: dict[str, ParseResult] = {}
            for rep in range(repetitions):
                total = 0.0
                for s in corpus:
                    r = parse(grammar, s, cfg, budget)
                    total += r.stats.wall_time
                    if rep == 0:
                        first[s.id] = r
                times.append(total / len(corpus) if len(corpus) else 0.0)
            sps = statistics.median(times)
            secs = {sid: r.stats.wall_time for sid, r in first.items()}
            sc = score_parses(corpus, first, secs)
            sc = ParseScores(sc.precision, sc.recall, sc.f1, sc.exact_match,
                             sc.coverage, sps, sc.sentences, sc.matched,
                             sc.n_predicted, sc.n_gold)
            tag = (sum(r.stats.tag_time for r in first.values()) / len(first)
                   if first else 0.0)
            over = sum(r.status == "budget_exceeded" for r in first.values())
            rows.append(BenchRow(corpus.name, name, sps, sc.precision, sc.recall,
                                 sc.f1, sc.exact_match, sc.coverage, tag, over))
            per_system[name].append((sc, tag, over))
            all_results[f"{corpus.name}/{name}"] = first
    pareto_points = []
    for name, items in per_system.items():
        scores = [s for s, _, _ in items]
        avg = _average(scores)
        tag = sum(t for _, t, _ in items) / len(items) if items else 0.0
        over = sum(o for _, _, o in items)
        rows.append(BenchRow(AVERAGE, name, avg.sec_per_sen, avg.precision,
                             avg.recall, avg.f1, avg.exact_match, avg.coverage,
                             tag, over))
        if len(scores) > 1:
            pooled = _pool(scores)
            rows.append(BenchRow(POOLED, name, pooled.sec_per_sen, pooled.precision,
                                 pooled.recall, pooled.f1, pooled.exact_match,
                                 pooled.coverage, tag, over))
        pareto_points.append((name, avg.sec_per_sen, avg.f1))
    return BenchReport(rows, pareto_frontier(pareto_points), all_results)
