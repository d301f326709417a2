"""Command-line interface.

Corpus arguments accept a file path or a bundled corpus: ``@toy``,
``@toy:train``, ``@toy:dev``, ``@toy:test`` or ``@stress``.  The grammar
defaults to the bundled toy grammar.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import data
from .corpus import (Corpus, load_pos_combo_map, load_token_corpus, split_corpus,
                     write_token_corpus)
from .evaluation import bench, eval_parses, eval_tagging
from .grammar import load_grammar
from .parser import (Budget, PruneConfig, compile_exceptions, load_exceptions, parse,
                     read_parse_results, write_exceptions, write_parse_results)
from .taggers import (ExternalPredictions, TrainConfig, load_external_predictions,
                      load_model, model_grid, save_model, train_crf, train_linear,
                      write_predictions)

log = logging.getLogger("stparse")


def load_corpus(ref: str, fmt: str | None = None) -> Corpus:
    if ref.startswith("@"):
        name, _, split = ref[1:].partition(":")
        if name == "toy":
            if not split:
                return data.toy_corpus()
            splits = data.toy_splits()
            if split not in splits:
                raise SystemExit(f"unknown split {split!r}; choose from {sorted(splits)}")
            return splits[split]
        if name == "stress" and not split:
            return data.stress_corpus()
        raise SystemExit(f"unknown bundled corpus {ref!r}")
    return load_token_corpus(ref, format=fmt)


def _grammar(path):
    return load_grammar(path) if path else data.toy_grammar()


def _predictor(args, corpus: Corpus | None = None):
    if getattr(args, "predictions", None):
        return load_external_predictions(args.predictions, corpus)
    if getattr(args, "model", None):
        return load_model(args.model)
    return None


# -- commands ----------------------------------------------------------------


def cmd_convert(args):
    pos_map = load_pos_combo_map(args.pos_map) if args.pos_map else None
    corpus = load_token_corpus(args.input, format=args.in_format, pos_map=pos_map)
    parts = split_corpus(corpus, args.split) if args.split else [corpus]
    out = Path(args.out) if args.out else None
    fmt = args.format or "jsonl"
    for part in parts:
        if out is None:
            raise SystemExit("convert-corpus needs --out")
        target = out if len(parts) == 1 else out.with_name(
            f"{out.stem}.{part.name}{out.suffix}")
        write_token_corpus(part, target, format=fmt)
        print(f"{target}: {len(part)} sentences, {part.n_tokens} tokens")


def cmd_train(args):
    train = load_corpus(args.train, args.format)
    if args.model_type == "crf":
        dev = load_corpus(args.dev, args.format) if args.dev else None
        model = train_crf(train, l2_strength=args.l2, epochs=args.epochs,
                          seed=args.seed, dev=dev)
    else:
        overrides = {"seed": args.seed}
        if args.max_iter:
            overrides["max_iter"] = args.max_iter
        if args.C:
            overrides["reg_strength"] = args.C
        if args.model_type == "maxent":
            cfg = TrainConfig.maxent(**overrides)
        elif args.model_type == "svm":
            cfg = TrainConfig.svm(**overrides)
        else:
            grid = model_grid(**overrides)
            if args.model_type not in grid:
                raise SystemExit(f"unknown model {args.model_type!r}; grid names: "
                                 + "; ".join(grid))
            cfg = grid[args.model_type]
        if args.autoregressive:
            cfg = TrainConfig(**{**cfg.to_json(), "autoregressive": True})
        model = train_linear(train, cfg)
    if not args.out:
        raise SystemExit("train-tagger needs --out")
    save_model(model, args.out)
    hist = model.objective_history
    print(f"trained {type(model).__name__} on {len(train)} sentences, "
          f"{len(model.tags)} tags; objective {hist[0]:.4f} -> {hist[-1]:.4f}"
          if hist else f"trained {type(model).__name__}")


def cmd_tag(args):
    corpus = load_corpus(args.corpus, args.format)
    model = load_model(args.model)
    tags = {s.id: model.tag(s) for s in corpus}
    preds = ExternalPredictions.from_tags(corpus, tags)
    if not args.out:
        raise SystemExit("tag needs --out")
    write_predictions(args.out, preds, [s.id for s in corpus])
    print(f"{args.out}: tagged {corpus.n_tokens} tokens in {len(corpus)} sentences")


def cmd_eval_tagger(args):
    corpora = [load_corpus(c, args.format) for c in args.gold]
    preds = []
    for c in corpora:
        p = _predictor(args, None)
        if p is None:
            raise SystemExit("eval-tagger needs --model or --predictions")
        preds.append({s.id: p.tag(s) for s in c})
    report = eval_tagging(corpora, preds, top=args.top)
    print(report.table())
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_json(), indent=2) + "\n")


def cmd_compile_exceptions(args):
    dev = load_corpus(args.dev, args.format)
    tagger = _predictor(args, dev)
    if tagger is None:
        raise SystemExit("compile-exceptions needs --model or --predictions")
    types = compile_exceptions(dev, tagger, args.k)
    if args.out:
        write_exceptions(args.out, types, f"top {args.k} mistaken lexical types on {args.dev}")
    print("\n".join(types))


def _prune_config(args, corpus) -> PruneConfig:
    exceptions = frozenset(load_exceptions(args.exceptions)) if args.exceptions else frozenset()
    if args.mode == "none":
        return PruneConfig("none")
    tagger = _predictor(args, corpus)
    if tagger is None:
        raise SystemExit("--mode supertag needs --model or --predictions")
    return PruneConfig("supertag", tagger, exceptions)


def cmd_parse(args):
    g = _grammar(args.grammar)
    corpus = load_corpus(args.corpus, args.format)
    cfg = _prune_config(args, corpus)
    budget = Budget(args.max_edges)
    results = [(s.id, parse(g, s, cfg, budget)) for s in corpus]
    if not args.out:
        raise SystemExit("parse needs --out")
    write_parse_results(args.out, results)
    counts = {}
    for _, r in results:
        counts[r.status] = counts.get(r.status, 0) + 1
    print(f"{args.out}: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))


def cmd_eval_parse(args):
    corpus = load_corpus(args.gold, args.format)
    records = read_parse_results(args.parses)
    report = eval_parses([corpus], records)
    print(report.table())
    if args.out:
        s = report.per_corpus[corpus.name]
        Path(args.out).write_text(json.dumps(s.__dict__, indent=2) + "\n")


def cmd_bench(args):
    g = _grammar(args.grammar)
    corpora = [load_corpus(c, args.format) for c in args.corpus]
    configs = {"none": PruneConfig("none")}
    tagger = _predictor(args, None)
    if tagger is not None:
        configs["supertag"] = PruneConfig("supertag", tagger)
        if args.exceptions:
            exc = frozenset(load_exceptions(args.exceptions))
            configs["supertag+exceptions"] = PruneConfig("supertag", tagger, exc)
    report = bench(corpora, g, configs, Budget(args.max_edges), args.repetitions)
    print(report.table())
    if args.out:
        Path(args.out).write_text(report.to_csv(), encoding="utf-8")


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, suppress):
        # subcommands repeat the global flags without defaults so that a
        # value given before the subcommand is not overwritten
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("--seed", type=int, default=d(0),
                            help="random seed (default 0)")
        parser.add_argument("--format", choices=["tsv", "jsonl"], default=d(None),
                            help="corpus file format (default: from the file suffix)")
        parser.add_argument("--out", default=d(None), help="output file")
        parser.add_argument("-v", "--verbose", action="store_true", default=d(False))
        return parser

    common = global_flags(argparse.ArgumentParser(add_help=False), True)
    ap = global_flags(argparse.ArgumentParser(
        prog="stparse", description="Supertag-pruned chart parsing toolkit."), False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert-corpus", parents=[common],
                       help="convert TSV/JSONL corpora, optionally splitting them")
    p.add_argument("input")
    p.add_argument("--in-format", choices=["tsv", "jsonl"])
    p.add_argument("--pos-map", help="POS-combination map file")
    p.add_argument("--split", help='split spec, e.g. "train:0-7,dev:8,test:9"')
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("train-tagger", parents=[common], help="train a tagger")
    p.add_argument("--train", required=True)
    p.add_argument("--model-type", default="maxent",
                   help="maxent, svm, crf, or a model-grid name")
    p.add_argument("--dev", help="dev corpus (CRF early stopping)")
    p.add_argument("--autoregressive", action="store_true")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--C", type=float, help="inverse regularization strength")
    p.add_argument("--l2", type=float, default=1e-4, help="CRF L2 strength")
    p.add_argument("--epochs", type=int, default=30, help="CRF epochs")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", parents=[common], help="write span predictions")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval-tagger", parents=[common], help="tagging accuracy report")
    p.add_argument("--gold", nargs="+", required=True)
    p.add_argument("--model")
    p.add_argument("--predictions")
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_eval_tagger)

    p = sub.add_parser("compile-exceptions", parents=[common],
                       help="most mispredicted lexical types on dev data")
    p.add_argument("--dev", required=True)
    p.add_argument("--model")
    p.add_argument("--predictions")
    p.add_argument("-k", type=int, default=15)
    p.set_defaults(func=cmd_compile_exceptions)

    p = sub.add_parser("parse", parents=[common], help="parse a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--grammar")
    p.add_argument("--mode", choices=["none", "supertag"], default="none")
    p.add_argument("--model")
    p.add_argument("--predictions")
    p.add_argument("--exceptions")
    p.add_argument("--max-edges", type=int, default=Budget().max_edges)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval-parse", parents=[common], help="EDM scores of parse output")
    p.add_argument("--gold", required=True)
    p.add_argument("--parses", required=True)
    p.set_defaults(func=cmd_eval_parse)

    p = sub.add_parser("bench", parents=[common], help="speed/accuracy benchmark")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--grammar")
    p.add_argument("--model")
    p.add_argument("--predictions")
    p.add_argument("--exceptions")
    p.add_argument("--max-edges", type=int, default=Budget().max_edges)
    p.add_argument("--repetitions", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
