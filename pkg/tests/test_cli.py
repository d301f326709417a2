import csv
import json

import pytest

from stparse.cli import build_parser, load_corpus, main


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "m.json"
    assert main(["train-tagger", "--train", "@toy:train", "--max-iter", "10",
                 "--out", str(path)]) == 0
    return path


def test_bundled_refs():
    assert len(load_corpus("@toy:dev")) == 60
    assert len(load_corpus("@stress")) == 30
    with pytest.raises(SystemExit):
        load_corpus("@toy:nope")


def test_global_flag_before_subcommand():
    args = build_parser().parse_args(["--seed", "5", "tag", "--model", "m", "--corpus", "c"])
    assert args.seed == 5
    args = build_parser().parse_args(["tag", "--model", "m", "--corpus", "c", "--seed", "6"])
    assert args.seed == 6


def test_convert_split(tmp_path, capsys):
    src = tmp_path / "in.tsv"
    src.write_text("".join(f"# id = {i}\nw{i}\tNN+DT\tt\n\n" for i in range(10)))
    pmap = tmp_path / "map.tsv"
    pmap.write_text("NN+DT\tNN\n")
    out = tmp_path / "c.jsonl"
    assert main(["convert-corpus", str(src), "--pos-map", str(pmap),
                 "--split", "train:0-7,dev:8,test:9", "--out", str(out)]) == 0
    train = load_corpus(str(tmp_path / "c.train.jsonl"))
    assert len(train) == 8 and train.sentences[0].tokens[0].pos == "NN"
    assert len(load_corpus(str(tmp_path / "c.test.jsonl"))) == 1


def test_tag_eval_exceptions_parse(model_file, tmp_path, capsys):
    preds = tmp_path / "p.tsv"
    assert main(["tag", "--model", str(model_file), "--corpus", "@toy:test",
                 "--out", str(preds)]) == 0
    assert main(["eval-tagger", "--gold", "@toy:test", "@toy:dev",
                 "--predictions", str(preds)]) == 0
    assert main(["eval-tagger", "--gold", "@toy:test", "--model", str(model_file),
                 "--out", str(tmp_path / "rep.json")]) == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["overall"] > 50

    exc = tmp_path / "exc.txt"
    assert main(["compile-exceptions", "--dev", "@toy:dev", "--model", str(model_file),
                 "-k", "3", "--out", str(exc)]) == 0
    assert len([l for l in exc.read_text().splitlines() if not l.startswith("#")]) <= 3

    parses = tmp_path / "parses.jsonl"
    assert main(["parse", "--corpus", "@toy:test", "--mode", "supertag",
                 "--predictions", str(preds), "--exceptions", str(exc),
                 "--out", str(parses)]) == 0
    lines = [json.loads(l) for l in parses.read_text().splitlines()]
    assert len(lines) == 60 and {"id", "status", "triples", "stats"} <= set(lines[0])
    capsys.readouterr()
    assert main(["eval-parse", "--gold", "@toy:test", "--parses", str(parses)]) == 0
    assert "all as one" in capsys.readouterr().out


def test_bench_csv(model_file, tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--corpus", "@toy:dev", "--model", str(model_file),
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert {r["system"] for r in rows} == {"none", "supertag"}
    assert {r["dataset"] for r in rows} == {"dev", "all average"}


def test_errors_return_nonzero(tmp_path, capsys):
    assert main(["tag", "--model", str(tmp_path / "missing.json"), "--corpus",
                 "@toy:dev", "--out", str(tmp_path / "x")]) == 1
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["parse", "--corpus", "@toy:dev", "--mode", "supertag",
              "--out", str(tmp_path / "y")])
