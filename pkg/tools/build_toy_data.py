"""Regenerate the bundled toy grammar and corpora.

    python tools/build_toy_data.py [--seed N] [--out src/stparse/data]

The lexicon is assembled from the word lists below and appended to
``toy_header.grammar``.  Sentences are sampled from a small phrase
generator that knows the intended lexical type of every word.  A sentence
is kept only when its best parse (all lexical entries, default budget)
uses exactly the intended lexical types; its gold triples are those of
that parse.  The stress corpus holds long, attachment-heavy sentences
whose gold triples come from the best parse restricted to the intended
types.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT.parent / "src"))

from stparse.corpus import Corpus, Sentence, write_token_corpus  # noqa: E402
from stparse.grammar import lexical_lookup, parse_grammar  # noqa: E402
from stparse.parser import (Budget, PruneConfig, best_triples, parse,  # noqa: E402
                            select_best)
from stparse.taggers import ExternalPredictions  # noqa: E402

# -- lexicon ---------------------------------------------------------------

# lemma, plural
COUNT_NOUNS = """dog dogs|cat cats|park parks|walk walks|book books|watch watches|
saw saws|house houses|bird birds|table tables|friend friends|car cars|
train trains|ball balls|duck ducks|fly flies|ring rings|guard guards|
judge judges|man men|child children|plan plans|drink drinks|run runs|
play plays|talk talks|look looks|record records|ship ships|shop shops|
wave waves|match matches|green greens|square squares"""

# mass or count with DIV + in both numbers
MASS_NOUNS = """bark barks|water waters|fish fish|time times|work works|
paper papers|light lights|love loves|rain rains|milk milks|oil oils|
smoke smokes"""

# lemma 3sg past : frames (i=intransitive, t=transitive, p=PP complement)
VERBS = """bark barks barked:i|run runs ran:it|walk walks walked:it|
sleep sleeps slept:i|work works worked:ip|play plays played:it|
talk talks talked:ip|look looks looked:ip|wait waits waited:ip|
rely relies relied:p|fly flies flew:it|drink drinks drank:it|
see sees saw:t|watch watches watched:it|chase chases chased:t|
like likes liked:t|read reads read:it|park parks parked:it|
book books booked:t|dog dogs dogged:t|guard guards guarded:t|
judge judges judged:it|ring rings rang:it|water waters watered:t|
light lights lit:t|paper papers papered:t|time times timed:t|
fish fishes fished:i|house houses housed:t|record records recorded:t|
plan plans planned:t|duck ducks ducked:it|train trains trained:it|
open opens opened:it|clean cleans cleaned:it|ship ships shipped:t|
shop shops shopped:ip|wave waves waved:ip|match matches matched:t|
love loves loved:t|oil oils oiled:t|smoke smokes smoked:it"""

ADJECTIVES = """big small old new red green light clean open warm fast hard
late early square fine near"""

ADVERBS = """quickly slowly often today fast hard late early again here there
now soon fine in on over by near behind after about up down"""

PREPOSITIONS = """in on at to for with by near over after behind from about
into down up"""

PROPER = "Kim Sandy Lee Pat Chris Alex Jo"
PRONOUNS = "I you he she it we they me him us them her his"
DETERMINERS = [("the", "d-the"), ("some", "d-the"), ("a", "d-a"), ("an", "d-a"),
               ("every", "d-a"), ("each", "d-a"), ("my", "d-poss"),
               ("your", "d-poss"), ("his", "d-poss"), ("her", "d-poss"),
               ("its", "d-poss"), ("our", "d-poss"), ("their", "d-poss")]

V_PP_PREP = {"talk": "to", "look": "at", "wait": "for", "rely": "on",
             "work": "on", "wave": "at", "shop": "for"}


def _pairs(block):
    return [tuple(x.split()) for x in block.replace("\n", "").split("|") if x.strip()]


def lexicon_entries() -> list[tuple[str, str, str]]:
    rows: list[tuple[str, str, str]] = []

    def add(orth, lextype, pred):
        row = (orth, lextype, pred)
        if row not in rows:
            rows.append(row)

    for orth, lt in DETERMINERS:
        add(orth, lt, f"_{orth}_q")
    for lemma, pl in _pairs(COUNT_NOUNS):
        add(lemma, "n-c", f"_{lemma}_n")
        add(pl, "n-pl", f"_{lemma}_n")
    # count nouns also have a mass reading
    for lemma, pl in _pairs(COUNT_NOUNS):
        add(lemma, "mass-count-noun", f"_{lemma}_n")
        add(pl, "mass-count-noun", f"_{lemma}_n")
    for lemma, pl in _pairs(MASS_NOUNS):
        add(lemma, "mass-count-noun", f"_{lemma}_n")
        add(pl, "mass-count-noun", f"_{lemma}_n")
    frames = {"i": "main-verb", "t": "v-np", "p": "v-pp"}
    for item in VERBS.replace("\n", "").split("|"):
        forms, fr = item.split(":")
        lemma = forms.split()[0]
        for f in dict.fromkeys(forms.split()):
            for c in fr:
                add(f, frames[c], f"_{lemma}_v")
            # transitive verbs allow an omitted object
            if fr == "t":
                add(f, "main-verb", f"_{lemma}_v")
    for a in ADJECTIVES.split():
        add(a, "adj-i", f"_{a}_a")
    for a in ADVERBS.split():
        add(a, "adv-i", f"_{a}_r")
    for p in PREPOSITIONS.split():
        add(p, "p-np", f"_{p}_p")
    for n in PROPER.split():
        add(n, "n-pn", f"named_{n.lower()}_pn")
    for p in PRONOUNS.split():
        add(p, "n-pro", f"pron_{p.lower()}_x")
    return rows


def grammar_text() -> str:
    header = (ROOT / "toy_header.grammar").read_text(encoding="utf-8")
    lines = [f"{o}\t{t}\t{p}" for o, t, p in lexicon_entries()]
    return header.rstrip("\n") + "\n" + "\n".join(lines) + "\n"


# -- sentence generator ----------------------------------------------------

POS_OF = {"n-c": "NN", "n-pl": "NNS", "mass-count-noun": "NN", "n-pn": "NNP",
          "n-pro": "PRP", "d-the": "DT", "d-a": "DT", "d-poss": "PRP$",
          "p-np": "IN", "adj-i": "JJ", "adv-i": "RB"}


def pos_for(form: str, lextype: str, past: set[str]) -> str:
    if lextype in POS_OF:
        return POS_OF[lextype]
    if form in past:
        return "VBD"
    return "VBZ" if form.endswith("s") else "VBP"


class Generator:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.count = _pairs(COUNT_NOUNS)
        self.mass = _pairs(MASS_NOUNS)
        self.verbs = []
        for item in VERBS.replace("\n", "").split("|"):
            forms, fr = item.split(":")
            self.verbs.append((forms.split(), fr))
        self.past = {v[0][2] for v in self.verbs}
        self.adjs = ADJECTIVES.split()
        self.advs = ADVERBS.split()
        self.preps = PREPOSITIONS.split()

    def pick(self, xs):
        return self.rng.choice(xs)

    def nbar(self, plural: bool | None, mass: bool, adj_p=0.25, cmpd_p=0.15):
        out = []
        if self.rng.random() < adj_p:
            out.append((self.pick(self.adjs), "adj-i"))
        if self.rng.random() < cmpd_p:
            out.append((self.pick(self.count)[0], "n-c"))
        if mass:
            lemma, pl = self.pick(self.mass)
            out.append((pl if plural else lemma, "mass-count-noun"))
        else:
            lemma, pl = self.pick(self.count)
            out.append((pl, "n-pl") if plural else (lemma, "n-c"))
        return out

    def np(self, depth=0, pp_p=0.15, long=False):
        r = self.rng.random()
        if r < 0.12:
            return [(self.pick(PROPER.split()), "n-pn")], False
        if r < 0.24:
            return [(self.pick(["he", "she", "it", "we", "they", "you", "I"]), "n-pro")], False
        kind = self.rng.random()
        mass = kind < 0.25
        plural = (not mass and kind < 0.55) or (mass and self.rng.random() < 0.2)
        adj_p, cmpd_p = (0.5, 0.3) if long else (0.25, 0.15)
        words = self.nbar(plural, mass, adj_p, cmpd_p)
        if mass or plural:
            choice = self.rng.random()
            if choice < 0.35:
                det = []
            elif choice < 0.75:
                det = [("the", "d-the")]
            else:
                det = [(self.pick(["my", "your", "our", "their", "its"]), "d-poss")]
        else:
            det = [self.pick([("the", "d-the"), ("the", "d-the"), ("a", "d-a"),
                              ("every", "d-a"), ("my", "d-poss"), ("his", "d-poss")])]
        out = det + words
        if depth < 2 and self.rng.random() < pp_p:
            out += self.pp(depth + 1, long=long)
        return out, plural

    def pp(self, depth=0, long=False):
        obj, _ = self.np(depth, pp_p=0.3 if long else 0.1, long=long)
        return [(self.pick(self.preps), "p-np")] + obj

    def vp(self, plural_subj, long=False):
        forms, frames = self.pick(self.verbs)
        frame = self.pick(frames)
        lemma = forms[0]
        if self.rng.random() < 0.35:
            form = forms[2]
        else:
            form = forms[0] if plural_subj else forms[1]
        out = []
        if self.rng.random() < 0.08:
            out.append((self.pick(["often", "quickly", "slowly", "soon", "now"]), "adv-i"))
        lt = {"i": "main-verb", "t": "v-np", "p": "v-pp"}[frame]
        out.append((form, lt))
        if frame == "t":
            out += self.np(pp_p=0.35 if long else 0.12, long=long)[0]
        elif frame == "p":
            out.append((V_PP_PREP[lemma], "p-np"))
            out += self.np(pp_p=0.2, long=long)[0]
        n_pp = self.rng.choice([1, 2, 2, 3]) if long else int(self.rng.random() < 0.25)
        for _ in range(n_pp):
            out += self.pp(1, long=long)
        if self.rng.random() < (0.3 if long else 0.15):
            out.append((self.pick(self.advs[:13]), "adv-i"))
        return out

    def sentence(self, long=False):
        subj, plural = self.np(pp_p=0.3 if long else 0.08, long=long)
        if subj[-1][1] == "n-pro":
            plural = subj[-1][0] in ("we", "they", "you", "I")
        return subj + self.vp(plural, long=long)


def _realize(sid, words, rng, past):
    forms = [w for w, _ in words]
    forms[0] = forms[0][0].upper() + forms[0][1:]
    tags = [t for _, t in words]
    pos = [pos_for(w, t, past) for w, t in words]
    return Sentence.from_forms(sid, forms, pos, tags)


def _noisy_pos(sent, g, rng, past, rate=0.08):
    pos = []
    for tok in sent.tokens:
        p = tok.pos
        if rng.random() < rate:
            alts = sorted({pos_for(tok.form.lower(), e.lextype, past)
                           for e in lexical_lookup(g, tok.form)} - {p})
            if alts:
                p = rng.choice(alts)
        pos.append(p)
    return pos


def build(out: Path, seed: int, n_toy: int, n_stress: int, verbose: bool = True):
    rng = random.Random(seed)
    text = grammar_text()
    g = parse_grammar(text)
    gen = Generator(rng)
    none = PruneConfig()

    toy, seen = [], set()
    tries = 0
    while len(toy) < n_toy:
        tries += 1
        words = gen.sentence()
        if not 2 <= len(words) <= 12:
            continue
        key = " ".join(w for w, _ in words).lower()
        if key in seen:
            continue
        seen.add(key)
        sent = _realize(str(len(toy)), words, rng, gen.past)
        res = parse(g, sent, none, Budget())
        best = select_best(res)
        if best is None:
            continue
        if [e.lextype for e in best.lexical_edges()] != list(sent.gold_tags):
            continue
        pos = _noisy_pos(sent, g, rng, gen.past)
        toy.append(Sentence.from_forms(sent.id, sent.forms, pos, sent.gold_tags,
                                       best_triples(res)))
    if verbose:
        print(f"toy: kept {len(toy)} of {tries} sampled sentences")

    stress = []
    tries = 0
    while len(stress) < n_stress:
        tries += 1
        words = gen.sentence(long=True)
        if not 14 <= len(words) <= 24:
            continue
        sid = f"s{len(stress):02d}"
        sent = _realize(sid, words, rng, gen.past)
        oracle = PruneConfig("supertag", ExternalPredictions.from_tags([sent]))
        res = parse(g, sent, oracle, Budget())
        best = select_best(res)
        if best is None:
            continue
        if [e.lextype for e in best.lexical_edges()] != list(sent.gold_tags):
            continue
        pos = _noisy_pos(sent, g, rng, gen.past)
        stress.append(Sentence.from_forms(sid, sent.forms, pos, sent.gold_tags,
                                          best_triples(res)))
        if verbose:
            print(f"stress {sid}: {len(sent)} tokens, oracle edges "
                  f"{res.stats.total_edges}", flush=True)

    out.mkdir(parents=True, exist_ok=True)
    (out / "toy.grammar").write_text(text, encoding="utf-8")
    write_token_corpus(Corpus("toy", tuple(toy)), out / "toy_corpus.jsonl")
    write_token_corpus(Corpus("stress", tuple(stress)), out / "stress_corpus.jsonl")
    n_train = int(n_toy * 0.8)
    n_dev = int(n_toy * 0.1)
    manifest = {
        "seed": seed,
        "grammar": "toy.grammar",
        "corpora": {
            "toy": {"file": "toy_corpus.jsonl", "sentences": len(toy),
                    "tokens": sum(len(s) for s in toy),
                    "splits": f"train:0-{n_train - 1},dev:{n_train}-{n_train + n_dev - 1},"
                              f"test:{n_train + n_dev}-{n_toy - 1}"},
            "stress": {"file": "stress_corpus.jsonl", "sentences": len(stress),
                       "tokens": sum(len(s) for s in stress)},
        },
        "tags": sorted({t for s in toy for t in s.gold_tags}),
        "lexical_entries": sum(len(v) for v in g.lexicon.values()),
        "types": len(g.hierarchy),
        "rules": len(g.rules),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n",
                                       encoding="utf-8")
    if verbose:
        print(json.dumps({k: v for k, v in manifest.items() if k != "tags"}, indent=2))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--out", type=Path, default=ROOT.parent / "src/stparse/data")
    ap.add_argument("--toy", type=int, default=600)
    ap.add_argument("--stress", type=int, default=30)
    args = ap.parse_args(argv)
    build(args.out, args.seed, args.toy, args.stress)


if __name__ == "__main__":
    main()
