#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Both backends run on identical random inputs; the script also checks that
their outputs agree before reporting timings.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from stparse.kernels import LOSS_LOGISTIC, REG_L1, available_backends


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def crf_inputs(rng, n_sent=200, length=25, T=40):
    sents = [rng.normal(size=(length, T)) for _ in range(n_sent)]
    trans = rng.normal(size=(T, T))
    start = rng.normal(size=T)
    end = rng.normal(size=T)
    return sents, trans, start, end


def sgd_inputs(rng, N=20000, F=5000, T=30, nnz=12):
    indptr = np.arange(0, (N + 1) * nnz, nnz, dtype=np.int64)
    # spread each row's ids apart so none repeats within a row
    base = rng.integers(0, F, size=(N, 1))
    indices = np.sort((base + np.arange(nnz) * (F // nnz)) % F, axis=1).reshape(-1)
    labels = rng.integers(0, T, size=N).astype(np.int64)
    order = rng.permutation(N).astype(np.int64)
    return F, T, indptr, indices.astype(np.int64), labels, order


def run(repeat: int, seed: int) -> list[tuple[str, float, float]]:
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the fallback is available",
              file=sys.stderr)
    rng = np.random.default_rng(seed)
    sents, trans, start, end = crf_inputs(rng)
    F, T, indptr, indices, labels, order = sgd_inputs(rng)

    rows = []
    timings = {}
    for name, mod in backends.items():
        def vit():
            return [mod.viterbi(e, trans, start, end) for e in sents]

        def fb():
            return [mod.forward_backward(e, trans, start, end) for e in sents]

        def sgd():
            W = np.zeros((F, T))
            b = np.zeros(T)
            Q = np.zeros((F, T))
            mod.sgd_epoch(W, b, Q, indptr, indices, labels, order, 0.1,
                          LOSS_LOGISTIC, False, REG_L1, 1e-5, 1.0, 0.0)
            return W

        timings[name] = {"viterbi": _time(vit, repeat),
                         "forward_backward": _time(fb, repeat),
                         "sgd_epoch": _time(sgd, max(1, repeat // 2))}
        timings[name]["_out"] = (vit(), fb(), sgd())

    if "cython" in timings:
        py, cy = timings["python"]["_out"], timings["cython"]["_out"]
        for a, b in zip(py[0], cy[0]):
            assert np.array_equal(a, b), "viterbi paths differ between backends"
        for (za, ma, _), (zb, mb, _) in zip(py[1], cy[1]):
            assert abs(za - zb) < 1e-8 and np.allclose(ma, mb)
        assert np.allclose(py[2], cy[2], atol=1e-8)

    for kernel in ("viterbi", "forward_backward", "sgd_epoch"):
        p = timings["python"][kernel]
        c = timings.get("cython", {}).get(kernel, float("nan"))
        rows.append((kernel, p, c))
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rows = run(args.repeat, args.seed)
    print(f"{'kernel':<18}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for kernel, p, c in rows:
        print(f"{kernel:<18}{p:>12.4f}{c:>12.4f}{p / c:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
