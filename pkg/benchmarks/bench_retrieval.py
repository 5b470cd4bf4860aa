"""Benchmark the retrieval scoring kernel: numba @njit vs numpy fallback.

Run both paths in-process (the numba path is skipped automatically when
GWPAIR_NO_NUMBA=1):

    python3 benchmarks/bench_retrieval.py --items 100000 --dim 64 --repeat 50
"""

import argparse
import time

import numpy as np

from gwpair._kernels import (
    _blended_scores_numpy,
    active_impl,
    blended_scores,
)


def bench(fn, embeddings, query, tags, lam, repeat):
    fn(embeddings, query, tags, lam)  # warm-up (jit compile / cache fill)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(embeddings, query, tags, lam)
    return (time.perf_counter() - start) / repeat


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--items", type=int, default=100_000)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=50)
    parser.add_argument("--lam", type=float, default=0.3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    embeddings = rng.standard_normal((args.items, args.dim))
    query = rng.standard_normal(args.dim)
    tags = rng.random(args.items)

    numpy_s = bench(_blended_scores_numpy, embeddings, query, tags, args.lam, args.repeat)
    print(f"numpy fallback : {numpy_s * 1e3:8.3f} ms/call")

    if active_impl() == "numba":
        numba_s = bench(blended_scores, embeddings, query, tags, args.lam, args.repeat)
        print(f"numba @njit    : {numba_s * 1e3:8.3f} ms/call")
        print(f"speedup        : {numpy_s / numba_s:8.2f}x")
        fast = blended_scores(embeddings, query, tags, args.lam)
        slow = _blended_scores_numpy(embeddings, query, tags, args.lam)
        assert np.allclose(fast, slow, atol=1e-12), "kernel mismatch"
        print("outputs identical within 1e-12")
    else:
        print("numba path disabled (GWPAIR_NO_NUMBA=1 or numba missing)")


if __name__ == "__main__":
    main()
