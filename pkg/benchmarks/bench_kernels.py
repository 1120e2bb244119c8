"""Compare the numba and pure-numpy kernel paths.

Run:  python3 benchmarks/bench_kernels.py
The numpy path is what you get with SIZERAMSEY_NO_NUMBA=1; this script loads
both implementations side by side and times the three hot kernels plus one
end-to-end workload (exhaustive arrowing of K6 -> K3).
"""

import importlib
import os
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))


def _load_backends():
    os.environ["SIZERAMSEY_NO_NUMBA"] = "1"
    import sizeramsey._kernels as knp
    importlib.reload(knp)
    numpy_fns = (knp.popcount_rows, knp.build_adjacency, knp.arrow_scan)
    os.environ["SIZERAMSEY_NO_NUMBA"] = "0"
    importlib.reload(knp)
    numba_fns = (knp.popcount_rows, knp.build_adjacency, knp.arrow_scan)
    return {"numpy": numpy_fns, "numba" if knp.BACKEND == "numba"
            else "numpy(no numba available)": numba_fns}


def _time(fn, *args, repeat=5):
    fn(*args)  # warm-up (includes jit compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    words = rng.integers(0, 2 ** 63, size=(20_000, 64), dtype=np.int64) \
        .astype(np.uint64)
    n = 20_000
    m = 400_000
    us = rng.integers(0, n - 1, m).astype(np.int64)
    vs = (us + 1 + rng.integers(0, n - 2, m) % (n - 1 - us)).astype(np.int64)

    # arrowing workload: all triangles of K6 as edge masks, 2^14 colorings
    edges = [(u, v) for u in range(6) for v in range(u + 1, 6)]
    idx = {e: i for i, e in enumerate(edges)}
    masks = []
    for a in range(6):
        for b in range(a + 1, 6):
            for c in range(b + 1, 6):
                masks.append((1 << idx[(a, b)]) | (1 << idx[(a, c)])
                             | (1 << idx[(b, c)]))
    masks = np.asarray(masks, dtype=np.int64)

    backends = _load_backends()
    print(f"{'kernel':<18}" + "".join(f"{k:>16}" for k in backends))
    rows = [
        ("popcount_rows", lambda f: _time(f[0], words)),
        ("build_adjacency", lambda f: _time(f[1], n, us, vs)),
        ("arrow_scan(K6,K3)", lambda f: _time(f[2], masks, 15, 0, 1 << 14)),
    ]
    for name, runner in rows:
        cells = [runner(fns) for fns in backends.values()]
        print(f"{name:<18}" + "".join(f"{c * 1e3:>13.2f} ms" for c in cells))


if __name__ == "__main__":
    main()
