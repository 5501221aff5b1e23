"""Compiled vs pure-Python elimination kernel.

Runs each kernel on random sparse matrices, then times a full pipeline in a
subprocess with and without ``GFORGE_PURE_PYTHON``.

    python3 benchmarks/bench_kernel.py [--size 300] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time
from pathlib import Path

from gforge import _kernel_py

try:
    from gforge import _kernel
except ImportError:
    _kernel = None

PRIME = 2147483629
FIXTURE = Path(__file__).resolve().parents[1] / "src" / "gforge" / "fixtures" / "example53.json"


def random_columns(n: int, density: float, rng: random.Random) -> list:
    return [{i: rng.randrange(-50, 50) for i in range(n) if rng.random() < density} for _ in range(n)]


def random_sparse_rows(n: int, density: float, rng: random.Random) -> list:
    """Rows in echelon-ready form for ``reduce_vector``: pivot entry 1 at the smallest key."""
    basis = {}
    for k in range(0, n, 2):
        row = {k: 1}
        row.update({j: rng.randrange(1, 50) for j in range(k + 1, n) if rng.random() < density})
        basis[k] = row
    return basis


def best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_kernels(size: int, repeat: int) -> None:
    rng = random.Random(0)
    cols = random_columns(size, 0.05, rng)
    basis = random_sparse_rows(size, 0.05, rng)
    vecs = [{j: rng.randrange(1, 50) for j in range(size) if rng.random() < 0.1} for _ in range(50)]
    dense = [[rng.randrange(0, 97) for _ in range(size // 3)] for _ in range(size // 3)]

    cases = {
        "rank_mod": lambda k: k.rank_mod(cols, size, PRIME),
        "reduce_vector": lambda k: [k.reduce_vector(dict(v), basis) for v in vecs],
        "rref_mod": lambda k: k.rref_mod(dense, size // 3, 97),
    }
    print(f"{'kernel':<14}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, fn in cases.items():
        pure = best(lambda: fn(_kernel_py), repeat)
        if _kernel is None:
            print(f"{name:<14}{pure:>12.4f}{'n/a':>14}{'':>10}")
            continue
        assert fn(_kernel_py) == fn(_kernel), name
        comp = best(lambda: fn(_kernel), repeat)
        print(f"{name:<14}{pure:>12.4f}{comp:>14.4f}{pure / comp:>9.1f}x")


def bench_pipeline(repeat: int) -> None:
    cmd = [sys.executable, "-m", "gforge.cli", "nakayama", str(FIXTURE), "--oracle"]
    out = {}
    for label, extra in (("pure", {"GFORGE_PURE_PYTHON": "1"}), ("compiled", {})):
        env = {k: v for k, v in os.environ.items() if k != "GFORGE_PURE_PYTHON"}
        env.update(extra)
        res = []

        def once():
            res.append(subprocess.run(cmd, env=env, capture_output=True, check=True).stdout)

        out[label] = (best(once, repeat), res[-1])
    same = out["pure"][1] == out["compiled"][1]
    print(f"pipeline (nakayama --oracle on {FIXTURE.name}): pure {out['pure'][0]:.2f}s, "
          f"compiled {out['compiled'][0]:.2f}s, identical reports: {same}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-pipeline", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.size, args.repeat)
    if not args.skip_pipeline:
        bench_pipeline(args.repeat)


if __name__ == "__main__":
    main()
