"""Time the exchange and circuit scans under each kernel backend.

Tables come from random integer matrices, so every scan runs to the end
without an early exit.  Compilation time is excluded by a warm-up call.

    python3 benchmarks/bench_kernels.py --sizes 8:3 10:4 12:5 --repeat 5
"""

import argparse
import random
import time

from tropbuild import _kernels as K
from tropbuild import samples
from tropbuild.troplin import Embedding, project_pi
from tropbuild.valfield import FieldSpec
from tropbuild.valmatroid import from_matrix


def _table(rng, n1, k):
    """A realizable table and a member point, so both scans run to the end."""
    spec = FieldSpec.padic(2)
    f = samples.matrix(rng, spec, k, n1, zero_rate=0.0)
    x = samples.seminorm(rng, spec, k, inf_rate=0.0)
    return from_matrix(f), project_pi(Embedding(f), x)


def _time(fn, repeat):
    fn()  # warm-up, includes any compilation
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["8:3", "10:4", "12:5"],
                    help="ground-set size and rank pairs, n1:k")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--backends", nargs="+", default=["numba", "numpy", "python"])
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    backends = [b for b in args.backends if b != "numba" or K.HAVE_NUMBA]

    print(f"{'scan':<9}{'n1':>4}{'k':>3}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for spec in args.sizes:
        n1, k = (int(a) for a in spec.split(":"))
        v, u = _table(rng, n1, k)
        vals = list(v.values)
        for scan, call in (
            ("plucker", lambda b: K.plucker_violation(vals, n1, k, backend=b)),
            ("circuit", lambda b: K.circuit_violation(vals, list(u), n1, k, backend=b)),
        ):
            results = {b: call(b) for b in backends}
            if len({repr(r) for r in results.values()}) != 1:
                raise SystemExit(f"backends disagree on {scan} n1={n1} k={k}: {results}")
            times = {b: _time(lambda b=b: call(b), args.repeat) for b in backends}
            ref = times.get("python") or times.get("numpy")
            fastest = min(times.values())
            print(f"{scan:<9}{n1:>4}{k:>3}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
                  + f"{ref / fastest:>9.1f}x")


if __name__ == "__main__":
    main()
