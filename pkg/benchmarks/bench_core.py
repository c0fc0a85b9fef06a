"""Compare the compiled and pure-Python finite-field kernels.

    python3 benchmarks/bench_core.py [--repeat 3] [--quick]

Each kernel runs on identical inputs in both backends; outputs are compared
before timings are reported.
"""

import argparse
import time

import numpy as np

from skewbiext._core import backends
from skewbiext.gf import make_field


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(quick):
    rng = np.random.default_rng(0)
    K = make_field(5, 26)
    rows = 2000 if quick else 20000
    X = rng.integers(0, 5, (rows, 26))
    Y = rng.integers(0, 5, (rows, 26))
    mod = np.array(K.modulus)
    yield "batch_mulmod F_5^26", lambda b: b.batch_mulmod(X, Y, mod, 5)
    M = rng.integers(0, 7, (60, 60))
    yield "rref_mod 60x60 F_7", lambda b: b.rref_mod(M, 7)[0]
    a = tuple(int(v) for v in X[0])
    c = tuple(int(v) for v in Y[0])
    yield "mulmod x1000 F_5^26", lambda b: [b.mulmod(a, c, mod, 5) for _ in range(1000)][-1]
    D = 4 if quick else 6
    q = rng.integers(0, 5, 5 ** D)
    G = rng.integers(0, 5, (D, D))
    yield f"polar_defects 5^{D}", lambda b: b.polar_defects(q, 5, D, G)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    bk = backends()
    names = sorted(bk, key=lambda n: n != "cython")
    print(f"{'kernel':<24}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fn in cases(args.quick):
        times, outs = [], []
        for n in names:
            t, out = _best(lambda: fn(bk[n]), args.repeat)
            times.append(t)
            outs.append(out)
        for o in outs[1:]:
            if not np.array_equal(np.asarray(o), np.asarray(outs[0])):
                raise SystemExit(f"{label}: backends disagree")
        speed = f"{times[-1] / times[0]:.1f}x" if len(times) > 1 else "-"
        print(f"{label:<24}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + f"{speed:>10}")


if __name__ == "__main__":
    main()
