"""Compare the compiled and pure-Python optimizer kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Times the raw bound evaluation, one epsilon-share search, and a full
critical-N search (which swaps the active backend in place).
"""
import argparse
import time
import timeit

from finikey import ProtocolSpec, _kernels, _pykernels, critical_n

BOUND_ARGS = (500_000, 500_000, 0.01, 0, 0.5, 2, 1e-3, 1e-3, 1e-3, 1e-3, 1.2)
SHARE_ARGS = (500_000, 500_000, 0.01, 0, 0.5, 2, 1, 4e-3, 1.2, 1e-3)


def _use(backend):
    _kernels.bound_bits = backend.bound_bits
    _kernels.optimize_shares = backend.optimize_shares


def bench(backend, repeat):
    bound = min(timeit.repeat(lambda: backend.bound_bits(*BOUND_ARGS), number=20000, repeat=repeat)) / 20000
    shares = min(timeit.repeat(lambda: backend.optimize_shares(*SHARE_ARGS), number=50, repeat=repeat)) / 50
    _use(backend)
    t0 = time.perf_counter()
    n_star = critical_n(0.01, 4e-3, ProtocolSpec(), 1.2)
    crit = time.perf_counter() - t0
    return bound, shares, crit, n_star


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = [("python", _pykernels)]
    if _kernels.compiled_kernels is not None:
        backends.append(("cython", _kernels.compiled_kernels))
    else:
        print("compiled kernel not available; timing pure Python only")
    original = _kernels.kernels
    rows = []
    try:
        for name, backend in backends:
            rows.append((name, *bench(backend, args.repeat)))
    finally:
        _use(original)
    print(f"{'backend':8} {'bound_bits':>12} {'share search':>14} {'critical_n':>12}  N*")
    for name, bound, shares, crit, n_star in rows:
        print(f"{name:8} {bound * 1e6:10.2f}us {shares * 1e3:12.3f}ms {crit:11.3f}s  {n_star}")
    if len(rows) == 2:
        py, cy = rows
        print(f"speedup: bound {py[1] / cy[1]:.0f}x, share search {py[2] / cy[2]:.0f}x, critical_n {py[3] / cy[3]:.0f}x")
        assert py[4] == cy[4], "backends disagree on critical N"


if __name__ == "__main__":
    main()
