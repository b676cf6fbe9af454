"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

The first numba call of each kernel is a compile and is excluded.
"""

import argparse
import time

import numpy as np

from kreinpair.kernels import _numba, _numpy
from kreinpair.linalg import QL_MAX_ITER, QR_MAX_ITER


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _cases(n, rng):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    herm = (X + X.conj().T) / np.sqrt(2 * n)
    gen = X / np.sqrt(2 * n)
    H, _ = _numpy.hessenberg(gen)
    d, e, Q = _numpy.hermitian_tridiagonal(herm)
    nodes = 64
    theta = 2 * np.pi * (np.arange(nodes) + 0.5) / nodes
    z = 0.5 * np.exp(1j * theta)
    mus = 0.3 + z
    wts = z / nodes
    B = np.eye(n, dtype=np.complex128)
    return {
        "tridiagonal_ql": lambda mod: mod.tridiagonal_ql(d.copy(), e.copy(), Q.copy(), QL_MAX_ITER),
        "hessenberg_qr_eigvals": lambda mod: mod.hessenberg_qr_eigvals(H.copy(), QR_MAX_ITER),
        "hessenberg_resolvent_sum": lambda mod: mod.hessenberg_resolvent_sum(H, n - 1, mus, wts, B, False),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':26s} {'n':>5s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for n in args.sizes:
        for name, call in _cases(n, rng).items():
            call(_numba)
            t_nb = _best(lambda: call(_numba), args.repeat)
            t_np = _best(lambda: call(_numpy), max(1, args.repeat // 2))
            print(f"{name:26s} {n:5d} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
