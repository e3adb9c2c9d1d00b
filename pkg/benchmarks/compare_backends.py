"""Benchmark the numba kernels against the pure-numpy fallback.

Times three hot paths under both backends: the Hermitian eigensolver,
the batched qubit solver, and the grid oracle.  Run with

    python benchmarks/compare_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from csapprox import (QubitParams, b3_states, backend, bloch_expectations,
                      grid_oracle, qubit_from_params)
from csapprox.audit import _B3_BLOCH, solve_bloch_grid


def _random_hermitians(n, dim, rng):
    a = rng.standard_normal((n, dim, dim)) \
        + 1j * rng.standard_normal((n, dim, dim))
    return (a + a.conj().transpose(0, 2, 1)) / 2.0


def bench_eigh(n=2000, dim=4, repeat=3):
    rng = np.random.default_rng(7)
    mats = _random_hermitians(n, dim, rng)
    k = backend.get()
    k.eigh_herm(mats[0])  # warm any jit cache
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for m in mats:
            k.eigh_herm(m)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_batch_solve(n=500, repeat=3):
    rng = np.random.default_rng(11)
    params = [QubitParams(0.5 * rng.random(), rng.random(),
                          0.5 * np.pi * rng.random()) for _ in range(n)]
    targets = np.array([bloch_expectations(p) for p in params])
    solve_bloch_grid(targets[:2], _B3_BLOCH)  # warm
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        solve_bloch_grid(targets, _B3_BLOCH)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_oracle(resolution=60, repeat=3):
    rho = qubit_from_params(QubitParams(0.25, 1.0, 0.3))
    sset = b3_states()
    grid_oracle(rho, sset, 10)  # warm
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        grid_oracle(rho, sset, resolution)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rows = []
    for name in ("numba", "numpy"):
        try:
            backend.set_backend(name)
        except Exception as exc:
            print(f"skipping backend {name}: {exc}")
            continue
        rows.append((name,
                     bench_eigh(repeat=args.repeat),
                     bench_batch_solve(repeat=args.repeat),
                     bench_oracle(repeat=args.repeat)))

    print(f"{'backend':<8} {'eigh 2000x4x4':>14} {'solve 500 pts':>14} "
          f"{'oracle res 60':>14}")
    for name, t1, t2, t3 in rows:
        print(f"{name:<8} {t1:>13.4f}s {t2:>13.4f}s {t3:>13.4f}s")
    if len(rows) == 2:
        print("speedup  "
              + " ".join(f"{rows[1][i] / rows[0][i]:>13.2f}x"
                         for i in (1, 2, 3)))


if __name__ == "__main__":
    main()
