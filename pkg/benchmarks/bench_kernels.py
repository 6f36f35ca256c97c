"""Compare the compiled and numpy kernels on hull-sized and width-sized inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from quasihull import _pykernels

try:
    from quasihull import _ckernels
except ImportError:  # extension not built
    _ckernels = None

FORM22 = np.diag([-1.0, -1.0, 1.0, 1.0])


def null_vectors(n, rng):
    # lifts of random points of Ein^{1,1}: rank-one 2x2 matrices as 4-vectors
    a, b = rng.uniform(-np.pi, np.pi, (2, n))
    u = np.stack([np.sin(a / 2), np.cos(a / 2)], axis=1)
    k = np.stack([np.cos(b / 2), -np.sin(b / 2)], axis=1)
    m = u[:, :, None] * k[:, None, :]
    v = np.stack([(m[:, 0, 0] + m[:, 1, 1]) / 2, (m[:, 1, 0] - m[:, 0, 1]) / 2,
                  (m[:, 1, 1] - m[:, 0, 0]) / 2, (m[:, 0, 1] + m[:, 1, 0]) / 2], axis=1)
    return v / np.linalg.norm(v, axis=1)[:, None]


def timelike_cloud(n, rng):
    x = rng.normal(size=(n, 4))
    x[:, :2] *= 3.0
    return x


def bench(name, func, repeat):
    t = min(timeit.repeat(func, number=1, repeat=repeat))
    return name, t


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    cases = []
    for n in (8, 16, 32):
        v = null_vectors(n, rng)
        cases.append((f"support_planes n={n}", lambda mod, v=v: mod.support_planes(v, 1e-9)))
    for n in (91, 400):
        a, b = timelike_cloud(n, rng), timelike_cloud(n, rng)
        cases.append((f"min_pairing {n}x{n}", lambda mod, a=a, b=b: mod.min_pairing(a, b, FORM22)))
    print(f"{'kernel':28s} {'numpy [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, call in cases:
        _, tp = bench(name, lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:28s} {tp * 1e3:12.3f} {'n/a':>12s} {'':>8s}")
            continue
        _, tc = bench(name, lambda: call(_ckernels), args.repeat)
        print(f"{name:28s} {tp * 1e3:12.3f} {tc * 1e3:12.3f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
