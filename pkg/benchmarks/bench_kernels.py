"""Time each hot kernel in its numba and numpy flavours.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1]

Both flavours are called directly, so RULED_DISABLE_NUMBA does not matter
here. The first numba call (compilation) is excluded from the timings.
"""
import argparse
import timeit

import numpy as np

from ruledsurf import _accel
from ruledsurf._kernels import IMPLEMENTATIONS, N_INVARIANTS


def cases(scale, rng):
    n = 20000 * scale
    a, b, c, d = rng.normal(size=(4, n, 4))
    inv = rng.normal(size=(200 * scale, N_INVARIANTS))
    inv[:, 0] = 1.0 + inv[:, 1] ** 2
    inv[:, 3] = np.abs(inv[:, 3]) + 0.1
    v = np.linspace(-0.5, 0.5, 200)
    m = 100 * scale
    U, V = np.meshgrid(np.linspace(0, 1, m), np.linspace(0, 1, m), indexing="ij")
    E, F, G = 1.0 + 0.3 * np.sin(U) * np.cos(V), 0.1 * U * V, 1.0 + 0.2 * V ** 2
    M = rng.normal(size=(2 * 5000 * scale + 1, 4, 4)) * 0.1
    z0 = rng.normal(size=4)
    return {
        "det4": (a, b, c, d),
        "ternary": (a, b, c, True),
        "forms_grid": (inv, np.cos(v), np.sin(v), 1.0),
        "brioschi_grid": (E, F, G, 1.0 / (m - 1), 1.0 / (m - 1)),
        "rk4_linear": (M, z0, 1e-3),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--scale", type=int, default=1)
    args = p.parse_args(argv)
    if not _accel.NUMBA_AVAILABLE:
        print("numba is not installed; both columns time the numpy kernels")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<15}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call_args in cases(args.scale, rng).items():
        times = {}
        for flavour in ("numpy", "numba"):
            fn = IMPLEMENTATIONS[flavour][name]
            fn(*call_args)  # warm up / compile
            best = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
            times[flavour] = best * 1e3
        print(f"{name:<15}{times['numpy']:>12.3f}{times['numba']:>12.3f}{times['numpy'] / times['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
