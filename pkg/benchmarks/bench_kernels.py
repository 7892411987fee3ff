"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is warmed once (so numba compile time is excluded) and then
timed on a workload typical of the library's hot paths.
"""
import argparse
import time

import numpy as np

from rankone import harmonic, kernels
from rankone.orbits import _inverse_index, modular_spec


def _workloads():
    rng = np.random.default_rng(0)
    spec = modular_spec()
    gens = np.array([g.as_float().ravel() for g in spec.generators])
    G = gens.shape[0]
    cur = rng.normal(size=(20000, 9))
    last = rng.integers(-1, G, size=20000).astype(np.int64)
    inv = np.array([_inverse_index(spec, j) for j in range(G)], np.int64)
    ref = rng.normal(size=(50000, 9))
    cand = np.vstack([ref[:20000] + 1e-13, rng.normal(size=(30000, 9))])
    proj = rng.normal(size=9)
    ts = np.linspace(0, 30, 200)
    xr, xi = np.full(ts.shape, 0.6), np.full(ts.shape, 0.2)
    gx, gw, tx, tw = harmonic._GX, harmonic._GW, harmonic._TX, harmonic._TW
    return {
        "expand_float": lambda k: k.expand_float(cur, gens, 3, 1e6, last, inv),
        "dedup_float": lambda k: k.dedup_float(ref, cand, proj, 1e-9),
        "kint_real": lambda k: k.kint_real(xr, xi, ts, 1.0, 0.5, gx, gw),
        "kint_complex": lambda k: k.kint_complex(xr, xi, ts, 2.0, 1.0, gx, gw, tx, tw),
        "free_return_logprobs": lambda k: k.free_return_logprobs(2, 5000),
        "lattice_return_logprobs": lambda k: k.lattice_return_logprobs(2, 150),
    }


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    npy, nb = kernels.backend("numpy"), kernels.backend("numba")
    print(f"{'kernel':<26}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, work in _workloads().items():
        a = _best(lambda: work(npy), args.repeat)
        b = _best(lambda: work(nb), args.repeat)
        print(f"{name:<26}{a:>12.4f}{b:>12.4f}{a / b:>10.1f}")


if __name__ == "__main__":
    main()
