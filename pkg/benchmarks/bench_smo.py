"""Times the compiled and pure-Python SMO backends on feature-like datasets.

Run with ``python benchmarks/bench_smo.py``; both backends see the same Gram
matrices and their solutions are checked for bit-identity.
"""

import argparse
import statistics
import time

import numpy as np

from pirgait.svr import SvrParams, available_backends, get_solver, gram_matrix


def dataset(n, rng):
    # daily 25th-percentile durations against mean line speed
    v = rng.uniform(30, 110, n)
    x = 300.0 / v + rng.normal(0, 0.2, n)
    y = v + rng.normal(0, 3, n)
    z = (x - x.mean()) / x.std()
    return z, y


def time_solver(solve, K, y, p, tol, repeats):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = solve(K, y, p.C, p.epsilon, tol, 10_000 * len(y), False)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[25, 50, 100, 200, 400])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the Python backend only")
    p = SvrParams(C=10.0, gamma=1.0, epsilon=1.0)
    rng = np.random.default_rng(args.seed)

    print(f"{'n':>5} " + " ".join(f"{b + ' ms':>12}" for b in backends) + f" {'speedup':>8} {'iters':>6} identical")
    for n in args.sizes:
        z, y = dataset(n, rng)
        K = gram_matrix(z, z, "rbf", p.gamma)
        res = {b: time_solver(get_solver(b), K, y, p, args.tol, args.repeats) for b in backends}
        cols = " ".join(f"{res[b][0] * 1e3:12.2f}" for b in backends)
        if len(backends) == 2:
            a, b = res["cython"][1], res["python"][1]
            same = np.array_equal(a[0], b[0]) and a[1:5] == b[1:5]
            speed = f"{res['python'][0] / res['cython'][0]:8.1f}"
        else:
            same, speed = "n/a", f"{'n/a':>8}"
        print(f"{n:5d} {cols} {speed} {res[backends[0]][1][2]:6d} {same}")


if __name__ == "__main__":
    main()
