"""Compare the compiled and numpy kernels on the trajectory hot path.

    python3 benchmarks/bench_kernels.py --states 50 --steps 4000

Prints the best-of-N wall time per backend, the per-point cost and the
largest disagreement between backends.
"""
import argparse
import time

import numpy as np

from nmcorr._backend import available_backends
from nmcorr.channels import GadParams, gad_kraus_stack
from nmcorr.qlinalg import haar_random_amplitudes


def best_time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--states", type=int, default=50)
    ap.add_argument("--steps", type=int, default=4000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--no-concurrence", action="store_true")
    args = ap.parse_args(argv)

    kraus = gad_kraus_stack(np.linspace(0, 1, args.steps + 1), GadParams())
    psi = haar_random_amplitudes(args.states, 4, np.random.default_rng(0))
    points = args.states * (args.steps + 1)
    with_c = not args.no_concurrence

    results = {}
    for name, mod in sorted(available_backends().items()):
        secs, out = best_time(lambda: mod.sa_quantities(kraus, psi, with_c), args.repeats)
        results[name] = (secs, out)
        print(f"{name:9s} {secs:8.3f} s  {1e6 * secs / points:7.2f} us/point  ({points} points)")

    if len(results) == 2:
        (tc, qc), (tp, qp) = results["compiled"], results["python"]
        cols = slice(None) if with_c else slice(0, 3)
        print(f"speedup   {tp / tc:8.2f}x")
        print(f"max |diff| {np.max(np.abs(qc[..., cols] - qp[..., cols])):.2e}")
    else:
        print("compiled extension not available; build with `python3 setup.py build_ext --inplace`")


if __name__ == "__main__":
    main()
