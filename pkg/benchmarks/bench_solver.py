"""Compare the compiled contact solver against the numpy fallback.

    python3 benchmarks/bench_solver.py [--steps N] [--full-run]

Both backends advance the same control scenario for ``--steps`` steps and the
resulting positions are checked for bit equality.  ``--full-run`` also times a
complete evacuation per backend (the fallback takes tens of seconds).
"""

import argparse
import time

import numpy as np

from evacsim.engine import init_state, run, step
from evacsim.physics import BACKEND
from evacsim.scenarios import preset


def _advance(backend, steps, seed):
    sc = preset("control", seed)
    st = init_state(sc)
    t0 = time.perf_counter()
    for _ in range(steps):
        step(st, sc, backend=backend)
    return time.perf_counter() - t0, st


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--full-run", action="store_true")
    args = ap.parse_args()

    if BACKEND != "compiled":
        raise SystemExit("compiled extension not built; run pip install --no-build-isolation -e .")

    print(f"control preset, seed {args.seed}, first {args.steps} steps")
    results, times = {}, {}
    for backend in ("compiled", "python"):
        dt, st = _advance(backend, args.steps, args.seed)
        results[backend], times[backend] = st, dt
        print(f"  {backend:9s} {dt:8.3f} s  ({1e3 * dt / args.steps:.1f} ms/step)")
    a, b = results["compiled"], results["python"]
    same = np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    print(f"  positions bit-identical: {same}")
    print(f"  speedup: {times['python'] / times['compiled']:.1f}x")

    if args.full_run:
        print("full evacuation")
        for backend in ("compiled", "python"):
            t0 = time.perf_counter()
            tr = run(preset("control", args.seed), backend=backend)
            print(f"  {backend:9s} {time.perf_counter() - t0:8.2f} s  "
                  f"evacuated at step {tr.final_step}")


if __name__ == "__main__":
    main()
