"""Benchmark the radial integrator with and without the compiled kernel.

Run directly for a single timing of the active kernel, or with
``--compare`` to spawn both variants (the pure-python fallback is
selected via PENNINGRYD_DISABLE_NUMBA=1) and print them side by side:

    python3 benchmarks/bench_numerov.py --compare
"""

import argparse
import os
import subprocess
import sys
import time


def solve_set(repeats: int) -> tuple[float, int]:
    from penningryd import _numerov
    from penningryd.radial import make_grid, solve_bound_state
    from penningryd.species import load_bundled

    species = load_bundled("ca40")
    grid = make_grid(species, 45)
    cases = [(45, 0, 0.5), (45, 1, 1.5), (44, 2, 2.5), (43, 4, 4.5), (43, 5, 5.5)]
    # warm up so jit compilation is not billed to the timing
    solve_bound_state(species, 45, 0, 0.5, grid=grid)
    t0 = time.perf_counter()
    for _ in range(repeats):
        for n, l, j in cases:
            solve_bound_state(species, n, l, j, grid=grid)
    elapsed = time.perf_counter() - t0
    n_solves = repeats * len(cases)
    label = "numba" if _numerov.NUMBA_ENABLED else "pure python"
    print(f"{label:>12}: {n_solves} bound states in {elapsed:.2f} s "
          f"({1e3 * elapsed / n_solves:.1f} ms/state)")
    return elapsed, n_solves


def compare(repeats: int) -> None:
    for disable in ("0", "1"):
        env = dict(os.environ, PENNINGRYD_DISABLE_NUMBA=disable)
        subprocess.run(
            [sys.executable, __file__, "--repeats", str(repeats)],
            env=env,
            check=True,
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=4)
    parser.add_argument("--compare", action="store_true")
    args = parser.parse_args()
    if args.compare:
        compare(args.repeats)
    else:
        solve_set(args.repeats)


if __name__ == "__main__":
    main()
