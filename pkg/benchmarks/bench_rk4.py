"""Time the compiled RK4 kernel against the pure-Python one.

    python3 benchmarks/bench_rk4.py [--steps N] [--repeat R]

Both backends integrate the lifted worked-example system (six states, two
inputs) under a switched control and must return bit-identical trajectories.
"""

from __future__ import annotations

import argparse
import statistics
import time
from pathlib import Path

from mechquot.simulate import BACKENDS, ControlSignal, integrate
from mechquot.systemfile import load_system

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "worked_example.yaml"


def timed(system, x0, u, t_end, dt, backend, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        traj = integrate(system, x0, u, t_end, dt, backend)
        runs.append(time.perf_counter() - start)
    return traj, statistics.median(runs)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    sf = load_system(FIXTURE)
    sc = sf.scenarios["tau_switched"]
    dt = 1e-4
    t_end = args.steps * dt
    u = ControlSignal([0.0, t_end / 2], [[1.0, -0.5], [-1.0, 0.5]])

    results = {}
    for name in sorted(BACKENDS):
        results[name] = timed(sf.system, sc.x0, u, t_end, dt, name, args.repeat)
        print(f"{name:>9}: {results[name][1] * 1e3:9.2f} ms for {args.steps} steps (median of {args.repeat})")
    if "compiled" not in results:
        print("compiled backend not built; run `pip install -e . --no-build-isolation` with Cython available")
        return
    same = results["compiled"][0].states == results["python"][0].states
    print(f"speedup  : {results['python'][1] / results['compiled'][1]:.1f}x")
    print(f"identical: {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()
