"""Compare the compiled C kernel with the numpy fallback.

Times batch evaluation of the Kerr Ricci components (a large shared DAG)
and of a small scalar expression, over a range of point counts, and checks
that the two backends agree.

    python3 benchmarks/bench_vm.py [--points 1000 10000 100000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from axired import catalog as K
from axired import symexpr as S
from axired.geometry import ricci


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    kerr = K.kerr(1.0, 0.5)
    comps = [c for c in set(ricci(kerr.metric).components.ravel()) if c is not S.ZERO]
    yield "Kerr Ricci", S.Program(comps), kerr.chart
    small = S.parse("sin(r)^2*exp(-r^2) + cos(theta)/r")
    yield "small scalar", S.Program([small]), kerr.chart.restrict(("r", "theta"))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    backends = S.available_backends()
    if "c" not in backends:
        print("C kernel not built; only the numpy fallback is available")
    print(f"{'workload':<14} {'nodes':>7} {'points':>8} " +
          " ".join(f"{b + ' [ms]':>12}" for b in backends) + f" {'speedup':>8} {'max|diff|':>10}")
    for name, prog, chart in workloads():
        for n in args.points:
            pts = chart.sample(n, 42)
            inputs = {v: pts[v] for v in prog.variables}
            times, vals = {}, {}
            for b in backends:
                vals[b] = prog(inputs, backend=b)
                times[b] = best_time(lambda b=b: prog(inputs, backend=b), args.repeat)
            diff = max(float(np.max(np.abs(vals[b] - vals["python"]))) for b in backends)
            speed = times["python"] / times["c"] if "c" in times else 1.0
            print(f"{name:<14} {S.dag_size(*prog.exprs):>7} {n:>8} "
                  + " ".join(f"{times[b] * 1e3:>12.2f}" for b in backends)
                  + f" {speed:>8.1f} {diff:>10.1e}")


if __name__ == "__main__":
    main()
