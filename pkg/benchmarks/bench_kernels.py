"""Compare the compiled and numpy kernels on synthetic instances.

    python3 benchmarks/bench_kernels.py [--repeats N] [--sizes 16,64,256]

Reports evaluations per second for each backend and instance size, and
checks that both backends agree bit for bit on every genotype they see.
"""

import argparse
import sys
import time

import numpy as np

from wiremask import GridSpec, evaluate, order_macros
from wiremask.kernels import backends
from wiremask.optimizers import random_genotype
from wiremask.synth import random_netlist

# (macros, nets, partitions) per size label
SIZES = {16: (16, 48, 32), 64: (64, 200, 96), 256: (256, 800, 160)}


def bench(netlist, grid, order, impl, genotypes):
    out = []
    t0 = time.perf_counter()
    for g in genotypes:
        out.append(evaluate(g, netlist, grid, order, backend=impl))
    return time.perf_counter() - t0, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=20, help="genotypes per size")
    ap.add_argument("--sizes", default="16,64,256")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    impls = backends()
    if "compiled" not in impls:
        print("compiled backend is not built; only the numpy kernels are timed", file=sys.stderr)
    print(f"{'macros':>6} {'nets':>5} {'m':>4} " + " ".join(f"{n + ' ev/s':>14}" for n in impls)
          + f" {'speedup':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        k, n, m = SIZES.get(size, (size, 3 * size, 128))
        rng = np.random.default_rng([args.seed, size])
        nl = random_netlist(rng, k, n, canvas=(1000.0, 1000.0), side=(0.01, 0.06), n_fixed=8)
        grid = GridSpec.for_netlist(nl, m)
        order = order_macros(nl)
        genotypes = [random_genotype(nl, rng) for _ in range(args.repeats)]
        rates, results = {}, {}
        for name, impl in impls.items():
            evaluate(genotypes[0], nl, grid, order, backend=impl)  # warm caches
            dt, res = bench(nl, grid, order, impl, genotypes)
            rates[name] = args.repeats / dt
            results[name] = res
        if len(results) == 2:
            for a, b in zip(results["python"], results["compiled"]):
                if not (np.array_equal(a.anchors, b.anchors) and a.increments.tobytes() == b.increments.tobytes()):
                    print("backends disagree", file=sys.stderr)
                    return 1
        speed = rates.get("compiled", float("nan")) / rates["python"]
        print(f"{k:>6} {n:>5} {m:>4} " + " ".join(f"{rates[x]:>14.1f}" for x in impls) + f" {speed:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
