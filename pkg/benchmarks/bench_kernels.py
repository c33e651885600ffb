"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are run on the same inputs and their outputs compared before
any timing is reported.  The numba figures exclude compilation (one warm-up
call per kernel).
"""
import argparse
import time

import numpy as np

from dmcat import kernels
from dmcat.instances.groupoids import gen_groupoid_site
from dmcat.instances.heyting import poset_category
from dmcat.instances.lattices import boolean, chain
from dmcat.instances.walking import gen_walking
from dmcat.cauchy import karoubi_envelope


def cases():
    yield poset_category(*chain(6), name="chain6")
    yield poset_category(*boolean(3), name="boolean3")
    yield poset_category(*boolean(4), name="boolean4")
    yield karoubi_envelope(gen_walking("retract"))[0]
    yield gen_groupoid_site(["Z2"], close="once", name="z2-paths").bundle.cat


def workloads(cat):
    ms = np.arange(cat.n_mor)
    pairs = [(f, g) for f in range(cat.n_mor) for g in range(cat.n_mor)
             if cat.dst[f] == cat.dst[g]]
    return {
        "lift_table": lambda nb: kernels.lift_table(cat, ms, ms, use_numba=nb),
        "retract_table": lambda nb: kernels.retract_table(cat, ms, ms, use_numba=nb),
        "pullbacks": lambda nb: [kernels.pullback_search(cat, f, g, use_numba=nb) for f, g in pairs],
    }


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'category':<26}{'mors':>6}  {'kernel':<14}{'numpy s':>10}{'numba s':>10}{'speedup':>9}")
    for cat in cases():
        for name, run in workloads(cat).items():
            a, b = run(False), run(True)
            same = (np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b)
            if not same:
                raise SystemExit(f"backends disagree on {name} for {cat.name}")
            t_np = best(lambda: run(False), args.repeat)
            t_nb = best(lambda: run(True), args.repeat)
            print(f"{cat.name:<26}{cat.n_mor:>6}  {name:<14}{t_np:>10.4f}{t_nb:>10.4f}"
                  f"{t_np / max(t_nb, 1e-9):>8.1f}x")


if __name__ == "__main__":
    main()
