"""Time the OPT bitmask table with the compiled kernel and the numpy path.

    python3 benchmarks/bench_opt_kernel.py [n ...]
"""
import random
import sys
import time

import numpy as np

from lineleaf._accel import HAVE_NUMBA
from lineleaf.oracle_opt import opt_table


def timed(par, use_numba, reps=3):
    opt_table(par, use_numba)  # compile / warm caches
    best = float("inf")
    for _ in range(reps):
        t = time.perf_counter()
        f = opt_table(par, use_numba)
        best = min(best, time.perf_counter() - t)
    return best, f


def main(sizes):
    rng = random.Random(0)
    print("n,numpy_ms,numba_ms,speedup")
    for n in sizes:
        par = np.array([-1] + [rng.randrange(i) for i in range(1, n)], dtype=np.int64)
        t_np, f_np = timed(par, False)
        if HAVE_NUMBA:
            t_nb, f_nb = timed(par, True)
            assert np.array_equal(f_np, f_nb)
            print(f"{n},{1e3 * t_np:.2f},{1e3 * t_nb:.2f},{t_np / t_nb:.1f}")
        else:
            print(f"{n},{1e3 * t_np:.2f},,")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [10, 12, 14, 16, 18])
