import os
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from lineleaf import _accel
from lineleaf.oracle_opt import opt_height_par, opt_table


def test_env_flag_disables_numba(monkeypatch):
    monkeypatch.setenv("LINELEAF_NUMBA", "0")
    assert not _accel.numba_enabled()
    monkeypatch.setenv("LINELEAF_NUMBA", "1")
    assert _accel.numba_enabled() == _accel.HAVE_NUMBA


def test_fallback_selected_by_flag(monkeypatch):
    par = np.array([-1, 0, 0, 1, 1, 2], dtype=np.int64)
    monkeypatch.setenv("LINELEAF_NUMBA", "0")
    a = opt_height_par(par)
    monkeypatch.setenv("LINELEAF_NUMBA", "1")
    assert opt_height_par(par) == a


def test_python_original_is_kept():
    assert callable(_accel.njit(lambda x: x + 1).py_func)


def test_fresh_process_without_numba_agrees():
    code = ("from lineleaf.oracle_opt import opt_height_par;"
            "print(opt_height_par([-1,0,1,2,3,4,5,6,0,8]))")
    env = dict(os.environ, LINELEAF_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert int(out.stdout) == opt_height_par([-1, 0, 1, 2, 3, 4, 5, 6, 0, 8])


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba missing")
def test_kernel_benchmark():
    rng = random.Random(0)
    par = np.array([-1] + [rng.randrange(i) for i in range(1, 16)], dtype=np.int64)
    opt_table(par, use_numba=True)
    times = {}
    for flag in (False, True):
        t = time.perf_counter()
        f = opt_table(par, use_numba=flag)
        times[flag] = time.perf_counter() - t
        times[("table", flag)] = f
    assert np.array_equal(times[("table", False)], times[("table", True)])
    print(f"opt table n=16: numpy {1e3 * times[False]:.1f} ms, numba {1e3 * times[True]:.1f} ms")
