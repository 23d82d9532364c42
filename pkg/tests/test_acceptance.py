"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import math
import time

import pytest

from conftest import record_criterion
from lineleaf import llt_dynamic as dyn
from lineleaf import workbench as wb
from lineleaf.llt_build import build_static, height_bound, tree_metrics
from lineleaf.oracle_opt import opt_height_enum, opt_height_par, opt_lower_bound
from lineleaf.poset_core import HasseDiagram, Universe, edge_query_brute, edge_query_fast, rooted_shapes, star_universe
from lineleaf.poset_core import _tree_with


@pytest.fixture(scope="module")
def trace_run():
    """500 random mixed traces (M <= 24, <= 40 ops), every search path audited."""
    t = time.perf_counter()
    rep = wb.run_verify(wb.ExperimentConfig(samples=500, seed=2026), all_paths=True)
    return rep, time.perf_counter() - t


@pytest.fixture(scope="module")
def exhaustive_run():
    """All universe shapes with M <= 8, all member sets, all (x, y, u)."""
    queries = disagree = 0
    trees = 0
    profile_bad, rounds_bad = [], []
    q_time = 0.0
    t0 = time.perf_counter()
    for m in range(1, 9):
        for par in rooted_shapes(m):
            U = Universe(par)
            for r in range(m):
                for S in itertools.combinations(range(1, m), r):
                    H = HasseDiagram(U, (0,) + S)
                    mem = H.members()
                    tq = time.perf_counter()
                    for u in range(m):
                        adj = _tree_with(H, u)
                        for x, y in itertools.permutations(mem, 2):
                            queries += 1
                            if edge_query_fast(H, x, y, u) != edge_query_brute(H, x, y, u, adj):
                                disagree += 1
                    q_time += time.perf_counter() - tq
                    T = build_static(H)
                    trees += 1
                    T.audit()
                    if T.profile_violations():
                        profile_bad.append((par, S))
                    if not all(T.search_rounds_ok(u) for u in range(m)):
                        rounds_bad.append((par, S))
    return {
        "queries": queries, "disagree": disagree, "trees": trees, "profile_bad": profile_bad,
        "rounds_bad": rounds_bad, "query_time": q_time, "time": time.perf_counter() - t0,
    }


def test_criterion_1_rebuild_equivalence(trace_run):
    rep, secs = trace_run
    random_traces = rep.traces - len(dyn.CASE_COUNTERS)
    broken = [v for v in rep.violations if not v.startswith("coverage")]
    ok = random_traces >= 500 and not broken and rep.checks["rebuild"] > 0 and secs < 60
    record_criterion(1, ok, f"{random_traces} traces, {rep.ops} ops, {rep.checks['rebuild']} rebuild "
                            f"comparisons, {len(broken)} violations, {secs:.1f}s")
    assert ok, broken[:5]


def test_criterion_2_edge_query_oracle(exhaustive_run):
    r = exhaustive_run
    ok = r["disagree"] == 0 and r["queries"] > 2_000_000 and r["query_time"] < 120
    record_criterion(2, ok, f"{r['queries']} queries over M<=8, {r['disagree']} disagreements, "
                            f"{r['query_time']:.1f}s")
    assert ok


def test_criterion_3_audits(trace_run, exhaustive_run):
    rep, _ = trace_run
    ex = exhaustive_run
    audit_bad = [v for v in rep.violations if "audit" in v or "value profile" in v or "revisits" in v]
    ok = not audit_bad and not ex["profile_bad"] and not ex["rounds_bad"]
    record_criterion(3, ok, f"trace run: {rep.checks['profile']} node sweeps, {rep.checks['search_rounds']} search paths; "
                            f"exhaustive: {ex['trees']} trees; {len(audit_bad) + len(ex['profile_bad']) + len(ex['rounds_bad'])} failures")
    assert ok


def test_criterion_4_height_bound():
    worst, fails, total = 0.0, 0, 0
    for n in (64, 256, 1024):
        for s in range(100):
            U = wb.gen_increasing_tree(n, 1000 * n + s)
            T = build_static(HasseDiagram(U, range(n)))
            m = tree_metrics(T.H)
            h, b = T.height(), height_bound(m)
            worst = max(worst, h / b)
            fails += h > b
            total += 1
    ok = fails == 0
    record_criterion(4, ok, f"{total} trees, {fails} over the bound, worst h/bound={worst:.3f}")
    assert ok


def test_criterion_5_opt_oracle():
    bad = []
    shapes = 0
    for n in range(1, 13):
        for par in rooted_shapes(n):
            shapes += 1
            deg = [0] * n
            for v, p in enumerate(par):
                if p >= 0:
                    deg[v] += 1
                    deg[p] += 1
            opt = opt_height_par(par)
            if opt < opt_lower_bound(n, max(deg)):
                bad.append(("bound", par))
            if n <= 10 and opt != opt_height_enum(par):
                bad.append(("enum", par))
    for k in range(1, 12):
        if opt_height_par(star_universe(k).parent) != k:
            bad.append(("star", k))
    ok = not bad
    record_criterion(5, ok, f"{shapes} shapes n<=12, stars k<=11, DP vs enumeration n<=10, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_6_tight_family_gap():
    t = time.perf_counter()
    rows = wb.tight_gap(range(2, 7))
    secs = time.perf_counter() - t
    ratios = [r["ratio"] for r in rows]
    ok = all(a < b for a, b in zip(ratios, ratios[1:])) and secs < 60
    detail = ", ".join(f"k={r['k']}:{r['h_llt']}/{r['opt']}{'' if r['exact'] else 'lb'}={r['ratio']:.3f}" for r in rows)
    record_criterion(6, ok, f"{detail}; {secs:.1f}s")
    assert ok


def test_criterion_7_linear_construction():
    sizes = [2**i for i in range(10, 15)]
    mean = {}
    for n in sizes:
        total = 0
        for s in range(20):
            U = wb.gen_increasing_tree(n, 7 * n + s)
            total += build_static(HasseDiagram(U, range(n))).stats["build_ops"]
        mean[n] = total / 20
    ratios = [mean[b] / mean[a] for a, b in zip(sizes, sizes[1:])]
    ok = all(r <= 2.5 for r in ratios)
    record_criterion(7, ok, "C(2n)/C(n) = " + ", ".join(f"{r:.3f}" for r in ratios))
    assert ok


def test_criterion_8_cost_counters(trace_run):
    rep, _ = trace_run
    cost = [v for v in rep.violations if "comparisons at height" in v or "delete cost" in v]
    ok = not cost and rep.insert_ratio <= dyn.C_INS and rep.delete_ratio <= 1
    record_criterion(8, ok, f"max insert comparisons/(h+1)={rep.insert_ratio:.3f} (limit {dyn.C_INS}), "
                            f"max delete cost/bound={rep.delete_ratio:.3f}, {len(cost)} violations")
    assert ok


def test_criterion_9_experiment1_shape():
    t = time.perf_counter()
    cfg = wb.ExperimentConfig(sizes=[2**i for i in range(4, 11)], samples=100, seed=0)
    summary = wb.summarize(wb.run_experiment1(cfg))
    secs = time.perf_counter() - t
    xs = [math.log2(s["n"]) for s in summary]
    r2_h = wb.affine_r2(xs, [s["h_llt"] for s in summary])
    r2_o = wb.affine_r2(xs, [s["opt"] for s in summary])
    worst = max(s["ratio"] for s in summary)
    ok = r2_h >= 0.9 and r2_o >= 0.9 and worst <= 4.0 and secs < 300
    record_criterion(9, ok, f"R2(h_llt)={r2_h:.4f}, R2(opt)={r2_o:.4f}, max mean ratio={worst:.3f}, {secs:.1f}s")
    assert ok


def test_criterion_10_case_coverage(trace_run):
    rep, _ = trace_run
    missing = [c for c in dyn.CASE_COUNTERS if rep.coverage[c] <= 0]
    ok = not missing
    low = min(dyn.CASE_COUNTERS, key=lambda c: rep.coverage[c])
    record_criterion(10, ok, f"{len(dyn.CASE_COUNTERS)} cases covered, rarest {low}={rep.coverage[low]}"
                             + (f", missing {missing}" if missing else ""))
    assert ok
