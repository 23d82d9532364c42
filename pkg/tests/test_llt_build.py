import itertools
import math
import random
import re

from conftest import EXAMPLE_ID, EXAMPLE_NAMES, example_universe, random_members, random_universe
from lineleaf.llt_build import LEAF, LINE, Found, NilAt, build_static, height_bound, round_bound
from lineleaf.poset_core import HasseDiagram, Universe, path_universe, rooted_shapes, star_universe

ID = EXAMPLE_ID


def named(line: str) -> str:
    """Swap element ids in a trace line for their letters."""
    head, rest = line.split(" ", 1)
    return head + " " + re.sub(r"\d+", lambda m: EXAMPLE_NAMES[int(m.group())], rest)


def test_singleton():
    T = build_static(HasseDiagram(path_universe(3), [0]))
    assert T.root == 0 and T.rnd[0] == 1
    assert T.height() == 0
    assert T.search(0) == Found(0, 0)
    m = T.metrics()
    assert (m["h"], m["w"], m["n"]) == (0, 1, 1)


def test_walkthrough_contraction_events(example):
    lines = []
    T = build_static(example, trace=lines.append)
    assert [named(ln) for ln in lines] == [
        "round=1 step=line nodes=G,H,I,J,K target=(F,L)",
        "round=1 step=line nodes=P target=(F,R)",
        "round=1 step=line nodes=S,T target=(R,V)",
        "round=1 step=line nodes=W target=(R,X)",
        "round=1 step=leaf nodes=D,E target=F",
        "round=1 step=leaf nodes=A,B target=C",
        "round=1 step=leaf nodes=N target=L",
        "round=1 step=leaf nodes=Y,Z target=M",
        "round=1 step=leaf nodes=V,X target=R",
        "round=2 step=line nodes=L target=(F,M)",
        "round=2 step=leaf nodes=C,M,R target=F",
    ]
    assert T.root == ID["F"]
    assert T.typ[ID["L"]] == LINE and T.typ[ID["C"]] == LEAF
    assert T.par[ID["A"]] == ID["C"]


def test_trace_line_format(example):
    lines = []
    build_static(example, trace=lines.append)
    pat = re.compile(r"round=\d+ step=(line|leaf) nodes=\d+(,\d+)* target=(\(\d+,\d+\)|\d+)$")
    assert all(pat.match(ln) for ln in lines)


def test_walkthrough_search_enters_nested_chain(example):
    T = build_static(example)
    path = []
    assert T.search(ID["H"], path) == Found(ID["H"], T.search(ID["H"]).cost)
    bsts = [set(c[2].ends()) for c in path if c[0] == "BST"]
    assert {ID["F"], ID["L"]} in bsts
    assert path[0][:3] == ("LST", T.rnd[ID["F"]], ID["F"])


def test_walkthrough_membership_and_predecessor(example):
    T = build_static(example)
    assert all(T.contains(v) for v in range(example.U.M))
    # a partial member set: B's universe children are absent, so B is their predecessor
    U = example_universe()
    S = [v for v in range(U.M) if EXAMPLE_NAMES[v] not in "AXV"]
    T = build_static(HasseDiagram(U, S))
    assert T.predecessor(ID["X"]) == ID["W"]
    assert T.predecessor(ID["A"]) == ID["C"]
    assert not T.contains(ID["A"])


def test_round_profile_and_audit_on_all_small_shapes():
    for m in range(1, 9):
        for par in rooted_shapes(m):
            T = build_static(HasseDiagram(Universe(par), range(m)))
            T.audit()
            assert T.profile_violations() == [], par


def test_search_agrees_with_linear_scan():
    rng = random.Random(11)
    for _ in range(20):
        U = random_universe(rng.randint(2, 200), rng)
        H = HasseDiagram(U, random_members(U, rng, 0.3))
        T = build_static(H)
        for u in range(U.M):
            r = T.search(u)
            assert T.contains(u) == (u in H)
            assert T.predecessor(u) == H.predecessor_in_S(u)
            if isinstance(r, NilAt):
                y, z = r.edge
                assert H.pred[z] == y and U.leq(y, u) and not U.leq(z, u)
            elif u not in H:
                assert r.node == H.predecessor_in_S(u)
            assert T.search_rounds_ok(u)


def test_membership_of_random_non_members_is_false():
    rng = random.Random(4)
    U = random_universe(3000, rng)
    H = HasseDiagram(U, random_members(U, rng, 0.5))
    T = build_static(H)
    outside = [v for v in range(U.M) if v not in H]
    for u in rng.sample(outside, 1000):
        assert not T.contains(u)


def test_search_cost_within_height():
    rng = random.Random(8)
    U = random_universe(300, rng)
    T = build_static(HasseDiagram(U, random_members(U, rng, 0.6)))
    h = T.height()
    costs = [T.search(u).cost for u in range(U.M)]
    assert max(costs) <= h
    assert h >= 1


def test_metrics_of_simple_shapes():
    m = build_static(HasseDiagram(path_universe(7), range(7))).metrics()
    assert (m["delta"], m["w"], m["rounds"], m["diameter"]) == (2, 1, 1, 6)
    for k in (1, 3, 6):
        m = build_static(HasseDiagram(star_universe(k), range(k + 1))).metrics()
        assert m["delta"] == k and m["w"] == k


def test_round_and_height_bounds_on_random_trees():
    rng = random.Random(2)
    for _ in range(40):
        U = random_universe(rng.randint(2, 400), rng)
        T = build_static(HasseDiagram(U, random_members(U, rng, 0.7)))
        m = T.metrics()
        assert m["rounds"] <= round_bound(m)
        assert m["h"] <= height_bound(m)


def test_build_is_deterministic():
    rng = random.Random(6)
    U = random_universe(100, rng)
    S = random_members(U, rng)
    from lineleaf.oracle_opt import signature
    assert signature(build_static(HasseDiagram(U, S))) == signature(build_static(HasseDiagram(U, S)))


def test_build_ops_grow_linearly():
    rng = random.Random(0)
    ops = {}
    for n in (500, 1000, 2000):
        total = 0
        for _ in range(5):
            U = random_universe(n, rng)
            total += build_static(HasseDiagram(U, range(n))).stats["build_ops"]
        ops[n] = total
    assert ops[1000] / ops[500] < 2.5 and ops[2000] / ops[1000] < 2.5


def test_small_sets_exhaustive_search_oracle():
    for m in range(2, 7):
        for par in rooted_shapes(m):
            U = Universe(par)
            for r in range(m):
                for S in itertools.combinations(range(1, m), r):
                    H = HasseDiagram(U, (0,) + S)
                    T = build_static(H)
                    for u in range(m):
                        assert T.predecessor(u) == H.predecessor_in_S(u)


def test_height_bound_formula():
    m = {"w": 8, "delta": 3, "diameter": 6}
    assert height_bound(m) == (3 + 2 * math.ceil(math.log2(8)) + 2) * 4
