"""Ground truth: optimal static edge-query search height, its lower bound,
canonical signatures of Line-Leaf Trees and rebuild comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._accel import njit, numba_enabled
from .llt_build import LEAF, LINE, LineLeafTree, build_static
from .llt_structures import StructuralCorruption
from .poset_core import HasseDiagram, PosetError

OPT_BUDGET = 20


class TooLarge(PosetError, ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    height: int
    first_query: Optional[tuple] = None


# -- tree encoding --------------------------------------------------------------

def member_tree(H: HasseDiagram) -> tuple[list[int], np.ndarray]:
    """Members relabelled 0..n-1 in preorder; returns (labels, parent array)."""
    order = sorted(H.members(), key=lambda v: H.U.tin[v])
    idx = {v: i for i, v in enumerate(order)}
    par = np.array([idx[H.pred[v]] if H.pred[v] >= 0 else -1 for v in order], dtype=np.int64)
    return order, par


def subtree_masks(par: np.ndarray) -> np.ndarray:
    n = len(par)
    sub = np.array([1 << i for i in range(n)], dtype=np.int64)
    for i in range(n - 1, 0, -1):  # preorder labels: children after parents
        sub[par[i]] |= sub[i]
    return sub


@njit
def _opt_table_kernel(par, sub):
    n = par.shape[0]
    full = 1 << n
    f = np.full(full, -1, dtype=np.int8)
    for mask in range(1, full):
        cnt = 0
        inner = 0
        for i in range(n):
            if (mask >> i) & 1:
                cnt += 1
                p = par[i]
                if p >= 0 and (mask >> p) & 1:
                    inner += 1
        if inner != cnt - 1:
            continue
        if cnt == 1:
            f[mask] = 0
            continue
        best = 127
        for c in range(n):
            p = par[c]
            if p >= 0 and (mask >> c) & 1 and (mask >> p) & 1:
                a = f[mask & sub[c]]
                b = f[mask & ~sub[c]]
                m = a if a > b else b
                if m < best:
                    best = m
        f[mask] = best + 1
    return f


def _opt_table_numpy(par: np.ndarray, sub: np.ndarray) -> np.ndarray:
    n = len(par)
    full = 1 << n
    masks = np.arange(full, dtype=np.int64)
    bits = [(masks >> i) & 1 for i in range(n)]
    cnt = np.zeros(full, dtype=np.int64)
    inner = np.zeros(full, dtype=np.int64)
    for i in range(n):
        cnt += bits[i]
        if par[i] >= 0:
            inner += bits[i] & bits[par[i]]
    conn = (inner == cnt - 1) & (cnt > 0)
    f = np.full(full, -1, dtype=np.int8)
    f[conn & (cnt == 1)] = 0
    allbits = full - 1
    for k in range(2, n + 1):
        ms = masks[conn & (cnt == k)]
        if len(ms) == 0:
            continue
        best = np.full(len(ms), 127, dtype=np.int16)
        for c in range(n):
            p = par[c]
            if p < 0:
                continue
            ok = (((ms >> c) & 1) & ((ms >> p) & 1)).astype(bool)
            if not ok.any():
                continue
            a = f[ms[ok] & sub[c]].astype(np.int16)
            b = f[ms[ok] & (allbits ^ sub[c])].astype(np.int16)
            best[ok] = np.minimum(best[ok], np.maximum(a, b))
        f[ms] = (best + 1).astype(np.int8)
    return f


def opt_table(par: np.ndarray, use_numba: Optional[bool] = None) -> np.ndarray:
    """Optimal height of every connected vertex subset, indexed by bitmask."""
    if len(par) > OPT_BUDGET:
        raise TooLarge(f"n={len(par)} exceeds the bitmask budget {OPT_BUDGET}")
    sub = subtree_masks(par)
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba:
        return _opt_table_kernel(par, sub)
    return _opt_table_numpy(par, sub)


def opt_height_par(par, use_numba: Optional[bool] = None) -> int:
    par = np.asarray(par, dtype=np.int64)
    if len(par) == 1:
        return 0
    return int(opt_table(par, use_numba)[(1 << len(par)) - 1])


def opt_height(H: HasseDiagram, use_numba: Optional[bool] = None) -> OptResult:
    labels, par = member_tree(H)
    n = len(par)
    if n == 1:
        return OptResult(0)
    f = opt_table(par, use_numba)
    full = (1 << n) - 1
    sub = subtree_masks(par)
    best, arg = None, None
    for c in range(1, n):
        v = max(int(f[full & int(sub[c])]), int(f[full & ~int(sub[c])]))
        if best is None or v < best:
            best, arg = v, (labels[int(par[c])], labels[c])
    return OptResult(int(f[full]), arg)


def opt_height_enum(par) -> int:
    """Plain recursion without memoisation; exponential, for n <= 10."""
    par = [int(p) for p in par]
    n = len(par)
    if n > 12:
        raise TooLarge("enumeration is only meant for tiny trees")

    # a connected component holding both c and par[c] splits along that edge
    # into its part inside c's subtree and the rest
    desc = [{v} for v in range(n)]
    for v in sorted(range(n), key=lambda v: -_depth(par, v)):
        if par[v] >= 0:
            desc[par[v]] |= desc[v]
    desc = [frozenset(d) for d in desc]

    def side(comp: frozenset, c: int) -> frozenset:
        return comp & desc[c]

    def f(comp: frozenset) -> int:
        if len(comp) == 1:
            return 0
        floor = (len(comp) - 1).bit_length() - 1  # ceil(log2 |comp|) - 1
        best = None
        for c in comp:
            if par[c] >= 0 and par[c] in comp:
                a = side(comp, c)
                big, small = (a, comp - a) if 2 * len(a) >= len(comp) else (comp - a, a)
                v = f(big)
                if best is not None and v >= best:
                    continue
                v = max(v, f(small))
                if best is None or v < best:
                    best = v
                    if best <= floor:
                        break
        return best + 1

    return f(frozenset(range(n)))


def _depth(par, v: int) -> int:
    d = 0
    while par[v] >= 0:
        v = par[v]
        d += 1
    return d


def opt_lower_bound(n: int, delta: int) -> int:
    return max(delta, math.ceil(math.log2(n)) if n > 1 else 0)


# -- signatures -------------------------------------------------------------------

def _view(T: LineLeafTree) -> dict:
    nodes = {}
    for v in T.members():
        p = T.par[v]
        if p is None:
            pref = "none"
        elif isinstance(p, int):
            pref = str(p)
        else:
            a, b = sorted(p.ends())
            pref = f"({a},{b})"
        nodes[v] = [T.rnd[v], "LEAF" if T.typ[v] == LEAF else "LINE", pref]
        if T.typ[v] not in (LEAF, LINE):
            raise StructuralCorruption(f"node {v} has no type")
    lsts = {v: [(T.rnd[q.other(v)], q.other(v)) for q in T.lst[v]] for v in nodes}
    bsts = []

    def collect(q):
        if q.empty:
            return
        x, y = q.ends()
        seq = q.nodes if x < y else q.nodes[::-1]
        bsts.append((min(x, y), max(x, y), q.round, tuple(seq)))
        for s in q.subs:
            collect(s)

    for v in nodes:
        for q in T.lst[v]:
            collect(q)
    return {"root": T.root, "nodes": nodes, "lsts": lsts, "bsts": bsts}


def _normalize_view(view: dict) -> dict:
    r = view["root"]
    nodes, lsts = view["nodes"], view["lsts"]
    k = nodes[r][0]
    entries = lsts[r]
    mu = [e[0] for e in entries] + [0, 0]
    if k >= 2 and entries and mu[0] == k - 1 and mu[1] < k - 1:
        p = entries[0][1]
        if p < r:
            nodes[r] = [k - 1, "LEAF", str(p)]
            nodes[p] = [k, "LEAF", "none"]
            lsts[r] = entries[1:]
            lsts[p] = [(k - 1, r)] + lsts[p]
            view["root"] = p
    return view


def normalize_root(T: LineLeafTree) -> LineLeafTree:
    """Re-root a two-survivor tree at the smaller id of the surviving pair."""
    r = T.root
    k = T.rnd[r]
    if k >= 2 and T.lst[r] and T.mu(r, 1) == k - 1 and T.mu(r, 2) < k - 1:
        q = T.lst[r][0]
        p = q.other(r)
        if p < r:
            del T.lst[r][0]
            T.lst[p].insert(0, q)
            T.rnd[r], T.rnd[p] = k - 1, k
            T.typ[p] = LEAF
            T.par[r], T.par[p] = p, None
            T.root = p
    return T


def signature(T: LineLeafTree) -> str:
    view = _normalize_view(_view(T))
    out = [f"root {view['root']}"]
    for v in sorted(view["nodes"]):
        r, t, p = view["nodes"][v]
        out.append(f"node {v} round={r} type={t} parent={p}")
    for v in sorted(view["lsts"]):
        ent = view["lsts"][v]
        if not ent:
            continue
        groups: dict[int, list[int]] = {}
        for r, y in ent:
            groups.setdefault(r, []).append(y)
        rs = [r for r, _ in ent]
        if any(a < b for a, b in zip(rs, rs[1:])):
            raise StructuralCorruption(f"LST({v}) out of round order")
        txt = " ".join(f"[{r}:{','.join(map(str, sorted(groups[r])))}]" for r in sorted(groups, reverse=True))
        out.append(f"lst {v} {txt}")
    for a, b, r, seq in sorted(view["bsts"]):
        out.append(f"bst ({a},{b}) r={r} : {' '.join(map(str, seq))}")
    return "\n".join(out)


@dataclass
class RebuildReport:
    ok: bool
    diff: str = ""


def check_rebuild(T: LineLeafTree) -> RebuildReport:
    want = signature(build_static(T.H))
    got = signature(T)
    if want == got:
        return RebuildReport(True)
    a, b = got.splitlines(), want.splitlines()
    for i in range(max(len(a), len(b))):
        la = a[i] if i < len(a) else "<end>"
        lb = b[i] if i < len(b) else "<end>"
        if la != lb:
            return RebuildReport(False, f"first difference at line {i}: have {la!r}, rebuild {lb!r}")
    return RebuildReport(False, "signatures differ")
