"""The Line-Leaf Tree container, static construction by contraction, and the
read-only operations (search, membership, predecessor, metrics)."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

from .llt_structures import (
    NodeType,
    PathBST,
    StructuralCorruption,
    check_lst_order,
    mu,
)
from .poset_core import NU, Answer, HasseDiagram, decide

LINE = NodeType.LINE
LEAF = NodeType.LEAF


@dataclass(frozen=True)
class Found:
    node: int
    cost: int = 0


@dataclass(frozen=True)
class NilAt:
    edge: tuple  # (upper, lower) of the actual Hasse edge
    cost: int = 0


class LineLeafTree:
    """Search structure over the members of a Hasse diagram.

    Per node: ``rnd`` (round), ``typ`` (LINE/LEAF), ``par`` (None for the
    root, the absorbing node for LEAF, the PathBST holding it for LINE) and
    ``lst`` (edge queries leaf-contracted into it, front first).
    """

    def __init__(self, H: HasseDiagram):
        self.H = H
        self.U = H.U
        m = H.U.M
        self.rnd = [0] * m
        self.typ = [NodeType.NONE] * m
        self.par: list = [None] * m
        self.lst: list[list[PathBST]] = [[] for _ in range(m)]
        self.root = NU
        self.stats: Counter = Counter()

    # -- accessors ---------------------------------------------------------
    def mu(self, x: int, i: int) -> int:
        return mu(self.lst[x], x, self.rnd, i)

    def rho(self, x: int, i: int) -> int:
        return self.lst[x][i - 1].other(x)

    def members(self) -> list[int]:
        return self.H.members()

    # -- edge queries ------------------------------------------------------
    def ask(self, q: PathBST, x: int, u: int) -> Answer:
        """Evaluate the dynamic edge query q from the side of its end x."""
        self.stats["edge_queries"] += 1
        y = q.other(x)
        return decide(self.U, x, y, u, q.neighbor_of(x), q.neighbor_of(y))

    # -- search ------------------------------------------------------------
    def search(self, u: int, path: Optional[list] = None):
        """Locate u; returns Found(owner) or NilAt(actual edge).

        Found(x) with x != u means u would be a new leaf below x.  ``path``
        (if given) receives the visited components as (kind, round) pairs.
        """
        self.U.check(u)
        cost = 0
        x = self.root
        while True:
            if path is not None:
                path.append(("LST", self.rnd[x], x))
            nxt = None
            for q in self.lst[x]:
                cost += 1
                ans = self.ask(q, x, u)
                if ans is Answer.X:
                    continue
                if ans is Answer.Y:
                    nxt = ("lst", q.other(x))
                else:
                    nxt = ("bst", q)
                break
            if nxt is None:
                return Found(x, cost)
            if nxt[0] == "lst":
                x = nxt[1]
                continue
            q = nxt[1]
            while True:
                if q.empty:
                    rec = q.lam1[0]
                    return NilAt((rec.upper, rec.lower), cost)
                if path is not None:
                    path.append(("BST", q.round, q))
                ends = [q.x] + q.nodes + [q.y]
                p = len(q.nodes)
                lo, hi = 0, p
                landed = None
                while True:
                    mid = (lo + hi) // 2
                    e = q.subs[mid]
                    cost += 1
                    ans = self.ask(e, ends[mid], u)
                    if ans is Answer.X:
                        if lo <= mid - 1:
                            hi = mid - 1
                            continue
                        if mid == 0:
                            raise StructuralCorruption("search left its BST through an end")
                        landed = ends[mid]
                    elif ans is Answer.Y:
                        if mid + 1 <= hi:
                            lo = mid + 1
                            continue
                        if mid + 1 == p + 1:
                            raise StructuralCorruption("search left its BST through an end")
                        landed = ends[mid + 1]
                    else:
                        q = e
                    break
                if landed is not None:
                    x = landed
                    break
            # continue with LST(x)

    def contains(self, u: int) -> bool:
        r = self.search(u)
        return isinstance(r, Found) and r.node == u

    def predecessor(self, u: int) -> int:
        r = self.search(u)
        if isinstance(r, Found):
            return r.node
        return r.edge[0]

    # -- structural height -------------------------------------------------
    def height(self) -> int:
        """Worst-case number of dynamic edge queries over all outcomes."""
        memo_lst: dict[int, int] = {}
        memo_bst: dict[int, int] = {}

        def h_lst(x: int) -> int:
            if x in memo_lst:
                return memo_lst[x]
            best = len(self.lst[x])
            for i, q in enumerate(self.lst[x]):
                best = max(best, i + 1 + max(h_lst(q.other(x)), h_bst(q)))
            memo_lst[x] = best
            return best

        def h_bst(q: PathBST) -> int:
            if q.empty:
                return 0
            key = id(q)
            if key in memo_bst:
                return memo_bst[key]
            ends = [q.x] + q.nodes + [q.y]
            p = len(q.nodes)
            neg = -(1 << 30)

            def rng(lo: int, hi: int) -> int:
                mid = (lo + hi) // 2
                if lo <= mid - 1:
                    xb = rng(lo, mid - 1)
                else:
                    xb = h_lst(ends[mid]) if mid >= 1 else neg
                if mid + 1 <= hi:
                    yb = rng(mid + 1, hi)
                else:
                    yb = h_lst(ends[mid + 1]) if mid + 1 <= p else neg
                return 1 + max(xb, yb, h_bst(q.subs[mid]))

            val = rng(0, p)
            memo_bst[key] = val
            return val

        return h_lst(self.root)

    # -- audits ------------------------------------------------------------
    def profile_violations(self) -> list[int]:
        bad = []
        for v in self.members():
            if not self.profile_ok(v):
                bad.append(v)
        return bad

    def profile_ok(self, v: int) -> bool:
        k = self.rnd[v]
        m1, m2, m3, m4 = (self.mu(v, i) for i in (1, 2, 3, 4))
        if self.par[v] is None:
            if k == 1:
                return not self.lst[v]
            return (m1 == k - 1 and m2 == m3 == k - 2 and m3 >= m4) or (
                m1 == m2 == m3 == k - 1 and m3 >= m4
            )
        if self.typ[v] == LEAF:
            return m1 == m2 == k - 1 and m2 >= m3
        return m1 == k - 1 and m1 >= m2

    def audit(self) -> None:
        """Full consistency check of pointers, endpoints and orders."""
        H = self.H
        seen_nodes = set()
        if self.par[self.root] is not None:
            raise StructuralCorruption("root has a parent")

        def check_bst(q: PathBST, a: int, b: int, owner_up) -> None:
            if set(q.ends()) != {a, b}:
                raise StructuralCorruption(f"{q!r} expected ends ({a},{b})")
            if q.up is not owner_up:
                raise StructuralCorruption(f"{q!r} has a stale container pointer")
            if q.empty:
                rec = q.lam1[0]
                if q.lam2[0] is not rec or q.lam1[1] == q.lam2[1]:
                    raise StructuralCorruption(f"{q!r} actual edge refs disagree")
                if H.rec.get(rec.lower) is not rec:
                    raise StructuralCorruption(f"{q!r} refers to a dead Hasse edge")
                if q.subs or q.round:
                    raise StructuralCorruption(f"{q!r} empty with subs or round")
                return
            if len(q.subs) != len(q.nodes) + 1:
                raise StructuralCorruption(f"{q!r} sub count")
            seq = [q.x] + q.nodes + [q.y]
            for i, s in enumerate(q.subs):
                if s.round >= q.round:
                    raise StructuralCorruption(f"{q!r} sub {s!r} not from an earlier round")
                check_bst(s, seq[i], seq[i + 1], q)
            if q.subs[0].lam_at(q.x) != q.lam1 or q.subs[-1].lam_at(q.y) != q.lam2:
                raise StructuralCorruption(f"{q!r} bookends disagree with its subs")
            for v in q.nodes:
                if v in seen_nodes:
                    raise StructuralCorruption(f"node {v} placed twice")
                seen_nodes.add(v)
                if self.typ[v] != LINE or self.par[v] is not q or self.rnd[v] != q.round:
                    raise StructuralCorruption(f"node {v} metadata disagrees with {q!r}")

        seen_nodes.add(self.root)
        for x in self.members():
            check_lst_order(self.lst[x], x, self.rnd)
            for q in self.lst[x]:
                y = q.other(x)
                if y in seen_nodes:
                    raise StructuralCorruption(f"node {y} placed twice")
                seen_nodes.add(y)
                if self.typ[y] != LEAF or self.par[y] != x:
                    raise StructuralCorruption(f"LST({x}) holds {y} whose parent is {self.par[y]}")
                check_bst(q, x, y, None)
                if q.round > self.rnd[y]:
                    raise StructuralCorruption(f"{q!r} newer than its leaf {y}")
        members = set(self.members())
        if seen_nodes != members:
            raise StructuralCorruption(
                f"placed nodes differ from S: missing {sorted(members - seen_nodes)}"
                f" extra {sorted(seen_nodes - members)}"
            )
        # every Hasse edge appears exactly once as an actual edge: implied by
        # the node accounting plus path coverage, checked through inorder
        for x in members:
            for q in self.lst[x]:
                full = [q.x] + q.inorder() + [q.y]
                for a, b in zip(full, full[1:]):
                    if not (H.pred[a] == b or H.pred[b] == a):
                        raise StructuralCorruption(f"{q!r} path {full} is not a Hasse path")
        bad = self.profile_violations()
        if bad:
            raise StructuralCorruption(f"value profile broken at {bad}")

    def search_rounds_ok(self, u: int) -> bool:
        path: list = []
        self.search(u, path)
        lst_r = [r for kind, r, _ in path if kind == "LST"]
        bst_r = [r for kind, r, _ in path if kind == "BST"]
        dec = lambda rs: all(a > b for a, b in zip(rs, rs[1:]))
        return dec(lst_r) and dec(bst_r)

    # -- metrics -----------------------------------------------------------
    def rounds(self) -> int:
        return self.rnd[self.root] - 1

    def metrics(self) -> dict:
        return tree_metrics(self.H) | {"h": self.height(), "rounds": self.rounds()}


def tree_metrics(H: HasseDiagram) -> dict:
    members = H.members()
    n = len(members)
    w = sum(1 for v in members if not H.succ[v]) or 1
    delta = max((H.degree(v) for v in members), default=0)
    return {"n": n, "w": w, "delta": delta, "diameter": diameter(H)}


def diameter(H: HasseDiagram) -> int:
    # longest path via depth pass over members in reverse universe depth order
    best = 0
    down: dict[int, int] = {}
    order = sorted(H.members(), key=lambda v: -H.U.depth[v])
    for v in order:
        tops = sorted((down[c] + 1 for c in H.succ[v]), reverse=True)[:2]
        down[v] = tops[0] if tops else 0
        best = max(best, sum(tops))
    return best


def height_bound(m: dict) -> int:
    lw = math.ceil(math.log2(max(m["w"], 2)))
    return (m["delta"] + 2 * math.ceil(math.log2(m["diameter"] + 2)) + 2) * (lw + 1)


def round_bound(m: dict) -> int:
    return math.ceil(math.log2(max(m["w"], 2))) + 1


# -- static construction ------------------------------------------------------

def build_static(H: HasseDiagram, trace: Optional[Callable[[str], None]] = None) -> LineLeafTree:
    """Contract T_S round by round: chains of degree-2 nodes into path BSTs,
    then degree-1 nodes into the LST of their neighbour."""
    T = LineLeafTree(H)
    ops = T.stats
    adj: dict[int, dict[int, PathBST]] = {v: {} for v in H.members()}
    for v in adj:
        if v != NU:
            p = H.pred[v]
            q = PathBST.actual(H.rec[v])
            adj[v][p] = q
            adj[p][v] = q
            ops["build_ops"] += 1
    it = 0
    while len(adj) > 1:
        it += 1
        # line contraction
        done = set()
        for v in sorted(adj):
            ops["build_ops"] += 1
            if v in done or len(adj[v]) != 2:
                continue
            n1, n2 = adj[v]
            left = _walk(adj, v, n1, ops)
            right = _walk(adj, v, n2, ops)
            chain = left[::-1] + [v] + right
            # chain holds the degree-2 run plus both terminal nodes
            if chain[0] > chain[-1]:
                chain.reverse()
            x1, x2 = chain[0], chain[-1]
            inner = chain[1:-1]
            subs = [adj[a][b] for a, b in zip(chain, chain[1:])]
            q = PathBST(subs[0].lam_at(x1), subs[-1].lam_at(x2), inner, subs, it)
            for s in subs:
                s.up = q
            for w in inner:
                done.add(w)
                T.rnd[w] = it
                T.typ[w] = LINE
                T.par[w] = q
                del adj[w]
            del adj[x1][inner[0]]
            del adj[x2][inner[-1]]
            adj[x1][x2] = q
            adj[x2][x1] = q
            ops["build_ops"] += len(inner)
            if trace:
                trace(f"round={it} step=line nodes={','.join(map(str, inner))} target=({x1},{x2})")
        # leaf contraction
        if len(adj) == 2:
            x, y = sorted(adj)
            groups = {x: [y]}
        else:
            groups = {}
            for y in sorted(adj):
                ops["build_ops"] += 1
                if len(adj[y]) == 1:
                    (x,) = adj[y]
                    groups.setdefault(x, []).append(y)
        for x in sorted(groups):
            for y in groups[x]:
                q = adj[y][x]
                T.rnd[y] = it
                T.typ[y] = LEAF
                T.par[y] = x
                T.lst[x].insert(0, q)
                q.up = None
                del adj[x][y]
                del adj[y]
                ops["build_ops"] += 1
            if trace:
                trace(f"round={it} step=leaf nodes={','.join(map(str, groups[x]))} target={x}")
    (r,) = adj
    T.root = r
    T.rnd[r] = it + 1
    T.typ[r] = LEAF
    T.par[r] = None
    return T


def _walk(adj, start: int, nxt: int, ops) -> list[int]:
    out = []
    prev, cur = start, nxt
    while True:
        out.append(cur)
        ops["build_ops"] += 1
        if len(adj[cur]) != 2:
            return out
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)
