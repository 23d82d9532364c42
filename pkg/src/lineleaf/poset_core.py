"""Tree-like posets: the universe tree, the ancestry oracle, the Hasse
diagram of the stored set and dynamic edge queries.

Element ids are ``0..M-1`` and ``0`` is the minimal element (nu).  ``a <= b``
holds when ``a`` is an ancestor of (or equal to) ``b`` in the universe tree.
"""
from __future__ import annotations

import bisect
import enum
from collections import deque
from typing import Iterable, Sequence

import numpy as np

NU = 0


class PosetError(Exception):
    pass


class InvalidElement(PosetError, ValueError):
    pass


class UniverseFormatError(PosetError, ValueError):
    pass


class Duplicate(PosetError):
    pass


class NotFound(PosetError, KeyError):
    pass


class RootDeletion(PosetError):
    pass


class InvalidQuery(PosetError, ValueError):
    pass


class Answer(enum.Enum):
    X = "X"
    Y = "Y"
    HERE = "HERE"


class Universe:
    """Immutable rooted universe tree with O(1) ancestry tests."""

    def __init__(self, parent: Sequence[int]):
        par = [int(p) for p in parent]
        m = len(par)
        if m == 0:
            raise UniverseFormatError("empty universe")
        if par[0] != -1:
            raise UniverseFormatError("element 0 must be the root")
        roots = [v for v, p in enumerate(par) if p < 0]
        if len(roots) != 1:
            raise UniverseFormatError(f"expected one root, found {len(roots)}")
        for v, p in enumerate(par):
            if p >= m:
                raise UniverseFormatError(f"parent {p} of {v} out of range")
        children: list[list[int]] = [[] for _ in range(m)]
        for v in range(1, m):
            children[par[v]].append(v)
        self.M = m
        self.parent = par
        self.children = children
        tin = [0] * m
        tout = [0] * m
        depth = [0] * m
        # iterative preorder; anything unreached sits on a cycle
        seen = 0
        clock = 0
        stack = [(NU, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                tin[v] = clock
                clock += 1
                seen += 1
            if i < len(children[v]):
                stack.append((v, i + 1))
                c = children[v][i]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
            else:
                tout[v] = clock - 1
        if seen != m:
            raise UniverseFormatError("parent references contain a cycle")
        self.tin = tin
        self.tout = tout
        self.depth = depth
        self.leq_calls = 0
        self._up = None

    # -- oracle -------------------------------------------------------------
    def check(self, a: int) -> int:
        if not (0 <= a < self.M):
            raise InvalidElement(f"element {a} not in universe of size {self.M}")
        return a

    def leq(self, a: int, b: int) -> bool:
        """True iff ``a`` equals ``b`` or is a universe ancestor of it."""
        self.leq_calls += 1
        tin = self.tin
        return tin[a] <= tin[b] and self.tout[b] <= self.tout[a]

    def leq_checked(self, a: int, b: int) -> bool:
        return self.leq(self.check(a), self.check(b))

    # -- level ancestors (binary lifting) ------------------------------------
    @property
    def up(self) -> np.ndarray:
        if self._up is None:
            levels = max(1, int(max(self.depth)).bit_length())
            up = np.zeros((levels, self.M), dtype=np.int64)
            up[0] = np.array([max(p, 0) for p in self.parent], dtype=np.int64)
            for j in range(1, levels):
                up[j] = up[j - 1][up[j - 1]]
            self._up = up
        return self._up

    def ancestor_at_depth(self, v: int, d: int) -> int:
        diff = self.depth[v] - d
        if diff < 0:
            raise InvalidQuery(f"{v} has no ancestor at depth {d}")
        up = self.up
        j = 0
        while diff:
            if diff & 1:
                v = int(up[j, v])
            diff >>= 1
            j += 1
        return v

    def child_toward(self, x: int, y: int) -> int:
        """Universe child of ``x`` on the path down to its descendant ``y``."""
        return self.ancestor_at_depth(y, self.depth[x] + 1)

    # -- io ------------------------------------------------------------------
    @classmethod
    def from_edges(cls, m: int, edges: Iterable[tuple[int, int]]) -> "Universe":
        parent = [-1] * m
        for child, par in edges:
            if not (0 <= child < m and 0 <= par < m):
                raise UniverseFormatError(f"edge ({child},{par}) out of range")
            if child == par:
                raise UniverseFormatError(f"self loop at {child}")
            if parent[child] != -1:
                raise UniverseFormatError(f"{child} has two parents")
            parent[child] = par
        return cls(parent)

    @classmethod
    def parse(cls, text: str) -> "Universe":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise UniverseFormatError("missing element count")
        try:
            m = int(lines[0][0])
            edges = [(int(a), int(b)) for a, b in lines[1:]]
        except ValueError as exc:
            raise UniverseFormatError(str(exc)) from exc
        if len(edges) != m - 1:
            raise UniverseFormatError(f"expected {m - 1} edges, got {len(edges)}")
        return cls.from_edges(m, edges)

    @classmethod
    def load(cls, path) -> "Universe":
        with open(path) as fh:
            return cls.parse(fh.read())

    def dumps(self) -> str:
        out = [str(self.M)]
        out += [f"{v} {self.parent[v]}" for v in range(1, self.M)]
        return "\n".join(out) + "\n"


class HasseEdge:
    """A covering pair of the stored set, keyed by its lower element.

    Edge queries point at these records, so changing ``upper`` renames the
    endpoint for every query bookended here.
    """

    __slots__ = ("upper", "lower")

    def __init__(self, upper: int, lower: int):
        self.upper = upper
        self.lower = lower

    def end(self, upper_side: bool) -> int:
        return self.upper if upper_side else self.lower

    def rename(self, old: int, new: int) -> None:
        if self.upper == old:
            self.upper = new
        elif self.lower == old:
            self.lower = new
        else:
            raise InvalidQuery(f"{old} is not an endpoint of ({self.upper},{self.lower})")

    def __repr__(self):
        return f"HasseEdge({self.upper}->{self.lower})"


class HasseDiagram:
    """The stored set S (always containing nu) with covering relations."""

    def __init__(self, universe: Universe, members: Iterable[int] = ()):
        self.U = universe
        m = universe.M
        self.member = [False] * m
        self.pred = [-1] * m
        self.succ: list[list[int]] = [[] for _ in range(m)]
        self.rec: dict[int, HasseEdge] = {}
        self.member[NU] = True
        self.n = 1
        for v in sorted(set(members), key=lambda v: universe.depth[v]):
            if v != NU and not self.member[v]:
                self.attach(v)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.U.M and self.member[v]

    def members(self) -> list[int]:
        return [v for v in range(self.U.M) if self.member[v]]

    def copy(self) -> "HasseDiagram":
        return HasseDiagram(self.U, self.members())

    def predecessor_in_S(self, u: int) -> int:
        self.U.check(u)
        if self.member[u]:
            return u
        p = self.U.parent[u]
        while not self.member[p]:
            p = self.U.parent[p]
        return p

    def attach(self, u: int, b: int | None = None) -> tuple[int, list[int]]:
        """Insert ``u``; return its predecessor B and the successors D it adopts.

        ``b`` may be supplied when the caller already located the predecessor.
        """
        self.U.check(u)
        if self.member[u]:
            raise Duplicate(f"{u} already in S")
        if b is None:
            b = self.predecessor_in_S(u)
        leq = self.U.leq
        moved = [d for d in self.succ[b] if leq(u, d)]
        if moved:
            keep = [d for d in self.succ[b] if d not in moved]
            self.succ[b] = keep
            for d in moved:
                self.pred[d] = u
                self.rec[d].upper = u
        bisect.insort(self.succ[b], u)
        self.succ[u] = moved
        self.pred[u] = b
        self.rec[u] = HasseEdge(b, u)
        self.member[u] = True
        self.n += 1
        return b, moved

    def detach(self, u: int) -> tuple[int, list[int]]:
        """Remove ``u``; its successors move under its predecessor."""
        self.U.check(u)
        if u == NU:
            raise RootDeletion("nu cannot be deleted")
        if not self.member[u]:
            raise NotFound(f"{u} not in S")
        b = self.pred[u]
        kids = self.succ[u]
        self.succ[b].remove(u)
        for c in kids:
            self.pred[c] = b
            self.rec[c].upper = b
            bisect.insort(self.succ[b], c)
        self.succ[u] = []
        self.pred[u] = -1
        del self.rec[u]
        self.member[u] = False
        self.n -= 1
        return b, kids

    def neighbors(self, v: int) -> list[int]:
        out = list(self.succ[v])
        if self.pred[v] >= 0:
            out.append(self.pred[v])
        return out

    def degree(self, v: int) -> int:
        return len(self.succ[v]) + (1 if self.pred[v] >= 0 else 0)

    def bookends(self, x: int, y: int) -> tuple[int, int]:
        """Neighbours of x and y on the T_S path between them."""
        leq = self.U.leq
        if leq(x, y):
            a = y
            while self.pred[a] != x:
                a = self.pred[a]
            return a, self.pred[y]
        if leq(y, x):
            b = x
            while self.pred[b] != y:
                b = self.pred[b]
            return self.pred[x], b
        return self.pred[x], self.pred[y]


def decide(U: Universe, x: int, y: int, u: int, a: int, b: int) -> Answer:
    """Answer the dynamic edge query (x, y) for ``u``.

    ``a`` and ``b`` are the neighbours of x and y on the path between them.
    When x < y the path runs down through a; u sits in the middle part
    exactly when it is strictly below x and comparable with a but not below y.
    """
    leq = U.leq
    if leq(x, y):
        if leq(y, u):
            return Answer.Y
        if u != x and leq(x, u) and (leq(u, a) or leq(a, u)):
            return Answer.HERE
        return Answer.X
    if leq(y, x):
        if leq(x, u):
            return Answer.X
        if u != y and leq(y, u) and (leq(u, b) or leq(b, u)):
            return Answer.HERE
        return Answer.Y
    if leq(x, u):
        return Answer.X
    if leq(y, u):
        return Answer.Y
    return Answer.HERE


def _check_query(H: HasseDiagram, x: int, y: int, u: int) -> None:
    H.U.check(u)
    if x == y:
        raise InvalidQuery("edge query needs two distinct endpoints")
    if x not in H or y not in H:
        raise InvalidQuery(f"endpoints ({x},{y}) must be members")


def edge_query_fast(H: HasseDiagram, x: int, y: int, u: int) -> Answer:
    _check_query(H, x, y, u)
    a, b = H.bookends(x, y)
    return decide(H.U, x, y, u, a, b)


def _tree_with(H: HasseDiagram, u: int) -> dict[int, list[int]]:
    """Adjacency of T_{S+u}, built from scratch by walking universe parents."""
    U = H.U
    nodes = set(H.members()) | {u}
    adj: dict[int, list[int]] = {v: [] for v in nodes}
    for v in nodes:
        if v == NU:
            continue
        p = U.parent[v]
        while p not in nodes:
            p = U.parent[p]
        adj[v].append(p)
        adj[p].append(v)
    return adj


def edge_query_brute(H: HasseDiagram, x: int, y: int, u: int, adj=None) -> Answer:
    """Reference answer: cut both bookend edges of the x-y path in T_{S+u}
    and report the component holding u."""
    _check_query(H, x, y, u)
    if adj is None:
        adj = _tree_with(H, u)
    prev = {x: x}
    dq = deque([x])
    while dq:
        v = dq.popleft()
        for w in adj[v]:
            if w not in prev:
                prev[w] = v
                dq.append(w)
    path = [y]
    while path[-1] != x:
        path.append(prev[path[-1]])
    path.reverse()
    cut = {frozenset((path[0], path[1])), frozenset((path[-2], path[-1]))}
    seen = {u}
    dq = deque([u])
    while dq:
        v = dq.popleft()
        if v == x:
            return Answer.X
        if v == y:
            return Answer.Y
        for w in adj[v]:
            if w not in seen and frozenset((v, w)) not in cut:
                seen.add(w)
                dq.append(w)
    return Answer.HERE


# -- small universe helpers ---------------------------------------------------

def path_universe(m: int) -> Universe:
    return Universe([-1] + list(range(m - 1)))


def star_universe(k: int) -> Universe:
    return Universe([-1] + [0] * k)


def rooted_shapes(m: int) -> list[list[int]]:
    """All unlabeled rooted trees on m nodes as parent arrays (preorder ids)."""
    # level sequences in canonical (non-increasing subtree) form, generated by
    # brute recursion over sorted child multisets; fine for m <= 10
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def forests(k: int, cap: tuple) -> tuple:
        # forests of total size k whose trees are <= cap in canonical order
        if k == 0:
            return ((),)
        out = []
        for s in range(1, k + 1):
            for t in trees(s):
                key = (s, t)
                if cap and key > cap:
                    continue
                for rest in forests(k - s, key):
                    out.append((key,) + rest)
        return tuple(out)

    @lru_cache(maxsize=None)
    def trees(s: int) -> tuple:
        return tuple(forests(s - 1, ()))

    def flatten(forest, parent, par):
        for _s, sub in forest:
            v = len(par)
            par.append(parent)
            flatten(sub, v, par)

    shapes = []
    for f in trees(m):
        par = [-1]
        flatten(f, 0, par)
        shapes.append(par)
    return shapes
