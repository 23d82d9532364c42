"""Component search structures: path BSTs over contracted chains, the
edge-reference handles they are built from, and LST list helpers.

An edge query (x, y) never stores x or y directly.  It holds two references
``lam1``/``lam2`` to the actual Hasse edges that bookend the x..y path, and
reads its endpoints through them.  Renaming an endpoint in a Hasse edge
record therefore renames it in every query bookended there at once.
"""
from __future__ import annotations

import enum
import math

from .poset_core import HasseEdge, PosetError


class StructuralCorruption(PosetError):
    """An invariant that the algorithms rely on does not hold."""


class OrderViolation(StructuralCorruption):
    pass


class NonAdjacentMerge(StructuralCorruption):
    pass


class EndpointMismatch(StructuralCorruption):
    pass


class NodeType(enum.IntEnum):
    NONE = 0
    LINE = 1
    LEAF = 2


# A reference is (record, upper_side); it names one end of an actual edge.
Ref = tuple


def ref_end(ref: Ref) -> int:
    rec, side = ref
    return rec.upper if side else rec.lower


def ref_far(ref: Ref) -> int:
    rec, side = ref
    return rec.lower if side else rec.upper


def rename_endpoint(rec: HasseEdge, old: int, new: int) -> None:
    if old == rec.upper:
        rec.upper = new
    elif old == rec.lower:
        rec.lower = new
    else:
        raise EndpointMismatch(f"{old} not an endpoint of {rec!r}")


class PathBST:
    """Edge query (x, y) together with the search structure for its path.

    ``nodes`` are the interior path nodes contracted at ``round``, listed from
    x to y; ``subs[i]`` is the query for the segment between consecutive
    entries of ``[x] + nodes + [y]`` (oriented either way).  With no nodes the
    object is an actual Hasse edge and ``lam1``/``lam2`` name the same record
    from opposite sides.
    """

    __slots__ = ("lam1", "lam2", "nodes", "subs", "round", "up")

    def __init__(self, lam1: Ref, lam2: Ref, nodes=None, subs=None, rnd: int = 0):
        self.lam1 = lam1
        self.lam2 = lam2
        self.nodes = nodes if nodes is not None else []
        self.subs = subs if subs is not None else []
        self.round = rnd
        self.up = None

    @classmethod
    def actual(cls, rec: HasseEdge) -> "PathBST":
        return cls((rec, False), (rec, True))

    # endpoint access -----------------------------------------------------
    @property
    def x(self) -> int:
        return ref_end(self.lam1)

    @property
    def y(self) -> int:
        return ref_end(self.lam2)

    def ends(self) -> tuple[int, int]:
        return ref_end(self.lam1), ref_end(self.lam2)

    def has_end(self, v: int) -> bool:
        return v == ref_end(self.lam1) or v == ref_end(self.lam2)

    def other(self, v: int) -> int:
        x, y = self.ends()
        if v == x:
            return y
        if v == y:
            return x
        raise EndpointMismatch(f"{v} is not an end of ({x},{y})")

    def lam_at(self, v: int) -> Ref:
        if ref_end(self.lam1) == v:
            return self.lam1
        if ref_end(self.lam2) == v:
            return self.lam2
        raise EndpointMismatch(f"{v} is not an end of {self.ends()}")

    def neighbor_of(self, v: int) -> int:
        """Node adjacent to end ``v`` along the full path (the bookend)."""
        return ref_far(self.lam_at(v))

    @property
    def empty(self) -> bool:
        return not self.nodes

    def size(self) -> int:
        return len(self.nodes)

    def oriented_from(self, v: int) -> tuple[list[int], list["PathBST"]]:
        if ref_end(self.lam1) == v:
            return self.nodes, self.subs
        if ref_end(self.lam2) == v:
            return self.nodes[::-1], self.subs[::-1]
        raise EndpointMismatch(f"{v} is not an end of {self.ends()}")

    def flip(self) -> None:
        self.lam1, self.lam2 = self.lam2, self.lam1
        self.nodes.reverse()
        self.subs.reverse()

    def orient_from(self, v: int) -> "PathBST":
        if ref_end(self.lam1) != v:
            if ref_end(self.lam2) != v:
                raise EndpointMismatch(f"{v} is not an end of {self.ends()}")
            self.flip()
        return self

    def sub_index(self, sub: "PathBST") -> int:
        for i, s in enumerate(self.subs):
            if s is sub:
                return i
        raise StructuralCorruption("sub-query not found in its parent")

    def inorder(self) -> list[int]:
        """Full path between the ends (all rounds), ends excluded."""
        out: list[int] = []
        self._walk(self.x, out)
        return out

    def _walk(self, start: int, out: list[int]) -> None:
        nodes, subs = self.oriented_from(start)
        prev = start
        for i, s in enumerate(subs):
            s._walk(prev, out)
            if i < len(nodes):
                out.append(nodes[i])
                prev = nodes[i]

    def height(self) -> int:
        """Edge queries on the longest descent within this BST level."""
        return 0 if not self.nodes else (len(self.nodes) + 1).bit_length()

    def __repr__(self):
        x, y = self.ends()
        return f"BST({x},{y};r{self.round};{self.nodes})"


def bst_height_bound(p: int) -> int:
    return 2 * math.ceil(math.log2(p + 2))


# -- LST helpers --------------------------------------------------------------
# An LST is a python list of PathBSTs owned by a node; index 0 is the front.


def lst_insert_front(lst: list, owner: int, q: PathBST, rounds) -> None:
    """Front insertion as done by leaf contraction."""
    if lst and rounds[lst[0].other(owner)] > rounds[q.other(owner)]:
        raise OrderViolation(f"front insertion into LST({owner}) breaks round order")
    lst.insert(0, q)
    q.up = None


def lst_insert(lst: list, owner: int, q: PathBST, rounds) -> int:
    """Insert keeping rounds non-increasing; goes in front of equal rounds."""
    r = rounds[q.other(owner)]
    i = 0
    while i < len(lst) and rounds[lst[i].other(owner)] > r:
        i += 1
    lst.insert(i, q)
    q.up = None
    return i


def lst_remove(lst: list, q: PathBST) -> int:
    for i, e in enumerate(lst):
        if e is q:
            del lst[i]
            return i
    raise StructuralCorruption("edge query missing from LST")


def lst_find(lst: list, owner: int, far: int) -> PathBST:
    for e in lst:
        if e.other(owner) == far:
            return e
    raise StructuralCorruption(f"no query ({owner},{far}) in LST({owner})")


def mu(lst: list, owner: int, rounds, i: int) -> int:
    """Round of the i-th (1-based) entry, 0 past the end."""
    if i > len(lst):
        return 0
    return rounds[lst[i - 1].other(owner)]


def rho(lst: list, owner: int, i: int) -> int:
    return lst[i - 1].other(owner)


def check_lst_order(lst: list, owner: int, rounds) -> None:
    rs = [rounds[e.other(owner)] for e in lst]
    if any(a < b for a, b in zip(rs, rs[1:])):
        raise OrderViolation(f"LST({owner}) rounds out of order: {rs}")
