"""Dynamic maintenance of a Line-Leaf Tree.

Insertion locally corrects the predecessor B of the new node A, then hands
over to Transition, which either floats a node down a contracted path (Down
Correct) or climbs the contraction rounds (Up Correct).  Deletion contracts
the Hasse edge (A, B) into B and repairs the single node that may have lost
its value profile (Stabilize).

Every case of every procedure bumps a counter in ``T.stats`` so workloads can
prove they exercised it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .llt_build import LEAF, LINE, Found, LineLeafTree
from .llt_structures import (
    NodeType,
    PathBST,
    StructuralCorruption,
    lst_insert,
    lst_remove,
)
from .poset_core import NU, Duplicate, NotFound, RootDeletion

C_INS = 8
C_UP = 8
C_ST = 4


@dataclass
class StolenSets:
    B: int
    D: list = field(default_factory=list)
    C: list = field(default_factory=list)  # far ends of the queries moved to LST(A)
    L: list = field(default_factory=list)


@dataclass
class FragilityReport:
    node: int
    fragile: bool
    unstable: bool
    clause: str = ""


# -- low level surgery ----------------------------------------------------------

def _edge(T: LineLeafTree, a: int, b: int) -> PathBST:
    H = T.H
    if H.pred[a] == b:
        return PathBST.actual(H.rec[a])
    if H.pred[b] == a:
        return PathBST.actual(H.rec[b])
    raise StructuralCorruption(f"({a},{b}) is not a Hasse edge")


def _adopt(T: LineLeafTree, q: PathBST) -> None:
    for s in q.subs:
        s.up = q
    for v in q.nodes:
        if T.rnd[v] != q.round:
            raise StructuralCorruption(f"node {v} of round {T.rnd[v]} placed in a round {q.round} BST")
        T.typ[v] = LINE
        T.par[v] = q


def join_seq(T: LineLeafTree, segs: list, nodes: list, rnd: int) -> PathBST:
    """Chain ``segs`` through the junction ``nodes`` into one round-``rnd`` BST.

    A segment built in round ``rnd`` is spliced in; older ones become subs.
    """
    start = segs[0].other(nodes[0])
    stop = segs[-1].other(nodes[-1])
    all_nodes: list[int] = []
    all_subs: list[PathBST] = []
    prev = start
    for i, s in enumerate(segs):
        if s.round > rnd:
            raise StructuralCorruption(f"segment {s!r} is newer than round {rnd}")
        if s.round == rnd and s.nodes:
            ns, ss = s.oriented_from(prev)
            all_nodes += ns
            all_subs += ss
        else:
            all_subs.append(s)
        if i < len(nodes):
            all_nodes.append(nodes[i])
            prev = nodes[i]
    q = PathBST(all_subs[0].lam_at(start), all_subs[-1].lam_at(stop), all_nodes, all_subs, rnd)
    _adopt(T, q)
    T.stats["bst_ops"] += 1
    return q


def _segment(T: LineLeafTree, a: int, b: int, nodes: list, subs: list, rnd: int) -> PathBST:
    if not nodes:
        return subs[0]
    q = PathBST(subs[0].lam_at(a), subs[-1].lam_at(b), list(nodes), list(subs), rnd)
    _adopt(T, q)
    return q


def strip_end(T: LineLeafTree, q: PathBST, end: int) -> tuple[PathBST, PathBST, int]:
    """Cut the first node N off ``q`` at ``end``: returns (BST(N,far), BST(end,N), N)."""
    nodes, subs = q.oriented_from(end)
    if not nodes:
        raise StructuralCorruption(f"cannot strip an actual edge {q!r}")
    far = q.other(end)
    n = nodes[0]
    rest = _segment(T, n, far, nodes[1:], subs[1:], q.round)
    T.stats["bst_ops"] += 1
    return rest, subs[0], n


def split_at(T: LineLeafTree, q: PathBST, v: int) -> tuple[PathBST, PathBST]:
    """Split ``q`` at its node v into (BST(q.x, v), BST(v, q.y))."""
    i = q.nodes.index(v)
    left = _segment(T, q.x, v, q.nodes[:i], q.subs[: i + 1], q.round)
    right = _segment(T, v, q.y, q.nodes[i + 1 :], q.subs[i + 1 :], q.round)
    T.stats["bst_ops"] += 1
    return left, right


def _slot(T: LineLeafTree, q: PathBST) -> tuple:
    if q.up is not None:
        return ("bst", q.up, q.up.sub_index(q))
    for end in q.ends():
        for i, e in enumerate(T.lst[end]):
            if e is q:
                return ("lst", end, i)
    raise StructuralCorruption(f"{q!r} has no container")


def _fill(T: LineLeafTree, slot: tuple, new: PathBST) -> None:
    kind, where, i = slot
    if kind == "bst":
        where.subs[i] = new
        new.up = where
    else:
        T.lst[where][i] = new
        new.up = None


def _entry(T: LineLeafTree, owner: int, far: int) -> PathBST:
    for e in T.lst[owner]:
        if e.other(owner) == far:
            return e
    raise StructuralCorruption(f"no query ({owner},{far}) in LST({owner})")


def _lst_add(T: LineLeafTree, owner: int, q: PathBST) -> None:
    y = q.other(owner)
    lst_insert(T.lst[owner], owner, q, T.rnd)
    T.typ[y] = LEAF
    T.par[y] = owner
    T.stats["lst_ops"] += 1


def _lst_pop(T: LineLeafTree, owner: int, q: PathBST) -> None:
    lst_remove(T.lst[owner], q)
    T.stats["lst_ops"] += 1


# -- down correction ------------------------------------------------------------

def down_correct(T: LineLeafTree, left: PathBST, b: int, right: PathBST) -> PathBST:
    """Merge BST(E,B) and BST(B,F) into BST(E,F) with B at its own round."""
    r = T.rnd[b]
    m, n = left.round, right.round
    if m <= r and n <= r:
        case = 3 if m == n == r else (2 if m < r and n < r else 1)
        T.stats[f"down.case{case}"] += 1
        return join_seq(T, [left, right], [b], r)
    if m > r and n > r:
        T.stats["down.case5"] += 1
        rest_l, sub_l, mm = strip_end(T, left, b)
        rest_r, sub_r, nn = strip_end(T, right, b)
        mid = down_correct(T, sub_l, b, sub_r)
        if m > n:
            inner = join_seq(T, [mid, rest_r], [nn], n)
            return join_seq(T, [rest_l, inner], [mm], m)
        if m < n:
            inner = join_seq(T, [rest_l, mid], [mm], m)
            return join_seq(T, [inner, rest_r], [nn], n)
        return join_seq(T, [rest_l, mid, rest_r], [mm, nn], m)
    T.stats["down.case4"] += 1
    if n > r:
        rest, sub, nn = strip_end(T, right, b)
        inner = down_correct(T, left, b, sub)
        return join_seq(T, [inner, rest], [nn], n)
    rest, sub, nn = strip_end(T, left, b)
    inner = down_correct(T, sub, b, right)
    return join_seq(T, [rest, inner], [nn], m)


# -- transition and up correction ----------------------------------------------------

def transition(T: LineLeafTree, p: int, q: int, qpq: PathBST) -> None:
    """``qpq`` is the query joining P and Q."""
    T.stats["transition"] += 1
    T.rnd[p] = T.mu(p, 2) + 1
    if T.mu(p, 1) == T.mu(p, 2):
        T.stats["transition.up"] += 1
        up_correct(T, p, q, qpq)
        return
    T.stats["transition.down"] += 1
    head = T.lst[p][0]
    _lst_pop(T, p, head)
    new = down_correct(T, qpq, p, head)
    _lst_add(T, q, new)


def up_correct(T: LineLeafTree, a: int, b: int, qab: PathBST) -> None:
    T.typ[a] = LEAF
    k = T.rnd[b]
    ra = T.rnd[a]
    if ra < k:
        if T.par[b] is None and T.mu(b, 2) < T.mu(b, 1) == ra == k - 1:
            T.stats["up.case1"] += 1
            head = T.lst[b][0]
            m = head.other(b)
            _lst_pop(T, b, head)
            T.rnd[b] -= 1
            T.rnd[m] += 1
            new = down_correct(T, qab, b, head)
            _lst_add(T, m, new)
            T.par[m] = None
            T.typ[m] = LEAF
            T.root = m
            return
        T.stats["up.case2"] += 1
        _lst_add(T, b, qab)
        return
    if ra > k:
        raise StructuralCorruption(f"up correction of {a} (round {ra}) at {b} (round {k})")
    if T.typ[b] == LEAF:
        e = T.par[b]
        if e is None:
            raise StructuralCorruption(f"up correction of {a} at the root {b} with equal rounds")
        T.stats["up.case3"] += 1
        qbe = _entry(T, e, b)
        _lst_pop(T, e, qbe)
        new = down_correct(T, qab, b, qbe)
        _lst_add(T, e, new)
        return
    big = T.par[b]
    _lst_add(T, b, qab)
    left, right = split_at(T, big, b)
    e, f = big.x, big.y
    if (T.rnd[e], T.typ[e] != LINE) > (T.rnd[f], T.typ[f] != LINE):
        # E is the lower end; on a tie the line node plays E
        e, f = f, e
        left, right = right, left
    T.rnd[b] = k + 1
    re, rf = T.rnd[e], T.rnd[f]
    if (k + 1 < re and k + 1 < rf) or (k + 1 == re < rf and T.typ[e] == LEAF):
        T.stats["up.case4"] += 1
        slot = _slot(T, big)
        new = join_seq(T, [left, right], [b], k + 1)
        _fill(T, slot, new)
        return
    if k + 1 == re and T.typ[e] == LINE:
        T.stats["up.case5"] += 1
        g = T.par[e]
        j = g.sub_index(big)
        seq = [g.x] + g.nodes + [g.y]
        pair = [left, right] if seq[j] == e else [right, left]
        g.subs[j : j + 1] = pair
        g.nodes.insert(j, b)
        _adopt(T, g)
        T.stats["bst_ops"] += 1
        return
    if not (re < k + 1 <= rf):
        raise StructuralCorruption(f"up correction at line node {b}: rounds {re},{rf} vs {k + 1}")
    T.stats["up.case6"] += 1
    if T.typ[e] != LEAF or T.par[e] != f:
        raise StructuralCorruption(f"{e} should be a leaf of {f}")
    T.typ[b] = LEAF
    _lst_pop(T, f, big)
    _lst_add(T, b, left)
    if T.par[f] is None and rf == k + 1:
        T.stats["up.case6.root"] += 1
        # F keeps a full-leaf profile; it drops a round only if E was its front
        T.rnd[f] = T.mu(f, 1) + 1
        _lst_add(T, b, right)
        T.par[b] = None
        T.root = b
        T.rnd[b] = T.mu(b, 1) + 1
        return
    up_correct(T, b, f, right)


# -- insertion -----------------------------------------------------------------------

def local_correct(T: LineLeafTree, a: int, b: Optional[int] = None) -> StolenSets:
    """Attach A under B in the Hasse diagram and move the stolen queries.

    B is looked up through the tree when the caller has not located it.
    """
    if a in T.H:
        raise Duplicate(f"{a} already stored")
    if b is None:
        b = T.predecessor(a)
    _, D = T.H.attach(a, b=b)
    stolen = [q for q in T.lst[b] if q.has_end(a)]
    if stolen:
        keep = [q for q in T.lst[b] if not q.has_end(a)]
        T.lst[b] = keep
        T.lst[a] = stolen
        for q in stolen:
            T.par[q.other(a)] = a
        T.stats["lst_ops"] += len(stolen)
    C = [q.other(a) for q in stolen]
    L = []
    p = T.par[b]
    if p is None:
        pass
    elif T.typ[b] == LEAF:
        q = next(e for e in T.lst[p] if e.has_end(a) or e.has_end(b))
        if q.has_end(a):
            L.append(p)
    else:
        i = p.nodes.index(b)
        if p.subs[i].has_end(a):
            L.append(([p.x] + p.nodes)[i])
        if p.subs[i + 1].has_end(a):
            L.append((p.nodes + [p.y])[i + 1])
    return StolenSets(b, list(D), C, L)


def insert(T: LineLeafTree, a: int) -> StolenSets:
    U = T.U
    U.check(a)
    if T.H.member[a]:
        raise Duplicate(f"{a} already stored")
    start = U.leq_calls
    hit = T.search(a)
    b = hit.node if isinstance(hit, Found) else hit.edge[0]
    st = local_correct(T, a, b)
    k = T.rnd[b]
    e_ab = _edge(T, a, b)
    L = st.L
    if T.par[b] is None:
        T.stats["insert.case1"] += 1
        mb1, mb2 = T.mu(b, 1), T.mu(b, 2)
        ma1, ma2 = T.mu(a, 1), T.mu(a, 2)
        if (
            (mb1 == mb2 == k - 1)
            or (mb1 == k - 1 and ma2 < k - 2)
            or (mb1 == mb2 == k - 2 and ma2 < k - 1)
        ):
            if ma1 == ma2 == mb1 == mb2:
                T.rnd[b] += 1
            transition(T, a, b, e_ab)
        else:
            T.rnd[a] = ma1 + 1
            T.typ[a] = LEAF
            T.par[a] = None
            T.root = a
            transition(T, b, a, e_ab)
            # B may have been folded into LST(A) above its stolen entries
            T.rnd[a] = T.mu(a, 1) + 1
    elif T.typ[b] == LEAF:
        e = T.par[b]
        if not L:
            T.stats["insert.case2"] += 1
            if T.mu(a, 1) == T.mu(a, 2) == k - 1:
                T.rnd[a] = k
                qbe = _entry(T, e, b)
                _lst_pop(T, e, qbe)
                T.rnd[b] = T.mu(b, 1) + 1
                new = down_correct(T, e_ab, b, qbe)
                _lst_add(T, e, new)
            else:
                transition(T, a, b, e_ab)
        else:
            T.stats["insert.case3"] += 1
            T.rnd[a] = T.mu(a, 1) + 1
            qae = _entry(T, e, a)
            if T.mu(b, 2) < k - 1:
                _lst_pop(T, e, qae)
                _lst_add(T, e, qae)
                transition(T, b, a, e_ab)
            else:
                slot = _slot(T, qae)
                new = down_correct(T, e_ab, a, qae)
                _fill(T, slot, new)
    else:
        big = T.par[b]
        i = big.nodes.index(b)
        if len(L) == 1:
            T.stats["insert.case4"] += 1
            if big.subs[i].has_end(a):
                j_m, j_n = i, i + 1
            else:
                j_m, j_n = i + 1, i
            s_m, s_n = big.subs[j_m], big.subs[j_n]
            T.rnd[a] = T.mu(a, 1) + 1
            T.rnd[b] = T.mu(b, 1) + 1
            T.typ[a] = LINE
            mb, ma = T.mu(b, 1), T.mu(a, 1)
            if mb > ma:
                new = down_correct(T, e_ab, a, s_m)
                big.subs[j_m] = new
                new.up = big
            elif mb == ma:
                if j_m > j_n:
                    big.subs[j_m : j_m + 1] = [e_ab, s_m]
                    big.nodes.insert(i + 1, a)
                else:
                    big.subs[j_m : j_m + 1] = [s_m, e_ab]
                    big.nodes.insert(i, a)
                _adopt(T, big)
            else:
                big.nodes[i] = a
                new = down_correct(T, s_n, b, e_ab)
                big.subs[j_n] = new
                new.up = big
                _adopt(T, big)
            T.stats["bst_ops"] += 1
        elif len(L) == 2:
            T.stats["insert.case5"] += 1
            T.typ[a] = LINE
            T.rnd[a] = k
            big.nodes[i] = a
            T.par[a] = big
            transition(T, b, a, e_ab)
        else:
            T.stats["insert.case5"] += 1
            transition(T, a, b, e_ab)
    T.stats["inserts"] += 1
    T.stats["last_insert_comparisons"] = U.leq_calls - start
    return st


# -- fragility ---------------------------------------------------------------------

def fragility(T: LineLeafTree, b: int) -> FragilityReport:
    k = T.rnd[b]
    m1, m2, m3, m4 = (T.mu(b, i) for i in (1, 2, 3, 4))
    clause = ""
    if T.par[b] is None:
        if m1 == k - 1 > k - 2 == m2 == m3 >= m4:
            clause = "root-single"
        elif m1 == m2 == m3 == k - 1 > m4:
            clause = "root-triple"
    elif T.typ[b] == LEAF:
        if m1 == m2 == k - 1 > m3:
            clause = "leaf"
    elif m1 == k - 1 > m2:
        clause = "line"
    return FragilityReport(b, bool(clause), not T.profile_ok(b), clause)


# -- root settling -------------------------------------------------------------------

def _hang(T: LineLeafTree, y: int, q: PathBST) -> int:
    """Leaf-contract y (round already final) along q toward q's far end.

    y lands on the first node of the path whose round exceeds its own; that
    node is cut out of its BSTs and returned holding both y and the far end.
    """
    x = T.rnd[y]
    far = q.other(y)
    if q.empty or q.round <= x:
        _lst_add(T, far, q)
        return far
    chain = []
    p = q
    while True:
        first = p.oriented_from(y)[1][0]
        if first.empty or first.round <= x:
            break
        chain.append(p)
        p = first
    z = p.oriented_from(y)[0][0]
    right, left, _ = strip_end(T, p, y)
    for anc in reversed(chain):
        nodes, subs = anc.oriented_from(y)
        new = PathBST(right.lam_at(z), anc.lam_at(anc.other(y)), list(nodes), [right] + list(subs[1:]), anc.round)
        _adopt(T, new)
        right = new
    T.typ[z] = LEAF
    T.par[z] = None
    _lst_add(T, z, left)
    _lst_add(T, z, right)
    T.stats["root.hang"] += 1
    return z


def _settle_root(T: LineLeafTree, b: int) -> None:
    """Make b (holding every remaining arm in its LST) a valid root, moving
    the root along the strongest arm as long as b gives up early."""
    for _ in range(4 * len(T.rnd) + 4):
        T.par[b] = None
        T.typ[b] = LEAF
        T.root = b
        r1, r2, r3 = T.mu(b, 1), T.mu(b, 2), T.mu(b, 3)
        if r1 == r2 == r3:
            T.rnd[b] = r1 + 1
            return
        if r2 > r3:
            # b has degree two once its small arms are gone
            T.stats["root.line"] += 1
            qm, qn = T.lst[b][0], T.lst[b][1]
            n = qn.other(b)
            _lst_pop(T, b, qm)
            _lst_pop(T, b, qn)
            T.rnd[b] = r3 + 1
            path = down_correct(T, qn, b, qm)
            b = _hang(T, n, path)
            continue
        if r1 == r2 + 1:
            # b and its front arm are the last two survivors
            T.rnd[b] = r1 + 1
            return
        T.stats["root.leaf"] += 1
        qm = T.lst[b][0]
        _lst_pop(T, b, qm)
        T.rnd[b] = r2 + 1
        b = _hang(T, b, qm)
    raise StructuralCorruption("root settling did not terminate")


# -- stabilize ----------------------------------------------------------------------

def stabilize(T: LineLeafTree, b: int) -> None:
    """Repair the single unstable node B (and, through Case 2, its parent)."""
    while b is not None:
        if T.profile_ok(b):
            T.stats["stabilize.noop"] += 1
            return
        b = _stabilize_once(T, b)


def _stabilize_once(T: LineLeafTree, b: int) -> Optional[int]:
    k = T.rnd[b]
    if T.par[b] is None:
        T.stats["stabilize.case1"] += 1
        _settle_root(T, b)
        return None
    if T.typ[b] == LEAF:
        T.stats["stabilize.case2"] += 1
        e = T.par[b]
        qbe = _entry(T, e, b)
        qm = T.lst[b][0]
        T.rnd[b] = T.mu(b, 2) + 1
        slot = _slot(T, qbe)
        _lst_pop(T, b, qm)
        n = qbe.neighbor_of(b) if qbe.empty else qbe.oriented_from(b)[0][0]
        if not qbe.empty and T.rnd[n] == k:
            T.stats["stabilize.case2.promote"] += 1
            rest, sub, _ = strip_end(T, qbe, b)
            _fill(T, slot, rest)
            T.typ[n] = LEAF
            T.par[n] = e
            new = down_correct(T, qm, b, sub)
            _lst_add(T, n, new)
            return None
        new = down_correct(T, qm, b, qbe)
        _lst_pop(T, e, qbe)
        _lst_add(T, e, new)
        return e
    T.stats["stabilize.case3"] += 1
    big = T.par[b]
    slot = _slot(T, big)
    left, right = split_at(T, big, b)
    T.rnd[b] = T.mu(b, 1) + 1
    new = down_correct(T, left, b, right)
    _fill(T, slot, new)
    return None


# -- deletion ---------------------------------------------------------------------------

def _actual_between(T: LineLeafTree, a: int, b: int) -> PathBST:
    if T.par[a] == b:
        return _entry(T, b, a)
    if T.par[b] == a:
        return _entry(T, a, b)
    for v in (a, b):
        q = T.par[v]
        if isinstance(q, PathBST):
            seq = [q.x] + q.nodes + [q.y]
            i = seq.index(v)
            w = a if v == b else b
            if seq[i - 1] == w:
                return q.subs[i - 1]
            if seq[i + 1] == w:
                return q.subs[i]
    raise StructuralCorruption(f"no actual query for Hasse edge ({a},{b})")


def _outer_ref(q: PathBST, first: bool):
    s = q.subs[0] if first else q.subs[-1]
    inner = q.nodes[0] if first else q.nodes[-1]
    return s.lam1 if s.y == inner else s.lam2


def _refresh_bookends(q: Optional[PathBST]) -> None:
    while q is not None:
        q.lam1 = _outer_ref(q, True)
        q.lam2 = _outer_ref(q, False)
        q = q.up


def _cut_plan(T: LineLeafTree, e_ab: PathBST, a: int, b: int) -> tuple:
    """Where the actual edge (A,B) sits inside its BST and which node leaves."""
    q = e_ab.up
    j = q.sub_index(e_ab)
    z = a if a in q.nodes else b
    return q, j, q.nodes.index(z)


def _cut_actual(T: LineLeafTree, plan: tuple) -> None:
    """Drop the actual edge (A,B) from its BST; A and B now share one slot."""
    q, j, zi = plan
    slot = _slot(T, q)
    del q.subs[j]
    del q.nodes[zi]
    T.stats["bst_ops"] += 1
    if q.nodes:
        _refresh_bookends(q)
        return
    only = q.subs[0]
    _fill(T, slot, only)
    _refresh_bookends(only.up)


def delete(T: LineLeafTree, a: int) -> None:
    U, H = T.U, T.H
    U.check(a)
    if a == NU:
        raise RootDeletion("nu cannot be deleted")
    if not H.member[a]:
        raise NotFound(f"{a} not stored")
    start = U.leq_calls
    work0 = T.stats["bst_ops"] + T.stats["lst_ops"]
    b = H.pred[a]
    ra, rb = T.rnd[a], T.rnd[b]
    replace = rb < ra or (rb == ra and T.typ[a] == LEAF and T.typ[b] == LINE)
    e_ab = _actual_between(T, a, b)
    plan = _cut_plan(T, e_ab, a, b) if e_ab.up is not None else None
    H.detach(a)
    p = T.par[a]
    if replace and isinstance(p, PathBST):
        p.nodes[p.nodes.index(a)] = b
    if plan is None:
        owner = a if T.par[b] == a else b
        _lst_pop(T, owner, e_ab)
    else:
        _cut_actual(T, plan)
    merged = sorted(
        [(0, i, q) for i, q in enumerate(T.lst[b])] + [(1, i, q) for i, q in enumerate(T.lst[a])],
        key=lambda t: (-T.rnd[t[2].other(b)], t[0], t[1]),
    )
    T.lst[b] = [q for _, _, q in merged]
    for q in T.lst[a]:
        T.par[q.other(b)] = b
    T.lst[a] = []
    T.stats["lst_ops"] += len(merged)
    if replace:
        T.stats["delete.replace"] += 1
        T.rnd[b], T.typ[b], T.par[b] = ra, T.typ[a], p
        if p is None:
            T.root = b
    else:
        T.stats["delete.absorb"] += 1
    T.rnd[a], T.typ[a], T.par[a] = 0, NodeType.NONE, None
    if not T.profile_ok(b):
        T.stats["delete.unstable"] += 1
        stabilize(T, b)
    T.stats["deletes"] += 1
    T.stats["last_delete_comparisons"] = U.leq_calls - start
    T.stats["last_delete_work"] = T.stats["bst_ops"] + T.stats["lst_ops"] - work0


# -- op traces ----------------------------------------------------------------------------

CASE_COUNTERS = (
    ["transition"]
    + [f"insert.case{i}" for i in range(1, 6)]
    + [f"down.case{i}" for i in range(1, 6)]
    + [f"up.case{i}" for i in range(1, 7)]
    + [f"stabilize.case{i}" for i in range(1, 4)]
    + ["delete.replace", "delete.absorb"]
)


class TraceFormatError(ValueError):
    pass


def parse_ops(text: str) -> list[tuple[str, int]]:
    """Read ``I <id>`` / ``D <id>`` / ``Q <id>`` lines; blanks and ``#`` lines are skipped."""
    ops = []
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("I", "D", "Q"):
            raise TraceFormatError(f"line {no}: expected 'I|D|Q <id>', got {line!r}")
        try:
            ops.append((parts[0], int(parts[1])))
        except ValueError as exc:
            raise TraceFormatError(f"line {no}: {exc}") from exc
    return ops


def dump_ops(ops: Iterable[tuple[str, int]]) -> str:
    return "".join(f"{k} {a}\n" for k, a in ops)


def apply_op(T: LineLeafTree, op: tuple[str, int]):
    """Run one trace op; a query returns the membership answer."""
    kind, a = op
    if kind == "I":
        return insert(T, a)
    if kind == "D":
        return delete(T, a)
    if kind == "Q":
        return T.contains(a)
    raise TraceFormatError(f"unknown op {kind!r}")


def targeted_instance(case: str, seed: int = 0, max_size: int = 40, tries: int = 20000):
    """Smallest-effort search for a (parent array, members, op) that fires ``case``.

    Static trees over random member sets are hit with every single insert and
    delete until the counter moves; deterministic in ``seed``.
    """
    import random

    from .llt_build import build_static
    from .poset_core import HasseDiagram, Universe

    rng = random.Random(seed)
    for _ in range(tries):
        m = rng.randint(2, max_size)
        par = [-1] + [rng.randrange(v) for v in range(1, m)]
        U = Universe(par)
        S = [NU] + [v for v in range(1, m) if rng.random() < 0.6]
        inside = set(S)
        ops = [("D", v) for v in S if v != NU] + [("I", v) for v in range(1, m) if v not in inside]
        for op in ops:
            T = build_static(HasseDiagram(U, S))
            apply_op(T, op)
            if T.stats[case]:
                return par, S, op
    return None
