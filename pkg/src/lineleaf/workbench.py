"""Command line workbench: universe generators, filesystem ingestion,
differential verification, experiments and benchmarks.

Every run is a pure function of ``(seed, config)``.
"""
from __future__ import annotations

import csv
import io
import os
import random
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

import click
import numpy as np

from . import llt_dynamic as dyn
from .llt_build import build_static, height_bound, tree_metrics
from .oracle_opt import OPT_BUDGET, check_rebuild, opt_height, opt_lower_bound, signature
from .poset_core import NU, HasseDiagram, Universe, edge_query_brute, edge_query_fast

EXACT_OPT_MAX = 14
CSV_HEADER = ["n", "sample", "h_llt", "opt", "ratio"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    sizes: list = field(default_factory=lambda: [16, 32, 64, 128, 256, 512, 1024])
    samples: int = 100
    seed: int = 0
    double_count: bool = True
    out: Optional[str] = None

    def __post_init__(self):
        self.sizes = [int(s) for s in self.sizes]
        if not self.sizes:
            raise ConfigError("at least one size is required")
        if any(s < 2 for s in self.sizes):
            raise ConfigError(f"sizes must be >= 2, got {self.sizes}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")


# -- generators -------------------------------------------------------------------------

def gen_increasing_tree(n: int, seed: int = 0) -> Universe:
    """Random recursive tree: node i hangs under a uniform j < i."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    rng = random.Random(seed)
    return Universe([-1] + [rng.randrange(i) for i in range(1, n)])


def tight_family_size(k: int) -> int:
    return sum((j + 1) * 2 ** (j - 1) for j in range(1, k + 1))


def gen_tight_family(k: int, audit: Optional[list] = None) -> Universe:
    """Grow the worst case for the contraction process over ``k`` iterations.

    A horizontal path runs from node 0 to a fixed right end.  Each iteration
    gives every free node (one without vertical children) two vertical
    children and splices 2^(k-1) fresh free nodes into the path just left of
    the right end.  One contraction round undoes one iteration.
    ``audit`` collects per-iteration counts.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    edges = {(0, 1)}
    line_tail = 0  # path node currently adjacent to the right end
    right = 1
    free = [0, 1]
    nxt = 2
    if audit is not None:
        audit.append({"iteration": 1, "free_before": 0, "vertical_added": 0, "base_added": 2, "free_after": 2, "n": 2})
    for it in range(2, k + 1):
        before = len(free)
        if before != it * 2 ** (it - 2):
            raise AssertionError(f"iteration {it}: {before} free nodes")
        kids = []
        for f in free:
            for _ in range(2):
                edges.add((f, nxt))
                kids.append(nxt)
                nxt += 1
        base = list(range(nxt, nxt + 2 ** (it - 1)))
        nxt += len(base)
        edges.discard((line_tail, right))
        chain = [line_tail] + base + [right]
        edges.update(zip(chain, chain[1:]))
        line_tail = base[-1]
        free = kids + base
        if audit is not None:
            audit.append({
                "iteration": it, "free_before": before, "vertical_added": len(kids),
                "base_added": len(base), "free_after": len(free), "n": nxt,
            })
    return _root_at_zero(nxt, edges)


def _root_at_zero(n: int, edges: Iterable[tuple[int, int]]) -> Universe:
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    # breadth-first relabel so that parents get smaller ids
    order, label = [0], {0: 0}
    par = [-1]
    for v in order:
        for w in sorted(adj[v]):
            if w not in label:
                label[w] = len(order)
                order.append(w)
                par.append(label[v])
    return Universe(par)


# -- filesystem ingestion -------------------------------------------------------------

@dataclass
class FsStats:
    nodes: int
    leaves: int
    height: int
    skipped_symlinks: int
    root: str

    def line(self) -> str:
        return (f"root={self.root} nodes={self.nodes} leaves={self.leaves} "
                f"height={self.height} skipped_symlinks={self.skipped_symlinks}")


def ingest_filesystem(path) -> tuple[Universe, FsStats, list[str]]:
    """Directories and files become elements; containment is the order."""
    root = os.fspath(path)
    if not os.path.isdir(root):
        raise NotADirectoryError(f"{root}: not a directory")
    names, par, depth = [root], [-1], [0]
    skipped = 0
    stack = [0]
    while stack:
        v = stack.pop()
        try:
            with os.scandir(names[v]) as it:
                entries = sorted(it, key=lambda e: e.name)
        except OSError as exc:
            raise OSError(f"cannot read {names[v]}: {exc.strerror or exc}") from exc
        for e in entries:
            if e.is_symlink():
                skipped += 1
                continue
            names.append(e.path)
            par.append(v)
            depth.append(depth[v] + 1)
            if e.is_dir(follow_symlinks=False):
                stack.append(len(names) - 1)
    U = Universe(par)
    leaves = sum(1 for c in U.children if not c)
    return U, FsStats(U.M, leaves, max(depth), skipped, root), names


def load_universe(path) -> Universe:
    """A universe file, or a directory that gets ingested on the fly."""
    if os.path.isdir(path):
        return ingest_filesystem(path)[0]
    return Universe.load(path)


# -- verification -------------------------------------------------------------------

@dataclass
class VerifyReport:
    traces: int = 0
    ops: int = 0
    checks: Counter = field(default_factory=Counter)
    coverage: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)
    insert_ratio: float = 0.0
    delete_ratio: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        out = [f"traces={self.traces} ops={self.ops} violations={len(self.violations)}"]
        out += [f"check {k}={v}" for k, v in sorted(self.checks.items())]
        out += [f"case {c}={self.coverage[c]}" for c in dyn.CASE_COUNTERS]
        out.append(f"max insert comparisons/(h+1)={self.insert_ratio:.3f}")
        out.append(f"max delete work/bound={self.delete_ratio:.3f}")
        out += [f"VIOLATION {v}" for v in self.violations[:20]]
        return "\n".join(out)


def random_ops(rng: random.Random, m: int, length: int) -> list[tuple[str, int]]:
    """Mixed trace that keeps roughly half the universe present."""
    ops, present = [], set()
    for _ in range(length):
        r = rng.random()
        if r < 0.15:
            ops.append(("Q", rng.randrange(m)))
        elif present and r < 0.55:
            a = rng.choice(sorted(present))
            present.discard(a)
            ops.append(("D", a))
        elif m > 1:
            a = rng.randrange(1, m)
            if a not in present:
                present.add(a)
                ops.append(("I", a))
    return ops


def check_tree(T, rng: random.Random, rep: VerifyReport, where: str, queries: int = 4,
               all_paths: bool = False) -> None:
    """Rebuild equivalence, both audits and a few edge-query spot checks.

    ``all_paths`` audits the search path of every universe element instead
    of a sample.
    """
    H = T.H
    try:
        T.audit()
        rep.checks["audit"] += 1
    except Exception as exc:  # every failure is a reportable violation
        rep.violations.append(f"{where}: audit: {exc}")
        return
    bad = T.profile_violations()
    rep.checks["profile"] += 1
    if bad:
        rep.violations.append(f"{where}: value profile broken at {bad}")
    rb = check_rebuild(T)
    rep.checks["rebuild"] += 1
    if not rb.ok:
        rep.violations.append(f"{where}: rebuild mismatch: {rb.diff}")
    members = H.members()
    if all_paths:
        for u in range(H.U.M):
            rep.checks["search_rounds"] += 1
            if not T.search_rounds_ok(u):
                rep.violations.append(f"{where}: search path for {u} revisits a round")
    for _ in range(queries):
        u = rng.randrange(H.U.M)
        if not all_paths:
            rep.checks["search_rounds"] += 1
            if not T.search_rounds_ok(u):
                rep.violations.append(f"{where}: search path for {u} revisits a round")
        if len(members) >= 2:
            x, y = rng.sample(members, 2)
            rep.checks["edge_query"] += 1
            if edge_query_fast(H, x, y, u) != edge_query_brute(H, x, y, u):
                rep.violations.append(f"{where}: edge query ({x},{y}) disagrees for {u}")


def replay(T, ops, rng: random.Random, rep: VerifyReport, tag: str, all_paths: bool = False) -> None:
    H = T.H
    for i, op in enumerate(ops):
        kind, a = op
        where = f"{tag} op {i} {kind} {a}"
        if kind == "I" and a in H or kind == "D" and (a not in H or a == NU):
            continue
        h = T.height() if kind == "I" else 0
        bound = 4 * height_bound(tree_metrics(H)) if kind == "D" else 0
        try:
            got = dyn.apply_op(T, op)
        except Exception as exc:
            rep.violations.append(f"{where}: {type(exc).__name__}: {exc}")
            return
        rep.ops += 1
        if kind == "Q":
            if got != (a in H):
                rep.violations.append(f"{where}: membership answered {got}")
            continue
        if kind == "I":
            c = T.stats["last_insert_comparisons"]
            rep.insert_ratio = max(rep.insert_ratio, c / (h + 1))
            if c > dyn.C_INS * (h + 1):
                rep.violations.append(f"{where}: {c} comparisons at height {h}")
        else:
            bound = max(bound, 4 * height_bound(tree_metrics(H)))
            c = max(T.stats["last_delete_comparisons"], T.stats["last_delete_work"])
            rep.delete_ratio = max(rep.delete_ratio, c / bound)
            if c > bound:
                rep.violations.append(f"{where}: delete cost {c} over {bound}")
        check_tree(T, rng, rep, where, all_paths=all_paths)


def run_verify(config: ExperimentConfig, universe: Optional[Universe] = None,
               ops: Optional[list] = None, max_m: int = 24, max_ops: int = 40,
               all_paths: bool = False) -> VerifyReport:
    """Replay op traces against the rebuild oracle.

    With an explicit ``universe`` and ``ops`` only that trace is replayed.
    Otherwise ``config.samples`` random traces run, followed by one targeted
    instance per case counter, and a case that never fired counts as a violation.
    """
    rep = VerifyReport()
    rng = random.Random(config.seed)
    if universe is not None:
        T = build_static(HasseDiagram(universe, [NU]))
        replay(T, ops or [], rng, rep, "trace", all_paths)
        rep.traces = 1
        rep.coverage.update(T.stats)
        return rep
    for t in range(config.samples):
        m = rng.randint(2, max_m)
        U = gen_increasing_tree(m, rng.randrange(2**31))
        T = build_static(HasseDiagram(U, [NU]))
        replay(T, random_ops(rng, m, rng.randint(1, max_ops)), rng, rep, f"trace {t}", all_paths)
        rep.coverage.update(T.stats)
        rep.traces += 1
    for case in dyn.CASE_COUNTERS:
        hit = dyn.targeted_instance(case, seed=config.seed)
        if hit is None:
            continue
        par, S, op = hit
        T = build_static(HasseDiagram(Universe(par), S))
        replay(T, [op], rng, rep, f"targeted {case}", all_paths)
        rep.coverage.update(T.stats)
        rep.traces += 1
    for case in dyn.CASE_COUNTERS:
        if not rep.coverage[case]:
            rep.violations.append(f"coverage: {case} never triggered")
    return rep


# -- experiments -------------------------------------------------------------------

def sample_members(rng: random.Random, m: int, n: int) -> list[int]:
    """n members drawn uniformly without replacement, nu always included."""
    n = min(n, m)
    return [NU] + rng.sample(range(1, m), n - 1)


def opt_or_lb(H: HasseDiagram) -> tuple[int, bool]:
    if H.n <= EXACT_OPT_MAX:
        return opt_height(H).height, True
    m = tree_metrics(H)
    return opt_lower_bound(m["n"], m["delta"]), False


def _row(n, sample, H, double: bool) -> dict:
    T = build_static(H)
    h = T.height() * (2 if double else 1)
    opt, exact = opt_or_lb(H)
    ratio = h / opt if opt else float(h == 0)
    return {"n": n, "sample": sample, "h_llt": h, "opt": opt if exact else f"lb:{opt}",
            "opt_value": opt, "ratio": round(ratio, 6)}


def run_experiment1(config: ExperimentConfig) -> list[dict]:
    """Random increasing trees; the whole universe is the stored set."""
    rows = []
    for n in config.sizes:
        for s in range(config.samples):
            U = gen_increasing_tree(n, random.Random(f"{config.seed}/{n}/{s}").randrange(2**31))
            rows.append(_row(n, s, HasseDiagram(U, range(n)), config.double_count))
    return rows


def run_experiment2(config: ExperimentConfig, universe: Universe) -> list[dict]:
    """Random member sets of an ingested universe."""
    rows = []
    rng = random.Random(config.seed)
    for n in config.sizes:
        size = min(n, universe.M)
        for s in range(config.samples):
            H = HasseDiagram(universe, sample_members(rng, universe.M, size))
            rows.append(_row(size, s, H, config.double_count))
    return rows


def rows_to_csv(rows: list[dict], header=CSV_HEADER) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def affine_r2(xs, ys) -> float:
    """Coefficient of determination of the least-squares line through (xs, ys)."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    coef = np.polyfit(xs, ys, 1)
    resid = ys - np.polyval(coef, xs)
    tot = ((ys - ys.mean()) ** 2).sum()
    return 1.0 if tot == 0 else float(1 - (resid**2).sum() / tot)


def summarize(rows: list[dict]) -> list[dict]:
    by = {}
    for r in rows:
        by.setdefault(r["n"], []).append(r)
    out = []
    for n in sorted(by):
        rs = by[n]
        out.append({
            "n": n,
            "h_llt": float(np.mean([r["h_llt"] for r in rs])),
            "opt": float(np.mean([r["opt_value"] for r in rs])),
            "ratio": float(np.mean([r["ratio"] for r in rs])),
            "ratio_min": min(r["ratio"] for r in rs),
            "ratio_max": max(r["ratio"] for r in rs),
        })
    return out


# -- tight family gap -------------------------------------------------------------

def tight_gap(ks=range(2, 7)) -> list[dict]:
    """Single-count worst-case LLT height against OPT (or its bound) per k."""
    out = []
    for k in ks:
        U = gen_tight_family(k)
        H = HasseDiagram(U, range(U.M))
        T = build_static(H)
        opt, exact = opt_or_lb(H) if U.M > OPT_BUDGET else (opt_height(H).height, True)
        out.append({"k": k, "n": U.M, "h_llt": T.height(), "opt": opt, "exact": exact,
                    "ratio": T.height() / opt, "rounds": T.rounds()})
    return out


# -- benchmark --------------------------------------------------------------------

BENCH_HEADER = ["n", "sample", "build_ops", "build_ms", "h", "inserts", "deletes",
                "update_ms", "searches", "search_ms", "opt_n", "opt_ms", "backend"]


def run_bench(config: ExperimentConfig, updates: int = 200, searches: int = 500) -> list[dict]:
    from ._accel import numba_enabled
    from .oracle_opt import member_tree, opt_table

    backend = "numba" if numba_enabled() else "numpy"
    rows = []
    rng = random.Random(config.seed)
    for n in config.sizes:
        for s in range(config.samples):
            U = gen_increasing_tree(n, rng.randrange(2**31))
            H = HasseDiagram(U, sample_members(rng, n, max(2, n // 2)))
            t0 = time.perf_counter()
            T = build_static(H)
            t1 = time.perf_counter()
            ins = dels = 0
            for _ in range(updates):
                a = rng.randrange(1, n)
                if a in H:
                    dyn.delete(T, a)
                    dels += 1
                else:
                    dyn.insert(T, a)
                    ins += 1
            t2 = time.perf_counter()
            for _ in range(searches):
                T.search(rng.randrange(n))
            t3 = time.perf_counter()
            k = min(n, 16)
            _, par = member_tree(HasseDiagram(U, range(k)))
            opt_table(par)  # warm the compiled kernel
            t4 = time.perf_counter()
            opt_table(par)
            t5 = time.perf_counter()
            rows.append({
                "n": n, "sample": s, "build_ops": T.stats["build_ops"],
                "build_ms": round(1e3 * (t1 - t0), 3), "h": T.height(),
                "inserts": ins, "deletes": dels, "update_ms": round(1e3 * (t2 - t1), 3),
                "searches": searches, "search_ms": round(1e3 * (t3 - t2), 3),
                "opt_n": k, "opt_ms": round(1e3 * (t5 - t4), 3), "backend": backend,
            })
    return rows


# -- CLI ---------------------------------------------------------------------------

def _sizes(text: Optional[str], default) -> list[int]:
    if not text:
        return list(default)
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"sizes must be comma separated integers: {text}") from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _config(sizes, samples, seed, double_count, out, default_sizes) -> ExperimentConfig:
    try:
        return ExperimentConfig(_sizes(sizes, default_sizes), samples, seed, double_count, out)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


@click.group()
def main():
    """Line-Leaf Tree workbench."""


@main.command()
@click.argument("family", type=click.Choice(["increasing", "tight"]))
@click.option("--n", "size", type=int, default=64, show_default=True, help="node count (increasing) or k (tight)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def gen(family, size, seed, out):
    """Write a generated universe file."""
    U = gen_increasing_tree(size, seed) if family == "increasing" else gen_tight_family(size)
    _emit(U.dumps(), out)


def _members_arg(U: Universe, members: Optional[str]) -> list[int]:
    if not members:
        return list(range(U.M))
    with open(members) as fh:
        return [int(t) for t in fh.read().split()]


@main.command()
@click.argument("universe", type=click.Path(exists=True))
@click.option("--members", type=click.Path(exists=True, dir_okay=False), default=None,
              help="whitespace separated member ids (default: whole universe)")
@click.option("--double-count/--single-count", default=False, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the signature here")
def build(universe, members, double_count, out):
    """Build the static tree and print its metrics."""
    U = load_universe(universe)
    T = build_static(HasseDiagram(U, _members_arg(U, members)))
    m = T.metrics()
    if double_count:
        m["h"] *= 2
    click.echo(" ".join(f"{k}={v}" for k, v in m.items()))
    if out:
        _emit(signature(T) + "\n", out)


@main.command()
@click.argument("universe", type=click.Path(exists=True))
@click.option("--members", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def trace(universe, members, out):
    """Dump the contraction events of a static build."""
    U = load_universe(universe)
    lines = []
    build_static(HasseDiagram(U, _members_arg(U, members)), trace=lines.append)
    _emit("".join(ln + "\n" for ln in lines), out)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=500, show_default=True, help="random traces")
@click.option("--universe", type=click.Path(exists=True), default=None)
@click.option("--trace", "trace_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="op trace to replay against --universe")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def verify(seed, samples, universe, trace_file, out):
    """Differential check against static rebuilds; exit 1 on any violation."""
    cfg = _config(None, samples, seed, False, out, [2])
    if (universe is None) != (trace_file is None):
        raise click.UsageError("--universe and --trace go together")
    if universe is not None:
        with open(trace_file) as fh:
            ops = dyn.parse_ops(fh.read())
        rep = run_verify(cfg, load_universe(universe), ops)
    else:
        rep = run_verify(cfg)
    _emit(rep.summary() + "\n", out)
    if out:
        click.echo(f"violations={len(rep.violations)}")
    sys.exit(0 if rep.ok else 1)


def _experiment_output(rows, out):
    _emit(rows_to_csv(rows), out)
    for s in summarize(rows):
        click.echo(f"# n={s['n']} mean_h_llt={s['h_llt']:.3f} mean_opt={s['opt']:.3f} "
                   f"mean_ratio={s['ratio']:.3f} min={s['ratio_min']:.3f} max={s['ratio_max']:.3f}",
                   err=True)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sizes", default=None, help="comma separated, default 16,32,...,1024")
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--double-count/--single-count", default=True, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def experiment1(seed, sizes, samples, double_count, out):
    """LLT height against OPT on random increasing trees (CSV)."""
    cfg = _config(sizes, samples, seed, double_count, out, [2**i for i in range(4, 11)])
    _experiment_output(run_experiment1(cfg), out)


@main.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sizes", default=None, help="comma separated, default 100,1000,10000")
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--double-count/--single-count", default=True, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def experiment2(path, seed, sizes, samples, double_count, out):
    """LLT height against OPT on member sets of an ingested universe (CSV)."""
    cfg = _config(sizes, samples, seed, double_count, out, [100, 1000, 10000])
    _experiment_output(run_experiment2(cfg, load_universe(path)), out)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sizes", default=None, help="comma separated, default 256,1024,4096")
@click.option("--samples", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def bench(seed, sizes, samples, out):
    """Operation counters and wall times (CSV)."""
    cfg = _config(sizes, samples, seed, False, out, [256, 1024, 4096])
    _emit(rows_to_csv(run_bench(cfg), BENCH_HEADER), out)


@main.command(name="ingest-fs")
@click.argument("path", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the universe file here")
def ingest_fs(path, out):
    """Turn a directory tree into a universe and print its statistics."""
    try:
        U, stats, _ = ingest_filesystem(path)
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc
    if out:
        _emit(U.dumps(), out)
    click.echo(stats.line())


if __name__ == "__main__":  # pragma: no cover
    main()
