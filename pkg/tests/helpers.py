"""Shared test utilities: brute-force oracles and small builders.

The brute-force functions here are deliberately naive re-implementations
used to cross-check the real algorithms. Keep them independent of the
library internals: they may only use the public data types.
"""
from __future__ import annotations

import itertools
import pathlib
import random

from termsieve.graphs import Arc, DiGraph
from termsieve.model import Edge, Fmp, Guard, VarDecl

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
TEST_FIXTURES = pathlib.Path(__file__).resolve().parent / "fixtures"


# ---------------------------------------------------------------- graphs

def brute_reachable(g: DiGraph, start: str) -> frozenset[str]:
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for (_, src, dst) in g.arcs:
            if src == v and dst not in seen:
                seen.add(dst)
                frontier.append(dst)
    return frozenset(seen)


def brute_sccs(g: DiGraph) -> set[frozenset[str]]:
    """Components via pairwise mutual reachability. O(V * E), fine for tests."""
    reach = {v: brute_reachable(g, v) for v in g.vertices}
    out = set()
    for v in g.vertices:
        comp = frozenset(w for w in g.vertices if w in reach[v] and v in reach[w])
        out.add(comp)
    return out


def brute_is_nontrivial(g: DiGraph, comp: frozenset[str]) -> bool:
    if len(comp) > 1:
        return True
    (v,) = comp
    return any(src == v and dst == v for (_, src, dst) in g.arcs)


def random_digraph(rng: random.Random, max_vertices: int = 6,
                   max_arcs: int = 10) -> DiGraph:
    n = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(n)]
    m = rng.randint(0, max_arcs)
    arcs: list[Arc] = []
    for k in range(m):
        arcs.append((f"a{k}", rng.choice(vs), rng.choice(vs)))
    return DiGraph(frozenset(vs), tuple(arcs))


# ----------------------------------------------------------- path oracles

def brute_cycle_paths(q: DiGraph, elim: str) -> set[tuple[str, ...]]:
    """All arc sequences elim -> ... -> elim where elim appears exactly
    twice and intermediates are distinct. Breadth-wise walk extension."""
    out: set[tuple[str, ...]] = set()
    frontier: list[tuple[tuple[str, ...], frozenset[str], str]] = []
    for (aid, src, dst) in q.arcs:
        if src == elim:
            frontier.append(((aid,), frozenset(), dst))
    while frontier:
        seq, seen, cur = frontier.pop()
        if cur == elim:
            out.add(seq)
            continue
        if cur in seen:
            continue
        seen = seen | {cur}
        for (aid, src, dst) in q.arcs:
            if src == cur and (dst == elim or dst not in seen):
                frontier.append((seq + (aid,), seen, dst))
    return out


def brute_through_paths(sub: DiGraph, entries: frozenset[str],
                        exits: frozenset[str]) -> set[tuple[str, ...]]:
    """All vertex-simple nonempty arc sequences from an entry to an exit."""
    out: set[tuple[str, ...]] = set()
    frontier: list[tuple[tuple[str, ...], frozenset[str], str]] = []
    for start in entries:
        if start not in sub.vertices:
            continue
        frontier.append(((), frozenset({start}), start))
    while frontier:
        seq, seen, cur = frontier.pop()
        if seq and cur in exits:
            out.add(seq)
        for (aid, src, dst) in sub.arcs:
            if src == cur and dst not in seen:
                frontier.append((seq + (aid,), seen | {dst}, dst))
    return out


# -------------------------------------------------------------- policies

def chain_policy() -> Fmp:
    """Acyclic two-state policy, trivially halting."""
    return Fmp(
        variables=(VarDecl("x"),),
        qstates=("q0", "q1"),
        initial="q0",
        edges=(Edge.single("e1", "q0", "q1", effect={"x": -1}),),
    )


def up_loop_policy() -> Fmp:
    """Single self-loop that only increases, runs forever."""
    return Fmp(
        variables=(VarDecl("x"),),
        qstates=("q0",),
        initial="q0",
        edges=(Edge.single("e1", "q0", "q0", effect={"x": 1}),),
    )


def random_small_policy(rng: random.Random, max_q: int = 4,
                        max_vars: int = 3) -> Fmp:
    """Hand-rolled random policy with optional guards, used where the
    library generator would be the thing under test."""
    nq = rng.randint(1, max_q)
    nv = rng.randint(1, max_vars)
    qs = tuple(f"q{i}" for i in range(nq))
    names = [f"x{i}" for i in range(nv)]
    variables = tuple(VarDecl(n, rng.choice([0, 0, 0, -2, 1])) for n in names)
    edges = []
    for k in range(rng.randint(1, 2 * nq + 2)):
        guard = {}
        if rng.random() < 0.4:
            v = rng.choice(names)
            lo = rng.randint(-2, 3)
            hi = None if rng.random() < 0.5 else lo + rng.randint(0, 4)
            guard[v] = (lo, hi)
        actions = []
        for _ in range(rng.randint(1, 2)):
            eff = {}
            for v in rng.sample(names, rng.randint(0, min(2, nv))):
                eff[v] = rng.choice([-2, -1, 1, 2])
            actions.append(eff)
        edges.append(Edge(f"e{k}", rng.choice(qs), rng.choice(qs),
                          Guard(guard), tuple(actions)))
    return Fmp(variables=variables, qstates=qs, initial="q0",
               edges=tuple(edges))


def guard_free_walks(sub: DiGraph, start: str, rng: random.Random,
                     max_len: int) -> list[tuple[str, str]]:
    """One random walk inside sub from start, as (arc_id, dst) steps."""
    adj: dict[str, list[tuple[str, str]]] = {}
    for (aid, src, dst) in sub.arcs:
        adj.setdefault(src, []).append((aid, dst))
    cur = start
    steps = []
    for _ in range(max_len):
        outs = adj.get(cur)
        if not outs:
            break
        aid, dst = rng.choice(outs)
        steps.append((aid, dst))
        cur = dst
    return steps


def iter_nodes(forest):
    for tree in forest.trees:
        yield from tree.walk()


def replay_lasso(fmp: Fmp, witness) -> None:
    """Check a lasso witness step by step against the transition relation."""
    from termsieve.oracle import step

    cfg = witness.start
    for eid, nxt in witness.steps:
        succs = step(fmp, cfg)
        assert (eid, nxt) in succs, f"step {eid} not enabled at {cfg}"
        cfg = nxt
    cfgs = witness.configurations()
    assert 0 <= witness.cycle_start < len(cfgs) - 1
    assert cfg == cfgs[witness.cycle_start], "cycle does not close"
