"""Termination verdicts: the hierarchical analysis and the progress baseline.

The hierarchical analysis loops: build a fresh elimination forest over the
current (pruned) control graph, aggregate per-tree variable sets from path
summaries, declare termination when every root's decrease family is free of
the empty set, and otherwise remove edges that strictly decrease a removal
candidate of their own component. Each SCC is analyzed independently: the SCC
condensation is a DAG, so an infinite execution eventually stays inside one
component, and that component's own path sets are the ones that matter.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field, replace
from typing import Mapping

from .decomposition import DefForest, DetNode, build_def
from .graphs import DiGraph, induced, policy_graph, scc_decompose
from .model import Edge, Fmp
from .paths import (
    DEFAULT_PATH_CAP,
    NodeVarSets,
    PathCapExceeded,
    PathContext,
    boxminus,
    build_dec_vars,
    build_inc_vars,
    subtree_pdv,
)

TERMINATING = "terminating"
UNKNOWN = "unknown"
NONTERMINATING_QUALITATIVE = "nonterminating_qualitative"

_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class Verdict:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}({self.detail})"


@dataclass(frozen=True)
class AnalysisConfig:
    def_samples: int = 1
    base_seed: int = 0
    path_cap: int = DEFAULT_PATH_CAP


@dataclass(frozen=True)
class IterationTrace:
    """One loop iteration: the forest used, per-root sets, and removals."""

    def_seed: int
    forest: DefForest
    per_root: tuple[NodeVarSets, ...]  # aligned with forest.trees
    candidates: frozenset[str]
    removed_edges: tuple[str, ...]


@dataclass(frozen=True)
class AnalysisReport:
    verdict: Verdict
    iterations: tuple[IterationTrace, ...]
    wall_time: float
    config: AnalysisConfig
    seeds: tuple[int, ...]  # hsieve_once seeds tried, in order

    def to_trace_dict(self) -> dict:
        """The report in trace-file shape (see the JSON schema in the README)."""
        its = []
        for it in self.iterations:
            dv: set[frozenset[str]] = set()
            for sets in it.per_root:
                dv |= sets.dv
            its.append(
                {
                    "def": {
                        "seed": it.def_seed,
                        "trees": [_tree_dict(t) for t in it.forest.trees],
                    },
                    "iv": sorted(set().union(*(s.iv for s in it.per_root))
                                 if it.per_root else set()),
                    "zv": sorted(set().union(*(s.zv for s in it.per_root))
                                 if it.per_root else set()),
                    "dv": sorted(sorted(s) for s in dv),
                    "candidates": sorted(it.candidates),
                    "removed_edges": list(it.removed_edges),
                }
            )
        return {
            "verdict": self.verdict.kind,
            "detail": self.verdict.detail,
            "seeds": list(self.seeds),
            "iterations": its,
            "wall_ms": round(self.wall_time * 1000.0, 3),
        }


def _tree_dict(node: DetNode) -> dict:
    return {
        "vertices": sorted(node.vertices),
        "elim": node.elim,
        "children": [_tree_dict(c) for c in node.children],
    }


def _require_normalized(fmp: Fmp) -> None:
    for e in fmp.edges:
        if len(e.actions) != 1:
            raise ValueError(
                f"edge {e.id} carries {len(e.actions)} actions; "
                "normalize the policy before analysis"
            )


def def_seed_for(base_seed: int, iteration: int) -> int:
    """Seed of the forest built at one loop iteration."""
    return base_seed * _SEED_STRIDE + iteration


def hsieve_once(
    fmp: Fmp, seed: int, config: AnalysisConfig | None = None
) -> AnalysisReport:
    """One full analysis run with a single elimination-seed stream."""
    _require_normalized(fmp)
    cfg = config if config is not None else AnalysisConfig()
    start = time.perf_counter()

    edges: dict[str, Edge] = {e.id: e for e in fmp.edges}
    iterations: list[IterationTrace] = []

    def report(kind: str, detail: str) -> AnalysisReport:
        return AnalysisReport(
            verdict=Verdict(kind, detail),
            iterations=tuple(iterations),
            wall_time=time.perf_counter() - start,
            config=cfg,
            seeds=(seed,),
        )

    max_iterations = len(fmp.edges) + 1
    for i in range(max_iterations + 1):
        graph = DiGraph(
            vertices=frozenset(fmp.qstates),
            arcs=tuple((e.id, e.src, e.dst) for e in edges.values()),
        )
        dseed = def_seed_for(seed, i)
        forest = build_def(graph, dseed)
        if not forest.trees:
            iterations.append(
                IterationTrace(dseed, forest, (), frozenset(), ())
            )
            return report(TERMINATING, "graph-acyclic")

        ctx = PathContext(
            graph=graph,
            effects={eid: e.effect for eid, e in edges.items()},
            q0=fmp.initial,
            path_cap=cfg.path_cap,
        )
        try:
            per_root = []
            per_tree_candidates = []
            for tree in forest.trees:
                iv, zv = build_inc_vars(tree, ctx)
                pdv = subtree_pdv(tree, ctx)
                dv = build_dec_vars(tree, iv, ctx)
                per_root.append(NodeVarSets(iv=iv, zv=zv, pdv=pdv, dv=dv))
                cands = frozenset(set().union(*pdv) - iv - zv) if pdv else frozenset()
                per_tree_candidates.append(cands)
        except PathCapExceeded:
            iterations.append(
                IterationTrace(dseed, forest, (), frozenset(), ())
            )
            return report(UNKNOWN, "resource-cap")

        removed: set[str] = set()
        for tree, cands in zip(forest.trees, per_tree_candidates):
            if not cands:
                continue
            for eid, e in edges.items():
                if e.src in tree.vertices and e.dst in tree.vertices:
                    if any(e.effect.get(x, 0) < 0 for x in cands):
                        removed.add(eid)

        all_candidates = frozenset().union(*per_tree_candidates)
        empty_free = all(frozenset() not in sets.dv for sets in per_root)
        removed_now = () if empty_free else tuple(sorted(removed))
        iterations.append(
            IterationTrace(dseed, forest, tuple(per_root),
                           all_candidates, removed_now)
        )
        if empty_free:
            return report(TERMINATING, "no-empty-dv")
        if not removed_now:
            return report(UNKNOWN, "empty-set-persists")
        for eid in removed_now:
            del edges[eid]

    raise AssertionError("iteration cap exceeded despite strict edge removal")


def hsieve(fmp: Fmp, config: AnalysisConfig | None = None) -> AnalysisReport:
    """Multi-sample driver: try def_samples seed streams, first success wins.

    Sample k runs hsieve_once with seed base_seed + k. The returned report
    carries every seed tried; when no sample proves termination, the first
    sample's verdict and trace are reported.
    """
    cfg = config if config is not None else AnalysisConfig()
    start = time.perf_counter()
    seeds: list[int] = []
    first: AnalysisReport | None = None
    winner: AnalysisReport | None = None
    for k in range(max(1, cfg.def_samples)):
        sample_seed = cfg.base_seed + k
        seeds.append(sample_seed)
        rep = hsieve_once(fmp, sample_seed, cfg)
        if first is None:
            first = rep
        if rep.verdict.kind == TERMINATING:
            winner = rep
            break
    chosen = winner if winner is not None else first
    assert chosen is not None
    return AnalysisReport(
        verdict=chosen.verdict,
        iterations=chosen.iterations,
        wall_time=time.perf_counter() - start,
        config=cfg,
        seeds=tuple(seeds),
    )


def progress_sieve(fmp: Fmp) -> Verdict:
    """Progress-variable baseline under qualitative (adversarial) semantics.

    Within each nontrivial SCC, a progress variable is decreased by at least
    one component edge and increased by none; all component edges decreasing
    a progress variable are removed and the remainder is re-decomposed. Any
    component with no removable edge refutes qualitative termination.
    """
    _require_normalized(fmp)
    g = policy_graph(fmp)
    effects = {e.id: e.effect for e in fmp.edges}

    def melts(sub: DiGraph) -> bool:
        parts = scc_decompose(sub)
        for comp in parts.nontrivial():
            inner = induced(sub, comp)
            decreased: set[str] = set()
            increased: set[str] = set()
            for aid, _, _ in inner.arcs:
                for var, delta in effects[aid].items():
                    if delta < 0:
                        decreased.add(var)
                    elif delta > 0:
                        increased.add(var)
            progress = decreased - increased
            removable = {
                aid
                for aid, _, _ in inner.arcs
                if any(effects[aid].get(x, 0) < 0 for x in progress)
            }
            if not removable:
                return False
            rest = DiGraph(
                vertices=inner.vertices,
                arcs=tuple(a for a in inner.arcs if a[0] not in removable),
            )
            if not melts(rest):
                return False
        return True

    if melts(g):
        return Verdict(TERMINATING, "progress")
    return Verdict(NONTERMINATING_QUALITATIVE, "no-progress-variable")


def path_cap_from_env(default: int = DEFAULT_PATH_CAP) -> int:
    """The per-node path cap, honoring the HSIEVE_PATH_CAP env var."""
    raw = os.environ.get("HSIEVE_PATH_CAP")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"HSIEVE_PATH_CAP must be an integer, got {raw!r}")
