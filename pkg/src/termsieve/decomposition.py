"""Directed elimination forests and quotient graphs.

An elimination tree node pairs a vertex set with one elimination vertex; its
children are the nontrivial SCCs left after deleting that vertex. A forest
holds one tree per nontrivial SCC of the input graph. Elimination vertices
are drawn uniformly at random from a seeded generator, so one integer seed
fixes the whole forest.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .graphs import DiGraph, induced, is_acyclic, scc_decompose


@dataclass(frozen=True)
class DetNode:
    vertices: frozenset[str]
    elim: str
    children: tuple["DetNode", ...]

    def walk(self) -> list["DetNode"]:
        """Preorder traversal of the subtree rooted here."""
        out = [self]
        for c in self.children:
            out.extend(c.walk())
        return out


@dataclass(frozen=True)
class DefForest:
    trees: tuple[DetNode, ...]
    seed: int


@dataclass(frozen=True)
class QuotientGraph:
    """A node's graph with each child SCC collapsed to a component vertex.

    `component_map` sends each component vertex name to the child vertex set
    it stands for.
    """

    graph: DiGraph
    component_map: Mapping[str, frozenset[str]]


def component_name(vertices: frozenset[str]) -> str:
    return "c:" + "_".join(sorted(vertices))


def _build_node(g: DiGraph, vs: frozenset[str], rng: random.Random) -> DetNode:
    elim = rng.choice(sorted(vs))
    rest = induced(g, vs - {elim})
    children = tuple(
        _build_node(g, c, rng) for c in scc_decompose(rest).nontrivial()
    )
    return DetNode(vertices=vs, elim=elim, children=children)


def build_def(g: DiGraph, seed: int) -> DefForest:
    """One elimination tree per nontrivial SCC of `g`, in canonical order."""
    rng = random.Random(seed)
    trees = tuple(
        _build_node(g, c, rng) for c in scc_decompose(g).nontrivial()
    )
    return DefForest(trees=trees, seed=seed)


def quotient(g: DiGraph, node: DetNode) -> QuotientGraph:
    """Collapse `node`'s children inside the induced subgraph on its vertices.

    Arcs internal to one child are dropped; every other arc survives under
    its original id, with endpoints redirected to component vertices. Arc
    multiplicity is preserved.
    """
    comp_of: dict[str, str] = {}
    component_map: dict[str, frozenset[str]] = {}
    for child in node.children:
        cname = component_name(child.vertices)
        component_map[cname] = child.vertices
        for v in child.vertices:
            comp_of[v] = cname

    vertices = set(component_map)
    vertices.update(v for v in node.vertices if v not in comp_of)

    arcs = []
    for aid, src, dst in g.arcs:
        if src not in node.vertices or dst not in node.vertices:
            continue
        s2 = comp_of.get(src, src)
        d2 = comp_of.get(dst, dst)
        if s2 == d2 and s2 in component_map:
            continue  # internal to one child
        arcs.append((aid, s2, d2))

    return QuotientGraph(
        graph=DiGraph(vertices=frozenset(vertices), arcs=tuple(arcs)),
        component_map=component_map,
    )


def check_det(forest: DefForest, g: DiGraph) -> list[str]:
    """Validity violations of a forest against its graph (empty = valid)."""
    out: list[str] = []
    roots = {t.vertices for t in forest.trees}
    expected_roots = set(scc_decompose(g).nontrivial())
    if roots != expected_roots:
        out.append(
            "roots-mismatch: trees "
            f"{sorted(sorted(r) for r in roots)} vs SCCs "
            f"{sorted(sorted(r) for r in expected_roots)}"
        )

    def visit(node: DetNode, seen: set[frozenset[str]]) -> None:
        where = f"({','.join(sorted(node.vertices))}, {node.elim})"
        if node.vertices in seen:
            out.append(f"duplicate-node: {where}")
        seen.add(node.vertices)
        if node.elim not in node.vertices:
            out.append(f"elim-not-member: {where}")
            return
        rest = induced(g, node.vertices - {node.elim})
        expected = set(scc_decompose(rest).nontrivial())
        actual = {c.vertices for c in node.children}
        if actual != expected:
            out.append(f"children-mismatch: {where}")
        q = quotient(g, node).graph
        minus_elim = induced(q, q.vertices - {node.elim})
        if not is_acyclic(minus_elim):
            out.append(f"quotient-not-acyclic: {where}")
        for c in node.children:
            visit(c, seen)

    for tree in forest.trees:
        visit(tree, set())
    return out
