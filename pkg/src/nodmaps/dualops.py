"""Dual constructions on graphs and simplicial maps.

The dual of a graph has one vertex per edge, adjacent when the edges meet.
The dual of a simplicial map f: G1 -> G0 has one vertex per component of an
edge preimage that maps onto that edge, together with the induced simplicial
map down to the dual of G0.  A map is ultra light when it is light and every
such component is a single edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .graphcore import (
    Edge,
    Graph,
    SimplicialMap,
    compose,
    edge,
    edge_key,
    edge_pair,
    graph_to_json,
    require_simplicial,
    vertex_key,
)


@dataclass(frozen=True)
class StarSubgraph:
    """A subgraph of the source graph attached to a dual vertex."""

    vertices: frozenset
    edges: frozenset

    def is_single_edge(self) -> bool:
        return len(self.edges) == 1 and len(self.vertices) == 2

    def contains(self, other: "StarSubgraph") -> bool:
        return other.vertices <= self.vertices and other.edges <= self.edges

    def meets(self, other: "StarSubgraph") -> bool:
        return bool(self.vertices & other.vertices)


@dataclass(frozen=True)
class DualGraph:
    """Dual of a graph: one vertex per source edge, adjacency by shared endpoint."""

    graph: Graph
    star: dict  # dual vertex -> source edge
    source: Graph


def dual_graph(g: Graph) -> DualGraph:
    """Dual vertices a1, a2, ... follow the canonical order of source edges."""
    edges = g.edges_sorted()
    names = {e: f"a{i + 1}" for i, e in enumerate(edges)}
    vertices = frozenset(names.values())
    dual_edges = frozenset(
        edge(names[d], names[e])
        for d, e in _meeting_pairs(edges)
    )
    return DualGraph(Graph(vertices, dual_edges), {names[e]: e for e in edges}, g)


def _meeting_pairs(edges):
    for i, d in enumerate(edges):
        for e in edges[i + 1:]:
            if d & e:
                yield d, e


@dataclass(frozen=True)
class DualOfMap:
    """Dual of a simplicial map with its star subgraphs and induced map."""

    graph: Graph
    star: dict  # dual vertex -> StarSubgraph of the domain of source_map
    over_edge: dict  # dual vertex -> codomain edge the star maps onto
    induced: SimplicialMap
    dual0: DualGraph
    source_map: SimplicialMap

    @cached_property
    def by_star(self) -> dict:
        return {self.star[b]: b for b in self.star}


def dual_of_map(f: SimplicialMap) -> DualOfMap:
    """Dual of a simplicial map.

    For each codomain edge e, the closed preimage subgraph consists of the
    domain vertices mapping into e and the domain edges whose image lies in
    e (collapsed edges included).  Its components whose image covers all of
    e become the dual vertices.  Dual vertices are named b1, b2, ... ordered
    by (canonical codomain edge, canonical least component vertex); two dual
    vertices are adjacent when their components share a domain vertex, and
    the induced map sends a component to the dual vertex of its edge.
    """
    require_simplicial(f, "dual_of_map argument")
    d0 = dual_graph(f.codomain)
    a_of_edge = {d0.star[a]: a for a in d0.star}

    components = []  # (codomain edge, StarSubgraph)
    for e in f.codomain.edges_sorted():
        endpoints = set(e)
        verts = {v for v in f.domain.vertices if f.assignment[v] in endpoints}
        local_edges = {
            d for d in f.domain.edges
            if all(f.assignment[x] in endpoints for x in d)
        }
        for comp in _components(verts, local_edges):
            image = {f.assignment[v] for v in comp.vertices}
            if image == endpoints:
                components.append((e, comp))

    components.sort(key=lambda pair: (edge_key(pair[0]), min(map(vertex_key, pair[1].vertices))))
    names = [f"b{i + 1}" for i in range(len(components))]
    star = {name: comp for name, (_, comp) in zip(names, components)}
    over = {name: e for name, (e, _) in zip(names, components)}

    dual_edges = set()
    for i, bi in enumerate(names):
        for bj in names[i + 1:]:
            if star[bi].meets(star[bj]):
                dual_edges.add(edge(bi, bj))
    dgraph = Graph(frozenset(names), frozenset(dual_edges))
    induced = SimplicialMap(dgraph, d0.graph, {b: a_of_edge[over[b]] for b in names})
    return DualOfMap(dgraph, star, over, induced, d0, f)


def _components(verts: set, edges: set):
    adj = {v: set() for v in verts}
    for d in edges:
        if len(d) == 2:
            x, y = d
            adj[x].add(y)
            adj[y].add(x)
    left = set(verts)
    while left:
        start = left.pop()
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        left -= seen
        comp_edges = frozenset(d for d in edges if d <= seen)
        yield StarSubgraph(frozenset(seen), comp_edges)


class DualPairError(ValueError):
    """The star of a composite component is not contained in a unique star."""


def d_pair(f: SimplicialMap, g: SimplicialMap) -> SimplicialMap:
    """Map between duals induced by a composable pair (f after g).

    Each dual vertex of the composite's dual is sent to the dual vertex of
    f whose star contains the g-image of its own star.  Existence and
    uniqueness of that target are verified at construction and violations
    raise :class:`DualPairError`.
    """
    if g.codomain != f.domain:
        raise ValueError("d_pair: codomain of second argument must equal domain of first")
    require_simplicial(f, "d_pair first argument")
    require_simplicial(g, "d_pair second argument")
    df = dual_of_map(f)
    dfg = dual_of_map(compose(f, g))

    assignment = {}
    for v, vstar in dfg.star.items():
        img_vertices = frozenset(g.assignment[x] for x in vstar.vertices)
        img_edges = set()
        for d in vstar.edges:
            img = g.image_of_edge(d)
            if isinstance(img, frozenset):
                img_edges.add(img)
        image = StarSubgraph(img_vertices, frozenset(img_edges))
        hits = [w for w in df.graph.vertices_sorted() if df.star[w].contains(image)]
        if not hits:
            raise DualPairError(f"no star of the first dual contains the image of {v}")
        if len(hits) > 1:
            raise DualPairError(f"ambiguous containment for {v}: {hits}")
        assignment[v] = hits[0]
    result = SimplicialMap(dfg.graph, df.graph, assignment)
    require_simplicial(result, "induced dual pair map")
    return result


def is_ultra_light(f: SimplicialMap) -> bool:
    """Light, and every dual star is a single edge."""
    require_simplicial(f, "is_ultra_light argument")
    if not f.is_light():
        return False
    dual = dual_of_map(f)
    return all(s.is_single_edge() for s in dual.star.values())


def dual_graph_to_json(d: DualGraph) -> dict:
    data = graph_to_json(d.graph)
    data["star"] = {
        a: list(edge_pair(d.star[a])) for a in d.graph.vertices_sorted()
    }
    return data


def dual_of_map_to_json(d: DualOfMap) -> dict:
    data = graph_to_json(d.graph)
    data["star"] = {
        b: {
            "vertices": sorted(d.star[b].vertices, key=vertex_key),
            "edges": [list(edge_pair(e)) for e in sorted(d.star[b].edges, key=edge_key)],
        }
        for b in d.graph.vertices_sorted()
    }
    data["induced"] = {b: d.induced.assignment[b] for b in d.graph.vertices_sorted()}
    return data
