"""Finite simple graphs, walks, simple-n-ods, and simplicial maps.

Vertices are symbolic string identifiers ("v0", "u13", ...).  All structures
are immutable after construction and all operations are pure, so values can
be shared freely between threads.

The canonical identifier order used for every deterministic tie-break splits
a name into alternating text/number chunks and compares them componentwise,
so "v2" < "v10" and "u1~u2#3" sorts predictably.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

Edge = frozenset  # frozenset of two vertex names

_CHUNK = re.compile(r"(\d+)")


def vertex_key(name: str) -> tuple:
    """Canonical sort key: alternating (text, number) chunks of the name."""
    parts = _CHUNK.split(name)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts))


def edge(x: str, y: str) -> Edge:
    return frozenset((x, y))


def edge_key(e: Edge) -> tuple:
    a, b = sorted(e, key=vertex_key)
    return (vertex_key(a), vertex_key(b))


def edge_pair(e: Edge) -> tuple[str, str]:
    """Endpoints of an edge in canonical order."""
    a, b = sorted(e, key=vertex_key)
    return a, b


class SizeGuardExceeded(RuntimeError):
    """A configurable search bound was exceeded before completion."""


@dataclass(frozen=True)
class Graph:
    """Finite simple graph over symbolic vertex identifiers."""

    vertices: frozenset
    edges: frozenset

    @staticmethod
    def from_edges(edges, isolated=()) -> "Graph":
        es = frozenset(frozenset(e) for e in edges)
        vs = frozenset(v for e in es for v in e) | frozenset(isolated)
        return Graph(vs, es)

    @cached_property
    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            if len(e) == 2:
                x, y = e
                adj[x].add(y)
                adj[y].add(x)
        return adj

    def neighbors(self, v: str) -> set:
        return self.adjacency[v]

    def degree(self, v: str) -> int:
        return len(self.adjacency[v])

    def has_edge(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.edges

    def vertices_sorted(self) -> list:
        return sorted(self.vertices, key=vertex_key)

    def edges_sorted(self) -> list:
        return sorted(self.edges, key=edge_key)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        start = next(iter(self.vertices))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.adjacency.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == len(self.vertices) - 1


def validate_graph(g: Graph) -> list:
    """Report every violated graph invariant; an empty list means valid."""
    violations = []
    for e in g.edges:
        if len(e) != 2:
            violations.append(f"self-loop or malformed edge: {sorted(e)}")
        for v in e:
            if v not in g.vertices:
                violations.append(f"edge endpoint not a listed vertex: {v}")
    if not g.vertices:
        violations.append("empty vertex set")
    elif not all(len(e) == 2 for e in g.edges):
        pass  # connectivity check would be distorted by malformed edges
    elif not g.is_connected():
        violations.append("disconnected")
    return violations


@dataclass(frozen=True)
class Walk:
    """Ordered vertex sequence in a host graph; backtracking is permitted."""

    graph: Graph
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 1:
            raise ValueError("walk needs at least one vertex")
        adj = self.graph.adjacency
        for v in self.vertices:
            if v not in self.graph.vertices:
                raise ValueError(f"walk vertex not in host graph: {v}")
        for x, y in zip(self.vertices, self.vertices[1:]):
            if y not in adj[x]:
                raise ValueError(f"walk steps over a non-edge: {x} -- {y}")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def start(self) -> str:
        return self.vertices[0]

    @property
    def end(self) -> str:
        return self.vertices[-1]

    @property
    def edge_list(self) -> list:
        return [edge(x, y) for x, y in zip(self.vertices, self.vertices[1:])]

    def edge_set(self) -> frozenset:
        return frozenset(self.edge_list)

    def reverse(self) -> "Walk":
        return Walk(self.graph, tuple(reversed(self.vertices)))

    def is_simple_path(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)


@dataclass(frozen=True)
class SimpleNOd:
    """A tree that is the union of arms joined at a designated branch vertex.

    For three or more arms the branch is the unique vertex of degree >= 3;
    for one or two arms it is explicitly designated data.
    """

    graph: Graph
    branch: str
    arms: tuple

    def __post_init__(self):
        if self.branch not in self.graph.vertices:
            raise ValueError("branch is not a vertex of the graph")
        if not self.arms:
            raise ValueError("a simple-n-od needs at least one arm")
        seen_edges = set()
        seen_interior = set()
        for arm in self.arms:
            if arm.start != self.branch:
                raise ValueError("every arm must start at the branch")
            if not arm.is_simple_path() or len(arm) < 2:
                raise ValueError("arms must be nondegenerate simple paths")
            interior = set(arm.vertices[1:])
            if interior & seen_interior:
                raise ValueError("arms intersect outside the branch")
            seen_interior |= interior
            for e in arm.edge_list:
                if e in seen_edges:
                    raise ValueError("arms share an edge")
                seen_edges.add(e)
        if frozenset(seen_edges) != self.graph.edges:
            raise ValueError("arm edges do not cover the graph")
        if len(self.arms) >= 3:
            heavy = [v for v in self.graph.vertices if self.graph.degree(v) >= 3]
            if heavy != [self.branch]:
                raise ValueError("branch must be the unique vertex of degree >= 3")

    @property
    def arm_count(self) -> int:
        return len(self.arms)


def recognize_simple_n_od(g: Graph, branch_hint: str | None = None):
    """Decompose ``g`` as a simple-n-od, or return None.

    Fails when the graph has a cycle or two or more vertices of degree >= 3.
    Arms are ordered by the canonical order of their first non-branch vertex.
    For paths and single edges the branch is ``branch_hint`` when given,
    otherwise the canonically least endpoint.
    """
    if validate_graph(g):
        return None
    if not g.is_tree():
        return None
    heavy = [v for v in g.vertices_sorted() if g.degree(v) >= 3]
    if len(heavy) > 1:
        return None
    if heavy:
        branch = heavy[0]
    elif branch_hint is not None:
        if branch_hint not in g.vertices:
            return None
        branch = branch_hint
    else:
        endpoints = [v for v in g.vertices_sorted() if g.degree(v) <= 1]
        branch = endpoints[0]
    if len(g.vertices) == 1:
        return None
    arms = []
    for first in sorted(g.neighbors(branch), key=vertex_key):
        path = [branch, first]
        prev, cur = branch, first
        while g.degree(cur) == 2:
            nxt = next(w for w in g.neighbors(cur) if w != prev)
            path.append(nxt)
            prev, cur = cur, nxt
        arms.append(Walk(g, tuple(path)))
    return SimpleNOd(g, branch, tuple(arms))


@dataclass(frozen=True, eq=True)
class SimplicialMap:
    """Total vertex assignment between graphs.

    Construction checks totality and codomain membership only; whether the
    map is actually simplicial (edges land on edges or vertices) is reported
    by :func:`map_properties`, so candidate maps that violate simpliciality
    can still be represented and diagnosed.
    """

    domain: Graph
    codomain: Graph
    assignment: dict = field(compare=True)

    def __post_init__(self):
        missing = self.domain.vertices - set(self.assignment)
        if missing:
            raise ValueError(f"assignment not total, missing {sorted(missing)[:4]}")
        extra = set(self.assignment) - self.domain.vertices
        if extra:
            raise ValueError(f"assignment over non-vertices {sorted(extra)[:4]}")
        for v, w in self.assignment.items():
            if w not in self.codomain.vertices:
                raise ValueError(f"image {w} of {v} not a codomain vertex")

    def __call__(self, v: str) -> str:
        return self.assignment[v]

    def image_of_edge(self, e: Edge):
        """Image edge, or the single image vertex for a collapsed edge."""
        x, y = e
        fx, fy = self.assignment[x], self.assignment[y]
        if fx == fy:
            return fx
        return edge(fx, fy)

    def is_simplicial(self) -> bool:
        for e in self.domain.edges:
            img = self.image_of_edge(e)
            if isinstance(img, frozenset) and img not in self.codomain.edges:
                return False
        return True

    def is_light(self) -> bool:
        return self.is_simplicial() and all(
            isinstance(self.image_of_edge(e), frozenset) for e in self.domain.edges
        )


def identity_map(g: Graph) -> SimplicialMap:
    return SimplicialMap(g, g, {v: v for v in g.vertices})


def require_simplicial(f: SimplicialMap, who: str = "map") -> None:
    if not f.is_simplicial():
        raise ValueError(f"{who} is not simplicial")


@dataclass(frozen=True)
class MapProperties:
    simplicial: bool
    light: bool
    monotone: bool
    surjective: bool


def map_properties(f: SimplicialMap) -> MapProperties:
    """Structural predicates of a vertex assignment.

    Monotone is checked as: every vertex fiber induces a connected subgraph
    and every codomain edge is covered by at most one domain edge.  For
    simplicial maps between graphs this coincides with connectedness of all
    point preimages of the underlying topological map.
    """
    simplicial = f.is_simplicial()
    light = simplicial and f.is_light()

    fibers = {}
    for v, w in f.assignment.items():
        fibers.setdefault(w, []).append(v)
    monotone = True
    for fiber in fibers.values():
        if not _induces_connected(f.domain, set(fiber)):
            monotone = False
            break
    if monotone:
        covered = {}
        for e in f.domain.edges:
            img = f.image_of_edge(e)
            if isinstance(img, frozenset):
                covered[img] = covered.get(img, 0) + 1
                if covered[img] > 1:
                    monotone = False
                    break

    vertex_onto = set(f.assignment.values()) == f.codomain.vertices
    covered_edges = {
        f.image_of_edge(e)
        for e in f.domain.edges
        if isinstance(f.image_of_edge(e), frozenset)
    }
    surjective = vertex_onto and covered_edges == f.codomain.edges
    return MapProperties(simplicial, light, monotone, surjective)


def _induces_connected(g: Graph, block: set) -> bool:
    if not block:
        return True
    start = next(iter(block))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in g.neighbors(v):
            if w in block and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == block


def compose(f: SimplicialMap, g: SimplicialMap) -> SimplicialMap:
    """Composite f after g; requires codomain(g) = domain(f)."""
    if g.codomain != f.domain:
        raise ValueError("compose: codomain of second argument must equal domain of first")
    assignment = {v: f.assignment[g.assignment[v]] for v in g.domain.vertices}
    return SimplicialMap(g.domain, f.codomain, assignment)


@dataclass(frozen=True)
class SimplerRefutation:
    """Certificate that an exhaustive partition search found no witness."""

    partitions_checked: int


def is_simpler(h: Graph, g: Graph, size_guard: int = 12):
    """Search for a simplicial monotone surjection from g onto h.

    Monotone simplicial surjections are exactly collapses of a partition of
    the vertices of g into connected blocks with at most one crossing edge
    between any two blocks, whose quotient graph is isomorphic to h.  The
    search is exhaustive over such partitions and returns the
    lexicographically least witness, or a :class:`SimplerRefutation` after
    completing the search.
    """
    if validate_graph(h) or validate_graph(g):
        raise ValueError("is_simpler requires valid graphs")
    if len(g.vertices) > size_guard:
        raise SizeGuardExceeded(f"{len(g.vertices)} vertices exceeds guard {size_guard}")

    verts = g.vertices_sorted()
    target_n = len(h.vertices)
    best = None
    checked = 0

    def quotient_ok_final(blocks):
        # blocks connected, pairwise crossing multiplicity already <= 1
        return all(_induces_connected(g, set(b)) for b in blocks)

    def crossing(blocks):
        cross = {}
        for e in g.edges:
            x, y = e
            bx = next(i for i, b in enumerate(blocks) if x in b)
            by = next(i for i, b in enumerate(blocks) if y in b)
            if bx != by:
                key = (min(bx, by), max(bx, by))
                cross[key] = cross.get(key, 0) + 1
        return cross

    def recurse(idx, blocks):
        nonlocal best, checked
        if len(blocks) > target_n:
            return
        if idx == len(verts):
            checked += 1
            if len(blocks) != target_n:
                return
            cross = crossing(blocks)
            if any(c > 1 for c in cross.values()):
                return
            if not quotient_ok_final(blocks):
                return
            q = Graph(
                frozenset(f"q{i}" for i in range(len(blocks))),
                frozenset(edge(f"q{i}", f"q{j}") for (i, j) in cross),
            )
            for iso in _isomorphisms(q, h):
                assignment = {}
                for i, b in enumerate(blocks):
                    for v in b:
                        assignment[v] = iso[f"q{i}"]
                witness = SimplicialMap(g, h, assignment)
                key = tuple(vertex_key(assignment[v]) for v in verts)
                if best is None or key < best[0]:
                    best = (key, witness)
            return
        v = verts[idx]
        for b in blocks:
            b.add(v)
            recurse(idx + 1, blocks)
            b.remove(v)
        blocks.append({v})
        recurse(idx + 1, blocks)
        blocks.pop()

    recurse(0, [])
    if best is not None:
        return best[1]
    return SimplerRefutation(checked)


def _isomorphisms(g: Graph, h: Graph):
    """Yield all vertex bijections g -> h preserving adjacency both ways."""
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return
    gs = g.vertices_sorted()
    by_degree = {}
    for w in h.vertices:
        by_degree.setdefault(h.degree(w), []).append(w)

    def extend(i, mapping, used):
        if i == len(gs):
            yield dict(mapping)
            return
        v = gs[i]
        for w in sorted(by_degree.get(g.degree(v), []), key=vertex_key):
            if w in used:
                continue
            ok = True
            for u in g.neighbors(v):
                if u in mapping and not h.has_edge(mapping[u], w):
                    ok = False
                    break
            if ok:
                # also ensure no spurious adjacency
                for u, wu in mapping.items():
                    if h.has_edge(wu, w) and not g.has_edge(u, v):
                        ok = False
                        break
            if ok:
                mapping[v] = w
                used.add(w)
                yield from extend(i + 1, mapping, used)
                del mapping[v]
                used.remove(w)

    yield from extend(0, {}, set())


# ---------------------------------------------------------------------------
# JSON / DOT interchange


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": g.vertices_sorted(),
        "edges": [list(edge_pair(e)) for e in g.edges_sorted()],
    }


def graph_from_json(data: dict) -> Graph:
    return Graph(
        frozenset(data["vertices"]),
        frozenset(frozenset(e) for e in data["edges"]),
    )


def map_to_json(f: SimplicialMap) -> dict:
    return {
        "domain": graph_to_json(f.domain),
        "codomain": graph_to_json(f.codomain),
        "assignment": {v: f.assignment[v] for v in f.domain.vertices_sorted()},
    }


def map_from_json(data: dict) -> SimplicialMap:
    return SimplicialMap(
        graph_from_json(data["domain"]),
        graph_from_json(data["codomain"]),
        dict(data["assignment"]),
    )


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in g.vertices_sorted():
        lines.append(f'  "{v}";')
    for e in g.edges_sorted():
        a, b = edge_pair(e)
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
