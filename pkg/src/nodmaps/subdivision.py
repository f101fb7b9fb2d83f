"""Subdivision relations, map refinement, inverse systems, edge selections.

A subdivision replaces each coarse edge by an arc in a finer graph.  A
simplicial map whose codomain carries a subdivision can be refined to a map
between finer graphs, which is the engine that generates inverse systems
from a single seed map.  Edge selections and the preservation/consistency
checks live here as well.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field

from .graphcore import (
    Edge,
    Graph,
    SimplicialMap,
    Walk,
    compose,
    dumps,
    edge,
    edge_key,
    edge_pair,
    graph_to_json,
    identity_map,
    map_to_json,
    require_simplicial,
    vertex_key,
)


class DepthGuardExceeded(RuntimeError):
    """Generating another level would exceed the configured edge budget."""


@dataclass(frozen=True)
class Subdivision:
    """A finer graph together with the arc replacing each coarse edge."""

    fine: Graph
    coarse: Graph
    arc_of: dict  # coarse Edge -> Walk in fine

    def arc(self, e: Edge) -> Walk:
        return self.arc_of[frozenset(e)]

    def germ(self, v: str, e: Edge) -> Edge:
        """The edge of the arc over ``e`` that contains the coarse vertex ``v``."""
        walk = self.arc(e)
        if walk.start == v:
            return edge(walk.vertices[0], walk.vertices[1])
        if walk.end == v:
            return edge(walk.vertices[-2], walk.vertices[-1])
        raise ValueError(f"{v} is not an endpoint of the arc over {sorted(e)}")

    def oriented_arc(self, start: str, end: str) -> Walk:
        walk = self.arc(edge(start, end))
        if walk.start == start:
            return walk
        return walk.reverse()


def identity_subdivision(g: Graph) -> Subdivision:
    return Subdivision(g, g, {e: Walk(g, edge_pair(e)) for e in g.edges})


def check_subdivision(s: Subdivision) -> list:
    """Report violations of the three subdivision conditions; empty means valid."""
    violations = []
    if not s.coarse.vertices <= s.fine.vertices:
        violations.append("coarse vertices are not all fine vertices")
    missing = s.coarse.edges - set(s.arc_of)
    if missing:
        violations.append(f"no arc for {len(missing)} coarse edge(s)")
        return violations

    for e in s.coarse.edges_sorted():
        walk = s.arc_of[e]
        if walk.graph != s.fine:
            violations.append(f"arc over {sorted(e)} lives in the wrong graph")
            continue
        if not walk.is_simple_path() or len(walk) < 2:
            violations.append(f"(i) arc over {sorted(e)} is not an arc")
        if {walk.start, walk.end} != set(e):
            violations.append(f"(i) arc over {sorted(e)} has wrong endpoints")

    arcs = {e: (set(s.arc_of[e].vertices), s.arc_of[e].edge_set()) for e in s.coarse.edges}
    arc_list = sorted(arcs, key=edge_key)
    for i, d in enumerate(arc_list):
        for e in arc_list[i + 1:]:
            shared = arcs[d][0] & arcs[e][0]
            if shared != (d & e):
                violations.append(f"(ii) arcs over {sorted(d)} and {sorted(e)} overlap badly")
            if arcs[d][1] & arcs[e][1]:
                violations.append(f"(ii) arcs over {sorted(d)} and {sorted(e)} share an edge")

    covered_v = set().union(*(a[0] for a in arcs.values())) if arcs else set()
    covered_e = set().union(*(a[1] for a in arcs.values())) if arcs else set()
    if covered_v != s.fine.vertices:
        violations.append("(iii) some fine vertex lies on no arc")
    if covered_e != s.fine.edges:
        violations.append("(iii) some fine edge lies on no arc")
    return violations


def compose_subdivisions(outer: Subdivision, inner: Subdivision) -> Subdivision:
    """Route the arcs of ``inner`` through ``outer`` (fine of inner = coarse of outer)."""
    if outer.coarse != inner.fine:
        raise ValueError("compose_subdivisions: graphs do not chain")
    arc_of = {}
    for e in inner.coarse.edges:
        mid = inner.arc_of[e]
        verts = []
        for x, y in zip(mid.vertices, mid.vertices[1:]):
            piece = outer.oriented_arc(x, y)
            verts.extend(piece.vertices if not verts else piece.vertices[1:])
        arc_of[e] = Walk(outer.fine, tuple(verts))
    return Subdivision(outer.fine, inner.coarse, arc_of)


def refine_walk(s: Subdivision, walk: Walk) -> Walk:
    """The walk in the fine graph tracing a coarse walk arc by arc."""
    verts = [walk.vertices[0]]
    for x, y in zip(walk.vertices, walk.vertices[1:]):
        piece = s.oriented_arc(x, y)
        verts.extend(piece.vertices[1:])
    return Walk(s.fine, tuple(verts))


def subdivide_map(f: SimplicialMap, s: Subdivision):
    """Refine ``f`` against a subdivision of its codomain.

    Every domain edge with nondegenerate image is replaced by a fresh path
    carried isomorphically onto the refined arc of its image edge; collapsed
    edges are kept as single edges.  Fresh vertices are named
    ``"<p>~<q>#<k>"`` for the domain edge with canonically ordered endpoints
    (p, q), counting from p, so regeneration is reproducible.

    Returns the refined map and the subdivision of the domain it induces.
    """
    require_simplicial(f)
    if s.coarse != f.codomain:
        raise ValueError("subdivision must refine the codomain of the map")
    bad = check_subdivision(s)
    if bad:
        raise ValueError(f"invalid subdivision: {bad[0]}")

    new_vertices = set(f.domain.vertices)
    new_edges = set()
    assignment = {v: f.assignment[v] for v in f.domain.vertices}
    arc_of = {}

    for e in f.domain.edges_sorted():
        p, q = edge_pair(e)
        img = f.image_of_edge(e)
        if not isinstance(img, frozenset):
            new_edges.add(e)
            arc_path = (p, q)
        else:
            target = s.oriented_arc(f.assignment[p], f.assignment[q])
            k = len(target.vertices) - 2
            fresh = [f"{p}~{q}#{i + 1}" for i in range(k)]
            clash = set(fresh) & new_vertices
            if clash:
                raise ValueError(f"fresh vertex name collision: {sorted(clash)[:3]}")
            path = [p, *fresh, q]
            new_vertices.update(fresh)
            for x, y in zip(path, path[1:]):
                new_edges.add(edge(x, y))
            for name, image in zip(fresh, target.vertices[1:-1]):
                assignment[name] = image
            arc_path = tuple(path)
        arc_of[e] = arc_path

    fine = Graph(frozenset(new_vertices), frozenset(new_edges))
    fprime = SimplicialMap(fine, s.fine, assignment)
    domain_sub = Subdivision(fine, f.domain, {e: Walk(fine, p) for e, p in arc_of.items()})
    return fprime, domain_sub


@dataclass(frozen=True)
class EdgeSelection:
    """Nonempty sets of incident edges chosen at each vertex."""

    graph: Graph
    select: dict  # vertex -> frozenset of edges

    def __post_init__(self):
        for v in self.graph.vertices:
            chosen = self.select.get(v)
            if not chosen:
                raise ValueError(f"selection at {v} is empty or missing")
            for e in chosen:
                if v not in e or e not in self.graph.edges:
                    raise ValueError(f"selected edge {sorted(e)} is not incident to {v}")

    def at(self, v: str) -> frozenset:
        return self.select[v]


def full_star_selection(g: Graph) -> EdgeSelection:
    return EdgeSelection(
        g, {v: frozenset(e for e in g.edges if v in e) for v in g.vertices}
    )


def check_preserves(fprime: SimplicialMap, sub: Subdivision,
                    s0: EdgeSelection, s1: EdgeSelection):
    """Check that a refined map carries selected edge germs into selections.

    ``fprime`` maps the fine graph of ``sub`` into the graph carrying ``s0``;
    ``s1`` lives on the coarse graph of ``sub``.  Condition (i): for every
    coarse vertex v and selected edge e at v, the image of the germ of e at
    v is selected at the image of v.  Condition (ii): of any two fine edges
    meeting at a vertex, at least one has selected image there.

    Returns (ok, violations).
    """
    require_simplicial(fprime)
    if sub.fine != fprime.domain:
        raise ValueError("fprime must be defined on the fine graph of the subdivision")
    if s1.graph != sub.coarse:
        raise ValueError("s1 must live on the coarse graph")
    if s0.graph != fprime.codomain:
        raise ValueError("s0 must live on the codomain of fprime")

    violations = []
    for v in sub.coarse.vertices_sorted():
        for e in sorted(s1.at(v), key=edge_key):
            germ = sub.germ(v, e)
            img = fprime.image_of_edge(germ)
            if not isinstance(img, frozenset) or img not in s0.at(fprime.assignment[v]):
                violations.append(
                    f"(i) germ of {sorted(e)} at {v} maps outside the selection"
                )

    for v in fprime.domain.vertices_sorted():
        incident = sorted(
            (e for e in fprime.domain.edges if v in e), key=edge_key
        )
        fv = fprime.assignment[v]
        selected = s0.at(fv)
        for i, e in enumerate(incident):
            for eprime in incident[i + 1:]:
                img_e = fprime.image_of_edge(e)
                img_ep = fprime.image_of_edge(eprime)
                if not (
                    (isinstance(img_e, frozenset) and img_e in selected)
                    or (isinstance(img_ep, frozenset) and img_ep in selected)
                ):
                    violations.append(
                        f"(ii) neither {sorted(e)} nor {sorted(eprime)} selected at {v}"
                    )
    return (not violations, violations)


def check_consistency(f: SimplicialMap, fsub: Subdivision, s: EdgeSelection,
                      h1: Subdivision, lam: SimplicialMap) -> bool:
    """Check that ``lam`` exhibits the dual of ``f`` as a subdivision.

    ``f`` maps the fine graph of ``fsub`` down to the graph carrying ``s``
    (= the coarse graph of both ``fsub`` and ``h1``), and ``lam`` maps the
    fine graph of ``h1`` to the dual graph of ``f``.  The check verifies
    that lam is an isomorphism, that the germ of every selected edge lands
    inside the star of its vertex's image, and that the star of every
    interior vertex of an arc of h1 stays inside the corresponding arc of
    fsub.
    """
    from .dualops import StarSubgraph, dual_of_map

    require_simplicial(f)
    base = s.graph
    if fsub.coarse != base or h1.coarse != base or fsub.fine != f.domain:
        raise ValueError("graphs of f, fsub, s, h1 do not line up")
    dual = dual_of_map(f)
    if lam.domain != h1.fine or lam.codomain != dual.graph:
        raise ValueError("lam must map the fine graph of h1 to the dual graph of f")

    # isomorphism: bijective on vertices, edges carried bijectively to edges
    values = set(lam.assignment.values())
    if len(values) != len(lam.assignment) or values != dual.graph.vertices:
        return False
    lam_edges = set()
    for e in h1.fine.edges:
        img = lam.image_of_edge(e)
        if not isinstance(img, frozenset) or img not in dual.graph.edges:
            return False
        lam_edges.add(img)
    if lam_edges != dual.graph.edges or len(lam_edges) != len(h1.fine.edges):
        return False

    for v in base.vertices:
        for e in s.at(v):
            germ = fsub.germ(v, e)
            star = dual.star[lam.assignment[v]]
            if not star.contains(StarSubgraph(germ, frozenset([germ]))):
                return False

    for e in base.edges:
        arc_fine = fsub.arc(e)
        arc_sub = StarSubgraph(frozenset(arc_fine.vertices), arc_fine.edge_set())
        for v in h1.arc(e).vertices:
            if v in base.vertices:
                continue
            if not arc_sub.contains(dual.star[lam.assignment[v]]):
                return False
    return True


@dataclass
class InverseSystem:
    """Lazily extended tower of graphs generated by one seed map.

    Level 0 is the codomain of the seed; level 1 its domain; each further
    level refines the seed against the previous level's subdivision over the
    base.  Extension mutates internal memo tables and is serialized by a
    lock; reads of already-built levels are safe concurrently.
    """

    seed: SimplicialMap
    seed_subdivision: Subdivision
    edge_guard: int = 10 ** 6
    _graphs: list = field(default_factory=list)
    _over_base: list = field(default_factory=list)
    _bonding: list = field(default_factory=list)  # bonding[i]: X_{i+1} -> X_i
    _composites: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        require_simplicial(self.seed)
        if self.seed_subdivision.fine != self.seed.domain \
                or self.seed_subdivision.coarse != self.seed.codomain:
            raise ValueError("witness must subdivide the codomain by the domain")
        bad = check_subdivision(self.seed_subdivision)
        if bad:
            raise ValueError(f"seed witness is not a subdivision: {bad[0]}")
        self._graphs.append(self.seed.codomain)
        self._over_base.append(identity_subdivision(self.seed.codomain))

    @property
    def base(self) -> Graph:
        return self._graphs[0]

    def depth(self) -> int:
        return len(self._graphs) - 1

    def graph(self, i: int) -> Graph:
        self.extend_to(i)
        return self._graphs[i]

    def over_base(self, i: int) -> Subdivision:
        """Subdivision exhibiting level i over the base graph."""
        self.extend_to(i)
        return self._over_base[i]

    def bonding(self, i: int) -> SimplicialMap:
        """The map from level i+1 down to level i."""
        self.extend_to(i + 1)
        return self._bonding[i]

    def extend_to(self, depth: int) -> None:
        with self._lock:
            while self.depth() < depth:
                self._extend_once()

    def _extend_once(self) -> None:
        i = self.depth()
        if i == 0:
            nxt, over = self.seed.domain, self.seed_subdivision
            psi = self.seed
        else:
            psi, step = subdivide_map(self.seed, self._over_base[i])
            nxt = psi.domain
            over = compose_subdivisions(step, self.seed_subdivision)
            # step: X_{i+1} over X_1, composed with X_1 over X_0
        if len(nxt.edges) > self.edge_guard:
            raise DepthGuardExceeded(
                f"level {i + 1} would have {len(nxt.edges)} edges (guard {self.edge_guard})"
            )
        self._graphs.append(nxt)
        self._over_base.append(over)
        self._bonding.append(psi)

    def composite(self, i: int, j: int) -> SimplicialMap:
        """The composed bonding map from level j down to level i (j >= i)."""
        if j < i:
            raise ValueError("composite requires j >= i")
        self.extend_to(j)
        if i == j:
            return identity_map(self._graphs[i])
        key = (i, j)
        if key not in self._composites:
            self._composites[key] = compose(self.composite(i, j - 1), self._bonding[j - 1])
        return self._composites[key]

    def arm_walks(self, i: int, base_nod) -> list:
        """Arms of level i, traced through the subdivision over the base."""
        over = self.over_base(i)
        return [refine_walk(over, arm) for arm in base_nod.arms]


def generate_system(seed: SimplicialMap, witness: Subdivision, depth: int,
                    edge_guard: int = 10 ** 6) -> InverseSystem:
    """Build the inverse system generated by a seed map, up to ``depth``."""
    system = InverseSystem(seed, witness, edge_guard)
    system.extend_to(depth)
    return system


def system_manifest(system: InverseSystem) -> dict:
    levels = []
    for i in range(system.depth() + 1):
        g = system.graph(i)
        comp = system.composite(0, i)
        digest = hashlib.sha256(dumps(map_to_json(comp)).encode()).hexdigest()
        levels.append(
            {
                "index": i,
                "vertices": len(g.vertices),
                "edges": len(g.edges),
                "composite_sha256": digest,
            }
        )
    return {"depth": system.depth(), "levels": levels}


def export_system(system: InverseSystem, directory) -> None:
    """Write one JSON file per level plus a manifest with checksums."""
    import pathlib

    out = pathlib.Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(system.depth() + 1):
        data = graph_to_json(system.graph(i))
        if i > 0:
            data["bonding"] = map_to_json(system.bonding(i - 1))
        (out / f"level{i}.json").write_text(dumps(data))
    (out / "manifest.json").write_text(dumps(system_manifest(system)))
