"""The parameterized bonding-map family on simple-n-ods, n >= 3.

For each n this builds the base n-od, its refinement, the light bonding map
between them, the distinguished edge selection, the comparison subdivision
with its isomorphism onto the dual of the bonding map, and the formulaic
golden record for the dual structure that the computed dual is tested
against.

Index conventions: all residues "mod (n-2)" are taken in {1, ..., n-2}
(residue 0 reads as n-2).  The value-0 reading would collapse an edge next
to a hub-valued vertex and break lightness of the bonding map, so any
convention error here trips the lightness tests immediately.  Ranges over
1..n-3 are empty when n = 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .dualops import DualOfMap, StarSubgraph, dual_of_map
from .graphcore import (
    Graph,
    SimpleNOd,
    SimplicialMap,
    Walk,
    edge,
    recognize_simple_n_od,
)
from .subdivision import EdgeSelection, Subdivision


def _res(x: int, n: int) -> int:
    """Residue of x mod (n-2) taken in {1, ..., n-2}."""
    return (x - 1) % (n - 2) + 1


def _v(i: int) -> str:
    return f"v{i}"


def _u(i: int) -> str:
    return f"u{i}"


def _w(i: int) -> str:
    return f"w{i}"


@dataclass(frozen=True)
class FamilyBundle:
    """Everything the family defines for one n."""

    n: int
    x0: SimpleNOd
    x1: SimpleNOd
    x1_over_x0: Subdivision
    phi: SimplicialMap
    selection: EdgeSelection
    y1: Subdivision
    lam: SimplicialMap
    dual: DualOfMap


def base_graph(n: int) -> Graph:
    edges = [edge(_v(0), _v(i)) for i in range(1, n + 1)]
    edges.append(edge(_v(n - 1), _v(n + 1)))
    edges.append(edge(_v(n), _v(n + 2)))
    return Graph.from_edges(edges)


def _x1_arm_paths(n: int) -> list:
    """Vertex paths of the refined arms, arm index 1..n."""
    s = (2 * n - 1) * (n - 3)
    arms = []
    for i in range(1, n - 2):
        path = [_v(0)]
        path += [_u(j * (n - 3) + i) for j in range(2 * (n - 1))]
        path.append(_u(2 * (n - 1) * (n - 3) + i))
        path.append(_v(i))
        arms.append(path)
    arms.append([_v(0), _u(s + 2 * (n - 1) + 1), _v(n - 2)])
    arms.append([_v(0), _u(s + 2 * (n - 1) + 2), _u(s + 2 * (n - 1) + 3),
                 _v(n - 1), _v(n + 1)])
    arms.append([_v(0)] + [_u(s + i) for i in range(1, 2 * (n - 1) + 1)]
                + [_v(n), _v(n + 2)])
    return arms


def u_count(n: int) -> int:
    return (2 * n - 1) * (n - 3) + 2 * (n - 1) + 3


def bonding_values(n: int) -> dict:
    """The defining vertex assignment of the bonding map."""
    s = (2 * n - 1) * (n - 3)
    phi = {_v(0): _v(0)}
    for i in range(1, n - 2):
        phi[_v(i)] = _v(n + 2)
    phi[_v(n - 2)] = _v(n + 1)
    phi[_v(n - 1)] = _v(n)
    phi[_v(n)] = _v(n)
    phi[_v(n + 1)] = _v(n + 2)
    phi[_v(n + 2)] = _v(n + 2)
    for i in range(1, n - 2):
        phi[_u(i)] = _v(n - 1)
        for j in range(1, 2 * n - 2, 2):
            phi[_u(j * (n - 3) + i)] = _v(0)
        for j in range(2, 2 * n - 3, 2):
            phi[_u(j * (n - 3) + i)] = _v(_res(i - 1 + j // 2, n))
        phi[_u(2 * (n - 1) * (n - 3) + i)] = _v(n)
    phi[_u(s + 1)] = _v(n - 1)
    for i in range(2, 2 * (n - 1) + 1, 2):
        phi[_u(s + i)] = _v(0)
    phi[_u(s + 3)] = _v(n - 2)
    for i in range(5, 2 * (n - 1), 2):
        phi[_u(s + i)] = _v((i - 3) // 2)
    phi[_u(s + 2 * (n - 1) + 1)] = _v(n - 1)
    phi[_u(s + 2 * (n - 1) + 2)] = _v(n - 1)
    phi[_u(s + 2 * (n - 1) + 3)] = _v(0)
    return phi


def selection_on_base(n: int) -> EdgeSelection:
    g = base_graph(n)
    select = {_v(i): frozenset([edge(_v(0), _v(i))]) for i in range(1, n + 1)}
    select[_v(n + 1)] = frozenset([edge(_v(n - 1), _v(n + 1))])
    select[_v(n + 2)] = frozenset([edge(_v(n), _v(n + 2))])
    select[_v(0)] = frozenset(edge(_v(0), _v(i)) for i in range(1, n))
    return EdgeSelection(g, select)


def _arm_arcs_over_base(n: int, arm_paths: list, fine: Graph) -> dict:
    """Arc routing of a refinement whose arms subdivide the base arms."""
    arc_of = {}
    for i, path in enumerate(arm_paths, start=1):
        if i <= n - 2:
            arc_of[edge(_v(0), _v(i))] = Walk(fine, tuple(path))
        else:
            tip = _v(n + 1) if i == n - 1 else _v(n + 2)
            mid = _v(n - 1) if i == n - 1 else _v(n)
            arc_of[edge(_v(0), mid)] = Walk(fine, tuple(path[:-1]))
            arc_of[edge(mid, tip)] = Walk(fine, (mid, tip))
    return arc_of


def _y1_arm_paths(n: int) -> list:
    arms = []
    for i in range(1, n - 2):
        path = [_v(0)]
        path += [_w(j * (n - 3) + i) for j in range(n - 1)]
        path.append(_v(i))
        arms.append(path)
    arms.append([_v(0), _v(n - 2)])
    arms.append([_v(0), _v(n - 1), _v(n + 1)])
    arms.append([_v(0)] + [_w((n - 1) * (n - 3) + i) for i in range(1, n - 1)]
                + [_v(n), _v(n + 2)])
    return arms


def _lambda_paper_indices(n: int) -> dict:
    """The comparison isomorphism, valued in published dual vertex indices."""
    lam = {_v(0): 0}
    for i in range(1, n - 2):
        lam[_v(i)] = (n - 1) * (n - 3) + i
    lam[_v(n - 2)] = n * (n - 3) + n + 1
    lam[_v(n - 1)] = n * (n - 3) + n + 2
    lam[_v(n)] = n * (n - 3) + n - 1
    lam[_v(n + 1)] = n * (n - 3) + n + 3
    lam[_v(n + 2)] = n * (n - 3) + n
    for j in range(n - 1):
        for i in range(1, n - 2):
            lam[_w(j * (n - 3) + i)] = j * (n - 3) + i
    for i in range(1, n - 1):
        lam[_w((n - 1) * (n - 3) + i)] = n * (n - 3) + i
    return lam


def paper_b_stars(n: int) -> dict:
    """Published star subgraphs of the dual, keyed by dual vertex index."""
    s = (2 * n - 1) * (n - 3)
    t = 2 * (n - 1)
    stars = {}

    b0_edges = []
    for i in range(1, n - 2):
        b0_edges.append(edge(_v(0), _u(i)))
        b0_edges.append(edge(_u(i), _u((n - 3) + i)))
    b0_edges.append(edge(_v(0), _u(s + 1)))
    b0_edges.append(edge(_u(s + 1), _u(s + 2)))
    b0_edges.append(edge(_v(0), _u(s + t + 1)))
    b0_edges.append(edge(_v(0), _u(s + t + 2)))
    b0_edges.append(edge(_u(s + t + 2), _u(s + t + 3)))
    stars[0] = b0_edges

    for j in range(n - 2):
        for i in range(1, n - 2):
            stars[j * (n - 3) + i] = [
                edge(_u((2 * j + 1) * (n - 3) + i), _u((2 * j + 2) * (n - 3) + i)),
                edge(_u((2 * j + 2) * (n - 3) + i), _u((2 * j + 3) * (n - 3) + i)),
            ]
    for i in range(1, n - 2):
        stars[(n - 2) * (n - 3) + i] = [
            edge(_u((2 * n - 3) * (n - 3) + i), _u(2 * (n - 1) * (n - 3) + i))
        ]
        stars[(n - 1) * (n - 3) + i] = [
            edge(_u(2 * (n - 1) * (n - 3) + i), _v(i))
        ]
    for i in range(1, n - 1):
        stars[n * (n - 3) + i] = [
            edge(_u(s + 2 * i), _u(s + 2 * i + 1)),
            edge(_u(s + 2 * i + 1), _u(s + 2 * i + 2)),
        ]
    stars[n * (n - 3) + n - 1] = [edge(_u(s + t), _v(n))]
    stars[n * (n - 3) + n] = [edge(_v(n), _v(n + 2))]
    stars[n * (n - 3) + n + 1] = [edge(_u(s + t + 1), _v(n - 2))]
    stars[n * (n - 3) + n + 2] = [edge(_u(s + t + 3), _v(n - 1))]
    stars[n * (n - 3) + n + 3] = [edge(_v(n - 1), _v(n + 1))]

    return {
        k: StarSubgraph(frozenset(v for e in es for v in e), frozenset(es))
        for k, es in stars.items()
    }


@lru_cache(maxsize=None)
def build_family(n: int) -> FamilyBundle:
    """Construct the family bundle for n >= 3; every table row realized."""
    if n < 3:
        raise ValueError("the family is defined for n >= 3")
    x0_graph = base_graph(n)
    x0 = recognize_simple_n_od(x0_graph)
    assert x0 is not None and x0.branch == _v(0)

    arm_paths = _x1_arm_paths(n)
    x1_edges = [
        edge(a, b) for path in arm_paths for a, b in zip(path, path[1:])
    ]
    x1_graph = Graph.from_edges(x1_edges)
    x1 = SimpleNOd(
        x1_graph, _v(0), tuple(Walk(x1_graph, tuple(p)) for p in arm_paths)
    )
    x1_over_x0 = Subdivision(x1_graph, x0_graph, _arm_arcs_over_base(n, arm_paths, x1_graph))

    phi = SimplicialMap(x1_graph, x0_graph, bonding_values(n))
    selection = selection_on_base(n)

    y1_paths = _y1_arm_paths(n)
    y1_edges = [edge(a, b) for path in y1_paths for a, b in zip(path, path[1:])]
    y1_graph = Graph.from_edges(y1_edges)
    y1 = Subdivision(y1_graph, x0_graph, _arm_arcs_over_base(n, y1_paths, y1_graph))

    dual = dual_of_map(phi)
    pin = pin_paper_vertices(n, dual)
    lam_values = {
        v: pin[idx] for v, idx in _lambda_paper_indices(n).items()
    }
    lam = SimplicialMap(y1_graph, dual.graph, lam_values)

    return FamilyBundle(n, x0, x1, x1_over_x0, phi, selection, y1, lam, dual)


def pin_paper_vertices(n: int, dual: DualOfMap) -> dict:
    """Map published dual vertex indices to computed dual vertices by star content."""
    pin = {}
    for idx, star in paper_b_stars(n).items():
        match = dual.by_star.get(star)
        if match is None:
            raise ValueError(f"no computed dual vertex has the published star {idx}")
        pin[idx] = match
    if len(pin) != len(dual.star):
        raise ValueError("published star table does not cover the computed dual")
    return pin


@dataclass(frozen=True)
class GoldenDual:
    """Formulaic expectations for the dual structure at one n.

    Everything is expressed in published indices: a-names for the base dual,
    integer b-indices for the map dual.  Tests pin b-indices to computed
    vertices through the star table and compare structure under that
    correspondence.
    """

    n: int
    a_star: dict  # a-name -> base edge
    a_edges: frozenset  # frozenset of frozensets of a-names
    b_count: int
    b_star: dict  # b-index -> StarSubgraph
    b_edges: frozenset  # frozenset of frozensets of b-indices
    b_arcs: dict  # arm index 1..n -> list of b-indices from the hub out
    d_values: dict  # b-index -> a-name
    edge_inverses: dict  # frozenset of a-names -> frozenset of b-index edges


def expected_dual(n: int) -> GoldenDual:
    if n < 3:
        raise ValueError("the family is defined for n >= 3")
    a_star = {f"a{i}": edge(_v(0), _v(i)) for i in range(1, n + 1)}
    a_star[f"a{n + 1}"] = edge(_v(n - 1), _v(n + 1))
    a_star[f"a{n + 2}"] = edge(_v(n), _v(n + 2))
    a_edges = {
        frozenset((f"a{i}", f"a{j}"))
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    }
    a_edges.add(frozenset((f"a{n - 1}", f"a{n + 1}")))
    a_edges.add(frozenset((f"a{n}", f"a{n + 2}")))

    nn = n * (n - 3)
    b_edges = set()
    for i in list(range(1, n - 2)) + [nn + 1, nn + n + 1, nn + n + 2]:
        b_edges.add(frozenset((0, i)))
    for i in range(1, n - 2):
        for j in range(n - 1):
            b_edges.add(frozenset((j * (n - 3) + i, (j + 1) * (n - 3) + i)))
    for i in range(1, n):
        b_edges.add(frozenset((nn + i, nn + i + 1)))
    b_edges.add(frozenset((nn + n + 2, nn + n + 3)))

    b_arcs = {}
    for i in range(1, n - 2):
        b_arcs[i] = [0] + [j * (n - 3) + i for j in range(n)]
    b_arcs[n - 2] = [0, nn + n + 1]
    b_arcs[n - 1] = [0, nn + n + 2, nn + n + 3]
    b_arcs[n] = [0] + [nn + i for i in range(1, n + 1)]

    d_values = {0: f"a{n - 1}"}
    for j in range(n - 2):
        for i in range(1, n - 2):
            d_values[j * (n - 3) + i] = f"a{_res(i + j, n)}"
    for i in range(1, n - 2):
        d_values[(n - 2) * (n - 3) + i] = f"a{n}"
        d_values[(n - 1) * (n - 3) + i] = f"a{n + 2}"
    d_values[nn + 1] = f"a{n - 2}"
    for i in range(2, n - 1):
        d_values[nn + i] = f"a{i - 1}"
    d_values[nn + n - 1] = f"a{n}"
    d_values[nn + n] = f"a{n + 2}"
    d_values[nn + n + 1] = f"a{n + 1}"
    d_values[nn + n + 2] = f"a{n}"
    d_values[nn + n + 3] = f"a{n + 2}"

    inv = {}

    def put(ai: int, aj: int, pairs):
        inv[frozenset((f"a{ai}", f"a{aj}"))] = frozenset(
            frozenset(p) for p in pairs
        )

    for i in range(1, n - 2):
        put(n - 1, i, [(0, i)])
    put(n - 1, n - 2, [(0, nn + 1)])
    put(n - 1, n + 1, [(0, nn + n + 1)])
    put(n - 1, n, [(0, nn + n + 2)])
    for i in range(1, n - 3):
        pairs = [
            (j * (n - 3) + i - j, (j + 1) * (n - 3) + i - j) for j in range(i)
        ]
        pairs += [
            ((n - 3 - j) * (n - 3) + i + 1 + j, (n - 2 - j) * (n - 3) + i + 1 + j)
            for j in range(1, n - 3 - i)
        ]
        pairs.append((nn + i + 1, nn + i + 2))
        put(i, i + 1, pairs)
    if n >= 4:
        put(n - 3, n - 2,
            [((n - 3 - i) * (n - 3) + i, (n - 2 - i) * (n - 3) + i)
             for i in range(1, n - 2)])
        for i in range(1, n - 3):
            put(i, n, [((n - 3) * (n - 3) + i + 1, (n - 2) * (n - 3) + i + 1)])
        put(n - 3, n, [(nn + n - 2, nn + n - 1)])
        put(n - 2, n, [((n - 3) * (n - 3) + 1, (n - 2) * (n - 3) + 1)])
    else:
        # the single interior chain edge plays the published (n-2, n) role
        put(n - 2, n, [(nn + n - 2, nn + n - 1)])
    put(n, n + 2,
        [(nn + n - 1, nn + n), (nn + n + 2, nn + n + 3)]
        + [((n - 2) * (n - 3) + i, (n - 1) * (n - 3) + i) for i in range(1, n - 2)])

    return GoldenDual(
        n=n,
        a_star=a_star,
        a_edges=frozenset(a_edges),
        b_count=nn + n + 4,
        b_star=paper_b_stars(n),
        b_edges=frozenset(b_edges),
        b_arcs=b_arcs,
        d_values=d_values,
        edge_inverses=inv,
    )


def golden_to_json(g: GoldenDual) -> dict:
    from .graphcore import edge_pair

    return {
        "n": g.n,
        "a_star": {a: list(edge_pair(e)) for a, e in sorted(g.a_star.items())},
        "a_edges": sorted(sorted(e) for e in g.a_edges),
        "b_count": g.b_count,
        "b_edges": sorted(sorted(e) for e in g.b_edges),
        "b_arcs": {str(i): arc for i, arc in sorted(g.b_arcs.items())},
        "d_values": {str(b): a for b, a in sorted(g.d_values.items())},
        "edge_inverses": {
            "|".join(sorted(k)): sorted(sorted(p) for p in v)
            for k, v in sorted(g.edge_inverses.items(), key=lambda kv: sorted(kv[0]))
        },
    }
