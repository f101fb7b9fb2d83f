"""Walk algebra and the arm-pattern machinery of the bonding-map family.

An arm pattern is the image walk of one arm of the level-m graph under the
composed bonding map down to the base.  Patterns can be built directly from
the generated system, or by a wedge recursion on the previous level; the two
routes must agree exactly and the test suite holds them to that.

The normal form decomposes a pattern into a mined common prefix, interior
palindromic blocks centered on a tip vertex, and a fixed spelled-out suffix.
The prefix and the block family are recovered empirically (the prefix from
the hub-arm pattern at level 2, blocks by maximal palindromic factorization)
and frozen by fixtures rather than transcribed from anywhere.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

from .graphcore import SimplicialMap, Walk
from .nodfamily import build_family
from .subdivision import InverseSystem, refine_walk


class LightnessError(ValueError):
    """A walk image hit a collapsed edge."""


class NormalFormError(RuntimeError):
    """A pattern failed to decompose; this falsifies the expected structure."""


def wedge(p: Walk, q: Walk) -> Walk:
    """Concatenate two walks sharing a junction vertex (kept once)."""
    if p.graph != q.graph:
        raise ValueError("wedge requires walks in the same host graph")
    if p.end != q.start:
        raise ValueError(f"wedge junction mismatch: {p.end} vs {q.start}")
    return Walk(p.graph, p.vertices + q.vertices[1:])


def apply_walk(f: SimplicialMap, p: Walk) -> Walk:
    """Pointwise image of a walk; requires f collapses no edge along it."""
    if p.graph != f.domain:
        raise ValueError("walk does not live in the domain of the map")
    images = tuple(f.assignment[v] for v in p.vertices)
    for x, y in zip(images, images[1:]):
        if x == y:
            raise LightnessError("map collapses an edge of the walk")
    return Walk(f.codomain, images)


@dataclass(frozen=True)
class ArmPattern:
    """Image of arm ``arm`` of level ``m`` under the composite bonding map."""

    n: int
    m: int
    arm: int
    walk: Walk


_SYSTEMS: dict = {}
_SYSTEMS_LOCK = threading.Lock()


def family_system(n: int) -> InverseSystem:
    """Shared inverse system generated by the family bonding map."""
    with _SYSTEMS_LOCK:
        if n not in _SYSTEMS:
            bundle = build_family(n)
            _SYSTEMS[n] = InverseSystem(bundle.phi, bundle.x1_over_x0)
        return _SYSTEMS[n]


def _check_args(n: int, m: int, i: int) -> None:
    if n < 3:
        raise ValueError("n must be at least 3")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if not 1 <= i <= n:
        raise ValueError(f"arm index must lie in 1..{n}")


def pattern_direct(n: int, m: int, i: int) -> ArmPattern:
    """Build level m, trace arm i through it, and apply the composite map."""
    _check_args(n, m, i)
    bundle = build_family(n)
    system = family_system(n)
    system.extend_to(m)
    arm = refine_walk(system.over_base(m), bundle.x0.arms[i - 1])
    image = apply_walk(system.composite(0, m), arm)
    return ArmPattern(n, m, i, image)


@lru_cache(maxsize=None)
def _recursive_level(n: int, m: int) -> tuple:
    """Vertex tuples of all n arm patterns at level m, computed by recursion."""
    bundle = build_family(n)
    if m == 0:
        return tuple(arm.vertices for arm in bundle.x0.arms)

    prev = _recursive_level(n, m - 1)

    def pat(j: int) -> tuple:
        return prev[j - 1]

    def res(x: int) -> int:
        return (x - 1) % (n - 2) + 1

    def out_back(seq: tuple) -> tuple:
        return seq + seq[-2::-1]

    hub = pat(n - 1)
    hub_out_back = out_back(hub[:-1])

    level = []
    for i in range(1, n - 2):
        seq = hub_out_back
        for j in range(n - 1):
            seq = seq + out_back(pat(res(i + j)))[1:]
        level.append(seq + pat(n)[1:])
    level.append(pat(n - 1))
    level.append(hub_out_back + pat(n)[1:])
    seq = hub_out_back + out_back(pat(n - 2))[1:]
    for j in range(1, n - 2):
        seq = seq + out_back(pat(j))[1:]
    level.append(seq + pat(n)[1:])
    return tuple(level)


def pattern_recursive(n: int, m: int, i: int) -> ArmPattern:
    """Arm pattern via the level recursion; never builds the refined graphs.

    Level m arises from level m-1 by: arms up to n-3 walk out and back along
    the truncated hub-arm pattern, then out and back along each arm pattern
    in rotated order, then out along arm n; arm n-2 copies the previous hub
    arm; the hub arm and arm n shorten that template.  Rotation indices are
    reduced mod (n-2) into {1, ..., n-2}.
    """
    _check_args(n, m, i)
    bundle = build_family(n)
    seq = _recursive_level(n, m)[i - 1]
    return ArmPattern(n, m, i, Walk(bundle.x0.graph, seq))


def is_palindrome(p: Walk):
    """Whether the walk reads the same reversed; center vertex when odd."""
    seq = p.vertices
    ok = seq == seq[::-1]
    center = seq[len(seq) // 2] if ok and len(seq) % 2 == 1 else None
    return ok, center


def suffix_vertices(n: int) -> tuple:
    """The spelled-out tail every decomposable pattern ends with."""
    seq = [f"v{0}", f"v{n - 1}", "v0", f"v{n - 2}"]
    for t in range(1, n - 2):
        seq += ["v0", f"v{t}"]
    seq += ["v0", f"v{n}", f"v{n + 2}"]
    return tuple(seq)


@lru_cache(maxsize=None)
def mined_prefix(n: int) -> tuple:
    """Common pattern prefix, mined from the hub-arm pattern at level 2."""
    probe = pattern_direct(n, 2, n - 1).walk.vertices
    suffix = suffix_vertices(n)
    if probe[-len(suffix):] != suffix:
        raise NormalFormError("hub-arm pattern at level 2 does not end with the suffix")
    return probe[: len(probe) - len(suffix) + 1]


@dataclass(frozen=True)
class NormalForm:
    pattern: ArmPattern
    prefix: tuple
    blocks: tuple  # tuple of vertex tuples, wedge-composed in order
    suffix: tuple

    @property
    def block_centers(self) -> tuple:
        return tuple(b[len(b) // 2] for b in self.blocks)


def normal_form(p: ArmPattern) -> NormalForm:
    """Decompose a pattern as prefix, palindromic tip blocks, suffix.

    Requires m >= 3.  The interior factorization is forced: blocks span
    between consecutive junctions, each centered on one occurrence of a tip
    vertex, and the chain must land exactly on the suffix.  Any mismatch
    raises :class:`NormalFormError` loudly, since it would falsify the
    structural expectation the suite pins down.
    """
    n, seq = p.n, p.walk.vertices
    if p.m < 3:
        raise ValueError("normal form requires level m >= 3")
    suffix = suffix_vertices(n)
    if seq[-len(suffix):] != suffix:
        raise NormalFormError(f"pattern {p.n, p.m, p.arm} does not end with the suffix")
    prefix = mined_prefix(n)
    if seq[: len(prefix)] != prefix:
        raise NormalFormError(f"pattern {p.n, p.m, p.arm} does not start with the prefix")

    a = len(prefix) - 1
    b = len(seq) - len(suffix)
    if a > b:
        raise NormalFormError("prefix and suffix overlap")
    tips = {f"v{n}", f"v{n + 1}", f"v{n + 2}"}
    tip_positions = [t for t in range(a + 1, b) if seq[t] in tips]

    blocks = []
    cursor = a
    for t in tip_positions:
        if t <= cursor:
            raise NormalFormError("tip occurrence inside a previous block")
        end = 2 * t - cursor
        if end > b:
            raise NormalFormError("block around a tip overruns the suffix")
        block = seq[cursor: end + 1]
        if block != block[::-1]:
            raise NormalFormError("interior block is not a palindrome")
        interior_tips = [x for x in block[1:-1] if x in tips]
        if interior_tips != [seq[t]]:
            raise NormalFormError("block does not contain exactly one tip")
        blocks.append(block)
        cursor = end
    if cursor != b:
        raise NormalFormError("interior does not factor into tip blocks")
    return NormalForm(p, prefix, tuple(blocks), suffix)
