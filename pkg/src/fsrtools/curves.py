"""Closed curves transverse to the 1-skeleton of a subdivision complex.

A curve is recorded by its cyclic sequence of exit sides: entry i says the
curve runs inside tile crossings[i][0] and leaves through the edge side at
word position crossings[i][1]; it then finds itself in the tile owning the
opposite side of that edge.  Curves avoid vertices.  Reduction removes
innermost backtracks (cross an edge and immediately recross it through the
same side pair); words reduced this way are compared up to rotation and
reversal, a sound but incomplete stand-in for homotopy: equal words mean
homotopic curves, distinct words prove nothing.

Pullback lifts a curve through one tower level side by side, extracts the
closed components with their winding degrees (which always partition the
rule degree), and re-expresses each component against the coarser skeleton
by discarding crossings with refinement-only edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (SphereComplex, ComplexError, Side, TILE, EDGE,
                        VERTEX, edge_sides, other_side, vertex_corners,
                        vertex_ends)
from .rules import SubdivisionTower, align_map


@dataclass(frozen=True)
class NormalCurve:
    """A transverse closed curve on one level of a tower.

    crossings empty means the distinguished trivial curve inside home_tile.
    """
    level: int
    crossings: tuple[Side, ...]
    home_tile: str | None = None
    reduced: bool = False

    def __len__(self):
        return len(self.crossings)


def make_curve(cx: SphereComplex, crossings, level: int = 0) -> NormalCurve:
    """Validate the corridor condition and build the curve."""
    crossings = tuple((t, int(i)) for t, i in crossings)
    if not crossings:
        raise ComplexError("empty crossing list needs a home tile; use "
                           "trivial_curve")
    sides = edge_sides(cx)
    n = len(crossings)
    for k, (t, i) in enumerate(crossings):
        if t not in cx.tiles or not (0 <= i < len(cx.tiles[t])):
            raise ComplexError(f"crossing {k}: no side ({t},{i})")
        nxt = crossings[(k + 1) % n]
        landing = other_side(cx, (t, i), sides)[0]
        if landing != nxt[0]:
            raise ComplexError(
                f"crossing {k} lands in tile {landing}, but crossing "
                f"{k + 1} exits {nxt[0]} (corridor broken)")
    return NormalCurve(level=level, crossings=crossings)


def trivial_curve(level: int, home_tile: str) -> NormalCurve:
    return NormalCurve(level=level, crossings=(), home_tile=home_tile,
                       reduced=True)


def reversed_curve(cx: SphereComplex, curve: NormalCurve) -> NormalCurve:
    sides = edge_sides(cx)
    rev = tuple(other_side(cx, s, sides) for s in reversed(curve.crossings))
    return NormalCurve(level=curve.level, crossings=rev,
                       home_tile=curve.home_tile, reduced=curve.reduced)


def canonical_word(cx: SphereComplex, curve: NormalCurve) -> tuple:
    """Least rotation of the lesser of the word and its reversal."""
    if not curve.crossings:
        return ()
    def least_rotation(word):
        n = len(word)
        return min(tuple(word[(i + k) % n] for k in range(n))
                   for i in range(n))
    fwd = least_rotation(curve.crossings)
    bwd = least_rotation(reversed_curve(cx, curve).crossings)
    return min(fwd, bwd)


def reduce_curve(cx: SphereComplex, curve: NormalCurve) -> NormalCurve:
    """Remove backtracks until none remain; the crossing count strictly
    decreases at each removal, so this terminates at a reduced curve."""
    word = list(curve.crossings)
    sides = edge_sides(cx)
    changed = True
    while changed and word:
        changed = False
        n = len(word)
        for k in range(n):
            a, b = word[k], word[(k + 1) % n]
            if other_side(cx, a, sides) == b:
                home = b[0]
                if (k + 1) % n == k:
                    word = []
                elif k + 1 < n:
                    del word[k + 1]
                    del word[k]
                else:
                    del word[k]
                    del word[0]
                changed = True
                break
    if not word:
        home = curve.home_tile
        if curve.crossings:
            last = curve.crossings[0]
            home = other_side(cx, last, edge_sides(cx))[0]
        return NormalCurve(level=curve.level, crossings=(), home_tile=home,
                           reduced=True)
    return NormalCurve(level=curve.level, crossings=tuple(word),
                       home_tile=None, reduced=True)


def peripheral_curve(cx: SphereComplex, v: str, level: int = 0) -> NormalCurve:
    """The small circle around a vertex, as a crossing word.

    The circle crosses each edge end at the vertex once and runs through
    one tile corner between consecutive ends; the exit side after a corner
    is the side of the departing occurrence when the corner is traversed
    arrive-to-depart, the arriving occurrence's side otherwise.
    """
    corners = vertex_corners(cx)[v]
    if not corners:
        raise ComplexError(f"vertex {v} has no corners")
    at_end: dict = {}
    for cid, (arrive, depart, side) in enumerate(sorted(corners,
                                                        key=lambda c: c[2])):
        at_end.setdefault(arrive, []).append(cid)
        at_end.setdefault(depart, []).append(cid)
    indexed = sorted(corners, key=lambda c: c[2])
    start_end = sorted(at_end)[0]
    word: list[Side] = []
    used: set[int] = set()
    cur = start_end
    for _ in range(len(corners)):
        options = [cid for cid in at_end[cur] if cid not in used]
        if not options:
            raise ComplexError(f"link of {v} is not a single cycle")
        cid = options[0]
        used.add(cid)
        arrive, depart, (t, i) = indexed[cid]
        n = len(cx.tiles[t])
        if cur == arrive:
            word.append((t, (i + 1) % n))
            cur = depart
        else:
            word.append((t, i))
            cur = arrive
    if cur != start_end:
        raise ComplexError(f"link walk of {v} did not close")
    return NormalCurve(level=level, crossings=tuple(word), reduced=True)


def classify_curve(cx: SphereComplex, curve: NormalCurve) -> str:
    """'inessential', 'peripheral:V', or 'essential-candidate'.

    The test is sound, not complete: a reduced word matching no marked
    vertex link may still bound or be peripheral homotopically.
    """
    if not curve.reduced:
        raise ComplexError("classify_curve requires a reduced curve")
    if not curve.crossings:
        return "inessential"
    word = canonical_word(cx, curve)
    for v in sorted(cx.marked):
        link = peripheral_curve(cx, v)
        if canonical_word(cx, link) == word:
            return f"peripheral:{v}"
    return "essential-candidate"


@dataclass
class CurvePullbackResult:
    components: list[tuple[NormalCurve, int]]    # (reduced curve, degree)
    total: int

    def degrees(self) -> list[int]:
        return [m for _, m in self.components]


def _lift_side(tower: SubdivisionTower, n: int, side: Side,
               up_tile: str) -> Side:
    """The side of up_tile lying over the level-n side (via the step
    alignment of the tower)."""
    level = tower.levels[n + 1]
    up = tower.complex(n + 1)
    offset, rev = level.step_align[up_tile]
    _, inv = align_map(offset, rev, len(up.tiles[up_tile]))
    return (up_tile, inv(side[1]))


def pullback_curve(tower: SubdivisionTower, curve: NormalCurve,
                   reduce: bool = True) -> CurvePullbackResult:
    """All components of the preimage of a curve, re-expressed one level
    down the tower at the curve's own level.

    The component degrees always sum to the rule degree.  Components are
    listed in deterministic order of their starting lift.
    """
    n = curve.level
    if tower.depth < n + 1:
        raise ComplexError(f"tower has no level {n + 1}")
    cx = tower.complex(n)
    up = tower.complex(n + 1)
    level = tower.levels[n + 1]
    from .rules import degree as rule_degree
    d = rule_degree(tower.rule)

    if not curve.crossings:
        # trivial curve: one trivial preimage in each tile over its home
        comps = []
        for t2 in sorted(up.tiles):
            if level.sigma[(TILE, t2)] == (TILE, curve.home_tile):
                comps.append((trivial_curve(n, level.carrier[(TILE, t2)][1]),
                              1))
        return CurvePullbackResult(components=comps, total=d)

    sides_up = edge_sides(up)
    sides_n = edge_sides(cx)
    first = curve.crossings[0]
    starts = sorted(t2 for t2 in up.tiles
                    if level.sigma[(TILE, t2)] == (TILE, first[0]))
    seen: set[Side] = set()
    components: list[tuple[NormalCurve, int]] = []
    L = len(curve.crossings)
    for t2 in starts:
        s0 = _lift_side(tower, n, first, t2)
        if s0 in seen:
            continue
        # follow the lifted corridor until it closes
        word_up: list[Side] = []
        cur_side = s0
        k = 0
        while True:
            word_up.append(cur_side)
            seen.add(cur_side)
            landing = other_side(up, cur_side, sides_up)[0]
            k += 1
            nxt = curve.crossings[k % L]
            if level.sigma[(TILE, landing)] != (TILE, nxt[0]):
                raise ComplexError("lifted corridor lands over the wrong "
                                   "tile; corrupted tower data")
            cur_side = _lift_side(tower, n, nxt, landing)
            if cur_side == s0 and k % L == 0:
                break
        m = len(word_up) // L
        # project through the carrier: keep crossings over subdivided
        # level-n edges, drop refinement-only crossings
        projected: list[Side] = []
        for s in word_up:
            prov = level.side_prov[s]
            if prov is not None:
                projected.append(prov)
        if projected:
            comp = NormalCurve(level=n, crossings=tuple(projected))
            # corridor sanity on the projection
            for a, b in zip(projected, projected[1:] + projected[:1]):
                if other_side(cx, a, sides_n)[0] != b[0]:
                    raise ComplexError("projected curve breaks the corridor "
                                       "condition")
            if reduce:
                comp = reduce_curve(cx, comp)
        else:
            home_up = other_side(up, word_up[0], sides_up)[0]
            comp = trivial_curve(n, level.carrier[(TILE, home_up)][1])
        components.append((comp, m))
    total = sum(m for _, m in components)
    if total != d:
        raise ComplexError(f"component degrees sum to {total}, expected {d}")
    return CurvePullbackResult(components=components, total=total)


@dataclass
class CurveOrbitNode:
    curve: NormalCurve
    word: tuple
    classification: str
    out_edges: list[tuple[tuple, int]] = field(default_factory=list)


@dataclass
class CurveOrbitReport:
    nodes: dict[tuple, CurveOrbitNode]
    order: list[tuple]
    cycles: list[tuple]              # words seen again as pullback targets
    frontier: list[tuple]            # unexpanded words at the depth limit

    def univalent_edges(self):
        out = []
        for w in self.order:
            for tgt, m in self.nodes[w].out_edges:
                if m == 1:
                    out.append((w, tgt))
        return out


def pullback_orbit_curves(tower: SubdivisionTower, curve: NormalCurve,
                          n_steps: int) -> CurveOrbitReport:
    """Breadth-first exploration of the pullback relation from a curve.

    Nodes are reduced crossing words up to rotation and reversal; every
    expansion records the degree partition of its components.  Exploration
    stops after n_steps generations; unexpanded words are reported as the
    frontier.
    """
    cx = tower.complex(curve.level)
    start = reduce_curve(cx, curve) if not curve.reduced else curve
    w0 = canonical_word(cx, start)
    nodes: dict[tuple, CurveOrbitNode] = {}
    order: list[tuple] = []
    cycles: list[tuple] = []

    def intern(c: NormalCurve) -> tuple:
        w = canonical_word(cx, c)
        if w not in nodes:
            nodes[w] = CurveOrbitNode(curve=c, word=w,
                                      classification=classify_curve(cx, c))
            order.append(w)
        return w

    intern(start)
    frontier = [w0]
    for _ in range(n_steps):
        nxt: list[tuple] = []
        for w in frontier:
            node = nodes[w]
            if node.out_edges:
                continue
            result = pullback_curve(tower, node.curve)
            for comp, m in result.components:
                cw = canonical_word(cx, comp)
                known = cw in nodes
                intern(comp)
                node.out_edges.append((cw, m))
                if known:
                    if cw not in cycles:
                        cycles.append(cw)
                else:
                    nxt.append(cw)
        frontier = nxt
        if not frontier:
            break
    return CurveOrbitReport(nodes=nodes, order=order, cycles=cycles,
                            frontier=frontier)
