"""Finite CW complexes on the 2-sphere and the closed disk.

Complexes are stored combinatorially: opaque string ids for cells, tile
boundaries as cyclic words of directed edge occurrences.  An occurrence
``(e, True)`` traverses edge ``e`` from its initial to its terminal vertex,
``(e, False)`` the other way.  Cyclic words keep their stored starting
index for deterministic serialization; all operations treat them up to
rotation.

Tiles may repeat edges and vertices on their boundary (both sides of an
edge can lie on one tile).  Disk complexes additionally require simple
tile boundaries and carry a distinguished boundary cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Occurrence = tuple[str, bool]
Side = tuple[str, int]            # (tile id, position in its boundary word)
Cell = tuple[str, str]            # (dimension tag, cell id)

VERTEX, EDGE, TILE = "vertex", "edge", "tile"


class ComplexError(ValueError):
    """Raised when an operation's structural precondition fails."""


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def add(self, message: str) -> None:
        self.ok = False
        self.violations.append(message)


@dataclass
class SphereComplex:
    """A finite CW structure with underlying space the 2-sphere.

    marked holds the distinguished vertices (the dynamically relevant
    points of a subdivision map, e.g. the forward orbit of branching).
    """

    vertices: set[str]
    edges: dict[str, tuple[str, str]]
    tiles: dict[str, list[Occurrence]]
    marked: set[str] = field(default_factory=set)

    def occ_endpoints(self, occ: Occurrence) -> tuple[str, str]:
        u, v = self.edges[occ[0]]
        return (u, v) if occ[1] else (v, u)

    def side_edge(self, side: Side) -> str:
        return self.tiles[side[0]][side[1]][0]

    def side_occurrence(self, side: Side) -> Occurrence:
        return self.tiles[side[0]][side[1]]

    def cell_counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.tiles)


@dataclass
class DiskComplex(SphereComplex):
    """A finite CW structure on a closed disk.

    boundary is the cyclic edge path around the disk.  Every tile boundary
    must be a simple closed edge path (tiles are embedded polygons).
    """

    boundary: list[Occurrence] = field(default_factory=list)


def euler_characteristic(cx: SphereComplex) -> int:
    """V - E + F of the stored cell sets."""
    v, e, f = cx.cell_counts()
    return v - e + f


def edge_sides(cx: SphereComplex) -> dict[str, list[Side]]:
    """Map each edge to the tile-word positions where it occurs."""
    out: dict[str, list[Side]] = {e: [] for e in cx.edges}
    for t in cx.tiles:
        for i, (e, _) in enumerate(cx.tiles[t]):
            out[e].append((t, i))
    return out


def other_side(cx: SphereComplex, side: Side,
               sides: dict[str, list[Side]] | None = None) -> Side:
    """The opposite side of the edge at ``side`` (requires two sides)."""
    e = cx.side_edge(side)
    occs = (sides or edge_sides(cx))[e]
    if len(occs) != 2:
        raise ComplexError(f"edge {e} does not have exactly two sides")
    return occs[1] if occs[0] == side else occs[0]


# --- vertex links -----------------------------------------------------------
#
# An edge end is (edge id, 0) at the initial vertex, (edge id, 1) at the
# terminal vertex; loops contribute both ends at one vertex.  Each corner of
# a tile word joins the head end of one occurrence to the tail end of the
# next.  The link of a vertex is the multigraph on its ends whose edges are
# these corners: a closed surface needs a single cycle at every vertex, a
# disk allows a single path at boundary vertices.

End = tuple[str, int]


def _occ_head_end(occ: Occurrence) -> End:
    return (occ[0], 1 if occ[1] else 0)


def _occ_tail_end(occ: Occurrence) -> End:
    return (occ[0], 0 if occ[1] else 1)


def vertex_ends(cx: SphereComplex) -> dict[str, list[End]]:
    ends: dict[str, list[End]] = {v: [] for v in cx.vertices}
    for e, (u, v) in cx.edges.items():
        if u in ends:
            ends[u].append((e, 0))
        if v in ends:
            ends[v].append((e, 1))
    return ends


def vertex_corners(cx: SphereComplex) -> dict[str, list[tuple[End, End, Side]]]:
    """Corners grouped by vertex: (arriving end, departing end, tile side).

    The side recorded is the word position of the arriving occurrence.
    """
    out: dict[str, list[tuple[End, End, Side]]] = {v: [] for v in cx.vertices}
    for t, word in cx.tiles.items():
        n = len(word)
        for i in range(n):
            occ, nxt = word[i], word[(i + 1) % n]
            head = cx.occ_endpoints(occ)[1]
            if head not in out:
                continue
            out[head].append((_occ_head_end(occ), _occ_tail_end(nxt), (t, i)))
    return out


def _link_shape(ends: list[End], corners: list[tuple[End, End, Side]]):
    """Classify the link multigraph: ('cycle',), ('path', e1, e2) or None."""
    if not ends:
        return None
    deg = {end: 0 for end in ends}
    adj: dict[End, list[End]] = {end: [] for end in ends}
    for a, b, _ in corners:
        if a not in deg or b not in deg:
            return None
        deg[a] += 1
        deg[b] += 1
        adj[a].append(b)
        adj[b].append(a)
    # connectivity over ends
    seen = set()
    stack = [ends[0]]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(adj[x])
    if len(seen) != len(ends):
        return None
    degs = sorted(deg.values())
    if all(d == 2 for d in degs):
        return ("cycle",)
    if len(ends) >= 2 and degs == [1, 1] + [2] * (len(ends) - 2):
        loose = [end for end in ends if deg[end] == 1]
        return ("path", loose[0], loose[1])
    if len(ends) == 1 and degs == [1]:
        # single end, single corner missing: degenerate path of length 0
        return ("path", ends[0], ends[0])
    return None


def _check_references(cx: SphereComplex, report: ValidationReport) -> bool:
    ok = True
    for e, (u, v) in cx.edges.items():
        for x in (u, v):
            if x not in cx.vertices:
                report.add(f"edge {e} references undeclared vertex {x}")
                ok = False
    for t, word in cx.tiles.items():
        if not word:
            report.add(f"tile {t} has an empty boundary word")
            ok = False
        for e, _ in word:
            if e not in cx.edges:
                report.add(f"tile {t} references undeclared edge {e}")
                ok = False
    for m in cx.marked:
        if m not in cx.vertices:
            report.add(f"marked vertex {m} is not declared")
            ok = False
    return ok


def _check_closed_words(cx: SphereComplex, report: ValidationReport) -> None:
    for t, word in cx.tiles.items():
        n = len(word)
        for i in range(n):
            head = cx.occ_endpoints(word[i])[1]
            tail = cx.occ_endpoints(word[(i + 1) % n])[0]
            if head != tail:
                report.add(f"tile {t} word breaks at position {i}: "
                           f"{head} != {tail}")
                return


def _check_connected(cx: SphereComplex, report: ValidationReport) -> None:
    if not cx.vertices:
        report.add("complex has no vertices")
        return
    adj: dict[str, set[str]] = {v: set() for v in cx.vertices}
    for u, v in cx.edges.values():
        adj[u].add(v)
        adj[v].add(u)
    start = next(iter(sorted(cx.vertices)))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(cx.vertices):
        report.add("1-skeleton is not connected")


def validate_complex(cx: SphereComplex) -> ValidationReport:
    """Check every structural invariant; violations are data, not errors."""
    report = ValidationReport(ok=True)
    if not _check_references(cx, report):
        return report
    _check_closed_words(cx, report)
    if not report.ok:
        return report

    sides = edge_sides(cx)
    is_disk = isinstance(cx, DiskComplex)
    boundary_edges: set[str] = set()
    if is_disk:
        boundary_edges = {e for e, occs in sides.items() if len(occs) == 1}
        for e, occs in sides.items():
            if len(occs) not in (1, 2):
                report.add(f"edge {e} side count {len(occs)} != 1 or 2")
    else:
        for e, occs in sides.items():
            if len(occs) != 2:
                report.add(f"edge {e} side count {len(occs)} != 2")
    if not report.ok:
        return report

    ends = vertex_ends(cx)
    corners = vertex_corners(cx)
    if is_disk:
        bverts = set()
        for e in boundary_edges:
            bverts.update(cx.edges[e])
        for v in cx.vertices:
            shape = _link_shape(ends[v], corners[v])
            if v in bverts:
                if not shape or shape[0] != "path":
                    report.add(f"boundary vertex {v} link is not a single arc")
                else:
                    for end in (shape[1], shape[2]):
                        if end[0] not in boundary_edges:
                            report.add(f"vertex {v} link ends on interior "
                                       f"edge {end[0]}")
            else:
                if shape != ("cycle",):
                    report.add(f"vertex {v} link is not a single cycle "
                               "(pinch point)")
    else:
        for v in cx.vertices:
            if _link_shape(ends[v], corners[v]) != ("cycle",):
                report.add(f"vertex {v} link is not a single cycle "
                           "(pinch point)")
    if not report.ok:
        return report

    _check_connected(cx, report)
    chi = euler_characteristic(cx)
    if is_disk:
        if chi != 1:
            report.add(f"Euler characteristic {chi} != 1")
        _check_disk_boundary(cx, boundary_edges, report)
        for t, word in cx.tiles.items():
            seen_v = set()
            for occ in word:
                tail = cx.occ_endpoints(occ)[0]
                if tail in seen_v:
                    report.add(f"tile {t} boundary is not simple at {tail}")
                    break
                seen_v.add(tail)
    else:
        if chi != 2:
            report.add(f"Euler characteristic {chi} != 2")
    return report


def _check_disk_boundary(cx: DiskComplex, boundary_edges: set[str],
                         report: ValidationReport) -> None:
    declared = [occ[0] for occ in cx.boundary]
    if sorted(declared) != sorted(boundary_edges):
        report.add("declared boundary does not match the free edge sides")
        return
    n = len(cx.boundary)
    for i in range(n):
        head = cx.occ_endpoints(cx.boundary[i])[1]
        tail = cx.occ_endpoints(cx.boundary[(i + 1) % n])[0]
        if head != tail:
            report.add(f"boundary word breaks at position {i}")
            return


def derive_boundary(vertices: set[str], edges: dict[str, tuple[str, str]],
                    tiles: dict[str, list[Occurrence]]) -> list[Occurrence]:
    """Assemble the boundary cycle of a disk complex from its free sides.

    Orientation is chosen so that the cycle starts with the lexicographically
    least boundary edge traversed forward; raises if the free sides do not
    form a single cycle.
    """
    count: dict[str, int] = {}
    occ_dir: dict[str, bool] = {}
    for word in tiles.values():
        for e, fwd in word:
            count[e] = count.get(e, 0) + 1
            occ_dir[e] = fwd
    free = {e for e in edges if count.get(e, 0) == 1}
    if not free:
        raise ComplexError("no boundary edges found")
    # Walk the cycle: at each vertex exactly two free edge ends meet.
    at: dict[str, list[tuple[str, bool]]] = {}
    for e in free:
        u, v = edges[e]
        at.setdefault(u, []).append((e, True))
        at.setdefault(v, []).append((e, False))
    for v, incident in at.items():
        if len(incident) != 2:
            raise ComplexError(f"boundary branches at vertex {v}")
    start = min(free)
    # Traverse opposite to the tile side so the disk lies on one side.
    first = (start, not occ_dir[start])
    cycle = [first]
    cur = first
    while True:
        head = edges[cur[0]][1] if cur[1] else edges[cur[0]][0]
        nxts = [(e, fwd) for (e, fwd) in at[head] if e != cur[0]]
        if not nxts:
            # boundary edge repeated at this vertex via a loop
            nxts = [(e, fwd) for (e, fwd) in at[head]
                    if (e, fwd) != (cur[0], not cur[1])]
        e, out_fwd = nxts[0]
        cur = (e, out_fwd)
        if cur == first:
            break
        cycle.append(cur)
        if len(cycle) > len(free):
            raise ComplexError("boundary free sides do not close up")
    if len(cycle) != len(free):
        raise ComplexError("boundary free sides form more than one cycle")
    return cycle


def make_disk(vertices, edges, tiles, marked=None) -> DiskComplex:
    """Build a DiskComplex, deriving the boundary cycle from free sides."""
    return DiskComplex(
        vertices=set(vertices),
        edges=dict(edges),
        tiles={t: list(w) for t, w in tiles.items()},
        marked=set(marked or ()),
        boundary=derive_boundary(set(vertices), dict(edges), tiles),
    )


# --- tile adjacency ---------------------------------------------------------

@dataclass
class TileAdjacencyGraph:
    nodes: set[str]
    arcs: dict[frozenset[str], str]     # pair -> "edge" | "vertex"

    def neighbors(self, t: str, mode: str = "edge") -> list[str]:
        out = []
        for pair, kind in self.arcs.items():
            if t in pair and (mode == "vertex" or kind == "edge"):
                (a, b) = tuple(pair)
                out.append(b if a == t else a)
        return sorted(out)


def tile_adjacency(cx: SphereComplex, mode: str = "edge") -> TileAdjacencyGraph:
    """Tile adjacency graph; mode 'vertex' also links vertex-sharing tiles."""
    if mode not in ("edge", "vertex"):
        raise ComplexError(f"unknown adjacency mode {mode!r}")
    arcs: dict[frozenset[str], str] = {}
    for e, occs in edge_sides(cx).items():
        tiles_here = {t for t, _ in occs}
        if len(tiles_here) == 2:
            arcs[frozenset(tiles_here)] = "edge"
    if mode == "vertex":
        at_vertex: dict[str, set[str]] = {v: set() for v in cx.vertices}
        for t, word in cx.tiles.items():
            for occ in word:
                at_vertex[cx.occ_endpoints(occ)[0]].add(t)
        for v, ts in at_vertex.items():
            ts = sorted(ts)
            for i in range(len(ts)):
                for j in range(i + 1, len(ts)):
                    pair = frozenset((ts[i], ts[j]))
                    arcs.setdefault(pair, "vertex")
    return TileAdjacencyGraph(nodes=set(cx.tiles), arcs=arcs)


def adjacency_distance(graph: TileAdjacencyGraph, sources: set[str],
                       targets: set[str], mode: str = "edge") -> int | None:
    """BFS distance between tile sets in the adjacency graph."""
    if sources & targets:
        return 0
    adj: dict[str, set[str]] = {t: set() for t in graph.nodes}
    for pair, kind in graph.arcs.items():
        if mode == "vertex" or kind == "edge":
            a, b = tuple(pair)
            adj[a].add(b)
            adj[b].add(a)
    frontier = set(sources)
    seen = set(sources)
    dist = 0
    while frontier:
        dist += 1
        nxt = set()
        for t in frontier:
            for u in adj[t]:
                if u in targets:
                    return dist
                if u not in seen:
                    seen.add(u)
                    nxt.add(u)
        frontier = nxt
    return None


def relabel(cx: SphereComplex, vmap=None, emap=None, tmap=None) -> SphereComplex:
    """Rename cells through the given injections (identity where omitted)."""
    vmap = vmap or {}
    emap = emap or {}
    tmap = tmap or {}
    rv = lambda x: vmap.get(x, x)
    re_ = lambda x: emap.get(x, x)
    out = SphereComplex(
        vertices={rv(v) for v in cx.vertices},
        edges={re_(e): (rv(u), rv(v)) for e, (u, v) in cx.edges.items()},
        tiles={tmap.get(t, t): [(re_(e), d) for e, d in w]
               for t, w in cx.tiles.items()},
        marked={rv(v) for v in cx.marked},
    )
    if isinstance(cx, DiskComplex):
        out = DiskComplex(vertices=out.vertices, edges=out.edges,
                          tiles=out.tiles, marked=out.marked,
                          boundary=[(re_(e), d) for e, d in cx.boundary])
    return out
