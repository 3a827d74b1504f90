"""Arcs through three prescribed vertices in the 1-skeleton of a tiled disk.

The construction peels boundary tiles one at a time: removing a suitable
tile leaves a smaller tiled disk, the arc is built there by induction, and
when an endpoint disappears with the peeled tile the arc is extended along
that tile's outer boundary arc.  Interior vertices of the outer arc belong
to no other tile, so the extension cannot collide with the inductively
built path.
"""

from __future__ import annotations

from .complexes import (
    DiskComplex, ComplexError, validate_complex, make_disk,
)


def remove_tile(cx: DiskComplex, t: str) -> DiskComplex:
    """The closure of the complex minus one tile, as a disk complex.

    Raises ComplexError when the free sides of the remainder do not close
    into a single boundary cycle; full validity is the caller's concern.
    """
    if t not in cx.tiles:
        raise ComplexError(f"unknown tile {t}")
    tiles = {s: list(w) for s, w in cx.tiles.items() if s != t}
    if not tiles:
        raise ComplexError("cannot remove the only tile")
    used_edges: set[str] = set()
    for w in tiles.values():
        used_edges.update(e for e, _ in w)
    edges = {e: uv for e, uv in cx.edges.items() if e in used_edges}
    vertices: set[str] = set()
    for u, v in edges.values():
        vertices.add(u)
        vertices.add(v)
    return make_disk(vertices, edges, tiles, cx.marked & vertices)


def _try_peel(cx: DiskComplex, t: str) -> DiskComplex | None:
    try:
        rest = remove_tile(cx, t)
    except ComplexError:
        return None
    return rest if validate_complex(rest).ok else None


def peelable_tiles(cx: DiskComplex) -> set[str]:
    """Tiles whose removal leaves a valid disk complex (at least two exist
    for every valid tiled disk with two or more tiles)."""
    if len(cx.tiles) < 2:
        raise ComplexError("peeling requires at least two tiles")
    return {t for t in cx.tiles if _try_peel(cx, t) is not None}


def _tile_cycle(cx: DiskComplex, t: str) -> list[str]:
    return [cx.occ_endpoints(occ)[0] for occ in cx.tiles[t]]


def _polygon_arc(cycle: list[str], u1: str, u2: str,
                 via: str | None) -> list[str]:
    """The arc of a simple vertex cycle from u1 to u2, through via if given."""
    n = len(cycle)
    i, j = cycle.index(u1), cycle.index(u2)
    arc1 = [cycle[(i + k) % n] for k in range(0, (j - i) % n + 1)]
    arc2 = [cycle[(i - k) % n] for k in range(0, (i - j) % n + 1)]
    if via is None:
        return min((arc1, arc2), key=len)
    if via in arc1:
        return arc1
    if via in arc2:
        return arc2
    raise ComplexError(f"vertex {via} not on the boundary cycle")


def _skeleton_path(cx: DiskComplex, u1: str, u2: str) -> list[str]:
    """Shortest vertex path in the 1-skeleton, lexicographic tie-break."""
    adj: dict[str, list[str]] = {v: [] for v in cx.vertices}
    for u, v in cx.edges.values():
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()
    prev: dict[str, str | None] = {u1: None}
    frontier = [u1]
    while frontier and u2 not in prev:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in prev:
                    prev[y] = x
                    nxt.append(y)
        frontier = nxt
    if u2 not in prev:
        raise ComplexError(f"no path from {u1} to {u2}")
    path = [u2]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _outer_arc(cx: DiskComplex, rest: DiskComplex, t: str) -> list[str]:
    """Vertex run of the peeled tile t outside the remainder: a surviving
    attachment endpoint, the deleted vertices, the other endpoint."""
    cycle = _tile_cycle(cx, t)
    n = len(cycle)
    survive = [x in rest.vertices for x in cycle]
    if all(survive):
        return []
    k = next(i for i in range(n) if survive[i] and not survive[(i + 1) % n])
    rotated = [cycle[(k + i) % n] for i in range(n)]
    run = [rotated[0]]
    i = 1
    while i < n and rotated[i] not in rest.vertices:
        run.append(rotated[i])
        i += 1
    if i >= n:
        raise ComplexError(f"tile {t} has no surviving attachment")
    run.append(rotated[i])
    for j in range(i + 1, n):
        if rotated[j] not in rest.vertices:
            raise ComplexError(f"tile {t} outer arc is not contiguous")
    return run


def three_point_arc(cx: DiskComplex, u1: str, u2: str, v: str) -> list[str]:
    """A simple 1-skeleton arc from u1 to u2 whose vertices include v.

    u1, u2, v must be distinct vertices of a valid disk complex whose tiles
    are embedded polygons.  Returns the arc's vertex sequence.
    """
    for x in (u1, u2, v):
        if x not in cx.vertices:
            raise ComplexError(f"unknown vertex {x}")
    if len({u1, u2, v}) != 3:
        raise ComplexError("u1, u2, v must be distinct")
    return _arc(cx, u1, u2, v)


def _arc_or_path(cx: DiskComplex, a: str, b: str, v: str | None) -> list[str]:
    if a == b:
        if v is not None and v != a:
            raise ComplexError("degenerate attachment cannot contain v")
        return [a]
    if v is None or v in (a, b):
        return _skeleton_path(cx, a, b)
    return _arc(cx, a, b, v)


def _arc(cx: DiskComplex, u1: str, u2: str, v: str | None) -> list[str]:
    if v in (u1, u2):
        v = None
    if len(cx.tiles) == 1:
        cycle = _tile_cycle(cx, next(iter(cx.tiles)))
        return _polygon_arc(cycle, u1, u2, v)

    choice = None
    for t in sorted(cx.tiles):
        rest = _try_peel(cx, t)
        if rest is None:
            continue
        if v is None or v in rest.vertices:
            choice = (t, rest)
            break
    if choice is None:
        raise ComplexError("no peelable tile keeps the through-vertex")
    t, rest = choice

    in1, in2 = u1 in rest.vertices, u2 in rest.vertices
    if in1 and in2:
        return _arc(rest, u1, u2, v)
    if in1 != in2:
        ua, ub = (u1, u2) if in1 else (u2, u1)
        path = _extend_to_deleted(cx, rest, t, ua, ub, v)
        return path if in1 else path[::-1]

    # both endpoints were deleted with t: both interior to the outer arc
    outer = _outer_arc(cx, rest, t)
    i1, i2 = outer.index(u1), outer.index(u2)
    flipped = i1 > i2
    if flipped:
        i1, i2 = i2, i1
    core = _arc_or_path(rest, outer[0], outer[-1], v)
    path = outer[i1::-1] + core[1:] + list(reversed(outer[i2:]))[1:]
    return path[::-1] if flipped else path


def _extend_to_deleted(cx: DiskComplex, rest: DiskComplex, t: str,
                       ua: str, ub: str, v: str | None) -> list[str]:
    """Path from surviving ua to ub, which was deleted with tile t."""
    outer = _outer_arc(cx, rest, t)
    ib = outer.index(ub)
    w = outer[0] if outer[0] != ua else outer[-1]
    ext = outer[ib::-1] if w == outer[0] else outer[ib:]   # ub ... w
    core = _arc_or_path(rest, ua, w, v)
    return core + list(reversed(ext))[1:]


def check_arc(cx: DiskComplex, path: list[str], u1: str, u2: str,
              v: str) -> bool:
    """Structural validity of a returned arc: simple, in the 1-skeleton,
    from u1 to u2, containing v."""
    if len(path) != len(set(path)):
        return False
    if path[0] != u1 or path[-1] != u2 or v not in path:
        return False
    pairs = {frozenset(uv) for uv in cx.edges.values()}
    return all(frozenset((a, b)) in pairs for a, b in zip(path, path[1:]))
