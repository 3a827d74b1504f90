"""Fat-path distances on subdivision complexes and pullback nonexpansion.

A fat path joining two points is the set of tiles met by a curve between
them; its length is one less than the number of those tiles.  A generic
curve crosses only open edges, and each crossing contributes the two tiles
on either side, so the minimal fat-path length between cell interiors is
the BFS distance in the edge-mode tile adjacency graph (routing through a
vertex picks up that vertex's whole star, which never beats walking around
it edge by edge).  The function is not a metric: a point on an edge or
vertex has positive distance from itself.
"""

from __future__ import annotations

from .complexes import (
    SphereComplex, ComplexError, VERTEX, EDGE, TILE,
    tile_adjacency, adjacency_distance, edge_sides, other_side,
)
from .rules import SubdivisionTower, align_map

MetricPoint = tuple[str, str]        # (kind, cell id), kind in vertex/edge/tile


def tiles_containing(cx: SphereComplex, point: MetricPoint,
                     sides: dict | None = None) -> set[str]:
    """All tiles whose closure contains a point of the given cell interior."""
    kind, cid = point
    if kind == TILE:
        if cid not in cx.tiles:
            raise ComplexError(f"unknown tile {cid}")
        return {cid}
    if kind == EDGE:
        if cid not in cx.edges:
            raise ComplexError(f"unknown edge {cid}")
        return {t for t, _ in (sides or edge_sides(cx))[cid]}
    if kind == VERTEX:
        if cid not in cx.vertices:
            raise ComplexError(f"unknown vertex {cid}")
        out = set()
        for t, word in cx.tiles.items():
            for occ in word:
                if cx.occ_endpoints(occ)[0] == cid:
                    out.add(t)
                    break
        return out
    raise ComplexError(f"unknown point kind {kind!r}")


def self_distance(cx: SphereComplex, point: MetricPoint) -> int:
    """Length of the shortest fat path from a point to itself.

    Any curve from the point to itself meets every tile containing it, so
    the value is (number of containing tiles) - 1; zero only for interior
    points of tiles.
    """
    return len(tiles_containing(cx, point)) - 1


def fat_path_distance(cx: SphereComplex, x: MetricPoint, y: MetricPoint,
                      graph=None) -> int:
    """Minimal fat-path length between two points (cells) of the complex."""
    if x == y:
        return self_distance(cx, x)
    sides = edge_sides(cx)
    sx = tiles_containing(cx, x, sides)
    sy = tiles_containing(cx, y, sides)
    graph = graph or tile_adjacency(cx, "edge")
    d = adjacency_distance(graph, sx, sy, "edge")
    if d is None:
        raise ComplexError("tile graph is disconnected")
    return d


def distance_matrix(cx: SphereComplex) -> dict[tuple[str, str], int]:
    """Fat-path distances between all pairs of tile interiors."""
    graph = tile_adjacency(cx, "edge")
    tiles = sorted(cx.tiles)
    out: dict[tuple[str, str], int] = {}
    for a in tiles:
        for b in tiles:
            out[(a, b)] = adjacency_distance(graph, {a}, {b}, "edge")
    return out


def shortest_tile_path(cx: SphereComplex, a: str, b: str,
                       graph=None) -> list[str]:
    """A minimal edge-adjacent tile path from a to b, lexicographic ties."""
    graph = graph or tile_adjacency(cx, "edge")
    adj: dict[str, list[str]] = {t: [] for t in graph.nodes}
    for pair, kind in graph.arcs.items():
        if kind == "edge":
            s, t = tuple(pair)
            adj[s].append(t)
            adj[t].append(s)
    for t in adj:
        adj[t].sort()
    prev: dict[str, str | None] = {a: None}
    frontier = [a]
    while frontier and b not in prev:
        nxt = []
        for t in frontier:
            for u in adj[t]:
                if u not in prev:
                    prev[u] = t
                    nxt.append(u)
        frontier = nxt
    if b not in prev:
        raise ComplexError(f"no tile path from {a} to {b}")
    path = [b]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _shared_side(cx: SphereComplex, a: str, b: str,
                 sides: dict) -> tuple[int, int]:
    """Word positions (in a, in b) of the lexicographically least edge shared
    by tiles a and b."""
    candidates = []
    for i, (e, _) in enumerate(cx.tiles[a]):
        for (t2, j) in sides[e]:
            if t2 == b and (a, i) != (t2, j):
                candidates.append((e, i, j))
    if not candidates:
        raise ComplexError(f"tiles {a} and {b} share no edge")
    e, i, j = min(candidates)
    return i, j


def lift_tile_path(tower: SubdivisionTower, n: int, path: list[str],
                   start: str) -> list[str]:
    """Lift an edge-adjacent tile path at level n to level n+1.

    start must be a level-(n+1) tile mapping onto path[0]; each crossed
    edge side has a unique preimage side on the current lifted tile, which
    determines the lift step by step.
    """
    if tower.depth < n + 1:
        raise ComplexError(f"tower has no level {n + 1}")
    cx = tower.complex(n)
    up = tower.complex(n + 1)
    level = tower.levels[n + 1]
    if level.sigma[(TILE, start)] != (TILE, path[0]):
        raise ComplexError(f"start tile {start} does not lie over {path[0]}")
    sides_n = edge_sides(cx)
    sides_up = edge_sides(up)
    lifted = [start]
    cur = start
    for a, b in zip(path, path[1:]):
        i, _ = _shared_side(cx, a, b, sides_n)
        offset, rev = level.step_align[cur]
        _, inv = align_map(offset, rev, len(up.tiles[cur]))
        pos = inv(i)
        nxt_side = other_side(up, (cur, pos), sides_up)
        cur = nxt_side[0]
        if level.sigma[(TILE, cur)] != (TILE, b):
            raise ComplexError(
                f"lift broke: {cur} lies over "
                f"{level.sigma[(TILE, cur)][1]}, expected {b}")
        lifted.append(cur)
    return lifted


def check_pullback_nonexpansion(tower: SubdivisionTower, n: int,
                                sample: list[tuple[str, str]] | None = None):
    """Compare downstairs distances with carrier-projected lifted distances.

    For each tile pair (a, b) at level n with minimal path length k, lift
    the path from every level-(n+1) preimage of a, project the endpoints
    through the carrier map, and measure their level-n distance k'.  A
    subdivision map's inverse branches never increase fat-path distance, so
    every pair must report k' <= k; a failure indicates corrupted data.
    """
    if tower.depth < n + 1:
        raise ComplexError(f"tower has no level {n + 1}")
    cx = tower.complex(n)
    level = tower.levels[n + 1]
    graph = tile_adjacency(cx, "edge")
    tiles = sorted(cx.tiles)
    if sample is None:
        sample = [(a, b) for a in tiles for b in tiles if a <= b]
    preimages: dict[str, list[str]] = {t: [] for t in cx.tiles}
    for t2 in tower.complex(n + 1).tiles:
        preimages[level.sigma[(TILE, t2)][1]].append(t2)
    results = []
    for a, b in sample:
        k = adjacency_distance(graph, {a}, {b}, "edge")
        path = shortest_tile_path(cx, a, b, graph)
        worst = 0
        ok = True
        for start in sorted(preimages[a]):
            lifted = lift_tile_path(tower, n, path, start)
            ca = level.carrier[(TILE, lifted[0])][1]
            cb = level.carrier[(TILE, lifted[-1])][1]
            kp = adjacency_distance(graph, {ca}, {cb}, "edge")
            worst = max(worst, kp)
            if kp > k:
                ok = False
        results.append({"pair": (a, b), "k": k, "k_lifted": worst,
                        "pass": ok})
    return results
