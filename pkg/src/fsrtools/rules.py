"""Subdivision rules and iterated subdivision towers.

A rule is (base, refined, carrier, sigma): two sphere complexes, the map
assigning each refined cell the smallest base cell containing it, and the
cellular map sending refined cells onto base cells of the same dimension
(per-tile word alignment, per-edge orientation flag).

From carrier data the rule's local replacement patterns are recovered: the
subdivision path of every base edge and, by unfolding the refined tiles
lying over a base tile into an abstract disk, the subdivision pattern of
every base tile.  Towers are built by instantiating those patterns level
by level, edge-first so shared subdivided edges are created exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (
    Cell, Occurrence, Side, SphereComplex, DiskComplex, ValidationReport,
    ComplexError, VERTEX, EDGE, TILE, edge_sides, validate_complex,
    vertex_corners, vertex_ends,
)


class RuleError(ValueError):
    """Raised when rule data is structurally unusable."""


@dataclass
class SubdivisionRule:
    base: SphereComplex
    refined: SphereComplex
    carrier: dict[Cell, Cell]
    sigma_v: dict[str, str]                     # refined vertex -> base vertex
    sigma_e: dict[str, tuple[str, bool]]        # -> (base edge, reversed?)
    sigma_t: dict[str, tuple[str, int, bool]]   # -> (base tile, offset, reversed?)
    name: str = "rule"
    _patterns: tuple | None = field(default=None, repr=False, compare=False)

    def sigma_cell(self, cell: Cell) -> Cell:
        kind, cid = cell
        if kind == VERTEX:
            return (VERTEX, self.sigma_v[cid])
        if kind == EDGE:
            return (EDGE, self.sigma_e[cid][0])
        return (TILE, self.sigma_t[cid][0])


def align_map(offset: int, rev: bool, length: int):
    """Position map of a word alignment and its inverse."""
    if rev:
        fwd = lambda i: (offset - i) % length
        return fwd, fwd
    return (lambda i: (offset + i) % length), (lambda w: (w - offset) % length)


# --- patterns ---------------------------------------------------------------

@dataclass
class EdgePattern:
    """Subdivision of one base edge into a refined edge path.

    nodes[0] lies over the initial vertex, nodes[-1] over the terminal
    vertex.  edges[c] = (refined edge id, d) with d True when the refined
    edge's own initial vertex sits at nodes[c].
    """
    base_edge: str
    nodes: list[str]
    edges: list[tuple[str, bool]]

    def __len__(self) -> int:
        return len(self.edges)


@dataclass
class TilePattern:
    """Subdivision of one base tile, unfolded to an abstract disk.

    Subtile sides are classified against the subdivided boundary of the
    base tile: ('int', refined edge, flag) for sides interior to the tile
    and ('bnd', word position, sub index, flag) for boundary sides, where
    the sub index counts sub-edges along the traversal of that base word
    occurrence.  Interior edge endpoints are ('i', refined vertex) or
    ('b', word position, canonical node index).
    """
    base_tile: str
    subtiles: list[str]
    interior_vertices: list[str]
    interior_edges: dict[str, tuple[tuple, tuple]]   # re -> (init ref, term ref)
    sides: dict[str, list[tuple]]                    # rt -> classified word


def _edge_pattern(rule: SubdivisionRule, e: str,
                  by_carrier: dict[Cell, list[Cell]],
                  vertex_at: dict[str, str]) -> EdgePattern:
    u, v = rule.base.edges[e]
    sub_edges = [c[1] for c in by_carrier.get((EDGE, e), []) if c[0] == EDGE]
    sub_vertices = [c[1] for c in by_carrier.get((EDGE, e), []) if c[0] == VERTEX]
    if not sub_edges:
        raise RuleError(f"base edge {e} has no refined edges over it")
    start, end = vertex_at[u], vertex_at[v]
    nodes_set = set(sub_vertices) | {start, end}
    adj: dict[str, list[tuple[str, str]]] = {n: [] for n in nodes_set}
    for re_ in sub_edges:
        a, b = rule.refined.edges[re_]
        if a not in nodes_set or b not in nodes_set:
            raise RuleError(f"edge {re_} over {e} leaves its subdivision path")
        adj[a].append((re_, b))
        adj[b].append((re_, a))
    for n in sub_vertices:
        if len(adj[n]) != 2:
            raise RuleError(f"vertex {n} over edge {e} has degree {len(adj[n])}")
    expected = 2 if start == end else 1
    if len(adj[start]) != expected or len(adj[end]) != expected:
        raise RuleError(f"subdivision of edge {e} is not a path")
    nodes = [start]
    edges: list[tuple[str, bool]] = []
    used: set[str] = set()
    cur = start
    for _ in range(len(sub_edges)):
        options = sorted((re_, b) for re_, b in adj[cur] if re_ not in used)
        if not options:
            raise RuleError(f"subdivision of edge {e} is not a path")
        re_, nxt = options[0]
        used.add(re_)
        edges.append((re_, rule.refined.edges[re_][0] == cur))
        nodes.append(nxt)
        cur = nxt
    if cur != end or set(nodes[1:-1]) != set(sub_vertices):
        raise RuleError(f"subdivision of edge {e} does not form a path "
                        f"from {start} to {end}")
    return EdgePattern(base_edge=e, nodes=nodes, edges=edges)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        self.parent[self.find(x)] = self.find(y)


def _tile_pattern(rule: SubdivisionRule, t: str,
                  by_carrier: dict[Cell, list[Cell]],
                  epats: dict[str, EdgePattern]) -> TilePattern:
    rx = rule.refined
    subtiles = sorted(c[1] for c in by_carrier.get((TILE, t), []) if c[0] == TILE)
    int_edges = sorted(c[1] for c in by_carrier.get((TILE, t), []) if c[0] == EDGE)
    int_vertices = sorted(c[1] for c in by_carrier.get((TILE, t), [])
                          if c[0] == VERTEX)
    if not subtiles:
        raise RuleError(f"base tile {t} has no refined tiles over it")

    # Darts of the unfolded disk: sides of the subtile polygons.
    occ_of: dict[str, list[Side]] = {}
    for rt in subtiles:
        for i, (re_, _) in enumerate(rx.tiles[rt]):
            occ_of.setdefault(re_, []).append((rt, i))
    glue: dict[Side, Side] = {}
    free: set[Side] = set()
    for re_, occs in occ_of.items():
        ckind = rule.carrier[(EDGE, re_)][0]
        if ckind == TILE:
            if rule.carrier[(EDGE, re_)] != (TILE, t):
                raise RuleError(f"edge {re_} on tile {t} carried elsewhere")
            if len(occs) != 2:
                raise RuleError(f"interior edge {re_} of tile {t} has "
                                f"{len(occs)} sides among its subtiles")
            glue[occs[0]] = occs[1]
            glue[occs[1]] = occs[0]
        else:
            free.update(occs)
    for re_ in int_edges:
        if re_ not in occ_of:
            raise RuleError(f"interior edge {re_} of tile {t} unused")

    # Corner classes via union-find over side ends ('T' tail / 'H' head).
    uf = _UnionFind()
    for rt in subtiles:
        n = len(rx.tiles[rt])
        for i in range(n):
            uf.union((rt, i, "H"), (rt, (i + 1) % n, "T"))
    for d, d2 in glue.items():
        if d < d2:
            s1 = rx.tiles[d[0]][d[1]][1]
            s2 = rx.tiles[d2[0]][d2[1]][1]
            if s1 != s2:
                uf.union((d[0], d[1], "H"), (d2[0], d2[1], "T"))
                uf.union((d[0], d[1], "T"), (d2[0], d2[1], "H"))
            else:
                uf.union((d[0], d[1], "H"), (d2[0], d2[1], "H"))
                uf.union((d[0], d[1], "T"), (d2[0], d2[1], "T"))

    def end_vertex(end) -> str:
        rt, i, kind = end
        occ = rx.tiles[rt][i]
        ends = rx.occ_endpoints(occ)
        return ends[0] if kind == "T" else ends[1]

    classes: dict = {}
    for rt in subtiles:
        for i in range(len(rx.tiles[rt])):
            for kind in ("T", "H"):
                end = (rt, i, kind)
                root = uf.find(end)
                classes.setdefault(root, []).append(end)
    class_vertex: dict = {}
    for root, members in classes.items():
        labels = {end_vertex(m) for m in members}
        if len(labels) != 1:
            raise RuleError(f"tile {t} gluing merges distinct vertices {labels}")
        class_vertex[root] = labels.pop()

    # Disk check: V - E + F = 1 and a single free-boundary cycle.
    n_edges = len(glue) // 2 + len(free)
    chi = len(classes) - n_edges + len(subtiles)
    if chi != 1:
        raise RuleError(f"subdivision of tile {t} is not a disk (chi={chi})")
    if not free:
        raise RuleError(f"subdivision of tile {t} has no boundary")

    def walk_next(d: Side, arrived_tail: bool) -> tuple[Side, bool]:
        """From a free dart and its arrival end, the next free dart and the
        end it is reached at (True when reached at its tail)."""
        rt, i = d
        cur = (rt, i, "H" if arrived_tail else "T")
        for _ in range(4 * len(free) + 4 * len(glue) + 4):
            rt2, i2, kind = cur
            n2 = len(rx.tiles[rt2])
            nxt = (rt2, (i2 + 1) % n2, "T") if kind == "H" \
                else (rt2, (i2 - 1) % n2, "H")
            rt3, i3, kind3 = nxt
            side = (rt3, i3)
            if side in glue:
                twin = glue[side]
                s1 = rx.tiles[side[0]][side[1]][1]
                s2 = rx.tiles[twin[0]][twin[1]][1]
                if s1 != s2:
                    cur = (twin[0], twin[1], "H" if kind3 == "T" else "T")
                else:
                    cur = (twin[0], twin[1], kind3)
            else:
                return side, kind3 == "T"
        raise RuleError(f"boundary walk of tile {t} is stuck")

    start = (min(free), True)
    cycle = [start]
    cur = walk_next(*start)
    while cur != start:
        cycle.append(cur)
        if len(cycle) > len(free):
            raise RuleError(f"boundary walk of tile {t} does not close")
        cur = walk_next(*cur)
    if len(cycle) != len(free):
        raise RuleError(f"subdivision boundary of tile {t} is not one cycle")

    # Expected subdivided boundary of the base tile word.
    word = rule.base.tiles[t]
    expected: list[tuple[str, bool, int, int]] = []   # (re, dir, w, j)
    for w, (e, fwd) in enumerate(word):
        pat = epats[e]
        m = len(pat)
        for j in range(m):
            c = j if fwd else m - 1 - j
            re_, d = pat.edges[c]
            expected.append((re_, d if fwd else not d, w, j))
    L = len(expected)
    if L != len(cycle):
        raise RuleError(f"tile {t}: boundary length {len(cycle)} != "
                        f"subdivided word length {L}")

    # Effective traversal direction of each boundary dart: the dart's word
    # flag when reached at its tail, flipped when reached at its head.
    actual = []
    for (rt, i), at_tail in cycle:
        s = rx.tiles[rt][i][1]
        actual.append((rx.tiles[rt][i][0], s if at_tail else not s))
    match = None
    for rev in (False, True):
        for r in range(L):
            ok = True
            for k in range(L):
                re_, d, _, _ = expected[(r - k) % L if rev else (r + k) % L]
                if actual[k] != (re_, not d if rev else d):
                    ok = False
                    break
            if ok:
                match = (rev, r)
                break
        if match:
            break
    if match is None:
        raise RuleError(f"tile {t}: cannot align subdivision boundary with "
                        "the base word")
    rev, r = match
    dart_slot: dict[Side, tuple[int, int]] = {}
    node_slot: dict = {}    # corner class root -> (w, canonical node index)
    for k, ((rt, i), at_tail) in enumerate(cycle):
        idx = (r - k) % L if rev else (r + k) % L
        re_, d, w, j = expected[idx]
        dart_slot[(rt, i)] = (w, j)
        e, fwd = word[w]
        m = len(epats[e])
        # canonical node indices at the slot's traversal start and end
        start_c = j if fwd else m - j
        end_c = j + 1 if fwd else m - 1 - j
        if rev:
            start_c, end_c = end_c, start_c
        enter = (rt, i, "T" if at_tail else "H")
        leave = (rt, i, "H" if at_tail else "T")
        node_slot[uf.find(enter)] = (w, start_c)
        node_slot[uf.find(leave)] = (w, end_c)
        pat = epats[e]
        if class_vertex[uf.find(enter)] != pat.nodes[start_c] or \
           class_vertex[uf.find(leave)] != pat.nodes[end_c]:
            raise RuleError(f"tile {t}: boundary vertices disagree with the "
                            f"subdivision of edge {e}")

    sides: dict[str, list[tuple]] = {}
    for rt in subtiles:
        out = []
        for i, (re_, s) in enumerate(rx.tiles[rt]):
            if (rt, i) in dart_slot:
                w, j = dart_slot[(rt, i)]
                out.append(("bnd", w, j, s))
            else:
                out.append(("int", re_, s))
        sides[rt] = out

    int_edge_refs: dict[str, tuple[tuple, tuple]] = {}
    for re_ in int_edges:
        d = occ_of[re_][0]
        s = rx.tiles[d[0]][d[1]][1]
        tail_root = uf.find((d[0], d[1], "T"))
        head_root = uf.find((d[0], d[1], "H"))
        init_root, term_root = (tail_root, head_root) if s else (head_root,
                                                                 tail_root)
        refs = []
        for root in (init_root, term_root):
            if root in node_slot:
                refs.append(("b",) + node_slot[root])
            else:
                rv = class_vertex[root]
                if rule.carrier[(VERTEX, rv)] != (TILE, t):
                    raise RuleError(f"tile {t}: interior edge {re_} ends on "
                                    f"unresolved vertex {rv}")
                refs.append(("i", rv))
        int_edge_refs[re_] = (refs[0], refs[1])

    return TilePattern(base_tile=t, subtiles=subtiles,
                       interior_vertices=int_vertices,
                       interior_edges=int_edge_refs, sides=sides)


def patterns(rule: SubdivisionRule):
    """Edge and tile subdivision patterns, derived once and cached."""
    if rule._patterns is not None:
        return rule._patterns
    by_carrier: dict[Cell, list[Cell]] = {}
    for v in rule.refined.vertices:
        by_carrier.setdefault(rule.carrier[(VERTEX, v)], []).append((VERTEX, v))
    for e in rule.refined.edges:
        by_carrier.setdefault(rule.carrier[(EDGE, e)], []).append((EDGE, e))
    for t in rule.refined.tiles:
        by_carrier.setdefault(rule.carrier[(TILE, t)], []).append((TILE, t))
    for cell, items in by_carrier.items():
        by_carrier[cell] = sorted(items)
    vertex_at: dict[str, str] = {}
    for v in rule.base.vertices:
        here = [c[1] for c in by_carrier.get((VERTEX, v), []) if c[0] == VERTEX]
        if len(here) != 1:
            raise RuleError(f"base vertex {v} has {len(here)} refined vertices "
                            "over it (expected exactly 1)")
        vertex_at[v] = here[0]
    epats = {e: _edge_pattern(rule, e, by_carrier, vertex_at)
             for e in sorted(rule.base.edges)}
    tpats = {t: _tile_pattern(rule, t, by_carrier, epats)
             for t in sorted(rule.base.tiles)}
    rule._patterns = (epats, tpats, vertex_at)
    return rule._patterns


# --- validation and degree --------------------------------------------------

def degree(rule: SubdivisionRule) -> int:
    """The constant number of sigma-preimage tiles of each base tile."""
    counts = {t: 0 for t in rule.base.tiles}
    for rt, (bt, _, _) in rule.sigma_t.items():
        counts[bt] += 1
    values = set(counts.values())
    if len(values) != 1:
        raise RuleError(f"non-constant tile preimage count: {counts}")
    return values.pop()


def validate_rule(rule: SubdivisionRule) -> ValidationReport:
    """Check every rule invariant; returns violations rather than raising."""
    report = ValidationReport(ok=True)
    for name, cx in (("base", rule.base), ("refined", rule.refined)):
        sub = validate_complex(cx)
        for v in sub.violations:
            report.add(f"{name}: {v}")
    if not report.ok:
        return report

    rx, bx = rule.refined, rule.base
    for v in rx.vertices:
        if v not in rule.sigma_v:
            report.add(f"sigma undefined on vertex {v}")
        elif rule.sigma_v[v] not in bx.vertices:
            report.add(f"sigma({v}) is not a base vertex")
        if (VERTEX, v) not in rule.carrier:
            report.add(f"carrier undefined on vertex {v}")
    for e in rx.edges:
        if e not in rule.sigma_e:
            report.add(f"sigma undefined on edge {e}")
        elif rule.sigma_e[e][0] not in bx.edges:
            report.add(f"sigma({e}) is not a base edge")
        if (EDGE, e) not in rule.carrier:
            report.add(f"carrier undefined on edge {e}")
        elif rule.carrier[(EDGE, e)][0] == VERTEX:
            report.add(f"carrier of edge {e} has lower dimension")
    for t in rx.tiles:
        if t not in rule.sigma_t:
            report.add(f"sigma undefined on tile {t}")
        elif rule.sigma_t[t][0] not in bx.tiles:
            report.add(f"sigma({t}) is not a base tile")
        if rule.carrier.get((TILE, t), (None,))[0] != TILE:
            report.add(f"carrier of tile {t} is not a base tile")
    if not report.ok:
        return report

    # Edge endpoint consistency.
    for e, (b, rev) in rule.sigma_e.items():
        u, v = rx.edges[e]
        bu, bv = bx.edges[b]
        want = (bv, bu) if rev else (bu, bv)
        if (rule.sigma_v[u], rule.sigma_v[v]) != want:
            report.add(f"edge {e}: endpoint images disagree with sigma")

    # Tile word alignment consistency.
    for t, (bt, offset, rev) in rule.sigma_t.items():
        word, bword = rx.tiles[t], bx.tiles[bt]
        if len(word) != len(bword):
            report.add(f"tile {t}: word length {len(word)} != image length "
                       f"{len(bword)}")
            continue
        fwd, _ = align_map(offset, rev, len(word))
        for i, (e, s) in enumerate(word):
            be, bs = bword[fwd(i)]
            if e not in rule.sigma_e or rule.sigma_e[e][0] != be:
                report.add(f"tile {t} position {i}: edge image mismatch")
                break
            if (s != rule.sigma_e[e][1]) != (bs != rev):
                report.add(f"tile {t} position {i}: direction mismatch")
                break

    # Constant degree on tiles, and equal preimage counts on edges.
    try:
        d = degree(rule)
    except RuleError as exc:
        report.add(str(exc))
        return report
    if d < 1:
        report.add("degree < 1")
    if d == 1:
        report.warnings.append("degree-1 rule")
    edge_counts = {e: 0 for e in bx.edges}
    for e, (b, _) in rule.sigma_e.items():
        edge_counts[b] += 1
    for b, k in edge_counts.items():
        if k != d:
            report.add(f"base edge {b} has {k} preimage edges, expected {d}")

    # Local degrees at vertices: corner counts must divide evenly and the
    # degrees over each base vertex must sum to d.
    bcorners = vertex_corners(bx)
    rcorners = vertex_corners(rx)
    local_sum = {v: 0 for v in bx.vertices}
    for v in rx.vertices:
        bv = rule.sigma_v[v]
        nb, nr = len(bcorners[bv]), len(rcorners[v])
        if nb == 0 or nr % nb:
            report.add(f"vertex {v}: corner count {nr} not a multiple of "
                       f"{nb} over {bv}")
            continue
        local_sum[bv] += nr // nb
    for v, s in local_sum.items():
        if report.ok and s != d:
            report.add(f"base vertex {v}: local degrees sum to {s} != {d}")

    # Forward invariance of the marked set.
    try:
        _, _, vertex_at = patterns(rule)
        for m in bx.marked:
            if rule.sigma_v[vertex_at[m]] not in bx.marked:
                report.add(f"marked vertex {m} leaves the marked set")
    except RuleError as exc:
        report.add(f"refinement structure: {exc}")
        return report

    # The unfolding itself (edge paths, disk patterns, boundary alignment)
    # raises RuleError on any refinement violation; reaching here means the
    # carrier really is a subdivision.
    return report


# --- towers -----------------------------------------------------------------

@dataclass
class TowerLevel:
    complex: SphereComplex
    sigma: dict[Cell, Cell] | None          # to previous level
    carrier: dict[Cell, Cell] | None        # to previous level
    tile_type: dict[str, str]               # composed sigma image in base
    tile_align: dict[str, tuple[int, bool]]  # word alignment to its type tile
    step_align: dict[str, tuple[int, bool]]  # word alignment to sigma image
    edge_type: dict[str, tuple[str, bool]]  # (base edge, init maps to init?)
    side_prov: dict[Side, Side | None] | None  # side -> carrier-tile side


@dataclass
class SubdivisionTower:
    rule: SubdivisionRule
    levels: list[TowerLevel]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def complex(self, n: int) -> SphereComplex:
        return self.levels[n].complex


def make_tower(rule: SubdivisionRule) -> SubdivisionTower:
    base = rule.base
    level0 = TowerLevel(
        complex=base,
        sigma=None,
        carrier=None,
        tile_type={t: t for t in base.tiles},
        tile_align={t: (0, False) for t in base.tiles},
        step_align={t: (0, False) for t in base.tiles},
        edge_type={e: (e, True) for e in base.edges},
        side_prov=None,
    )
    return SubdivisionTower(rule=rule, levels=[level0])


def _sub_vertex(e: str, c: int) -> str:
    return f"{e}~{c}"


def _sub_edge(e: str, c: int) -> str:
    return f"{e}~{c}"


def _in_cell(t: str, x: str) -> str:
    return f"{t}^{x}"


def subdivide(tower: SubdivisionTower) -> SubdivisionTower:
    """Return a tower with one more level appended.

    Each level-n tile is replaced by a copy of the subdivision pattern of
    its base type; each level-n edge is subdivided once and shared by both
    adjacent tiles.  Raises ComplexError on inconsistent shared-edge data,
    which cannot happen for a valid rule.
    """
    rule = tower.rule
    epats, tpats, vertex_at = patterns(rule)
    prev = tower.levels[-1]
    cx = prev.complex
    n = tower.depth

    vertices: set[str] = set(cx.vertices)
    edges: dict[str, tuple[str, str]] = {}
    tiles: dict[str, list[Occurrence]] = {}
    sigma: dict[Cell, Cell] = {}
    carrier: dict[Cell, Cell] = {}
    tile_type: dict[str, str] = {}
    tile_align: dict[str, tuple[int, bool]] = {}
    step_align: dict[str, tuple[int, bool]] = {}
    edge_type: dict[str, tuple[str, bool]] = {}
    side_prov: dict[Side, Side | None] = {}

    def prev_sigma(cell: Cell) -> Cell:
        if n == 0:
            raise AssertionError("no previous sigma at level 0")
        return prev.sigma[cell]

    # persisting vertices
    for v in sorted(cx.vertices):
        if n == 0:
            sigma[(VERTEX, v)] = (VERTEX, rule.sigma_v[vertex_at[v]])
        else:
            sigma[(VERTEX, v)] = prev_sigma((VERTEX, v))
        carrier[(VERTEX, v)] = (VERTEX, v)

    # subdivide edges
    node_ids: dict[str, list[str]] = {}
    for e in sorted(cx.edges):
        bedge, orf = prev.edge_type[e]
        pat = epats[bedge]
        m = len(pat)
        u, v = cx.edges[e]
        ends = (u, v) if orf else (v, u)
        nodes = [ends[0]]
        for c in range(1, m):
            nv = _sub_vertex(e, c)
            if nv in vertices:
                raise ComplexError(f"cell id collision at {nv}")
            vertices.add(nv)
            if n == 0:
                sigma[(VERTEX, nv)] = (VERTEX, rule.sigma_v[pat.nodes[c]])
            else:
                se = prev_sigma((EDGE, e))[1]
                sigma[(VERTEX, nv)] = (VERTEX, _sub_vertex(se, c))
            carrier[(VERTEX, nv)] = (EDGE, e)
            nodes.append(nv)
        nodes.append(ends[1])
        node_ids[e] = nodes
        for c in range(m):
            ne = _sub_edge(e, c)
            if ne in edges:
                raise ComplexError(f"cell id collision at edge {ne}")
            re_, d = pat.edges[c]
            edges[ne] = (nodes[c], nodes[c + 1]) if d else (nodes[c + 1],
                                                            nodes[c])
            if n == 0:
                sigma[(EDGE, ne)] = (EDGE, rule.sigma_e[re_][0])
            else:
                se = prev_sigma((EDGE, e))[1]
                sigma[(EDGE, ne)] = (EDGE, _sub_edge(se, c))
            carrier[(EDGE, ne)] = (EDGE, e)
            edge_type[ne] = (rule.sigma_e[re_][0], not rule.sigma_e[re_][1])

    # subdivide tiles
    for t in sorted(cx.tiles):
        btile = prev.tile_type[t]
        tpat = tpats[btile]
        offset, rev = prev.tile_align[t]
        word = cx.tiles[t]
        _, inv = align_map(offset, rev, len(word))
        bword = rule.base.tiles[btile]

        def resolve_node(w: int, cidx: int) -> str:
            p = inv(w)
            e = word[p][0]
            return node_ids[e][cidx]

        for rv in tpat.interior_vertices:
            nv = _in_cell(t, rv)
            if nv in vertices:
                raise ComplexError(f"cell id collision at {nv}")
            vertices.add(nv)
            if n == 0:
                sigma[(VERTEX, nv)] = (VERTEX, rule.sigma_v[rv])
            else:
                st = prev_sigma((TILE, t))[1]
                sigma[(VERTEX, nv)] = (VERTEX, _in_cell(st, rv))
            carrier[(VERTEX, nv)] = (TILE, t)

        for re_, (iref, tref) in sorted(tpat.interior_edges.items()):
            ne = _in_cell(t, re_)
            if ne in edges:
                raise ComplexError(f"cell id collision at edge {ne}")
            ends = []
            for ref in (iref, tref):
                if ref[0] == "i":
                    ends.append(_in_cell(t, ref[1]))
                else:
                    ends.append(resolve_node(ref[1], ref[2]))
            edges[ne] = (ends[0], ends[1])
            if n == 0:
                sigma[(EDGE, ne)] = (EDGE, rule.sigma_e[re_][0])
            else:
                st = prev_sigma((TILE, t))[1]
                sigma[(EDGE, ne)] = (EDGE, _in_cell(st, re_))
            carrier[(EDGE, ne)] = (TILE, t)
            edge_type[ne] = (rule.sigma_e[re_][0], not rule.sigma_e[re_][1])

        for rt in tpat.subtiles:
            nt = _in_cell(t, rt)
            if nt in tiles:
                raise ComplexError(f"cell id collision at tile {nt}")
            new_word: list[Occurrence] = []
            for i, entry in enumerate(tpat.sides[rt]):
                if entry[0] == "int":
                    _, re_, s = entry
                    new_word.append((_in_cell(t, re_), s))
                    side_prov[(nt, i)] = None
                else:
                    _, w, j, s = entry
                    p = inv(w)
                    e, _ = word[p]
                    be, fwd = bword[w]
                    m = len(epats[be])
                    c = j if fwd else m - 1 - j
                    new_word.append((_sub_edge(e, c), s))
                    side_prov[(nt, i)] = (t, p)
            tiles[nt] = new_word
            carrier[(TILE, nt)] = (TILE, t)
            if n == 0:
                sigma[(TILE, nt)] = (TILE, rule.sigma_t[rt][0])
            else:
                st = prev_sigma((TILE, t))[1]
                sigma[(TILE, nt)] = (TILE, _in_cell(st, rt))
            tile_type[nt] = rule.sigma_t[rt][0]
            tile_align[nt] = (rule.sigma_t[rt][1], rule.sigma_t[rt][2])
            step_align[nt] = (rule.sigma_t[rt][1], rule.sigma_t[rt][2]) \
                if n == 0 else (0, False)

    # structural sanity: every subdivided edge received one side per parent
    # side; a failure here signals corrupted rule data.
    counts: dict[str, list[Side]] = {e: [] for e in edges}
    for nt, w in tiles.items():
        for i, (e, _) in enumerate(w):
            counts[e].append((nt, i))
    for e, occs in counts.items():
        if len(occs) != 2:
            raise ComplexError(f"subdivided edge {e} acquired {len(occs)} "
                               "sides; inconsistent edge subdivision")

    marked = set(cx.marked)
    new_cx = SphereComplex(vertices=vertices, edges=edges, tiles=tiles,
                           marked=marked)
    level = TowerLevel(complex=new_cx, sigma=sigma, carrier=carrier,
                       tile_type=tile_type, tile_align=tile_align,
                       step_align=step_align, edge_type=edge_type,
                       side_prov=side_prov)
    return SubdivisionTower(rule=tower.rule, levels=tower.levels + [level])


def tower_to(rule_or_tower, n: int) -> SubdivisionTower:
    """A tower of the given rule with at least n+1 levels."""
    tower = rule_or_tower if isinstance(rule_or_tower, SubdivisionTower) \
        else make_tower(rule_or_tower)
    while tower.depth < n:
        tower = subdivide(tower)
    return tower


# --- builtin rules ----------------------------------------------------------

def _cubic_example() -> SubdivisionRule:
    """The degree-3 rule on the square pillow: two quadrilateral tiles, all
    four vertices fixed and critical of local degree 2, both horizontal
    edges fixed pointwise; each tile subdivides into a fan of three
    quadrilaterals between opposite corners."""
    base = SphereComplex(
        vertices={"p1", "p2", "p3", "p4"},
        edges={"b": ("p1", "p2"), "r": ("p2", "p3"),
               "t": ("p4", "p3"), "l": ("p1", "p4")},
        tiles={"A": [("b", True), ("r", True), ("t", False), ("l", False)],
               "B": [("b", True), ("r", True), ("t", False), ("l", False)]},
        marked={"p1", "p2", "p3", "p4"},
    )
    refined = SphereComplex(
        vertices={"p1", "p2", "p3", "p4", "q1", "q2", "q3", "q4"},
        edges={
            "b": ("p1", "p2"), "t": ("p4", "p3"),
            "l1": ("p1", "p4"), "r1": ("p2", "p3"),
            "b_a": ("q1", "p2"), "r_a": ("p2", "q3"),
            "t_a": ("p4", "q3"), "l_a": ("q1", "p4"),
            "b_b": ("p1", "q2"), "r_b": ("q2", "p3"),
            "t_b": ("q4", "p3"), "l_b": ("p1", "q4"),
        },
        tiles={
            "a0": [("b", True), ("r_a", True), ("t_a", False), ("l1", False)],
            "a1": [("b_a", True), ("r_a", True), ("t_a", False), ("l_a", False)],
            "a2": [("b_a", True), ("r1", True), ("t", False), ("l_a", False)],
            "b0": [("b", True), ("r1", True), ("t_b", False), ("l_b", False)],
            "b1": [("b_b", True), ("r_b", True), ("t_b", False), ("l_b", False)],
            "b2": [("b_b", True), ("r_b", True), ("t", False), ("l1", False)],
        },
        marked={"p1", "p2", "p3", "p4"},
    )
    carrier: dict[Cell, Cell] = {}
    for p in ("p1", "p2", "p3", "p4"):
        carrier[(VERTEX, p)] = (VERTEX, p)
    carrier[(VERTEX, "q1")] = (TILE, "A")
    carrier[(VERTEX, "q3")] = (TILE, "A")
    carrier[(VERTEX, "q2")] = (TILE, "B")
    carrier[(VERTEX, "q4")] = (TILE, "B")
    for e, b in (("b", "b"), ("t", "t"), ("l1", "l"), ("r1", "r")):
        carrier[(EDGE, e)] = (EDGE, b)
    for e in ("b_a", "r_a", "t_a", "l_a"):
        carrier[(EDGE, e)] = (TILE, "A")
    for e in ("b_b", "r_b", "t_b", "l_b"):
        carrier[(EDGE, e)] = (TILE, "B")
    for t in ("a0", "a1", "a2"):
        carrier[(TILE, t)] = (TILE, "A")
    for t in ("b0", "b1", "b2"):
        carrier[(TILE, t)] = (TILE, "B")

    sigma_v = {"p1": "p1", "p2": "p2", "p3": "p3", "p4": "p4",
               "q1": "p1", "q2": "p2", "q3": "p3", "q4": "p4"}
    sigma_e = {
        "b": ("b", False), "b_a": ("b", False), "b_b": ("b", False),
        "t": ("t", False), "t_a": ("t", False), "t_b": ("t", False),
        "l1": ("l", False), "l_a": ("l", False), "l_b": ("l", False),
        "r1": ("r", False), "r_a": ("r", False), "r_b": ("r", False),
    }
    sigma_t = {"a0": ("A", 0, False), "a1": ("B", 0, False),
               "a2": ("A", 0, False), "b0": ("B", 0, False),
               "b1": ("A", 0, False), "b2": ("B", 0, False)}
    return SubdivisionRule(base=base, refined=refined, carrier=carrier,
                           sigma_v=sigma_v, sigma_e=sigma_e, sigma_t=sigma_t,
                           name="cubic_example")


BUILTIN_NAMES = ("cubic_example",)


def builtin(name: str) -> SubdivisionRule:
    """A named builtin rule; see BUILTIN_NAMES."""
    if name == "cubic_example":
        return _cubic_example()
    raise RuleError(f"unknown builtin rule {name!r}")
