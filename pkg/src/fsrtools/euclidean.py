"""Exact classification and constructions for torus-covered branched maps.

An integer matrix A with |det A| >= 2 induces a branched self-map of the
sphere obtained as the plane modulo the group generated by half-turns
about the lattice spanned by the columns of A.  Its dynamics fall into
three exact classes by eigenvalue location relative to the unit circle:
both outside, a unit eigenvalue, or one strictly inside.  All class
decisions here are integer sign tests; floating point appears only in
certificates, computed with mpmath at high working precision.

The unit-eigenvalue case admits a GL(2,Z) normal form [[d, c], [0, 1]]
with 0 <= c <= d-2, and from (d, c) a one-tile-type subdivision rule is
built by exact rational arrangement of an invariant spine: the bottom and
top lattice lines and the fixed-eigendirection seam, together with the
preimage of that spine under (x, y) -> (dx + cy, y).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath as mp

from .complexes import Cell, Occurrence, SphereComplex, VERTEX, EDGE, TILE
from .rules import SubdivisionRule


class EuclideanError(ValueError):
    """Raised on precondition violations (wrong class, |det| < 2)."""


Mat = tuple[int, int, int, int]     # row-major a11 a12 a21 a22


@dataclass(frozen=True)
class IntMatrix2:
    a11: int
    a12: int
    a21: int
    a22: int

    @classmethod
    def of(cls, m) -> "IntMatrix2":
        if isinstance(m, IntMatrix2):
            return m
        a, b, c, d = m
        return cls(int(a), int(b), int(c), int(d))

    @property
    def trace(self) -> int:
        return self.a11 + self.a22

    @property
    def det(self) -> int:
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def discriminant(self) -> int:
        return self.trace * self.trace - 4 * self.det

    def rows(self) -> Mat:
        return (self.a11, self.a12, self.a21, self.a22)

    def neg(self) -> "IntMatrix2":
        return IntMatrix2(-self.a11, -self.a12, -self.a21, -self.a22)

    def mul(self, other: "IntMatrix2") -> "IntMatrix2":
        a, b, c, d = self.rows()
        e, f, g, h = other.rows()
        return IntMatrix2(a * e + b * g, a * f + b * h,
                          c * e + d * g, c * f + d * h)

    def apply(self, v):
        return (self.a11 * v[0] + self.a12 * v[1],
                self.a21 * v[0] + self.a22 * v[1])

    def adjugate(self) -> "IntMatrix2":
        return IntMatrix2(self.a22, -self.a12, -self.a21, self.a11)

    def columns(self):
        return ((self.a11, self.a21), (self.a12, self.a22))

    def __str__(self):
        return f"[[{self.a11},{self.a12}],[{self.a21},{self.a22}]]"


@dataclass
class EuclideanModel:
    """The affine data x -> Ax + b with b in the column lattice of A."""
    A: IntMatrix2
    b: tuple[int, int] = (0, 0)

    def __post_init__(self):
        self.A = IntMatrix2.of(self.A)
        if abs(self.A.det) < 2:
            raise EuclideanError("|det A| must be at least 2")
        if not _in_lattice(self.A, self.b):
            raise EuclideanError("b must lie in the lattice spanned by the "
                                 "columns of A")


def _in_lattice(A: IntMatrix2, v) -> bool:
    # v = A w for integer w  iff  adj(A) v is divisible by det A
    w = A.adjugate().apply(v)
    return w[0] % A.det == 0 and w[1] % A.det == 0


EXPANDING, UNIT, CONTRACTING = "expanding", "unit", "contracting"


@dataclass(frozen=True)
class EuclidClass:
    """Exact eigenvalue location: kind plus integer witnesses.

    For kind 'unit', unit_sign records the unit eigenvalue.  For kind
    'contracting', the small eigenvalue is (trace - s*sqrt(disc))/2 with
    s = 1 if trace > 0 else -1; eigenvalues() evaluates numerically.
    """
    kind: str
    trace: int
    det: int
    discriminant: int
    unit_sign: int | None = None

    def eigenvalues(self, dps: int = 50):
        with mp.workdps(dps):
            t, D = mp.mpf(self.trace), mp.mpf(self.det)
            disc = t * t - 4 * D
            r = mp.sqrt(disc)
            return ((t + r) / 2, (t - r) / 2)

    def lambda_min(self, dps: int = 50):
        lams = self.eigenvalues(dps)
        return min(lams, key=abs)


def classify(A) -> EuclidClass:
    """Exact eigenvalue classification by integer sign tests.

    Unit iff the characteristic polynomial vanishes at 1 or -1; complex
    pairs have squared modulus det >= 2, hence expanding; otherwise the
    real pair straddles the unit circle iff p(1) * p(-1) < 0.
    """
    A = IntMatrix2.of(A)
    t, D = A.trace, A.det
    if abs(D) < 2:
        raise EuclideanError(f"|det| = {abs(D)} < 2")
    disc = t * t - 4 * D
    p1 = 1 - t + D          # char poly at 1
    pm1 = 1 + t + D         # char poly at -1
    if p1 == 0:
        return EuclidClass(UNIT, t, D, disc, unit_sign=1)
    if pm1 == 0:
        return EuclidClass(UNIT, t, D, disc, unit_sign=-1)
    if disc < 0:
        return EuclidClass(EXPANDING, t, D, disc)
    if p1 * pm1 < 0:
        return EuclidClass(CONTRACTING, t, D, disc)
    return EuclidClass(EXPANDING, t, D, disc)


# --- normal form ------------------------------------------------------------

@dataclass
class NormalForm:
    """Certificate that U^-1 (s A) U = [[d, c], [0, 1]] exactly."""
    d: int
    c: int
    U: IntMatrix2
    flipped: bool           # whether A was replaced by -A first

    def det_U(self) -> int:
        return self.U.det

    def verify(self, A) -> bool:
        A = IntMatrix2.of(A)
        M = A.neg() if self.flipped else A
        adj = self.U.adjugate()
        lhs = adj.mul(M).mul(self.U)    # det(U) * U^-1 M U
        du = self.U.det
        want = IntMatrix2(self.d * du, self.c * du, 0, du)
        return du in (1, -1) and lhs.rows() == want.rows() and \
            0 <= self.c <= self.d - 2


def _extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _extended_gcd(b, a % b)
    return (g, y, x - (a // b) * y)


def normal_form(A) -> NormalForm:
    """GL(2,Z) conjugation of a unit-eigenvalue matrix to [[d, c], [0, 1]].

    When the unit eigenvalue is -1 the matrix is negated first (this does
    not change the induced sphere map).  Requires det >= 2 after the flip:
    the induced map is orientation-preserving exactly when the determinant
    is positive, and then det equals the map's degree.
    """
    A = IntMatrix2.of(A)
    cls = classify(A)
    if cls.kind != UNIT:
        raise EuclideanError(f"matrix {A} has no unit eigenvalue")
    flipped = cls.unit_sign == -1
    M = A.neg() if flipped else A
    d = M.det
    if d < 2:
        raise EuclideanError(
            f"normal form needs determinant >= 2, got {d} (orientation-"
            "reversing torus maps do not induce branched sphere covers)")
    # primitive integer eigenvector (p, q) for the eigenvalue d
    cands = [(M.a12, d - M.a11), (d - M.a22, M.a21)]
    v = next(((p, q) for p, q in cands if (p, q) != (0, 0)), (1, 0))
    g = gcd(abs(v[0]), abs(v[1]))
    p, q = v[0] // g, v[1] // g
    if M.apply((p, q)) != (d * p, d * q):
        raise EuclideanError(f"internal: ({p},{q}) is not a d-eigenvector")
    _, x, y = _extended_gcd(p, q)
    r, s = -y, x                        # ps - qr = px + qy = 1
    U = IntMatrix2(p, r, q, s)
    B = U.adjugate().mul(M).mul(U)      # = U^-1 M U since det U = 1
    if B.a21 != 0 or B.a11 != d or B.a22 != 1:
        raise EuclideanError("internal: conjugation did not triangularize")
    c0 = B.a12
    a = -(c0 // (d - 1))
    c = c0 + a * (d - 1)
    U = U.mul(IntMatrix2(1, a, 0, 1))
    nf = NormalForm(d=d, c=c, U=U, flipped=flipped)
    if not nf.verify(A):
        raise EuclideanError("internal: normal form certificate failed")
    return nf


def cone_points(model: EuclideanModel) -> list[tuple[int, int]]:
    """Representatives of the four half-turn classes: the images of the
    lattice modulo twice the lattice."""
    c1, c2 = model.A.columns()
    return [(0, 0), c1, c2, (c1[0] + c2[0], c1[1] + c2[1])]


# --- one-tile-type rule from (d, c) ------------------------------------------

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class _Band:
    """Exact-rational quotient complex of the strip 0 <= y <= 1.

    The quotient group is generated by the horizontal translation by 2d
    and half-turns about (d*m + c*n, n); the canonical representative of
    an inner point reduces x mod 2d, while points on y = 0 and y = 1 fold
    into [0, d] and [c, c + d] respectively.
    """

    def __init__(self, d: int, c: int, seams: list[Fraction],
                 bot_xs: list[Fraction], top_xs: list[Fraction]):
        self.d, self.c = d, c
        self.kappa = Fraction(c, d - 1)
        self.period = 2 * d
        self.seams = sorted(_frac(s) % self.period for s in seams)
        self.bot = sorted(set(_frac(x) for x in bot_xs))
        self.top = sorted(set(_frac(x) for x in top_xs))
        self._build()

    # canonical folds
    def can_bot(self, x: Fraction) -> Fraction:
        x = _frac(x) % self.period
        return x if x <= self.d else self.period - x

    def can_top(self, x: Fraction) -> Fraction:
        x = (_frac(x) - self.c) % self.period
        x = x if x <= self.d else self.period - x
        return x + self.c

    def seam_top(self, s: Fraction) -> Fraction:
        return s - self.kappa

    def _build(self):
        d = self.d
        if self.bot[0] != 0 or self.bot[-1] != d:
            raise EuclideanError("bottom folds 0 and d must be vertices")
        if self.top[0] != self.c or self.top[-1] != self.c + d:
            raise EuclideanError("top folds c and c+d must be vertices")
        self.bot_v = {x: f"u{i}" for i, x in enumerate(self.bot)}
        self.top_v = {x: f"w{i}" for i, x in enumerate(self.top)}
        vertices = set(self.bot_v.values()) | set(self.top_v.values())
        edges: dict[str, tuple[str, str]] = {}
        self.bot_e: dict[int, str] = {}
        self.top_e: dict[int, str] = {}
        for i in range(len(self.bot) - 1):
            edges[f"a{i}"] = (self.bot_v[self.bot[i]], self.bot_v[self.bot[i + 1]])
            self.bot_e[i] = f"a{i}"
        for i in range(len(self.top) - 1):
            edges[f"b{i}"] = (self.top_v[self.top[i]], self.top_v[self.top[i + 1]])
            self.top_e[i] = f"b{i}"
        self.seam_e: dict[Fraction, str] = {}
        for i, s in enumerate(self.seams):
            foot, head = self.can_bot(s), self.can_top(self.seam_top(s))
            if foot not in self.bot_v or head not in self.top_v:
                raise EuclideanError("seam endpoints must be declared vertices")
            edges[f"g{i}"] = (self.bot_v[foot], self.top_v[head])
            self.seam_e[s] = f"g{i}"

        tiles: dict[str, list[Occurrence]] = {}
        for m, s in enumerate(self.seams):
            s2 = self.seams[(m + 1) % len(self.seams)]
            if (m + 1) == len(self.seams):
                s2 += self.period
            word: list[Occurrence] = []
            word += self._bot_run(s, s2)
            word.append((self.seam_e[s2 % self.period], True))
            word += self._top_run(self.seam_top(s2), self.seam_top(s))
            word.append((self.seam_e[s % self.period], False))
            tiles[f"T{m}"] = word
        self.complex = SphereComplex(vertices=vertices, edges=edges,
                                     tiles=tiles, marked=set())

    def _line_points(self, lo: Fraction, hi: Fraction, canonical: list,
                     refl) -> list[Fraction]:
        """Upstairs positions in [lo, hi] whose fold lies in the canonical
        vertex set; refl is the reflection branch of the fold group."""
        from math import floor
        out = {lo, hi}
        period = self.period
        branches = []
        for v in canonical:
            branches.append(v)
            branches.append(refl(v))
        for v in branches:
            k = floor((lo - v) / period)
            while v + k * period <= hi:
                x = v + k * period
                if lo <= x <= hi:
                    out.add(x)
                k += 1
        return sorted(out)

    def _bot_run(self, lo: Fraction, hi: Fraction) -> list[Occurrence]:
        pts = self._line_points(lo, hi, self.bot, lambda v: -v)
        out = []
        for x0, x1 in zip(pts, pts[1:]):
            c0, c1 = self.can_bot(x0), self.can_bot(x1)
            i = self._interval_index(self.bot, self.can_bot((x0 + x1) / 2))
            e = self.bot_e[i]
            out.append((e, self.bot[i] == c0 and self.bot[i + 1] == c1))
            if not (set((c0, c1)) == {self.bot[i], self.bot[i + 1]}):
                raise EuclideanError("bottom subdivision misaligned")
        return out

    def _top_run(self, hi: Fraction, lo: Fraction) -> list[Occurrence]:
        # traversed right-to-left: from hi down to lo
        pts = self._line_points(lo, hi, self.top, lambda v: 2 * self.c - v)
        out = []
        for x1, x0 in zip(pts[::-1], pts[::-1][1:]):
            c0, c1 = self.can_top(x0), self.can_top(x1)
            i = self._interval_index(self.top, self.can_top((x0 + x1) / 2))
            e = self.top_e[i]
            out.append((e, self.top[i] == c1 and self.top[i + 1] == c0))
            if not (set((c0, c1)) == {self.top[i], self.top[i + 1]}):
                raise EuclideanError("top subdivision misaligned")
        return out

    @staticmethod
    def _interval_index(xs: list[Fraction], x: Fraction) -> int:
        for i in range(len(xs) - 1):
            if xs[i] < x < xs[i + 1]:
                return i
        raise EuclideanError(f"point {x} is not interior to a segment")

    # canonical cell lookups for a point --------------------------------
    def vertex_at(self, x: Fraction, y: Fraction) -> str | None:
        if y == 0:
            return self.bot_v.get(self.can_bot(x))
        if y == 1:
            return self.top_v.get(self.can_top(x))
        return None

    def on_seam(self, x: Fraction, y: Fraction) -> str | None:
        # seam through (s, 0) contains (s - kappa * y, y)
        for s, e in self.seam_e.items():
            if (x + self.kappa * y - s) % self.period == 0:
                return e
        return None

    def edge_at(self, x: Fraction, y: Fraction) -> str | None:
        if y == 0:
            cx = self.can_bot(x)
            if cx in self.bot_v:
                return None
            return self.bot_e[self._interval_index(self.bot, cx)]
        if y == 1:
            cx = self.can_top(x)
            if cx in self.top_v:
                return None
            return self.top_e[self._interval_index(self.top, cx)]
        return self.on_seam(x, y)

    def cell_at(self, x: Fraction, y: Fraction, tile_of_point) -> Cell:
        v = self.vertex_at(x, y)
        if v is not None:
            return (VERTEX, v)
        e = self.edge_at(x, y)
        if e is not None:
            return (EDGE, e)
        return (TILE, tile_of_point(x, y))


def _point_on_segment_mid(p0, p1):
    return (Fraction(p0[0] + p1[0], 2), Fraction(p0[1] + p1[1], 2))


def build_case2_fsr(d: int, c: int) -> SubdivisionRule:
    """The one-tile-type rule of the model A = [[d, c], [0, 1]].

    The base complex is the complement of the invariant spine: the bottom
    arc between the images of (0,0) and (d,0), the top arc between the
    images of (c,1) and (c+d,1), and the pointwise-fixed eigendirection
    seam from the origin.  The refinement is the exact preimage of the
    spine under (x, y) -> (dx + cy, y).
    """
    if d < 2 or not (0 <= c <= d - 2):
        raise EuclideanError(f"need d >= 2 and 0 <= c <= d-2, got ({d}, {c})")
    kappa = Fraction(c, d - 1)

    base_band = _Band(d, c, seams=[Fraction(0)],
                      bot_xs=[Fraction(0), Fraction(d)],
                      top_xs=sorted({Fraction(c), Fraction(c + d),
                                     _can_top_static(d, c, -kappa)}))
    ref_bot = [Fraction(j) for j in range(d + 1)]
    ref_top = {Fraction(c + j) for j in range(d + 1)}
    for m in range(d):
        ref_top.add(_can_top_static(d, c, 2 * m - kappa))
    ref_band = _Band(d, c, seams=[Fraction(2 * m) for m in range(d)],
                     bot_xs=ref_bot, top_xs=sorted(ref_top))

    base = base_band.complex
    refined = ref_band.complex

    # geometry of every cell, for sigma and carrier
    def image(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return (d * x + c * y, y)

    # vertex positions upstairs (canonical representatives)
    ref_pos: dict[str, tuple[Fraction, Fraction]] = {}
    for x, v in ref_band.bot_v.items():
        ref_pos[v] = (x, Fraction(0))
    for x, v in ref_band.top_v.items():
        ref_pos[v] = (x, Fraction(1))

    sigma_v: dict[str, str] = {}
    for v, (x, y) in ref_pos.items():
        ix, iy = image(x, y)
        tv = base_band.vertex_at(ix, iy)
        if tv is None:
            raise EuclideanError(f"vertex {v} does not map to a base vertex")
        sigma_v[v] = tv

    # base point location helpers
    def base_cell(x: Fraction, y: Fraction) -> Cell:
        return base_band.cell_at(x, y, lambda *_: "T0")

    # refined edge geometry: representative endpoints upstairs
    ref_edge_geo: dict[str, tuple[tuple, tuple]] = {}
    for i in range(len(ref_band.bot) - 1):
        ref_edge_geo[ref_band.bot_e[i]] = (
            (ref_band.bot[i], Fraction(0)), (ref_band.bot[i + 1], Fraction(0)))
    for i in range(len(ref_band.top) - 1):
        ref_edge_geo[ref_band.top_e[i]] = (
            (ref_band.top[i], Fraction(1)), (ref_band.top[i + 1], Fraction(1)))
    for s, e in ref_band.seam_e.items():
        ref_edge_geo[e] = ((s, Fraction(0)), (s - ref_band.kappa, Fraction(1)))

    base_edge_geo: dict[str, tuple[tuple, tuple]] = {}
    for i in range(len(base_band.bot) - 1):
        base_edge_geo[base_band.bot_e[i]] = (
            (base_band.bot[i], Fraction(0)), (base_band.bot[i + 1], Fraction(0)))
    for i in range(len(base_band.top) - 1):
        base_edge_geo[base_band.top_e[i]] = (
            (base_band.top[i], Fraction(1)), (base_band.top[i + 1], Fraction(1)))
    for s, e in base_band.seam_e.items():
        base_edge_geo[e] = ((s, Fraction(0)), (s - base_band.kappa, Fraction(1)))

    def locate_base_edge(x: Fraction, y: Fraction) -> str:
        cell = base_cell(x, y)
        if cell[0] != EDGE:
            raise EuclideanError(f"image point ({x},{y}) is not on an edge")
        return cell[1]

    sigma_e: dict[str, tuple[str, bool]] = {}
    for e, (p0, p1) in ref_edge_geo.items():
        mid = _point_on_segment_mid(p0, p1)
        be = locate_base_edge(*image(*mid))
        # orientation: does the initial endpoint map to the base edge's
        # initial vertex?
        u = refined.edges[e][0]
        bu = base.edges[be][0]
        sigma_e[e] = (be, sigma_v[u] != bu)
        if sigma_v[u] != bu and sigma_v[u] != base.edges[be][1]:
            raise EuclideanError(f"edge {e} image endpoints inconsistent")

    # carrier
    carrier: dict[Cell, Cell] = {}
    base_vertex_pos = {v: (x, Fraction(0)) for x, v in base_band.bot_v.items()}
    base_vertex_pos.update({v: (x, Fraction(1))
                            for x, v in base_band.top_v.items()})
    for v, (x, y) in ref_pos.items():
        carrier[(VERTEX, v)] = base_cell(x, y)
    for e, (p0, p1) in ref_edge_geo.items():
        mid = _point_on_segment_mid(p0, p1)
        carrier[(EDGE, e)] = base_cell(*mid)
    for t in refined.tiles:
        carrier[(TILE, t)] = (TILE, "T0")

    # sigma on tiles: align each strip's image word with the base word
    sigma_t: dict[str, tuple[str, int, bool]] = {}
    bword = base.tiles["T0"]
    for t, word in refined.tiles.items():
        imword = [(sigma_e[e][0], s != sigma_e[e][1]) for e, s in word]
        match = None
        L = len(bword)
        if len(imword) != L:
            raise EuclideanError(f"tile {t} word length mismatch")
        for rev in (False, True):
            for off in range(L):
                if rev:
                    ok = all(imword[i] == (bword[(off - i) % L][0],
                                           not bword[(off - i) % L][1])
                             for i in range(L))
                else:
                    ok = all(imword[i] == bword[(off + i) % L]
                             for i in range(L))
                if ok:
                    match = (off, rev)
                    break
            if match:
                break
        if match is None:
            raise EuclideanError(f"tile {t} image word does not align")
        sigma_t[t] = ("T0", match[0], match[1])

    # marked: the four half-turn classes
    def mark(band: _Band, cx: SphereComplex):
        pts = [(Fraction(0), Fraction(0)), (Fraction(d), Fraction(0)),
               (Fraction(c), Fraction(1)), (Fraction(c + d), Fraction(1))]
        for x, y in pts:
            v = band.vertex_at(x, y)
            if v is None:
                raise EuclideanError("cone point is not a vertex")
            cx.marked.add(v)
    mark(base_band, base)
    mark(ref_band, refined)

    return SubdivisionRule(base=base, refined=refined, carrier=carrier,
                           sigma_v=sigma_v, sigma_e=sigma_e, sigma_t=sigma_t,
                           name=f"euclid_{d}_{c}")


def _can_top_static(d: int, c: int, x: Fraction) -> Fraction:
    x = (_frac(x) - c) % (2 * d)
    x = x if x <= d else 2 * d - x
    return x + c


# --- contraction and growth certificates ------------------------------------

def eigenbasis_condition(A, dps: int = 50):
    """Spectral condition number of the unit-column eigenbasis of a real-
    diagonalizable matrix; exactly 1 for diagonal matrices."""
    A = IntMatrix2.of(A)
    if A.a12 == 0 and A.a21 == 0:
        return mp.mpf(1)
    with mp.workdps(dps):
        t, D = A.trace, A.det
        disc = mp.mpf(t) ** 2 - 4 * D
        if disc <= 0:
            raise EuclideanError("matrix is not real-diagonalizable")
        r = mp.sqrt(disc)
        lams = [(t + r) / 2, (t - r) / 2]
        cols = []
        for lam in lams:
            v = (mp.mpf(A.a12), lam - A.a11)
            if mp.norm(v) == 0:
                v = (lam - A.a22, mp.mpf(A.a21))
            n = mp.sqrt(v[0] ** 2 + v[1] ** 2)
            cols.append((v[0] / n, v[1] / n))
        S = mp.matrix([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
        sv = mp.svd_r(S, compute_uv=False)
        return max(sv) / min(sv)


def contraction_constant(A, dps: int = 50, check_samples: int = 100,
                         seed: int = 0) -> float:
    """A constant K with |A^-n w| <= K lambda^-n |w| for all n >= 1.

    lambda is the small eigenvalue's absolute value; K is the eigenbasis
    condition number with a 1e-12 certification slack folded in, verified
    on sampled integer vectors for n <= 30.
    """
    A = IntMatrix2.of(A)
    cls = classify(A)
    if cls.kind != CONTRACTING:
        raise EuclideanError(f"matrix {A} is not contracting")
    with mp.workdps(dps):
        K = eigenbasis_condition(A, dps) * (1 + mp.mpf("1e-12"))
        lam = abs(cls.lambda_min(dps))
        import random
        rng = random.Random(seed)
        Ainv_num = mp.matrix([[A.a22, -A.a12], [-A.a21, A.a11]]) / A.det
        for _ in range(check_samples):
            w = mp.matrix([rng.randint(-50, 50), rng.randint(-50, 50)])
            if mp.norm(w) == 0:
                continue
            x = w.copy()
            for n in range(1, 31):
                x = Ainv_num * x
                if mp.norm(x) > K * lam ** (-n) * mp.norm(w) * (1 + mp.mpf("1e-30")):
                    raise EuclideanError("internal: sampled contraction "
                                         "inequality failed")
        return float(K)


@dataclass
class GrowthCertificate:
    """Per-iterate table of |A^-n x| against the geometric lower bound
    (|x| - 2 J K / (1/lambda - 1)) * lambda^-n for the pure linear model."""
    A: IntMatrix2
    lam: float
    K: float
    J: float
    x: tuple[Fraction, Fraction]
    rows: list[dict]
    ratio_limit: float

    def converged_by(self, tol: float = 1e-6) -> int | None:
        for row in self.rows:
            if row["ratio"] is not None and \
                    abs(row["ratio"] - self.ratio_limit) < tol:
                return row["n"]
        return None


def growth_certificate(A, J: float, n_max: int = 40,
                       dps: int = 50) -> GrowthCertificate:
    """Exact-iteration growth table along the contracting eigenline.

    x is a rational point close to the small-eigenvalue line, scaled so
    |x| > 2 J K / (1/lambda - 1); backward iterates are computed exactly
    and their norms certify the displacement lower bound.
    """
    A = IntMatrix2.of(A)
    cls = classify(A)
    if cls.kind != CONTRACTING:
        raise EuclideanError(f"matrix {A} is not contracting")
    if J <= 0:
        raise EuclideanError("J must be positive")
    # normalize the small eigenvalue to be positive (negating A changes
    # neither the induced map nor the norms below)
    M = A if cls.trace > 0 else A.neg()
    clsM = classify(M)
    K = contraction_constant(M, dps)
    with mp.workdps(dps):
        lam = abs(clsM.lambda_min(dps))
        # rational approximation of the contracting eigendirection
        vx = mp.mpf(M.a12)
        vy = lam - M.a11
        if abs(vx) + abs(vy) == 0:
            vx, vy = lam - M.a22, mp.mpf(M.a21)
        scale = max(abs(vx), abs(vy))
        fx = Fraction(int(mp.nint(vx / scale * 10 ** 12)), 10 ** 12)
        fy = Fraction(int(mp.nint(vy / scale * 10 ** 12)), 10 ** 12)
        floor = 2 * J * K / (1 / lam - 1)
        norm0 = mp.sqrt(mp.mpf(float(fx)) ** 2 + mp.mpf(float(fy)) ** 2)
        mult = int(mp.ceil((floor + 1) / norm0)) + 1
        x = (fx * mult, fy * mult)

        det = M.det
        inv = ((Fraction(M.a22, det), Fraction(-M.a12, det)),
               (Fraction(-M.a21, det), Fraction(M.a11, det)))

        def apply_inv(v):
            return (inv[0][0] * v[0] + inv[0][1] * v[1],
                    inv[1][0] * v[0] + inv[1][1] * v[1])

        def norm(v):
            return mp.sqrt(mp.mpf(v[0].numerator) ** 2 /
                           mp.mpf(v[0].denominator) ** 2 +
                           mp.mpf(v[1].numerator) ** 2 /
                           mp.mpf(v[1].denominator) ** 2)

        rows = []
        cur = x
        prev_norm = norm(x)
        base_norm = norm(x)
        for n in range(1, n_max + 1):
            cur = apply_inv(cur)
            actual = norm(cur)
            lower = (base_norm - floor) * lam ** (-n)
            ratio = actual / prev_norm if n >= 1 else None
            rows.append({"n": n, "actual": float(actual),
                         "lower": float(lower),
                         "ratio": float(ratio)})
            prev_norm = actual
        return GrowthCertificate(A=A, lam=float(lam), K=float(K), J=float(J),
                                 x=x, rows=rows,
                                 ratio_limit=float(1 / lam))
