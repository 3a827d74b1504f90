"""Curve pullback on the four-half-turn orbifold, exactly, via slopes.

Essential simple closed curves on the quotient orbifold of an integer
matrix A correspond to primitive integer vectors up to sign (slopes on the
covering torus).  The preimage of a slope-w curve family under x -> Ax is
carried by adj(A) w: its primitive part is the pulled-back slope, its
content g the number of components, and each component maps with degree
|det A| / g.  Everything here is exact integer arithmetic; the module's
oracle-facing helpers live in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, atan2, pi

from .euclidean import IntMatrix2, EuclideanError, classify, CONTRACTING

import mpmath as mp


Vec = tuple[int, int]


def normalize_slope(v: Vec) -> Vec:
    """Primitive representative with positive first nonzero coordinate."""
    p, q = int(v[0]), int(v[1])
    if p == 0 and q == 0:
        raise EuclideanError("zero vector is not a slope")
    g = gcd(abs(p), abs(q))
    p, q = p // g, q // g
    if p < 0 or (p == 0 and q < 0):
        p, q = -p, -q
    return (p, q)


@dataclass(frozen=True)
class SlopeClass:
    p: int
    q: int

    @classmethod
    def of(cls, v) -> "SlopeClass":
        if isinstance(v, SlopeClass):
            return v
        p, q = normalize_slope(tuple(v))
        return cls(p, q)

    def vec(self) -> Vec:
        return (self.p, self.q)

    def __str__(self):
        return f"({self.p},{self.q})"


@dataclass(frozen=True)
class PullbackStep:
    source: SlopeClass
    target: SlopeClass
    components: int         # g
    degree: int             # m, per component

    def check(self, A: IntMatrix2) -> bool:
        D = A.det
        g, m = self.components, self.degree
        if g * m != abs(D):
            return False
        w, u = self.source.vec(), self.target.vec()
        adj_w = A.adjugate().apply(w)
        au = A.apply(u)
        ok_adj = adj_w in ((g * u[0], g * u[1]), (-g * u[0], -g * u[1]))
        k = D // g if D % g == 0 else None
        ok_au = k is not None and au in ((k * w[0], k * w[1]),
                                         (-k * w[0], -k * w[1]))
        return ok_adj and ok_au


def pullback_slope(A, w) -> PullbackStep:
    """One pullback step: target slope, component count, component degree."""
    A = IntMatrix2.of(A)
    if abs(A.det) < 2:
        raise EuclideanError("|det A| must be at least 2")
    w = SlopeClass.of(w)
    x, y = A.adjugate().apply(w.vec())
    g = gcd(abs(x), abs(y))
    if g == 0:
        raise EuclideanError(f"adj(A) kills the slope {w}")
    u = SlopeClass.of((x // g, y // g))
    m = abs(A.det) // g
    step = PullbackStep(source=w, target=u, components=g, degree=m)
    if g * m != abs(A.det) or not step.check(A):
        raise EuclideanError("internal: pullback identities failed")
    return step


@dataclass
class OrbitReport:
    steps: list[PullbackStep]
    slopes: list[SlopeClass]                 # length len(steps) + 1
    cycle: tuple[int, int] | None            # (preperiod, period) or None
    max_steps: int
    angles: list[float] = field(default_factory=list)

    @property
    def univalent_prefix(self) -> float:
        """Length of the initial run of degree-1 steps; inf when every step
        of a periodic orbit is univalent."""
        k = 0
        for s in self.steps:
            if s.degree != 1:
                return k
            k += 1
        if self.cycle is not None and all(s.degree == 1 for s in self.steps):
            return float("inf")
        return k

    def norm_growth(self) -> tuple[float, float] | None:
        norms = [max(abs(s.p), abs(s.q)) for s in self.slopes]
        ratios = [b / a for a, b in zip(norms, norms[1:]) if a]
        if not ratios:
            return None
        return (min(ratios), max(ratios))


def _eigen_angle(A: IntMatrix2, v: Vec) -> float | None:
    """Angle between a slope and the contracting eigendirection, if any."""
    cls = classify(A)
    if cls.kind != CONTRACTING:
        return None
    with mp.workdps(30):
        lam = cls.lambda_min(30)
        ex, ey = mp.mpf(A.a12), lam - A.a11
        if abs(ex) + abs(ey) == 0:
            ex, ey = lam - A.a22, mp.mpf(A.a21)
        a = atan2(float(ey), float(ex)) % pi
        b = atan2(v[1], v[0]) % pi
        d = abs(a - b)
        return min(d, pi - d)


def pullback_orbit(A, w0, n_steps: int) -> OrbitReport:
    """Iterate the pullback up to n_steps, stopping at the first repeat."""
    A = IntMatrix2.of(A)
    w = SlopeClass.of(w0)
    slopes = [w]
    steps: list[PullbackStep] = []
    seen = {w: 0}
    cycle = None
    angles = []
    ang = _eigen_angle(A, w.vec())
    if ang is not None:
        angles.append(ang)
    for _ in range(n_steps):
        step = pullback_slope(A, slopes[-1])
        steps.append(step)
        u = step.target
        if ang is not None:
            angles.append(_eigen_angle(A, u.vec()))
        if u in seen:
            cycle = (seen[u], len(slopes) - seen[u])
            slopes.append(u)
            break
        seen[u] = len(slopes)
        slopes.append(u)
    return OrbitReport(steps=steps, slopes=slopes, cycle=cycle,
                       max_steps=n_steps, angles=angles)


@dataclass
class WanderingVerdict:
    ok: bool
    reason: str                  # "yes-within-N" | "cycle" | "non-univalent"
    at_step: int | None = None

    def __str__(self):
        if self.ok:
            return self.reason
        return f"no: {self.reason} at step {self.at_step}"


def is_wandering_univalent_within(A, w0, n_steps: int) -> WanderingVerdict:
    """Whether the orbit stays univalent with pairwise distinct slopes for
    n_steps pullbacks.  A positive answer is evidence, never proof: the
    report covers finitely many steps of an infinite property."""
    A = IntMatrix2.of(A)
    w = SlopeClass.of(w0)
    seen = {w}
    cur = w
    for k in range(n_steps):
        step = pullback_slope(A, cur)
        if step.degree != 1:
            return WanderingVerdict(False, "non-univalent", k)
        cur = step.target
        if cur in seen:
            return WanderingVerdict(False, "cycle", k + 1)
        seen.add(cur)
    return WanderingVerdict(True, f"yes-within-{n_steps}")
