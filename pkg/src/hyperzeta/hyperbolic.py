"""Upper half-plane hyperbolic geometry.

Model: H = {x + iy : y > 0} with metric ds^2 = y^-2 (dx^2 + dy^2).
Isometries act as Mobius transformations z -> (az+b)/(cz+d) with real
unit-determinant matrices, identified with their negatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHyperbolic, NonPositiveLength, SharedEndpoint

DET_TOL = 1e-12
CLASSIFY_TOL = 1e-10


@dataclass(frozen=True)
class MobiusMap:
    """Real 2x2 matrix with det = 1, acting on the upper half-plane.

    Entries are normalized on construction: det is rescaled to 1 (raises
    if |det| deviates from 1 by more than sqrt-tolerance after scaling is
    impossible, i.e. det <= 0) and the overall sign is canonicalized so
    that trace >= 0.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det <= 0:
            raise ValueError(f"matrix must have positive determinant, got {det}")
        s = 1.0 / math.sqrt(det)
        a, b, c, d = self.a * s, self.b * s, self.c * s, self.d * s
        if a + d < 0:
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        det = a * d - b * c
        if abs(det - 1.0) > DET_TOL:
            raise ValueError(f"could not normalize determinant, residual {det - 1.0}")

    @property
    def trace(self):
        return self.a + self.d

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @staticmethod
    def from_matrix(m) -> "MobiusMap":
        m = np.asarray(m, dtype=float)
        return MobiusMap(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix() @ other.matrix())

    def inv(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def conjugate_by(self, g: "MobiusMap") -> "MobiusMap":
        return g @ self @ g.inv()

    def apply_boundary(self, x):
        """Action on the boundary R U {inf}."""
        if math.isinf(x):
            return self.a / self.c if self.c != 0 else math.inf
        den = self.c * x + self.d
        if den == 0:
            return math.inf
        return (self.a * x + self.b) / den

    def apply(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def fixed_points(self):
        """Boundary fixed points (repelling, attracting) of a hyperbolic map."""
        if classify(self) != "Hyperbolic":
            raise NotHyperbolic("fixed points on the boundary require a hyperbolic map")
        if self.c == 0:
            # z -> (a/d) z + b/d fixes inf; other fixed point solves (a/d-1)x = -b/d
            other = self.b / (self.d - self.a)
            return (other, math.inf) if abs(self.a) > abs(self.d) else (math.inf, other)
        disc = math.sqrt(self.trace ** 2 - 4.0)
        p1 = (self.a - self.d + disc) / (2 * self.c)
        p2 = (self.a - self.d - disc) / (2 * self.c)
        # attracting point has |derivative| < 1: |cz+d|^2 > 1
        if (self.c * p1 + self.d) ** 2 > 1.0:
            return (p2, p1)
        return (p1, p2)


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"point must satisfy y > 0, got y = {self.y}")


@dataclass(frozen=True)
class Vertical:
    """Geodesic {x = x0}, ideal endpoints x0 and inf."""

    x0: float


@dataclass(frozen=True)
class Semicircle:
    """Geodesic semicircle with real ideal endpoints p < q."""

    p: float
    q: float

    def __post_init__(self):
        if not self.p < self.q:
            raise ValueError("semicircle endpoints must satisfy p < q")

    @property
    def center(self):
        return 0.5 * (self.p + self.q)

    @property
    def radius(self):
        return 0.5 * (self.q - self.p)


def classify(m: MobiusMap) -> str:
    """Identity / Elliptic / Parabolic / Hyperbolic by |trace| vs 2.

    Tolerance 1e-10 on |tr| - 2; exact parabolicity must be built in
    exactly by the caller.
    """
    tr = abs(m.trace)
    if tr > 2.0 + CLASSIFY_TOL:
        return "Hyperbolic"
    if tr < 2.0 - CLASSIFY_TOL:
        return "Elliptic"
    if abs(m.b) < CLASSIFY_TOL and abs(m.c) < CLASSIFY_TOL and abs(abs(m.a) - 1) < CLASSIFY_TOL:
        return "Identity"
    return "Parabolic"


def translation_length(m: MobiusMap) -> float:
    """Geodesic translation length, from |tr| = 2 cosh(l/2)."""
    if classify(m) != "Hyperbolic":
        raise NotHyperbolic(f"classify(m) = {classify(m)}, need Hyperbolic")
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


def sigma(z: HalfPlanePoint, w: HalfPlanePoint) -> float:
    """Point-pair kernel sigma(z,w) = cosh^2(d(z,w)/2)
    = ((x-x')^2 + (y+y')^2) / (4 y y')."""
    return ((z.x - w.x) ** 2 + (z.y + w.y) ** 2) / (4.0 * z.y * w.y)


def collar_bound(ell: float) -> float:
    """Lower bound log(coth(l/4)) on the distance from a simple closed
    geodesic of length l to any disjoint simple closed geodesic."""
    if not ell > 0:
        raise NonPositiveLength(f"need l > 0, got {ell}")
    return -math.log(math.tanh(ell / 4.0))


def _endpoints(g):
    if isinstance(g, Vertical):
        return (g.x0, math.inf)
    return (g.p, g.q)


def _dist_vertical_semicircle(x0, p, q):
    # translate so the vertical is x = 0
    u, v = p - x0, q - x0
    if u < 0 < v:
        return 0.0
    if u == 0 or v == 0:
        raise SharedEndpoint("geodesics share the ideal endpoint x0")
    u, v = abs(u), abs(v)
    if u > v:
        u, v = v, u
    # distance depends only on v/u; with b = sqrt(v/u),
    # cos(theta) = 2/(b + 1/b) and d = -log tan(theta/2)
    b = math.sqrt(v / u)
    cos_t = 2.0 / (b + 1.0 / b)
    tan_half = math.sqrt((1.0 - cos_t) / (1.0 + cos_t))
    return -math.log(tan_half)


def geodesic_distance(g1, g2) -> float:
    """Infimum of hyperbolic distance between two complete geodesics.

    Returns 0 when they intersect; raises SharedEndpoint when they share
    an ideal endpoint (asymptotic, infimum 0 but not attained).
    """
    e1, e2 = _endpoints(g1), _endpoints(g2)
    if isinstance(g1, Vertical) and isinstance(g2, Vertical):
        if g1.x0 == g2.x0:
            return 0.0
        raise SharedEndpoint("distinct vertical geodesics share the endpoint at infinity")
    shared = set(e1) & set(e2)
    if shared:
        if e1 == e2:
            return 0.0
        raise SharedEndpoint(f"geodesics share ideal endpoint(s) {sorted(shared)}")
    if isinstance(g1, Vertical):
        return _dist_vertical_semicircle(g1.x0, g2.p, g2.q)
    if isinstance(g2, Vertical):
        return _dist_vertical_semicircle(g2.x0, g1.p, g1.q)
    # two semicircles: inversive distance
    c1, r1 = g1.center, g1.radius
    c2, r2 = g2.center, g2.radius
    delta = ((c1 - c2) ** 2 - r1 ** 2 - r2 ** 2) / (2.0 * r1 * r2)
    if abs(delta) <= 1.0:
        return 0.0
    return math.acosh(abs(delta))
