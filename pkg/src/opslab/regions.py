"""Convex parameter regions in the unit square of reciprocal exponents.

Points are (1/p, 1/q) with exact rational coordinates.  Three regions
are tracked:

  S  the full open unit square (the column-space region, spanned by the
     diagonal family (1/p, 1/p) and the anti-diagonal family (1/p', 1/p));
  L  the interior of the hull of (0,0), (1,1), (1/2,0), (1/2,1), equally
     described as the hull of the diagonal family and the vertical
     segment at first coordinate 1/2;
  T  the Schatten region, of which only the subset generated by the
     diagonal and vertical families (that is, L) is proven; membership
     queries answer yes inside that generated hull and unknown
     elsewhere, since the full region is undetermined.

All membership tests are exact half-plane evaluations over Fractions;
no floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from opslab.errors import InvalidParameter

__all__ = [
    "ParamPoint",
    "ConvexRegion",
    "build_region",
    "contains",
    "membership",
    "hull_membership_certificate",
    "open_square_certificate",
]


def _frac(value) -> Fraction:
    if isinstance(value, float):
        raise InvalidParameter(f"float {value!r} rejected; regions are exact")
    return Fraction(value)


@dataclass(frozen=True)
class ParamPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", _frac(self.x))
        object.__setattr__(self, "y", _frac(self.y))
        if not (0 <= self.x <= 1 and 0 <= self.y <= 1):
            raise InvalidParameter(f"point ({self.x}, {self.y}) outside the unit square")

    @staticmethod
    def from_exponents(p, q) -> "ParamPoint":
        from opslab.calculus.exponents import Exponent

        return ParamPoint(
            Exponent.from_value(p).reciprocal, Exponent.from_value(q).reciprocal
        )

    def __str__(self):
        return f"({self.x}, {self.y})"


def _cross(o: ParamPoint, a: ParamPoint, b: ParamPoint) -> Fraction:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def _hull(points: list[ParamPoint]) -> list[ParamPoint]:
    """Monotone-chain convex hull; returns extreme points, CCW."""
    pts = sorted(set((pt.x, pt.y) for pt in points))
    pts = [ParamPoint(x, y) for x, y in pts]
    if len(pts) <= 2:
        return pts
    lower: list[ParamPoint] = []
    for pt in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: list[ParamPoint] = []
    for pt in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class ConvexRegion:
    """A convex polygon given by its extreme points (CCW); when
    interior_only is set, membership means strict interiority."""

    name: str
    vertices: tuple[ParamPoint, ...]
    interior_only: bool = True
    generators: dict = field(default_factory=dict, compare=False)

    @staticmethod
    def from_points(name, points, interior_only=True, generators=None):
        return ConvexRegion(
            name, tuple(_hull(list(points))), interior_only, generators or {}
        )


_SQUARE = [
    ParamPoint(0, 0),
    ParamPoint(1, 0),
    ParamPoint(1, 1),
    ParamPoint(0, 1),
]
_L_VERTICES = [
    ParamPoint(0, 0),
    ParamPoint(Fraction(1, 2), 0),
    ParamPoint(1, 1),
    ParamPoint(Fraction(1, 2), 1),
]

# Generating families, by name; each entry maps a rational t in (0, 1)
# to a family point.
_DIAGONAL = ("diagonal (1/p, 1/p)", lambda t: ParamPoint(t, t))
_ANTIDIAGONAL = ("anti-diagonal (1/p', 1/p)", lambda t: ParamPoint(1 - t, t))
_VERTICAL = ("vertical (1/2, 1/q)", lambda t: ParamPoint(Fraction(1, 2), t))


def build_region(name: str) -> ConvexRegion:
    """Construct one of the named regions S, T, or L."""
    if name == "S":
        return ConvexRegion.from_points(
            "S", _SQUARE, interior_only=True,
            generators=dict([_DIAGONAL, _ANTIDIAGONAL]),
        )
    if name == "L":
        return ConvexRegion.from_points(
            "L", _L_VERTICES, interior_only=True,
            generators=dict([_DIAGONAL, _VERTICAL]),
        )
    if name == "T":
        # Only the hull of the proven generating families is decidable;
        # that hull coincides with L.  Outside it the answer is unknown.
        return ConvexRegion.from_points(
            "T", _L_VERTICES, interior_only=True,
            generators=dict([_DIAGONAL, _VERTICAL]),
        )
    raise InvalidParameter(f"unknown region {name!r} (expected S, T, or L)")


def contains(region: ConvexRegion, point: ParamPoint) -> bool:
    """Exact convex-polygon membership via half-plane tests."""
    verts = region.vertices
    if len(verts) < 3:
        raise InvalidParameter(f"region {region.name} is degenerate")
    n = len(verts)
    for i in range(n):
        side = _cross(verts[i], verts[(i + 1) % n], point)
        if region.interior_only:
            if side <= 0:
                return False
        elif side < 0:
            return False
    return True


def membership(region: ConvexRegion, point: ParamPoint) -> str:
    """Three-valued verdict: 'yes', 'no', or 'unknown'.

    For S and L the polygon decides the region exactly.  For T only the
    generated hull is proven, so points outside it are 'unknown'.
    """
    inside = contains(region, point)
    if region.name == "T":
        return "yes" if inside else "unknown"
    return "yes" if inside else "no"


# --- convex certificates ------------------------------------------------------


def _solve_weights(point, gens):
    """Exact nonnegative convex weights over <= 3 generators, or None."""
    if len(gens) == 1:
        g = gens[0]
        if g.x == point.x and g.y == point.y:
            return [Fraction(1)]
        return None
    if len(gens) == 2:
        a, b = gens
        # lam * a + (1 - lam) * b = point, consistent in both coordinates
        dx, dy = a.x - b.x, a.y - b.y
        if dx == 0 and dy == 0:
            return _solve_weights(point, [a]) and [Fraction(1), Fraction(0)]
        if dx != 0:
            lam = (point.x - b.x) / dx
            if a.y * lam + b.y * (1 - lam) != point.y:
                return None
        else:
            lam = (point.y - b.y) / dy
            if a.x * lam + b.x * (1 - lam) != point.x:
                return None
        if 0 <= lam <= 1:
            return [lam, 1 - lam]
        return None
    if len(gens) == 3:
        a, b, c = gens
        det = _cross(c, a, b)
        if det == 0:
            return None
        w1 = _cross(c, point, b) / det
        w2 = _cross(c, a, point) / det
        w3 = 1 - w1 - w2
        if w1 >= 0 and w2 >= 0 and w3 >= 0:
            return [w1, w2, w3]
        return None
    raise InvalidParameter("certificates use at most 3 generators at a time")


def hull_membership_certificate(point: ParamPoint, generators):
    """Express the point as an exact convex combination of generators.

    Searches single generators, then pairs, then triples (enough in the
    plane); returns a list of (generator, weight) with positive rational
    weights summing to one, or None when the point is outside the hull.
    """
    generators = list(generators)
    if not generators:
        raise InvalidParameter("no generators given")
    from itertools import combinations

    for size in (1, 2, 3):
        for combo in combinations(generators, size):
            weights = _solve_weights(point, list(combo))
            if weights is not None:
                return [(g, w) for g, w in zip(combo, weights) if w > 0]
    return None


def open_square_certificate(point: ParamPoint):
    """Certificate that the open unit square is spanned by the diagonal
    and anti-diagonal families.

    For an interior point (x, y) the combination

        lam * (t, t) + (1 - lam) * (1 - s, s) = (x, y)

    with lam = (1-x)(1-y) + xy, t = xy / lam, s = y(1-x) / (1 - lam)
    always has t, s in (0, 1), so one diagonal and one anti-diagonal
    family member suffice.  Returns exact (generator, weight) pairs, or
    None outside the open square.
    """
    x, y = point.x, point.y
    if not (0 < x < 1 and 0 < y < 1):
        return None
    diag, anti = _DIAGONAL[1], _ANTIDIAGONAL[1]
    if x == y:
        return [(diag(x), Fraction(1))]
    if x + y == 1:
        return [(anti(y), Fraction(1))]
    lam = (1 - x) * (1 - y) + x * y
    t = x * y / lam
    s = y * (1 - x) / (1 - lam)
    cert = [(diag(t), lam), (anti(s), 1 - lam)]
    assert 0 < t < 1 and 0 < s < 1
    assert all(0 < w < 1 for _, w in cert)
    assert sum((w * g.x for g, w in cert), Fraction(0)) == x
    assert sum((w * g.y for g, w in cert), Fraction(0)) == y
    return cert
