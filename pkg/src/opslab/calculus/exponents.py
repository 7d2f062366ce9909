"""Exact extended Lebesgue exponents.

An exponent p ranges over [1, inf] and is stored through its reciprocal
1/p, an exact rational in [0, 1]; 0 encodes p = inf and 1 encodes p = 1.
All interpolation arithmetic happens on reciprocals, so every identity
in the calculus is checked in exact rational arithmetic.  Floats are
rejected: the symbolic layer is rational-affine throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from opslab.errors import InvalidParameter

__all__ = [
    "Exponent",
    "INF",
    "ONE",
    "TWO",
    "as_theta",
    "interp_exponent",
]


def _to_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise InvalidParameter(
            f"float {value!r} rejected: the symbolic layer is exact; pass a rational"
        )
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"not a rational: {value!r}") from exc


@dataclass(frozen=True)
class Exponent:
    """An index p in [1, inf], stored as the exact rational 1/p."""

    reciprocal: Fraction

    def __post_init__(self):
        recip = _to_fraction(self.reciprocal)
        if not 0 <= recip <= 1:
            raise InvalidParameter(f"reciprocal {recip} outside [0, 1]")
        object.__setattr__(self, "reciprocal", recip)

    @staticmethod
    def from_value(value) -> "Exponent":
        """Build from p itself; accepts rationals, 'inf', or 'a/b' text."""
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "oo"):
                return INF
            value = Fraction(text)
        p = _to_fraction(value)
        if p < 1:
            raise InvalidParameter(f"exponent {p} < 1")
        return Exponent(Fraction(1) / p)

    @property
    def is_infinite(self) -> bool:
        return self.reciprocal == 0

    @property
    def value(self) -> Fraction | None:
        """p as an exact rational, or None when p = inf."""
        if self.is_infinite:
            return None
        return 1 / self.reciprocal

    def as_float(self) -> float:
        return math.inf if self.is_infinite else float(self.value)

    def conjugate(self) -> "Exponent":
        """The index p' with 1/p + 1/p' = 1."""
        return Exponent(1 - self.reciprocal)

    def is_finite_interior(self) -> bool:
        """True when 1 < p < inf."""
        return 0 < self.reciprocal < 1

    def __str__(self) -> str:
        return "inf" if self.is_infinite else str(self.value)

    def __repr__(self) -> str:
        return f"Exponent({self})"


INF = Exponent(Fraction(0))
ONE = Exponent(Fraction(1))
TWO = Exponent(Fraction(1, 2))


def as_theta(value) -> Fraction:
    """Validate an interpolation parameter: an exact rational in (0, 1)."""
    theta = _to_fraction(value)
    if not 0 < theta < 1:
        raise InvalidParameter(f"interpolation parameter {theta} outside (0, 1)")
    return theta


def interp_exponent(p0: Exponent, p1: Exponent, theta) -> Exponent:
    """Interpolated index p_theta with 1/p_theta = (1-theta)/p0 + theta/p1."""
    theta = as_theta(theta)
    p0 = Exponent.from_value(p0)
    p1 = Exponent.from_value(p1)
    return Exponent((1 - theta) * p0.reciprocal + theta * p1.reciprocal)
