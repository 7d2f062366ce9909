"""Matrix-coefficient trigonometric polynomials on the circle.

A polynomial is a finite map frequency -> square matrix.  The circle
norm used by the Riesz-projection experiments is the mixed norm

    ||f|| = (mean_m ||f(z_m)||_{S_p}^p)^(1/p)

evaluated by the trapezoid rule on 8(D+1) equispaced roots of unity,
where D is the largest absolute frequency; the integrand is smooth, so
the rule converges superalgebraically, and at p = 2 it is exact for
the windows used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from opslab.errors import InvalidParameter
from opslab.numlab.schatten import as_index, schatten_norm_value

__all__ = ["TrigPolynomial", "riesz_projection", "quadrature_nodes"]


@dataclass(frozen=True)
class TrigPolynomial:
    """Finitely supported coefficients n -> (size x size) matrix."""

    coeffs: dict

    def __post_init__(self):
        clean = {}
        size = None
        for freq, mat in self.coeffs.items():
            mat = np.asarray(mat, dtype=complex)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise InvalidParameter("coefficients must be square matrices")
            if size is None:
                size = mat.shape[0]
            elif mat.shape[0] != size:
                raise InvalidParameter("coefficient sizes differ")
            if np.any(mat != 0):
                clean[int(freq)] = mat
        object.__setattr__(self, "coeffs", clean)

    @property
    def size(self) -> int:
        if not self.coeffs:
            return 0
        return next(iter(self.coeffs.values())).shape[0]

    @property
    def degree(self) -> int:
        """Largest absolute frequency (0 for the zero polynomial)."""
        if not self.coeffs:
            return 0
        return max(abs(n) for n in self.coeffs)

    def frequencies(self):
        return sorted(self.coeffs)

    def evaluate(self, z: complex) -> np.ndarray:
        if not self.coeffs:
            return np.zeros((0, 0), dtype=complex)
        total = np.zeros((self.size, self.size), dtype=complex)
        for freq, mat in self.coeffs.items():
            total += mat * (z**freq)
        return total

    def circle_norm(self, p) -> float:
        """L_p(circle; S_p) norm by root-of-unity quadrature."""
        p = as_index(p)
        if not self.coeffs:
            return 0.0
        nodes = quadrature_nodes(self.degree)
        values = [schatten_norm_value(self.evaluate(z), p) for z in nodes]
        if np.isinf(p):
            return float(max(values))
        return float(np.mean(np.asarray(values) ** p) ** (1.0 / p))

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        coeffs = dict(self.coeffs)
        for freq, mat in other.coeffs.items():
            coeffs[freq] = coeffs.get(freq, 0) + mat
        return TrigPolynomial(coeffs)

    def scale(self, factor: complex) -> "TrigPolynomial":
        return TrigPolynomial({n: factor * m for n, m in self.coeffs.items()})


def quadrature_nodes(degree: int) -> np.ndarray:
    """8(D+1) equispaced roots of unity for a degree-D window."""
    count = 8 * (degree + 1)
    angles = 2.0 * np.pi * np.arange(count) / count
    return np.exp(1j * angles)


def riesz_projection(f: TrigPolynomial) -> TrigPolynomial:
    """Delete the negative-frequency coefficients; idempotent."""
    return TrigPolynomial({n: m for n, m in f.coeffs.items() if n >= 0})
