"""Two-sided bracket for the complex-interpolation norm between the
operator-norm and trace-class endpoints.

For the couple at parameter theta the interpolation norm of X is
bounded above by the boundary norms of the canonical analytic family

    f(z) = U diag(sigma^{p z}) Vh * N^{p (theta - z)},   p = 1/theta,

built from the singular decomposition X = U diag(sigma) Vh with
N = ||X||_{S_p}: f(theta) = X, the family is analytic on the strip,
and its operator norm on the left boundary line and trace norm on the
right one are both constant and equal to N.  The lower bound comes from
the trace pairing against the Hoelder-optimal dual witness.  Both
brackets therefore pinch the Schatten norm of index 1/theta, which is
the identity under test.
"""

from __future__ import annotations

import numpy as np

from opslab.errors import InvalidParameter
from opslab.numlab.estimates import NormEstimate
from opslab.numlab.schatten import dual_pairing_lower, schatten_norm_value

__all__ = ["calderon_upper", "interp_upper_lower"]

_BOUNDARY_GRID = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


def calderon_upper(x: np.ndarray, theta: float, grid=_BOUNDARY_GRID) -> NormEstimate:
    """Upper bound from the canonical analytic family: the larger of the
    two boundary-line norms, each evaluated on a grid of heights (they
    are constant in the height by construction, which is asserted)."""
    if not 0.0 < theta < 1.0:
        raise InvalidParameter(f"theta {theta} outside (0, 1)")
    x = np.asarray(x, dtype=complex)
    p = 1.0 / theta
    u, sigma, vh = np.linalg.svd(x)
    k = sigma.size
    u, vh = u[:, :k], vh[:k, :]
    norm = schatten_norm_value(x, p)
    if norm == 0.0:
        return NormEstimate(0.0, "upper")

    log_n = np.log(norm)

    def family(z: complex) -> np.ndarray:
        powers = np.zeros_like(sigma, dtype=complex)
        positive = sigma > 0
        powers[positive] = np.exp(p * z * np.log(sigma[positive]))
        return (u * powers) @ vh * np.exp(p * (theta - z) * log_n)

    left = [schatten_norm_value(family(1j * t), np.inf) for t in grid]
    right = [schatten_norm_value(family(1.0 + 1j * t), 1.0) for t in grid]
    for values in (left, right):
        spread = (max(values) - min(values)) / max(values)
        if spread > 1e-10:
            raise InvalidParameter(
                f"analytic family boundary norms not constant (spread {spread:.2e})"
            )
    return NormEstimate(float(max(max(left), max(right))), "upper")


def interp_upper_lower(x: np.ndarray, theta: float) -> tuple[NormEstimate, NormEstimate]:
    """Bracket of the interpolation norm at parameter theta: the
    analytic-family upper bound and the dual-pairing lower bound.  Both
    pinch the Schatten norm of index 1/theta."""
    upper = calderon_upper(x, theta)
    lower = dual_pairing_lower(x, 1.0 / theta)
    return upper, lower
