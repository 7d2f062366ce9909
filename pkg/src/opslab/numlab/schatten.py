"""Schatten norms, Hoelder-optimal dual witnesses, and the exact
factorization oracle used to certify optimizer output.

Exponents may be given as floats, Fractions, or calculus Exponents;
they are coerced to floats here since this module is numerical.
"""

from __future__ import annotations

import math

import numpy as np

from opslab.errors import InvalidParameter
from opslab.numlab.estimates import NormEstimate

__all__ = [
    "as_index",
    "schatten_norm",
    "schatten_norm_value",
    "holder_dual_witness",
    "dual_pairing_lower",
    "schatten_factor_oracle",
]


def as_index(p) -> float:
    """Coerce an exponent-like argument to a float in [1, inf]."""
    from opslab.calculus.exponents import Exponent

    if isinstance(p, Exponent):
        value = p.as_float()
    elif isinstance(p, str):
        value = Exponent.from_value(p).as_float()
    else:
        value = float(p)
    if not (value >= 1):
        raise InvalidParameter(f"Schatten index {p!r} outside [1, inf]")
    return value


def _singular_values(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2:
        raise InvalidParameter("expected a matrix")
    if not np.all(np.isfinite(x)):
        raise InvalidParameter("matrix entries must be finite")
    return np.linalg.svd(x, compute_uv=False)


def schatten_norm_value(x: np.ndarray, p) -> float:
    """(sum sigma_k^p)^(1/p); the largest singular value at p = inf."""
    p = as_index(p)
    sigma = _singular_values(x)
    if sigma.size == 0:
        return 0.0
    if math.isinf(p):
        return float(sigma[0])
    if p == 1:
        return float(np.sum(sigma))
    # normalized evaluation avoids overflow for large p
    top = float(sigma[0])
    if top == 0.0:
        return 0.0
    return top * float(np.sum((sigma / top) ** p)) ** (1.0 / p)


def schatten_norm(x: np.ndarray, p) -> NormEstimate:
    """Exact Schatten norm from the singular values."""
    return NormEstimate(schatten_norm_value(x, p), "exact")


def holder_dual_witness(x: np.ndarray, p) -> np.ndarray:
    """The Hoelder-optimal Y with ||Y||_{p'} = 1 and tr(Y* X) = ||X||_p.

    At p = 1 the witness is the unitary factor; at p = inf it is the top
    singular pair.
    """
    p = as_index(p)
    u, sigma, vh = np.linalg.svd(np.asarray(x, dtype=complex))
    if sigma.size == 0 or sigma[0] == 0:
        return np.zeros_like(np.asarray(x, dtype=complex))
    if math.isinf(p):
        return np.outer(u[:, 0], vh[0, :])
    if p == 1:
        k = int(np.sum(sigma > sigma[0] * 1e-15))
        return u[:, :k] @ vh[:k, :]
    norm = schatten_norm_value(x, p)
    weights = (sigma / norm) ** (p - 1.0)
    k = sigma.size
    return (u[:, :k] * weights) @ vh[:k, :]


def dual_pairing_lower(x: np.ndarray, p) -> NormEstimate:
    """Lower bound on ||X||_p through the trace pairing with the
    Hoelder-optimal witness; an independent arithmetic path from the
    singular-value formula."""
    y = holder_dual_witness(x, p)
    value = float(abs(np.trace(y.conj().T @ np.asarray(x, dtype=complex))))
    return NormEstimate(value, "lower")


def schatten_factor_oracle(x: np.ndarray, a, b):
    """Exact factorization X = V W with ||V||_a ||W||_b = ||X||_c,
    1/c = 1/a + 1/b.

    From the singular decomposition X = U diag(sigma) Vh, split the
    singular values with exponents c/a and c/b.  Requires c >= 1, i.e.
    1/a + 1/b <= 1.  Returns (NormEstimate(exact), V, W).
    """
    a = as_index(a)
    b = as_index(b)
    inv_c = (0.0 if math.isinf(a) else 1.0 / a) + (0.0 if math.isinf(b) else 1.0 / b)
    if inv_c > 1.0 + 1e-15:
        raise InvalidParameter(f"1/a + 1/b = {inv_c} > 1: target index below 1")
    x = np.asarray(x, dtype=complex)
    u, sigma, vh = np.linalg.svd(x)
    k = sigma.size
    c = math.inf if inv_c == 0.0 else 1.0 / inv_c
    value = schatten_norm_value(x, c)

    # sigma^t with 0^t := 0 (t > 0) and sigma^0 := 1
    def power(t):
        if t == 0.0:
            return np.ones_like(sigma)
        return sigma**t

    exp_a = 0.0 if math.isinf(a) else (1.0 if math.isinf(c) else c / a)
    exp_b = 0.0 if math.isinf(b) else (1.0 if math.isinf(c) else c / b)
    if math.isinf(c):
        # both a and b infinite: split the operator norm evenly
        exp_a = exp_b = 0.5
    v = u[:, :k] * power(exp_a)
    w = (power(exp_b)[:, None]) * vh[:k, :]
    return NormEstimate(value, "exact"), v, w
