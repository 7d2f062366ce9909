"""The canonical matrix filtration on finite matrices.

Conditional expectation onto the top-left n x n corner, hook-shaped
martingale differences supported on {(i, j): max(i, j) = n}, sign Schur
multipliers, triangular projections, and the exact sign-averaging
identity that recovers the lower-triangular projection.

Indices are 1-based in the mathematical sense: level n of the
filtration keeps entries with max(i, j) <= n.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from opslab.errors import InvalidParameter

__all__ = [
    "cond_expect",
    "hook_difference",
    "hook_decomposition",
    "schur_sign_transform",
    "sign_pattern",
    "triangular_proj",
    "sign_average_check",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 12


def _square(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidParameter("expected a square matrix")
    return x


def _hook_index(n: int) -> np.ndarray:
    # hook_index[i, j] = max(i, j) + 1, the 1-based hook level
    idx = np.arange(n)
    return np.maximum.outer(idx, idx) + 1


def cond_expect(x, n: int) -> np.ndarray:
    """Keep the top-left n x n corner, zero the rest."""
    x = _square(x)
    size = x.shape[0]
    if not 0 <= n <= size:
        raise InvalidParameter(f"level {n} outside [0, {size}]")
    out = np.zeros_like(x)
    out[:n, :n] = x[:n, :n]
    return out


def hook_difference(x, n: int) -> np.ndarray:
    """The n-th martingale difference: entries with max(i, j) = n."""
    x = _square(x)
    if not 1 <= n <= x.shape[0]:
        raise InvalidParameter(f"level {n} outside [1, {x.shape[0]}]")
    return cond_expect(x, n) - cond_expect(x, n - 1)


def hook_decomposition(x) -> list[np.ndarray]:
    """All hooks d_1, ..., d_N; they have disjoint supports and sum to x."""
    x = _square(x)
    return [hook_difference(x, n) for n in range(1, x.shape[0] + 1)]


def sign_pattern(eps) -> np.ndarray:
    """Coerce sign sequences given as iterables of {-1, +1} or strings
    over {+, -}."""
    if isinstance(eps, str):
        table = {"+": 1, "-": -1}
        try:
            eps = [table[ch] for ch in eps]
        except KeyError as exc:
            raise InvalidParameter(f"bad sign character in {eps!r}") from exc
    arr = np.asarray(eps, dtype=int)
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.abs(arr) == 1):
        raise InvalidParameter("sign pattern must be a nonempty +-1 sequence")
    return arr


def schur_sign_transform(x, eps) -> np.ndarray:
    """Entrywise multiplication by eps_{max(i, j)}; equals the signed
    sum of the hook differences."""
    x = _square(x)
    eps = sign_pattern(eps)
    n = x.shape[0]
    if eps.size < n:
        raise InvalidParameter(f"pattern length {eps.size} below size {n}")
    mask = eps[_hook_index(n) - 1]
    return x * mask


def triangular_proj(x, variant: str = "upper") -> np.ndarray:
    """Entrywise triangular mask: keep j >= i (upper) or j <= i (lower)."""
    x = _square(x)
    n = x.shape[0]
    if variant == "upper":
        mask = np.triu(np.ones((n, n)))
    elif variant == "lower":
        mask = np.tril(np.ones((n, n)))
    else:
        raise InvalidParameter(f"variant must be 'upper' or 'lower', got {variant!r}")
    return x * mask


def sign_average_check(x, rng=None, cap: int = ENUMERATION_CAP, samples: int = 4096):
    """Average D_eps T_eps(x) over sign patterns and compare with the
    lower-triangular part entrywise.

    Up to the enumeration cap all 2^N patterns are averaged exactly and
    the maximum absolute deviation is returned with exact=True; beyond
    the cap a uniform sample is used and the result is flagged
    approximate.
    """
    x = _square(x)
    n = x.shape[0]
    lower = triangular_proj(x, "lower")
    total = np.zeros_like(x)
    if n <= cap:
        count = 0
        for signs in product((1, -1), repeat=n):
            eps = np.asarray(signs)
            d_eps = eps[:, None]
            total += d_eps * schur_sign_transform(x, eps)
            count += 1
        average = total / count
        return float(np.max(np.abs(average - lower))), True
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(samples):
        eps = rng.choice((-1, 1), size=n)
        total += eps[:, None] * schur_sign_transform(x, eps)
    average = total / samples
    return float(np.max(np.abs(average - lower))), False
