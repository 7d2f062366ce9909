"""Norm estimates with optimizer provenance, plus seeded matrix sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from opslab.errors import InvalidParameter

__all__ = ["NormEstimate", "rng_for", "random_complex_matrix"]


@dataclass(frozen=True)
class NormEstimate:
    """A nonnegative value tagged by how it bounds the true quantity.

    kind 'exact' values come from closed-form computations; 'upper'
    values are achieved by a feasible witness of a minimization;
    'lower' values are achieved by a feasible witness of a
    maximization.  Optimizer metadata makes reruns reproducible.
    """

    value: float
    kind: str  # exact | upper | lower
    seed: int | None = None
    restarts: int = 0
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in ("exact", "upper", "lower"):
            raise InvalidParameter(f"unknown estimate kind {self.kind!r}")
        if not np.isfinite(self.value) or self.value < 0:
            raise InvalidParameter(f"estimate value {self.value!r} must be >= 0")


def rng_for(seed, *key) -> np.random.Generator:
    """Deterministic child generator for (seed, key...), independent of
    evaluation order so concurrent fan-out stays reproducible."""
    if seed is None:
        seed = 0
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def random_complex_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex Gaussian entries (unit expected square modulus)."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
