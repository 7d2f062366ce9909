"""Finite-dimensional numerical kernel: Schatten norms with exact
oracles, Haagerup factorization optimizers, and interpolation brackets."""

from opslab.numlab.estimates import NormEstimate, random_complex_matrix, rng_for
from opslab.numlab.factorize import (
    DESK_SIZE_CAP,
    FactorNormSpec,
    haagerup_pair_norm,
    pair_indices,
    vector_schatten_norm,
    verify_pair_identity,
)
from opslab.numlab.interpolation import calderon_upper, interp_upper_lower
from opslab.numlab.schatten import (
    as_index,
    dual_pairing_lower,
    holder_dual_witness,
    schatten_factor_oracle,
    schatten_norm,
    schatten_norm_value,
)

__all__ = [
    "NormEstimate",
    "random_complex_matrix",
    "rng_for",
    "DESK_SIZE_CAP",
    "FactorNormSpec",
    "haagerup_pair_norm",
    "pair_indices",
    "vector_schatten_norm",
    "verify_pair_identity",
    "calderon_upper",
    "interp_upper_lower",
    "as_index",
    "dual_pairing_lower",
    "holder_dual_witness",
    "schatten_factor_oracle",
    "schatten_norm",
    "schatten_norm_value",
]
