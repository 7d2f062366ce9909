"""Canonical matrix filtration laboratory: conditional expectations,
hook differences, sign multipliers, triangular and Riesz projections,
constant estimates, and unconditionality growth experiments."""

from opslab.martingale.filtration import (
    ENUMERATION_CAP,
    cond_expect,
    hook_decomposition,
    hook_difference,
    schur_sign_transform,
    sign_average_check,
    sign_pattern,
    triangular_proj,
)
from opslab.martingale.opnorm import (
    DIRECTIONALITY_CAVEAT,
    ConstantBoundsReport,
    enumerate_sign_patterns,
    estimate_kp,
    estimate_operator_norm,
    riesz_norm_estimate,
    verify_constant_bounds,
)
from opslab.martingale.trigpoly import TrigPolynomial, quadrature_nodes, riesz_projection
from opslab.martingale.umd import (
    MixedNormSpace,
    UMDConstantEstimate,
    mixed_norm,
    mixed_norm_grad,
    umd_growth_experiment,
    umd_lower_estimate,
)

__all__ = [
    "ENUMERATION_CAP",
    "cond_expect",
    "hook_decomposition",
    "hook_difference",
    "schur_sign_transform",
    "sign_average_check",
    "sign_pattern",
    "triangular_proj",
    "DIRECTIONALITY_CAVEAT",
    "ConstantBoundsReport",
    "enumerate_sign_patterns",
    "estimate_kp",
    "estimate_operator_norm",
    "riesz_norm_estimate",
    "verify_constant_bounds",
    "TrigPolynomial",
    "quadrature_nodes",
    "riesz_projection",
    "MixedNormSpace",
    "UMDConstantEstimate",
    "mixed_norm",
    "mixed_norm_grad",
    "umd_growth_experiment",
    "umd_lower_estimate",
]
