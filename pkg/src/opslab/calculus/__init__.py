"""Symbolic operator-space calculus: exact exponents, expression trees,
the cited rewrite engine, and the scripted derivations."""

from opslab.calculus.exponents import INF, ONE, TWO, Exponent, as_theta, interp_exponent
from opslab.calculus.expressions import (
    SCALAR,
    Column,
    Dual,
    Interp,
    Opposite,
    Row,
    Scalar,
    Schatten,
    SpaceExpr,
    Tensor,
    VectorSchatten,
    parse_expr,
    pretty,
    subexpressions,
    tensor,
)
from opslab.calculus.rewrite import (
    CI_PRIORITY,
    ISO_PRIORITY,
    RULES,
    BanachClass,
    banach_class,
    kouba_distribute,
    kouba_factor,
    normalize,
)
from opslab.calculus.derive import (
    EmbeddingDerivation,
    derive_embedding,
    finite_exponent_form,
    solve_conjugate_interp,
    xn_reduce,
)
from opslab.calculus.trace import Level, Step, Trace

__all__ = [
    "INF",
    "ONE",
    "TWO",
    "Exponent",
    "as_theta",
    "interp_exponent",
    "SCALAR",
    "Column",
    "Dual",
    "Interp",
    "Opposite",
    "Row",
    "Scalar",
    "Schatten",
    "SpaceExpr",
    "Tensor",
    "VectorSchatten",
    "parse_expr",
    "pretty",
    "subexpressions",
    "tensor",
    "CI_PRIORITY",
    "ISO_PRIORITY",
    "RULES",
    "BanachClass",
    "banach_class",
    "kouba_distribute",
    "kouba_factor",
    "normalize",
    "EmbeddingDerivation",
    "derive_embedding",
    "finite_exponent_form",
    "solve_conjugate_interp",
    "xn_reduce",
    "Level",
    "Step",
    "Trace",
]
