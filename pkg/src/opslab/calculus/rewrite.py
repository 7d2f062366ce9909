"""Rewrite engine producing canonical forms with cited traces.

Rule table (id, redex, level):

    R1  I[t]{C[a], C[b]}        -> C[c], 1/c = (1-t)/a + t/b      completely-isometric
    R2  adjacent pair C[p](x)C[p] (maximal run of exactly 2) -> C[p]   completely-isometric
    R3  C[u] (x) C[v] (binary)  -> S[c], 1/c = (1 - 1/v + 1/u)/2  isometric
    R4  dual(C[p]) -> C[p'];  R[p] -> C[p']                       completely-isometric
    R5  Sp[p]{E}   -> C[p] (x) E (x) R[p]                         completely-isometric
    R6  op distributes with factor reversal, swaps C and R        completely-isometric
    R7  I[t]{S[a], S[b]}        -> S[c]                           isometric
    R8  maximal run of n >= 3 equal columns -> C[p]               completely-isometric

Strategy: leftmost-innermost position scan; at each position the rules
are tried in priority order.  At the completely-isometric target only
the completely-isometric rules run, in the order R1, R2, R4, R5, R6,
R8.  At the isometric target the structural rules R1, R4, R5, R6 come
first, then the Banach rules R3, R7, then the collapses R2, R8 as a
fallback, so a column pair canonicalizes to its Schatten class rather
than to a bare column.  Within each block the redexes are disjoint, so
the canonical form is independent of the within-block order; the
confluence tests exercise exactly those permutations.

Isometric rules only rewrite expressions at Banach-functorial
positions: at the root, or nested solely inside interpolation, dual,
or opposite nodes.  Inside a Haagerup factor or a vector-Schatten
fiber only complete isometries are congruences, so R3 and R7 are
suppressed there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from opslab.calculus.exponents import Exponent, interp_exponent
from opslab.calculus.expressions import (
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
    rebuild,
    tensor,
)
from opslab.calculus.trace import Level, Step, Trace
from opslab.errors import InvalidParameter, NotApplicable

__all__ = [
    "Rule",
    "RULES",
    "normalize",
    "banach_class",
    "BanachClass",
    "kouba_distribute",
    "kouba_factor",
    "KOUBA_CITATION",
]

KOUBA_CITATION = (
    "Kouba: (E0 (x) F0, E1 (x) F1)_t = (E0, E1)_t (x) (F0, F1)_t, completely isometrically"
)


@dataclass(frozen=True)
class Rule:
    id: str
    level: Level
    citation: str
    fn: Callable[[SpaceExpr], Optional[SpaceExpr]]


def _column_runs(factors):
    """Maximal runs of identical Column factors: (start, length) pairs."""
    runs = []
    i = 0
    while i < len(factors):
        j = i
        if isinstance(factors[i], Column):
            while j + 1 < len(factors) and factors[j + 1] == factors[i]:
                j += 1
        runs.append((i, j - i + 1))
        i = j + 1
    return runs


def _collapse_run(expr, wanted):
    if not isinstance(expr, Tensor):
        return None
    for start, length in _column_runs(expr.factors):
        if wanted(length):
            kept = expr.factors[:start] + (expr.factors[start],) + expr.factors[start + length:]
            return tensor(*kept)
    return None


def _r1(expr):
    if (
        isinstance(expr, Interp)
        and isinstance(expr.left, Column)
        and isinstance(expr.right, Column)
    ):
        return Column(interp_exponent(expr.left.p, expr.right.p, expr.theta))
    return None


def _r2(expr):
    return _collapse_run(expr, lambda n: n == 2)


def _r8(expr):
    return _collapse_run(expr, lambda n: n >= 3)


def _r3(expr):
    if (
        isinstance(expr, Tensor)
        and len(expr.factors) == 2
        and all(isinstance(f, Column) for f in expr.factors)
    ):
        ru = expr.factors[0].p.reciprocal
        rv = expr.factors[1].p.reciprocal
        return Schatten(Exponent((1 - rv + ru) / 2))
    return None


def _r4(expr):
    if isinstance(expr, Dual) and isinstance(expr.inner, Column):
        return Column(expr.inner.p.conjugate())
    if isinstance(expr, Row):
        return Column(expr.p.conjugate())
    return None


def _r5(expr):
    if isinstance(expr, VectorSchatten):
        return tensor(Column(expr.p), expr.inner, Row(expr.p))
    return None


def _r6(expr):
    if not isinstance(expr, Opposite):
        return None
    inner = expr.inner
    if isinstance(inner, Tensor):
        return tensor(*[Opposite(f) for f in reversed(inner.factors)])
    if isinstance(inner, Column):
        return Row(inner.p)
    if isinstance(inner, Row):
        return Column(inner.p)
    if isinstance(inner, Opposite):
        return inner.inner
    if isinstance(inner, Scalar):
        return inner
    return None


def _r7(expr):
    if (
        isinstance(expr, Interp)
        and isinstance(expr.left, Schatten)
        and isinstance(expr.right, Schatten)
    ):
        return Schatten(interp_exponent(expr.left.p, expr.right.p, expr.theta))
    return None


RULES = {
    "R1": Rule(
        "R1",
        Level.COMPLETELY_ISOMETRIC,
        "(C_a, C_b)_t = C_c with 1/c = (1-t)/a + t/b",
        _r1,
    ),
    "R2": Rule("R2", Level.COMPLETELY_ISOMETRIC, "C_p (x) C_p = C_p", _r2),
    "R3": Rule(
        "R3",
        Level.ISOMETRIC,
        "C_u (x) C_v is isometric to S_c with 1/c = (1 - 1/v + 1/u)/2",
        _r3,
    ),
    "R4": Rule(
        "R4",
        Level.COMPLETELY_ISOMETRIC,
        "C_p* = C_{p'} = R_p and C_p = R_{p'}",
        _r4,
    ),
    "R5": Rule(
        "R5",
        Level.COMPLETELY_ISOMETRIC,
        "S_p[E] = C_p (x) E (x) R_p",
        _r5,
    ),
    "R6": Rule(
        "R6",
        Level.COMPLETELY_ISOMETRIC,
        "the opposite reverses Haagerup factors and swaps columns with rows",
        _r6,
    ),
    "R7": Rule(
        "R7",
        Level.ISOMETRIC,
        "(S_a, S_b)_t = S_c with 1/c = (1-t)/a + t/b",
        _r7,
    ),
    "R8": Rule(
        "R8",
        Level.COMPLETELY_ISOMETRIC,
        "an n-fold Haagerup power of C_p collapses to C_p",
        _r8,
    ),
}

CI_PRIORITY = ("R1", "R2", "R4", "R5", "R6", "R8")
ISO_PRIORITY = ("R1", "R4", "R5", "R6", "R3", "R7", "R2", "R8")

_MAX_STEPS = 10_000


def _child_banach_ok(parent: SpaceExpr, parent_ok: bool) -> bool:
    # Haagerup factors and vector-Schatten fibers are not Banach-functorial.
    if isinstance(parent, (Tensor, VectorSchatten)):
        return False
    return parent_ok


def _rewrite_once(expr, banach_ok, rules, target):
    kids = expr.children()
    for i, child in enumerate(kids):
        hit = _rewrite_once(child, _child_banach_ok(expr, banach_ok), rules, target)
        if hit is not None:
            new_child, rule = hit
            new_kids = kids[:i] + (new_child,) + kids[i + 1:]
            return rebuild(expr, new_kids), rule
    for rule in rules:
        if rule.level < target:
            continue
        if rule.level < Level.COMPLETELY_ISOMETRIC and not banach_ok:
            continue
        result = rule.fn(expr)
        if result is not None:
            return result, rule
    return None


def priority_for(target: Level) -> tuple[str, ...]:
    if target == Level.COMPLETELY_ISOMETRIC:
        return CI_PRIORITY
    return ISO_PRIORITY


def normalize(
    expr: SpaceExpr,
    target_level: Level = Level.COMPLETELY_ISOMETRIC,
    priority=None,
) -> tuple[SpaceExpr, Trace]:
    """Rewrite to a fixed point; returns the canonical form and its trace.

    Every applied rule has level >= target_level, so the trace's overall
    level bounds the strength of the derived identity from below.  The
    identity rewrite (empty trace) is returned when no rule applies.
    """
    if priority is None:
        priority = priority_for(target_level)
    rules = [RULES[r] if isinstance(r, str) else r for r in priority]
    trace = Trace()
    current = expr
    for _ in range(_MAX_STEPS):
        hit = _rewrite_once(current, True, rules, target_level)
        if hit is None:
            return current, trace
        new_expr, rule = hit
        trace.append(Step(rule.id, current, new_expr, rule.level, rule.citation))
        current = new_expr
    raise RuntimeError("rewrite did not reach a fixed point within the step budget")


# --- Banach isometry classes -------------------------------------------------


@dataclass(frozen=True)
class BanachClass:
    """Banach-isometry class of a canonical form."""

    kind: str  # hilbert | schatten | scalar | unknown
    exponent: Exponent | None = None

    def __str__(self):
        if self.kind == "schatten":
            return f"schatten({self.exponent})"
        return self.kind


HILBERT = BanachClass("hilbert")
UNKNOWN = BanachClass("unknown")


def banach_class(expr: SpaceExpr) -> BanachClass:
    """Banach class of a canonical form.

    Column and row spaces of every index are l2, hence Hilbert; so is
    S_2.  Other Schatten exponents keep their class.  The opposite has
    the same underlying Banach space; duals map Hilbert to Hilbert and
    S_p to S_{p'}.  Anything else is not decided by the calculus.
    """
    if isinstance(expr, (Column, Row)):
        return HILBERT
    if isinstance(expr, Schatten):
        if expr.p.reciprocal == Fraction(1, 2):
            return HILBERT
        return BanachClass("schatten", expr.p)
    if isinstance(expr, Scalar):
        return BanachClass("scalar")
    if isinstance(expr, Opposite):
        return banach_class(expr.inner)
    if isinstance(expr, Dual):
        inner = banach_class(expr.inner)
        if inner.kind in ("hilbert", "scalar"):
            return inner
        if inner.kind == "schatten":
            return BanachClass("schatten", inner.exponent.conjugate())
        return UNKNOWN
    return UNKNOWN


# --- Kouba distribution ------------------------------------------------------


def _simplify_equal_interp(expr: SpaceExpr) -> SpaceExpr:
    if isinstance(expr, Interp) and expr.left == expr.right:
        return expr.left
    return expr


def kouba_distribute(expr: SpaceExpr) -> SpaceExpr:
    """Distribute interpolation over Haagerup products factorwise.

    Requires an interpolation of two Haagerup tensors of equal arity;
    returns the tensor of factorwise interpolations (equal-endpoint
    factors simplify to the endpoint).  Completely isometric.
    """
    if not isinstance(expr, Interp):
        raise NotApplicable("kouba_distribute needs an interpolation node")
    left, right = expr.left, expr.right
    if not (isinstance(left, Tensor) and isinstance(right, Tensor)):
        raise NotApplicable("both interpolation endpoints must be Haagerup tensors")
    if len(left.factors) != len(right.factors):
        raise NotApplicable(
            f"factor arity mismatch: {len(left.factors)} vs {len(right.factors)}"
        )
    parts = [
        _simplify_equal_interp(Interp(a, b, expr.theta))
        for a, b in zip(left.factors, right.factors)
    ]
    return tensor(*parts)


def kouba_factor(expr: SpaceExpr) -> SpaceExpr:
    """Inverse direction: a tensor of interpolations with one common
    parameter factors into an interpolation of tensors."""
    if not isinstance(expr, Tensor):
        raise NotApplicable("kouba_factor needs a Haagerup tensor")
    if not all(isinstance(f, Interp) for f in expr.factors):
        raise NotApplicable("every factor must be an interpolation node")
    thetas = {f.theta for f in expr.factors}
    if len(thetas) != 1:
        raise NotApplicable(f"mixed interpolation parameters: {sorted(thetas)}")
    theta = thetas.pop()
    return Interp(
        tensor(*[f.left for f in expr.factors]),
        tensor(*[f.right for f in expr.factors]),
        theta,
    )
