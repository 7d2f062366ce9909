"""Scripted derivations: the embedding theorem, finite-exponent forms,
the conjugate-pair interpolation solver, and the nested-space reduction.

These build explicit cited traces rather than relying on the generic
fixed-point rewriter, because the chains use identities in both
directions (factoring an interpolation as well as collapsing one).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from opslab.calculus.exponents import Exponent, INF, ONE, as_theta
from opslab.calculus.expressions import (
    Column,
    Dual,
    Interp,
    Opposite,
    Row,
    SCALAR,
    Schatten,
    SpaceExpr,
    VectorSchatten,
    tensor,
)
from opslab.calculus.rewrite import KOUBA_CITATION
from opslab.calculus.trace import Level, Step, Trace
from opslab.errors import InvalidParameter, NotApplicable, OutOfRange

__all__ = [
    "EmbeddingDerivation",
    "derive_embedding",
    "finite_exponent_form",
    "solve_conjugate_interp",
    "xn_reduce",
]

_L2_CITATION = (
    "n-fold Haagerup powers of the index-inf and index-1 column (or row) spaces "
    "are all isometrically l2, compatibly with the interpolation couple"
)
_EMB_CITATION = (
    "isometric embedding onto the first column block: E (x) R_u sits inside "
    "C_u (x) E (x) R_u = S_u[E] by injectivity of the Haagerup product"
)
_PAIR_CITATION = "C_a (x) R_a = S_a (vector Schatten factorization at scalar fiber)"
_OP_BANACH_CITATION = "an opposite operator space has the same underlying Banach norm"
_SELF_DUAL_CITATION = (
    "C_w = (C_{w'})* and the Haagerup product is self-dual in finite dimensions"
)


def _col(reciprocal: Fraction) -> Column:
    return Column(Exponent(reciprocal))


def _row(reciprocal: Fraction) -> Row:
    return Row(Exponent(reciprocal))


@dataclass(frozen=True)
class EmbeddingDerivation:
    """One isometric embedding S_p[C] -> S_u[S_v] with its replayed proof."""

    p: Exponent
    u: Exponent
    v: Exponent
    theta: Fraction
    q: Exponent
    r: Exponent
    side: str  # "column" for p <= 2, "row-opposite" for p >= 2
    trace: Trace


def _embed_column_side(p: Exponent) -> EmbeddingDerivation:
    """The 1 < p <= 2 chain, done on the column side."""
    rp = p.reciprocal
    theta = (1 + rp) / 2
    q = Exponent(rp / theta)  # q = theta * p
    r = Exponent((1 - rp) / theta)  # r = theta * p'
    ra = (1 + rp) / 2  # a = 2p/(p+1)
    rb = (1 - rp) / 2  # b = 2p/(p-1)
    rc = 3 * (1 - rp) / 2  # c = 2p/(3p-3)
    ru = 1 - rc  # u = 2p/(3-p)
    u, v = Exponent(ru), Exponent(ra)

    trace = Trace()

    def add(rule, before, after, level, citation):
        trace.append(Step(rule, before, after, level, citation))
        return after

    e = VectorSchatten(p, Column(INF))
    e = add("R5", e, tensor(Column(p), Column(INF), Row(p)),
            Level.COMPLETELY_ISOMETRIC, "S_p[E] = C_p (x) E (x) R_p")
    e = add("R4", e, tensor(Column(p), Column(INF), Column(p.conjugate())),
            Level.COMPLETELY_ISOMETRIC, "R_p = C_{p'}")
    interped = Interp(
        tensor(Column(INF), Column(INF), Column(INF)),
        tensor(Column(q), Column(INF), Column(r)),
        theta,
    )
    e = add("KOUBA", e, interped, Level.COMPLETELY_ISOMETRIC,
            "C_p = (C_inf, C_q)_t, C_inf = (C_inf, C_inf)_t, C_p' = (C_inf, C_r)_t; "
            + KOUBA_CITATION)
    e = add("L2", e,
            Interp(tensor(Column(ONE), Column(ONE), Column(ONE)), interped.right, theta),
            Level.ISOMETRIC, _L2_CITATION)
    e = add("KOUBA", e,
            tensor(Interp(Column(ONE), Column(q), theta),
                   Interp(Column(ONE), Column(INF), theta),
                   Interp(Column(ONE), Column(r), theta)),
            Level.COMPLETELY_ISOMETRIC, KOUBA_CITATION)
    e = add("R1", e,
            tensor(_col(ra), Interp(Column(ONE), Column(INF), theta),
                   Interp(Column(ONE), Column(r), theta)),
            Level.COMPLETELY_ISOMETRIC, "(C_1, C_q)_t = C_a")
    e = add("R1", e,
            tensor(_col(ra), _col(rb), Interp(Column(ONE), Column(r), theta)),
            Level.COMPLETELY_ISOMETRIC, "(C_1, C_inf)_t = C_b")
    e = add("R1", e, tensor(_col(ra), _col(rb), _col(rc)),
            Level.COMPLETELY_ISOMETRIC, "(C_1, C_r)_t = C_c")
    e = add("R4", e, tensor(_col(ra), _row(1 - rb), _col(rc)),
            Level.COMPLETELY_ISOMETRIC, "C_b = R_{b'} with b' = a")
    e = add("R4", e, tensor(_col(ra), _row(ra), _row(ru)),
            Level.COMPLETELY_ISOMETRIC, "C_c = R_{c'} with c' = u")
    e = add("R5", e, tensor(Schatten(v), _row(ru)),
            Level.COMPLETELY_ISOMETRIC, _PAIR_CITATION)
    e = add("EMB", e, VectorSchatten(u, Schatten(v)), Level.ISOMETRIC, _EMB_CITATION)

    assert u.is_finite_interior() and v.is_finite_interior()
    return EmbeddingDerivation(p, u, v, theta, q, r, "column", trace)


def _embed_row_side(p: Exponent) -> EmbeddingDerivation:
    """The 2 <= p < infinity chain, via the opposite of the row space."""
    rp = p.reciprocal
    t = p.conjugate()
    rt = t.reciprocal
    theta = (1 + rt) / 2
    q = Exponent(rt / theta)  # q = theta * t
    r = Exponent(rp / theta)  # r = theta * t'
    ra = (1 + rt) / 2
    rb = (1 - rt) / 2  # b = 2p
    rc = 3 * (1 - rt) / 2  # c reciprocal; c = 2p/3
    u, v = Exponent(rc), Exponent(rb)

    trace = Trace()

    def add(rule, before, after, level, citation):
        trace.append(Step(rule, before, after, level, citation))
        return after

    e = VectorSchatten(p, Column(INF))
    e = add("R5", e, tensor(Column(p), Column(INF), Row(p)),
            Level.COMPLETELY_ISOMETRIC, "S_p[E] = C_p (x) E (x) R_p")
    e = add("R4", e, tensor(Column(p), Column(INF), Column(t)),
            Level.COMPLETELY_ISOMETRIC, "R_p = C_{p'}")
    e = add("R6", e, Opposite(tensor(Row(t), Row(INF), Row(t.conjugate()))),
            Level.COMPLETELY_ISOMETRIC,
            "the column triple is the opposite of the reversed row triple")
    interped = Interp(
        tensor(Row(INF), Row(INF), Row(INF)),
        tensor(Row(q), Row(INF), Row(r)),
        theta,
    )
    e = add("KOUBA", e, Opposite(interped), Level.COMPLETELY_ISOMETRIC,
            "R_t = (R_inf, R_q)_t and R_t' = (R_inf, R_r)_t; " + KOUBA_CITATION)
    e = add("L2", e,
            Opposite(Interp(tensor(Row(ONE), Row(ONE), Row(ONE)), interped.right, theta)),
            Level.ISOMETRIC, _L2_CITATION)
    e = add("KOUBA", e,
            Opposite(tensor(Interp(Row(ONE), Row(q), theta),
                            Interp(Row(ONE), Row(INF), theta),
                            Interp(Row(ONE), Row(r), theta))),
            Level.COMPLETELY_ISOMETRIC, KOUBA_CITATION)
    e = add("R1", e,
            Opposite(tensor(_row(ra), Interp(Row(ONE), Row(INF), theta),
                            Interp(Row(ONE), Row(r), theta))),
            Level.COMPLETELY_ISOMETRIC, "(R_1, R_q)_t = R_a, the row form")
    e = add("R1", e,
            Opposite(tensor(_row(ra), _row(rb), Interp(Row(ONE), Row(r), theta))),
            Level.COMPLETELY_ISOMETRIC, "(R_1, R_inf)_t = R_b, the row form")
    e = add("R1", e, Opposite(tensor(_row(ra), _row(rb), _row(rc))),
            Level.COMPLETELY_ISOMETRIC, "(R_1, R_r)_t = R_c, the row form")
    e = add("R4", e, Opposite(tensor(_col(1 - ra), _row(rb), _row(rc))),
            Level.COMPLETELY_ISOMETRIC, "R_a = C_{a'} with a' = b")
    e = add("R5", e, Opposite(tensor(Schatten(v), _row(rc))),
            Level.COMPLETELY_ISOMETRIC, _PAIR_CITATION)
    e = add("EMB", e, Opposite(VectorSchatten(u, Schatten(v))),
            Level.ISOMETRIC, _EMB_CITATION)
    e = add("OP", e, VectorSchatten(u, Schatten(v)),
            Level.ISOMETRIC, _OP_BANACH_CITATION)

    assert u.is_finite_interior() and v.is_finite_interior()
    return EmbeddingDerivation(p, u, v, theta, q, r, "row-opposite", trace)


def derive_embedding(p) -> list[EmbeddingDerivation]:
    """Isometric embeddings of the column-valued Schatten space.

    For 1 < p <= 2 the target exponents are (2p/(3-p), 2p/(p+1)); for
    2 <= p < infinity they are (2p/3, 2p).  At p = 2 both derivations
    are returned, in that order.
    """
    p = Exponent.from_value(p)
    if not p.is_finite_interior():
        raise OutOfRange(f"embedding requires 1 < p < inf, got {p}")
    results = []
    if p.reciprocal >= Fraction(1, 2):  # p <= 2
        results.append(_embed_column_side(p))
    if p.reciprocal <= Fraction(1, 2):  # p >= 2
        results.append(_embed_row_side(p))
    return results


# --- finite exponent form ----------------------------------------------------


def _finite_form_steps(ps, theta, wrap, trace):
    """Shared chain for column products with all indices > 1."""
    n = len(ps)
    recips = [p.reciprocal for p in ps]
    tilde = [Exponent(rp / theta) for rp in recips]
    qs = [Exponent((1 - theta) + rp) for rp in recips]

    before = tensor(*[Column(p) for p in ps])
    interped = Interp(
        tensor(*[Column(INF) for _ in range(n)]),
        tensor(*[Column(pt) for pt in tilde]),
        theta,
    )
    trace.append(Step("KOUBA", wrap(before), wrap(interped),
                      Level.COMPLETELY_ISOMETRIC,
                      "each factor interpolates from index inf with the common "
                      "parameter; " + KOUBA_CITATION))
    swapped = Interp(tensor(*[Column(ONE) for _ in range(n)]), interped.right, theta)
    trace.append(Step("L2", wrap(interped), wrap(swapped), Level.ISOMETRIC,
                      _L2_CITATION))
    current = [Interp(Column(ONE), Column(pt), theta) for pt in tilde]
    trace.append(Step("KOUBA", wrap(swapped), wrap(tensor(*current)),
                      Level.COMPLETELY_ISOMETRIC, KOUBA_CITATION))
    for k in range(n):
        replaced = current[:k] + [Column(qs[k])] + current[k + 1:]
        trace.append(Step("R1", wrap(tensor(*current)), wrap(tensor(*replaced)),
                          Level.COMPLETELY_ISOMETRIC,
                          "(C_1, C_q)_t = C_c factorwise"))
        current = replaced
    return qs


def finite_exponent_form(ps, theta=None):
    """Rewrite a Haagerup product of column spaces with endpoint indices
    into one with all indices strictly between 1 and infinity.

    The indices must avoid one endpoint: either all > 1 or all < inf.
    The parameter must exceed every reciprocal; by default it is the
    midpoint (1 + max_k 1/p_k)/2.  Returns (theta, qs, trace).
    """
    ps = [Exponent.from_value(p) for p in ps]
    if not ps:
        raise InvalidParameter("empty index list")
    has_one = any(p.reciprocal == 1 for p in ps)
    has_inf = any(p.is_infinite for p in ps)
    if has_one and has_inf:
        raise NotApplicable("list mixes index 1 and index inf endpoints")

    trace = Trace()
    if not has_one:
        max_recip = max(p.reciprocal for p in ps)
        if theta is None:
            theta = (1 + max_recip) / 2
        theta = as_theta(theta)
        if theta <= max_recip:
            raise InvalidParameter(
                f"theta {theta} must exceed max reciprocal {max_recip}")
        qs = _finite_form_steps(ps, theta, lambda e: e, trace)
    else:
        # all indices finite: conjugate, solve, conjugate back
        conj = [p.conjugate() for p in ps]
        max_recip = max(p.reciprocal for p in conj)
        if theta is None:
            theta = (1 + max_recip) / 2
        theta = as_theta(theta)
        if theta <= max_recip:
            raise InvalidParameter(
                f"theta {theta} must exceed max conjugate reciprocal {max_recip}")
        primal = tensor(*[Column(p) for p in ps])
        dualized = Dual(tensor(*[Column(p) for p in conj]))
        trace.append(Step("R4", primal, dualized, Level.COMPLETELY_ISOMETRIC,
                          _SELF_DUAL_CITATION))
        inner_qs = _finite_form_steps(conj, theta, Dual, trace)
        qs = [w.conjugate() for w in inner_qs]
        final = tensor(*[Column(w) for w in qs])
        trace.append(Step("R4", trace.steps[-1].after, final,
                          Level.COMPLETELY_ISOMETRIC, _SELF_DUAL_CITATION))

    assert all(w.is_finite_interior() for w in qs)
    return theta, qs, trace


# --- conjugate interpolation solver ------------------------------------------


def solve_conjugate_interp(p, q):
    """Find (theta, r, s) with 1/r = (1-theta)/s + theta/p and
    1/r' = (1-theta)/s + theta/q, exactly.

    Needs 1 < p != q < inf; then r != 2 automatically.  Starts at
    theta = 1/2 and halves until the s-constraint 0 < 1/s < 1 holds.
    """
    p = Exponent.from_value(p)
    q = Exponent.from_value(q)
    if not (p.is_finite_interior() and q.is_finite_interior()):
        raise InvalidParameter("both indices must lie strictly between 1 and inf")
    if p == q:
        raise NotApplicable("equal indices would force r = 2")
    rp, rq = p.reciprocal, q.reciprocal

    theta = Fraction(1, 2)
    while True:
        rs = (1 - theta * (rp + rq)) / (2 * (1 - theta))
        if 0 < rs < 1:
            break
        theta /= 2
    rr = (1 + theta * (rp - rq)) / 2

    # exact back-substitution of both defining equations
    assert rr == (1 - theta) * rs + theta * rp
    assert 1 - rr == (1 - theta) * rs + theta * rq
    assert rr != Fraction(1, 2)
    return theta, Exponent(rr), Exponent(rs)


# --- nested space reduction ---------------------------------------------------


def xn_reduce(p, q, n: int) -> SpaceExpr:
    """Nested form of the alternating Haagerup power for a conjugate pair.

    For q = p' (p != 2) the 2n-fold alternating product of C_p and C_q
    collapses to n nestings of S_p[S_q[.]], innermost fiber scalar.
    """
    p = Exponent.from_value(p)
    q = Exponent.from_value(q)
    if q != p.conjugate():
        raise NotApplicable("reduction is proven only for conjugate pairs")
    if p.reciprocal == Fraction(1, 2):
        raise NotApplicable("p = 2 is excluded (p must differ from its conjugate)")
    if not p.is_finite_interior():
        raise InvalidParameter("p must lie strictly between 1 and inf")
    if n < 0:
        raise InvalidParameter("nesting depth must be nonnegative")
    expr: SpaceExpr = SCALAR
    for _ in range(n):
        expr = VectorSchatten(p, VectorSchatten(q, expr))
    return expr
