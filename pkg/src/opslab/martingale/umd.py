"""Unconditionality-constant experiments for nested sequence spaces.

The spaces are finite-width nestings l_p^w(l_q^w(...C)); elements are
complex arrays with one axis per nesting level.  The martingale model
is dyadic (Paley-Walsh): depth-d difference sequences dx_k(omega) =
phi_k(omega_1..omega_{k-1}) * omega_k with space-valued phi_k, and the
estimated constant is the best ratio

    || sum_k eps_k dx_k ||_{L_2(E)} / || sum_k dx_k ||_{L_2(E)}

over sign patterns and differences.  Sign patterns are enumerated
exactly (the identity pattern pins the ratio at 1, so estimates never
fall below 1); the differences follow gradient ascent with an analytic
mixed-norm gradient.  Every reported value is achieved by an explicit
witness, hence a valid lower bound on the constant of the truncated
space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from opslab.errors import BudgetExceeded, InvalidParameter
from opslab.numlab.estimates import rng_for

__all__ = [
    "MixedNormSpace",
    "mixed_norm",
    "mixed_norm_grad",
    "UMDConstantEstimate",
    "umd_lower_estimate",
    "umd_growth_experiment",
]

_GRID_BUDGET = 1 << 22  # max (sign-grid points) * (space dimension)


@dataclass(frozen=True)
class MixedNormSpace:
    """Nesting descriptor: levels (exponent, width), outermost first."""

    levels: tuple

    def __post_init__(self):
        clean = []
        for exponent, width in self.levels:
            exponent = float(exponent)
            if not 1.0 < exponent < math.inf:
                raise InvalidParameter("nesting exponents must lie in (1, inf)")
            if int(width) < 1:
                raise InvalidParameter("widths must be positive")
            clean.append((exponent, int(width)))
        object.__setattr__(self, "levels", tuple(clean))

    @staticmethod
    def scalars() -> "MixedNormSpace":
        return MixedNormSpace(())

    @staticmethod
    def alternating(p, q, width: int, pairs: int) -> "MixedNormSpace":
        return MixedNormSpace(((float(p), width), (float(q), width)) * pairs)

    @property
    def shape(self) -> tuple:
        return tuple(width for _, width in self.levels)

    @property
    def dim(self) -> int:
        out = 1
        for _, width in self.levels:
            out *= width
        return out

    def lift(self, value: np.ndarray) -> np.ndarray:
        """Isometric embedding into one more (outer) nesting pair: place
        the element at the first coordinate of both new axes."""
        if len(self.levels) < 2:
            raise InvalidParameter("lift target must extend a nested space")
        outer_w, inner_w = self.levels[0][1], self.levels[1][1]
        lifted = np.zeros((outer_w, inner_w) + value.shape, dtype=complex)
        lifted[0, 0] = value
        return lifted


def _check_shape(v: np.ndarray, space: MixedNormSpace, batch_dims: int):
    expected = space.shape
    if v.shape[batch_dims:] != expected:
        raise InvalidParameter(
            f"array shape {v.shape[batch_dims:]} does not match nesting {expected}"
        )


def mixed_norm(v, space: MixedNormSpace) -> float:
    """Recursive l_p-of-l_q evaluation of one element."""
    v = np.asarray(v, dtype=complex)
    _check_shape(v, space, 0)
    arr = np.abs(v)
    for exponent, _ in reversed(space.levels):
        arr = np.sum(arr**exponent, axis=-1) ** (1.0 / exponent)
    return float(arr)


def _batched_norm(v: np.ndarray, space: MixedNormSpace) -> np.ndarray:
    arr = np.abs(v)
    for exponent, _ in reversed(space.levels):
        arr = np.sum(arr**exponent, axis=-1) ** (1.0 / exponent)
    return arr


def mixed_norm_grad(v, space: MixedNormSpace):
    """Norm and gradient g with dN = Re<g, dv> (batch axes allowed).

    The backward pass multiplies the level weights (n_i / N)^(p - 1)
    outward-in; zero blocks get zero weight.
    """
    v = np.asarray(v, dtype=complex)
    batch_dims = v.ndim - len(space.levels)
    _check_shape(v, space, batch_dims)
    stack = [np.abs(v)]
    for exponent, _ in reversed(space.levels):
        stack.append(np.sum(stack[-1] ** exponent, axis=-1) ** (1.0 / exponent))
    norm = stack[-1]
    weight = np.ones_like(norm)
    for idx, (exponent, _) in enumerate(space.levels):
        outer = stack[-1 - idx]  # shape with idx trailing axes restored
        inner = stack[-2 - idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(outer[..., None] > 0, inner / outer[..., None], 0.0)
        weight = weight[..., None] * ratio ** (exponent - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        phase = np.where(stack[0] > 0, v / stack[0], 0.0)
    return norm, weight * phase


# --- Paley-Walsh ascent --------------------------------------------------------


@dataclass(frozen=True)
class UMDConstantEstimate:
    """Lower bound on the order-2 unconditionality constant."""

    value: float
    depth: int
    space: MixedNormSpace
    pattern: str
    seed: int | None = None
    restarts: int = 0
    iterations: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.value < 1.0 - 1e-12:
            raise InvalidParameter("unconditionality estimates cannot fall below 1")


class _DyadicModel:
    """Precomputed index maps for depth-d sign grids."""

    def __init__(self, depth: int, space: MixedNormSpace):
        if depth < 1:
            raise InvalidParameter("martingale depth must be >= 1")
        if (1 << depth) * max(space.dim, 1) > _GRID_BUDGET:
            raise BudgetExceeded(
                f"grid of {1 << depth} sign points x dimension {space.dim} "
                f"exceeds the desk budget {_GRID_BUDGET}"
            )
        self.depth = depth
        self.space = space
        grid = np.array(list(product((1, -1), repeat=depth)), dtype=float)
        self.omega = grid  # shape (2^d, d); column k is omega_{k+1}
        # prefix index of (omega_1..omega_k) as a binary number, sign +1 -> bit 0
        bits = (1 - grid) / 2
        self.prefix = np.zeros((depth, grid.shape[0]), dtype=int)
        for k in range(depth):
            idx = np.zeros(grid.shape[0], dtype=int)
            for j in range(k):
                idx = idx * 2 + bits[:, j].astype(int)
            self.prefix[k] = idx

    def differences(self, phi):
        """Stack T_k(omega) = phi_k[prefix] * omega_k, shape (d, 2^d, dim...)."""
        parts = []
        for k in range(self.depth):
            gathered = phi[k][self.prefix[k]]
            omega_k = self.omega[:, k].reshape((-1,) + (1,) * (gathered.ndim - 1))
            parts.append(gathered * omega_k)
        return np.stack(parts)

    def random_phi(self, rng):
        shape = self.space.shape
        return [
            (rng.standard_normal((1 << k,) + shape) + 1j * rng.standard_normal((1 << k,) + shape))
            for k in range(self.depth)
        ]


def _ratio_and_best_pattern(model: _DyadicModel, phi):
    """Exact sign enumeration: best ratio and its pattern."""
    parts = model.differences(phi)  # (d, 2^d, *shape)
    base = parts.sum(axis=0)
    denom_sq = float(np.mean(_batched_norm(base, model.space) ** 2))
    if denom_sq == 0.0:
        return 0.0, np.ones(model.depth), parts, denom_sq
    best_val, best_eps = -math.inf, None
    for rest in product((1.0, -1.0), repeat=model.depth - 1):
        eps = np.asarray((1.0,) + rest)
        transformed = np.tensordot(eps, parts, axes=(0, 0))
        num_sq = float(np.mean(_batched_norm(transformed, model.space) ** 2))
        val = math.sqrt(num_sq / denom_sq)
        if val > best_val:
            best_val, best_eps = val, eps
    return best_val, best_eps, parts, denom_sq


def _ascend_phi(model: _DyadicModel, phi, eps, steps: int):
    """Gradient ascent of the squared ratio for a fixed sign pattern."""
    d = model.depth
    step = 0.2
    count = 0

    def objective(phi_list):
        parts = model.differences(phi_list)
        base = parts.sum(axis=0)
        signed = np.tensordot(eps, parts, axes=(0, 0))
        num = np.mean(_batched_norm(signed, model.space) ** 2)
        den = np.mean(_batched_norm(base, model.space) ** 2)
        return (num / den if den > 0 else 0.0), base, signed

    value, base, signed = objective(phi)
    for _ in range(steps):
        count += 1
        norm_b, grad_b = mixed_norm_grad(base, model.space)
        norm_s, grad_s = mixed_norm_grad(signed, model.space)
        num = np.mean(norm_s**2)
        den = np.mean(norm_b**2)
        if den == 0.0 or num == 0.0:
            break
        # d log(num) = mean 2 n_w dn_w / num, likewise for den
        lead_s = 2.0 * norm_s.reshape(norm_s.shape + (1,) * len(model.space.shape))
        lead_b = 2.0 * norm_b.reshape(norm_b.shape + (1,) * len(model.space.shape))
        field_num = lead_s * grad_s / (num * (1 << d))
        field_den = lead_b * grad_b / (den * (1 << d))
        grads = []
        for k in range(d):
            omega_k = model.omega[:, k].reshape((-1,) + (1,) * len(model.space.shape))
            contrib = (eps[k] * field_num - field_den) * omega_k
            acc = np.zeros_like(phi[k])
            np.add.at(acc, model.prefix[k], contrib)
            grads.append(acc)
        gnorm = math.sqrt(sum(float(np.sum(np.abs(g) ** 2)) for g in grads))
        if gnorm < 1e-14:
            break
        scale = math.sqrt(sum(float(np.sum(np.abs(f) ** 2)) for f in phi)) or 1.0
        accepted = False
        trial = step
        for _ in range(8):
            cand = [phi[k] + trial * scale * grads[k] / gnorm for k in range(d)]
            cand_val, cand_base, cand_signed = objective(cand)
            if cand_val > value:
                phi, value, base, signed = cand, cand_val, cand_base, cand_signed
                accepted = True
                break
            trial *= 0.5
        step = min(trial * 1.3, 1.0) if accepted else max(trial, 1e-10)
        if not accepted and trial <= 1e-10:
            break
    return phi, math.sqrt(value), count


def umd_lower_estimate(
    space: MixedNormSpace,
    depth: int,
    seed: int = 0,
    restarts: int = 6,
    rounds: int = 4,
    steps: int = 120,
    init_phi=None,
) -> UMDConstantEstimate:
    """Lower bound on the order-2 unconditionality constant of the space
    by alternating exact sign enumeration with gradient ascent on the
    martingale differences.

    Scalar fibers (depth-0 nesting) give exactly 1: differences are
    orthogonal in scalar L_2, making every transform an isometry there.
    """
    if not space.levels:
        return UMDConstantEstimate(1.0, depth, space, "+" * depth, seed=seed)
    model = _DyadicModel(depth, space)
    best = None
    total_iters = 0
    starts = []
    if init_phi is not None:
        starts.append([np.array(f, dtype=complex) for f in init_phi])
    for restart in range(restarts):
        starts.append(model.random_phi(rng_for(seed, restart, 5)))
    for phi in starts:
        for _ in range(rounds):
            value, eps, _, _ = _ratio_and_best_pattern(model, phi)
            phi, value, iters = _ascend_phi(model, phi, eps, steps)
            total_iters += iters
        value, eps, _, _ = _ratio_and_best_pattern(model, phi)
        if best is None or value > best[0]:
            best = (value, eps, phi)
    value, eps, phi = best
    pattern = "".join("+" if s > 0 else "-" for s in eps)
    return UMDConstantEstimate(
        float(max(value, 1.0)),
        depth,
        space,
        pattern,
        seed=seed,
        restarts=restarts,
        iterations=total_iters,
        extra={"witness": phi},
    )


def umd_growth_experiment(
    p,
    q,
    width: int,
    max_pairs: int,
    depth: int,
    seed: int = 0,
    restarts: int = 6,
    rounds: int = 4,
    steps: int = 120,
) -> list[UMDConstantEstimate]:
    """Estimates for nestings n = 0..max_pairs of l_p(l_q(.)).

    Each level is seeded with the lifted witness of the previous one;
    the lift is isometric, so the sequence of lower bounds is
    nondecreasing by construction.
    """
    estimates = []
    prev_witness = None
    for pairs in range(max_pairs + 1):
        space = MixedNormSpace.alternating(p, q, width, pairs)
        init = _lift_phi(prev_witness, space)
        est = umd_lower_estimate(
            space, depth, seed=seed, restarts=restarts, rounds=rounds,
            steps=steps, init_phi=init,
        )
        floor = estimates[-1].value if estimates else 1.0
        if est.value < floor:
            # the lifted seed makes this unreachable up to float dust
            est = UMDConstantEstimate(
                floor, depth, space, est.pattern, seed=seed,
                restarts=est.restarts, iterations=est.iterations, extra=est.extra,
            )
        estimates.append(est)
        prev_witness = est.extra.get("witness")
    return estimates


def _lift_phi(prev_witness, space: MixedNormSpace):
    """Embed a depth list of phi arrays one nesting pair deeper, at the
    first coordinate of the two new axes (an isometric lattice embedding,
    so the seeded ratio matches the previous optimum exactly)."""
    if prev_witness is None:
        return None
    lifted = []
    for phi_k in prev_witness:
        out = np.zeros((phi_k.shape[0],) + space.shape, dtype=complex)
        index = (slice(None), 0, 0)
        out[index] = phi_k
        lifted.append(out)
    return lifted