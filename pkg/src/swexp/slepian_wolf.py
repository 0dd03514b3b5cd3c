"""Fixed-rate and variable-rate Slepian-Wolf exponents.

Fixed-rate exponents minimize, over source types, the deviation cost of the
type plus the matching constant-composition channel exponent at the residual
rate (the entropy of the type minus the coding rate).  A residual rate below
zero is handled by each program's own semantics: the sphere-packing and
expurgated programs become infeasible (+inf, the type class is fully
describable), the random-coding value keeps growing, and the correct-decoding
exponent is zero.

Variable-rate coding reduces to constant composition codes at the source
marginal: the achievable exponent at rate R is the constant-composition
reliability at composition P_X and rate H(P_X) - R, which yields computable
lower and upper bounds, exact between the Slepian-Wolf limit and the rate
complementary to the critical rate.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass

import numpy as np

from . import duals
from .channel import (
    ExponentKind,
    RateThresholds,
    StraightLine,
    _ex_value,
    degeneracy_predicate,
    ex_batch_binary,
    ex_zero_rate_envelope,
    rate_thresholds,
    simplex_grid,
    straight_line_exponent,
    GRID_DENOM,
)
from .extreal import INF, ExtReal
from .info_core import Channel, Distribution, JointSource, entropy_vec, kl_divergence_vec, mutual_information_arr


@dataclass(frozen=True)
class TiltedPair:
    """A point of the tilted source family tracing the parametric
    sphere-packing curve: (rate, exponent) = (tilted conditional entropy,
    divergence of the tilted joint from the source)."""

    rho: float
    y_marginal: Distribution
    x_given_y: Channel
    rate: float
    exponent: float


@dataclass(frozen=True)
class VariableRateBounds:
    """Bounds on the variable-rate reliability at one coding rate (nats).

    ``exact`` is populated with the sphere-packing value on the rate interval
    where upper and lower bounds provably meet; ``flag`` marks the
    sphere-packing exception rate, where no upper-bound claim is made.
    """

    lower: ExtReal
    upper_sp: ExtReal
    upper_sl: float | None
    upper_env: float | None
    exact: ExtReal | None
    flag: str | None


# ---------------------------------------------------------------------------
# fixed-rate exponents: type form
# ---------------------------------------------------------------------------


def _eta(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, -x * np.log(np.where(x > 0.0, x, 1.0)), 0.0)


def _inner_many_binary(kind: ExponentKind, w: np.ndarray, q0: np.ndarray, rin: np.ndarray) -> np.ndarray:
    """Constant-composition exponent at residual rates, vectorized; residual
    rates below zero follow each program's own feasibility semantics."""
    qb = np.stack([q0, 1.0 - q0], axis=1)
    if kind is ExponentKind.SPHERE_PACKING:
        out = np.full(rin.shape, math.inf)
        m = rin >= 0.0
        if m.any():
            out[m] = duals.sp_batch(qb[m], w, rin[m])
        return out
    if kind is ExponentKind.RANDOM_CODING:
        return duals.rc_batch(qb, w, rin)
    if kind is ExponentKind.CORRECT_DECODING:
        return duals.cd_batch(qb, w, rin)
    return ex_batch_binary(q0, w, rin)


def _inner_single(kind: ExponentKind, w: np.ndarray, qv: np.ndarray, rin: float) -> float:
    if kind is ExponentKind.SPHERE_PACKING:
        return duals.sp_value(qv, w, rin) if rin >= 0.0 else math.inf
    if kind is ExponentKind.RANDOM_CODING:
        return duals.rc_value(qv, w, rin)
    if kind is ExponentKind.CORRECT_DECODING:
        return duals.cd_value(qv, w, rin) if rin > 0.0 else 0.0
    return _ex_value(qv, w, rin)


def _div_binary(q0, px):
    return np.where(q0 > 0, q0 * np.log(np.where(q0 > 0, q0, 1) / px[0]), 0.0) + np.where(
        q0 < 1, (1.0 - q0) * np.log(np.where(q0 < 1, 1.0 - q0, 1) / px[1]), 0.0
    )


def _fixed_many_binary(kind: ExponentKind, px: np.ndarray, w: np.ndarray, rates: np.ndarray) -> np.ndarray:
    denom = GRID_DENOM[2]
    R = rates.shape[0]

    def level(q0_mat, cap):
        """Objective on a per-rate grid of q0 values.

        Types whose divergence cost alone already exceeds the incumbent value
        ``cap`` cannot win (the inner exponent is nonnegative) and are skipped.
        """
        flat_q0 = q0_mat.reshape(-1)
        flat_r = np.repeat(rates, q0_mat.shape[1])
        h = _eta(flat_q0) + _eta(1.0 - flat_q0)
        div = _div_binary(flat_q0, px)
        vals = np.full(flat_q0.shape, math.inf)
        live = div < np.repeat(cap, q0_mat.shape[1]) + 1e-12
        if live.any():
            vals[live] = div[live] + _inner_many_binary(kind, w, flat_q0[live], (h - flat_r)[live])
        return vals.reshape(q0_mat.shape)

    # incumbent from the source marginal itself (often optimal or close)
    q_marg = np.full(R, px[0])
    h_marg = float(_eta(px[0]) + _eta(px[1]))
    cap = _inner_many_binary(kind, w, q_marg, h_marg - rates)

    q0 = np.arange(denom + 1) / denom
    vals = level(np.broadcast_to(q0, (R, denom + 1)), cap)
    j = np.argmin(vals, axis=1)
    best = np.minimum(cap, np.take_along_axis(vals, j[:, None], 1)[:, 0])
    center = np.where(np.isfinite(vals.min(axis=1)), q0[j], px[0])
    width = np.full(R, 1.0 / denom)
    for _ in range(2):
        lo = np.clip(center - width, 0.0, 1.0)
        hi = np.clip(center + width, 0.0, 1.0)
        pts = np.linspace(0.0, 1.0, 41)
        q0_mat = lo[:, None] + (hi - lo)[:, None] * pts[None, :]
        vals = level(q0_mat, best)
        j = np.argmin(vals, axis=1)
        cand = np.take_along_axis(vals, j[:, None], 1)[:, 0]
        best = np.minimum(best, cand)
        center = np.where(np.isfinite(cand), np.take_along_axis(q0_mat, j[:, None], 1)[:, 0], center)
        width = (hi - lo) / 40.0
    return best


def _fixed_single_general(kind: ExponentKind, px: np.ndarray, w: np.ndarray, r: float, k: int) -> float:
    from scipy.optimize import minimize

    # the source marginal costs no divergence and is often the minimizer;
    # starting from it lets the divergence-ordered scan prune aggressively
    best = _inner_single(kind, w, px, float(entropy_vec(px) - r))
    best_node = px
    grid = simplex_grid(k, GRID_DENOM[k])
    with np.errstate(divide="ignore", invalid="ignore"):
        div = np.where(grid > 0, grid * (np.log(np.where(grid > 0, grid, 1)) - np.log(px)[None, :]), 0.0).sum(axis=1)
    ent = _eta(grid).sum(axis=1)
    order = np.argsort(div, kind="stable")
    for idx in order:
        if div[idx] >= best:
            break  # inner exponents are nonnegative: nothing better past here
        val = div[idx] + _inner_single(kind, w, grid[idx], float(ent[idx] - r))
        if val < best - 1e-15:
            best = val
            best_node = grid[idx]
    if not math.isfinite(best) or best <= 1e-12:
        return max(best, 0.0)

    def packed(x):
        qv = np.concatenate([x, [1.0 - x.sum()]])
        if (qv < -1e-12).any():
            return math.inf
        qv = np.clip(qv, 0.0, 1.0)
        qv = qv / qv.sum()
        rin = float(entropy_vec(qv) - r)
        dv = kl_divergence_vec(qv, px)
        if math.isinf(dv):
            return math.inf
        return dv + _inner_single(kind, w, qv, rin)

    res = minimize(packed, best_node[:-1], method="Nelder-Mead",
                   options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 140})
    return min(best, float(res.fun))


def fixed_exponent_many(kind: ExponentKind, src: JointSource, rates) -> np.ndarray:
    """Fixed-rate Slepian-Wolf exponent of the given kind on a rate grid."""
    rates = np.asarray(rates, dtype=float)
    if (rates < 0.0).any():
        raise ValueError("rates must be nonnegative")
    px = src.marginal_x.probs
    w = src.forward.rows
    if src.alphabet_x == 2 and w.shape[1] in (2, 3) and (w > 0).all():
        return np.maximum(_fixed_many_binary(kind, px, w, rates), 0.0)
    if src.alphabet_x > 3:
        raise ValueError("fixed-rate exponents support source alphabets up to size 3")
    return np.maximum([_fixed_single_general(kind, px, w, float(t), src.alphabet_x) for t in rates], 0.0)


def fixed_exponent(kind: ExponentKind, src: JointSource, r: float) -> ExtReal:
    """Fixed-rate Slepian-Wolf exponent: minimum over source types of the
    type's divergence cost plus the constant-composition exponent at the
    residual rate H(type) - r."""
    return ExtReal.of(float(fixed_exponent_many(kind, src, np.array([float(r)]))[0]))


# ---------------------------------------------------------------------------
# fixed-rate exponents: parametric (tilted) form
# ---------------------------------------------------------------------------


def fixed_sp_rate_ceiling(src: JointSource) -> float:
    """Largest rate with a finite fixed-rate sphere-packing exponent:
    max_y log |{x : P(x|y) > 0}| (a support count, no optimization)."""
    counts = (src.backward.rows > 0.0).sum(axis=1)
    return float(np.log(counts.max()))


def fixed_gallager(kind: ExponentKind, src: JointSource, r: float) -> ExtReal:
    """Fixed-rate sphere-packing / random-coding exponent in the one-parameter
    tilted form; agrees with the type form on the shared finite domain."""
    if kind not in (ExponentKind.SPHERE_PACKING, ExponentKind.RANDOM_CODING):
        raise ValueError("the tilted form covers the sphere-packing and random-coding kinds")
    if r < 0.0:
        raise ValueError("rate must be nonnegative")
    with np.errstate(divide="ignore"):
        lnP = np.where(src.joint > 0.0, np.log(np.where(src.joint > 0.0, src.joint, 1.0)), -np.inf)

    def J(alpha):
        return duals.source_tilt_batch(lnP, alpha) + (1.0 - alpha) / alpha * r

    if kind is ExponentKind.RANDOM_CODING:
        _, best = duals.golden_max(J, np.array([0.5]), np.array([1.0]))
        return ExtReal.of(max(0.0, float(best[0])))
    ceiling = fixed_sp_rate_ceiling(src)
    if r > ceiling + 1e-12:
        return INF
    _, best = duals.golden_max(J, np.array([duals.ALPHA_FLOOR]), np.array([1.0]))
    return ExtReal.of(max(0.0, float(best[0])))


def tilted_family(src: JointSource, rho: float) -> TiltedPair:
    """The tilted source pair at parameter rho >= 0.

    At rho = 0 this is the source itself (rate = H(X|Y), exponent 0); the
    rate grows with rho and at rho = 1 equals the fixed-rate critical rate.
    """
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    beta = 1.0 / (1.0 + rho)
    bx = src.backward.rows  # (M, K): P(x | y)
    py = src.marginal_y.probs
    tl = np.where(bx > 0.0, bx**beta, 0.0)
    norm = tl.sum(axis=1)
    rows = tl / norm[:, None]
    zy = py * norm ** (1.0 + rho)
    ym = zy / zy.sum()
    rate = float(sum(ym[y] * entropy_vec(rows[y]) for y in range(rows.shape[0])))
    joint_t = (rows * ym[:, None]).T  # (K, M)
    mask = joint_t > 0.0
    exponent = float((joint_t[mask] * (np.log(joint_t[mask]) - np.log(src.joint[mask]))).sum())
    return TiltedPair(
        rho=float(rho),
        y_marginal=Distribution(ym),
        x_given_y=Channel(rows),
        rate=rate,
        exponent=max(0.0, exponent),
    )


def fixed_critical_rate(src: JointSource) -> float:
    """Rate at which the fixed-rate random-coding and sphere-packing curves
    part ways: the tilted conditional entropy at rho = 1."""
    return tilted_family(src, 1.0).rate


# ---------------------------------------------------------------------------
# variable-rate bounds
# ---------------------------------------------------------------------------


class VariableRateContext:
    """Per-source precomputation for the variable-rate bound assembly."""

    def __init__(self, src: JointSource) -> None:
        self.src = src
        self.h_marginal = entropy_vec(src.marginal_x.probs)
        self.sw_limit = src.conditional_entropy_x_given_y()
        self.thresholds: RateThresholds = rate_thresholds(src.marginal_x, src.forward)
        try:
            self.line: StraightLine | None = straight_line_exponent(src.forward)
        except ValueError:
            self.line = None
        try:
            self.envelope_zero: float | None = ex_zero_rate_envelope(src.forward, src.marginal_x)
        except ValueError:
            self.envelope_zero = None


_CTX_CACHE: "weakref.WeakKeyDictionary[JointSource, VariableRateContext]" = weakref.WeakKeyDictionary()


def variable_context(src: JointSource) -> VariableRateContext:
    ctx = _CTX_CACHE.get(src)
    if ctx is None:
        ctx = VariableRateContext(src)
        _CTX_CACHE[src] = ctx
    return ctx


def variable_exponent_bounds(src: JointSource, r: float, ctx: VariableRateContext | None = None) -> VariableRateBounds:
    """Lower and upper bounds on the variable-rate reliability at rate r.

    lower    = max(expurgated, random coding) at composition P_X and residual
               rate H(P_X) - r (infinite in the zero-error regime)
    upper_sp = sphere packing at the same point, flagged at its exception rate
    upper_sl = straight-line bound, valid on its tangency window
    upper_env= concave envelope of the zero-rate expurgated exponent
    exact    = upper_sp on [H(X|Y), H(P_X) - critical rate], where the bounds
               provably coincide (1e-6 guard bands applied)
    """
    if r < 0.0:
        raise ValueError("rate must be nonnegative")
    if ctx is None:
        ctx = variable_context(src)
    px = src.marginal_x.probs
    w = src.forward.rows
    rin = ctx.h_marginal - r

    ex = _ex_value(px, w, rin) if rin >= 0.0 else math.inf
    rc = duals.rc_value(px, w, rin)
    lower = ExtReal.of(max(ex, rc))
    sp = duals.sp_value(px, w, rin) if rin >= 0.0 else math.inf
    upper_sp = ExtReal.of(sp)

    flag = None
    if abs(rin - ctx.thresholds.sp_rate_floor) <= 1e-9:
        flag = "sp-floor-exception"

    upper_sl = None
    if ctx.line is not None and 0.0 < rin <= ctx.line.tangent_rate + 1e-12:
        upper_sl = float(ctx.line.value(rin))
    upper_env = ctx.envelope_zero if rin > 0.0 else None

    exact = None
    guard = 1e-6
    if (ctx.sw_limit + guard <= r <= ctx.h_marginal - ctx.thresholds.critical_rate - guard
            or abs(r - ctx.sw_limit) <= guard) and flag is None:
        exact = upper_sp
    return VariableRateBounds(lower=lower, upper_sp=upper_sp, upper_sl=upper_sl,
                              upper_env=upper_env, exact=exact, flag=flag)


def zero_error_rate_window(src: JointSource) -> tuple[float, float]:
    """Rates bracketing the zero-error regime of variable-rate coding: the
    reliability is infinite strictly above the first component and finite
    strictly below the second."""
    ctx = variable_context(src)
    return (
        ctx.h_marginal - ctx.thresholds.ex_rate_floor,
        ctx.h_marginal - ctx.thresholds.sp_rate_floor,
    )


def second_order_coefficient(src: JointSource) -> ExtReal:
    """Curvature of the variable-rate reliability just above the Slepian-Wolf
    limit: lim E_v(H(X|Y)+r)/r^2.

    Infinite when the critical rate equals the mutual information (the
    degenerate case, detected exactly via the log-ratio constancy test) or
    when the conditional information variance vanishes.
    """
    w = src.forward.rows
    px = src.marginal_x.probs
    py = src.marginal_y.probs
    if degeneracy_predicate(src.marginal_x, src.forward):
        return INF
    mask = w > 0.0
    tau = np.where(mask, np.log(py)[None, :] - np.log(np.where(mask, w, 1.0)), 0.0)
    joint = px[:, None] * w
    second = float((joint * tau**2).sum())
    row_mean = (tau * w).sum(axis=1)
    denom = second - float((px * row_mean**2).sum())
    if denom <= 1e-14:
        return INF
    return ExtReal.of(0.5 / denom)


def max_correct_probability(src: JointSource, r: float) -> float:
    """Largest achievable correct-decoding probability of variable-rate codes
    at rates at or below the Slepian-Wolf limit: min(r / H(X|Y), 1)."""
    if r < 0.0:
        raise ValueError("rate must be nonnegative")
    return min(1.0, r / src.conditional_entropy_x_given_y())
