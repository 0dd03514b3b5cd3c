"""Channel-coding exponents for constant-composition and general block codes.

Covers the four exponent programs (sphere packing, random coding, expurgated,
correct decoding), their rate thresholds, the degeneracy test that decides
when the critical rate collapses onto the mutual information, the straight
line improvement at low rates, and the concave envelope of the zero-rate
expurgated exponent.

Inner minimizations over test channels run through the tilted duals in
:mod:`swexp.duals`; the expurgated coupling program is solved exactly in one
dimension for binary inputs and through its entropic-transport dual for
ternary inputs.  Outer optimizations over the input simplex use a
deterministic grid (step 1/200 binary, 1/60 ternary) with local refinement
and lexicographically-smallest tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog, minimize

from . import duals
from .extreal import INF, ExtReal
from .info_core import Channel, Distribution, entropy_vec, mutual_information_arr

GRID_DENOM = {2: 200, 3: 60}


class ExponentKind(Enum):
    SPHERE_PACKING = "sphere_packing"
    RANDOM_CODING = "random_coding"
    EXPURGATED = "expurgated"
    CORRECT_DECODING = "correct_decoding"


@dataclass(frozen=True)
class RateThresholds:
    """Rate landmarks of a fixed input distribution and channel (all nats).

    sp_rate_floor:  below it the sphere-packing program is infeasible (+inf)
    ex_rate_floor:  below it the expurgated program is infeasible (+inf)
    critical_rate:  smallest rate where the sphere-packing curve meets its
                    supporting line of slope -1
    crossover_rate: rate where the expurgated and random-coding exponents
                    exchange dominance
    capacity:       mutual information of the pair
    """

    sp_rate_floor: float
    ex_rate_floor: float
    critical_rate: float
    crossover_rate: float
    capacity: float

    def __post_init__(self) -> None:
        tol = 1e-7
        if not (-tol <= self.sp_rate_floor <= self.critical_rate + tol <= self.capacity + 2 * tol):
            raise ValueError(f"threshold ordering violated: {self}")
        if not (-tol <= self.crossover_rate <= self.capacity + tol):
            raise ValueError(f"crossover outside [0, capacity]: {self}")


@dataclass(frozen=True)
class DegeneracyReport:
    """Constancy of log w(y|x)/(qw)(y) over the support, per input letter and globally."""

    per_input: bool
    global_constant: bool
    spread_per_input: float
    spread_global: float


@dataclass(frozen=True)
class StraightLine:
    """Low-rate linear upper bound: intercept + slope * rate, tangent at tangent_rate."""

    intercept: float
    slope: float
    tangent_rate: float

    def value(self, r: float) -> float:
        return self.intercept + self.slope * r


# ---------------------------------------------------------------------------
# pairwise distances and the expurgated coupling program
# ---------------------------------------------------------------------------


def bhattacharyya_matrix(w: np.ndarray) -> np.ndarray:
    """Pairwise -log sum_y sqrt(w(y|x) w(y|x')); +inf on disjoint supports."""
    s = np.sqrt(w) @ np.sqrt(w).T
    s = np.minimum(s, 1.0)
    with np.errstate(divide="ignore"):
        d = -np.log(s)
    np.fill_diagonal(d, 0.0)
    return d


def bhattacharyya_distance(w: Channel, x: int, x_tilde: int) -> ExtReal:
    if not (0 <= x < w.in_size and 0 <= x_tilde < w.in_size):
        raise ValueError("input letters out of range")
    return ExtReal.of(float(bhattacharyya_matrix(w.rows)[x, x_tilde]))


def _eta(x):
    """-x log x with the 0 log 0 = 0 convention, elementwise."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, -x * np.log(np.where(x > 0.0, x, 1.0)), 0.0)


def _ipf_coupling(q: np.ndarray, allowed: np.ndarray, *, tol: float = 1e-14, max_iter: int = 50000):
    """Information projection of q (x) q onto couplings with both marginals q
    supported inside ``allowed``; the diagonal is always allowed so the
    polytope is never empty.  Returns (coupling, mutual information)."""
    idx = q > 0.0
    m = np.outer(q, q) * allowed
    for _ in range(max_iter):
        rows = m.sum(axis=1)
        m = m * np.where(idx, q / np.where(rows > 0, rows, 1.0), 0.0)[:, None]
        cols = m.sum(axis=0)
        m = m * np.where(idx, q / np.where(cols > 0, cols, 1.0), 0.0)[None, :]
        if np.abs(m.sum(axis=1) - q).max() < tol and np.abs(m.sum(axis=0) - q).max() < tol:
            break
    ref = np.outer(q, q)
    mask = m > 0.0
    info = float((m[mask] * (np.log(m[mask]) - np.log(ref[mask]))).sum())
    return m, max(0.0, info)


def expurgated_rate_floor(q: np.ndarray, w: np.ndarray) -> float:
    """Smallest rate with a finite expurgated exponent: the minimal mutual
    information among couplings with marginals q supported on finite-distance
    pairs."""
    d = bhattacharyya_matrix(w)
    _, info = _ipf_coupling(q, np.isfinite(d))
    return info


def _sinkhorn_entropic(q: np.ndarray, cost: np.ndarray, beta: float, *, tol: float = 1e-13, max_iter: int = 20000):
    """min <M, beta*cost> + D(M || q(x)q) over couplings with both marginals q.

    Classic scaling iteration on the Gibbs kernel; +inf costs give hard
    zeros.  Returns the achieved objective value."""
    idx = q > 0.0
    with np.errstate(over="ignore"):
        g = np.outer(q, q) * np.exp(np.where(np.isfinite(cost), -beta * cost, -np.inf))
    u = np.ones_like(q)
    v = np.ones_like(q)
    for _ in range(max_iter):
        gu = g.T @ u
        v = np.where(idx, q / np.where(gu > 0, gu, 1.0), 0.0)
        gv = g @ v
        u_new = np.where(idx, q / np.where(gv > 0, gv, 1.0), 0.0)
        if np.abs(u_new - u).max() <= tol * (1.0 + np.abs(u).max()):
            u = u_new
            break
        u = u_new
    m = u[:, None] * g * v[None, :]
    m = m / m.sum()
    ref = np.outer(q, q)
    mask = m > 0.0
    info = float((m[mask] * (np.log(m[mask]) - np.log(ref[mask]))).sum())
    pay = float((m[mask & np.isfinite(cost)] * cost[mask & np.isfinite(cost)]).sum())
    return beta * pay + info


def ex_batch_binary(q0: np.ndarray, w: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Expurgated exponent for binary inputs, vectorized over (q0, r).

    The marginal constraint leaves one free coupling parameter (the
    off-diagonal mass a); the program is an exact one-dimensional convex
    minimization over the feasible interval of a.
    """
    q0 = np.asarray(q0, dtype=float)
    r = np.asarray(r, dtype=float)
    d01 = float(bhattacharyya_matrix(w)[0, 1])
    h2 = _eta(q0) + _eta(1.0 - q0)
    if math.isinf(d01):
        return np.where(h2 <= r + 1e-12, 0.0, np.inf)

    def info(a):
        return np.maximum(2.0 * h2 - (_eta(q0 - a) + 2.0 * _eta(a) + _eta(1.0 - q0 - a)), 0.0)

    a_ind = q0 * (1.0 - q0)
    a_max = np.minimum(q0, 1.0 - q0)
    neg_r = r < -1e-15  # rate below zero: mutual-information constraint infeasible
    rr = np.maximum(r, 0.0)

    def bisect(lo, hi, increasing):
        lo = lo.copy()
        hi = hi.copy()
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            over = info(mid) > rr
            take_hi = over == increasing
            hi = np.where(take_hi, mid, hi)
            lo = np.where(take_hi, lo, mid)
        return 0.5 * (lo + hi)

    a_lo = np.where(info(np.zeros_like(q0)) <= rr, 0.0, bisect(np.zeros_like(q0), a_ind, increasing=False))
    a_hi = np.where(info(a_max) <= rr, a_max, bisect(a_ind, a_max, increasing=True))

    def psi(a):
        return 2.0 * a * d01 + info(a) - rr

    _, best = duals.golden_min(psi, a_lo, a_hi)
    out = np.maximum(best, 0.0)
    return np.where(neg_r, np.inf, out)


def _ex_value(q: np.ndarray, w: np.ndarray, r: float) -> float:
    k = int(np.count_nonzero(q))
    if q.size == 2:
        return float(ex_batch_binary(np.array([q[0]]), w, np.array([r]))[0])
    if q.size > 3:
        raise ValueError("expurgated program supports input alphabets up to size 3")
    if r < 0.0:
        return math.inf
    d = bhattacharyya_matrix(w)
    allowed = np.isfinite(d)
    m0, floor = _ipf_coupling(q, allowed)
    if r < floor - duals.FEAS_MARGIN:
        return math.inf
    if r <= floor + duals.FEAS_MARGIN:
        mask = (m0 > 0) & allowed
        return max(0.0, float((m0[mask] * d[mask]).sum()) + floor - r)

    def J(beta_arr):
        return np.array([(_sinkhorn_entropic(q, d, b) - r) / b for b in beta_arr])

    _, best = duals.golden_max(J, np.array([1e-6]), np.array([1.0]), iters=48)
    _ = k
    return max(0.0, float(best[0]))


# ---------------------------------------------------------------------------
# constant-composition exponents
# ---------------------------------------------------------------------------


def cc_exponent(kind: ExponentKind, q: Distribution, w: Channel, r: float) -> ExtReal:
    """Exponent of the given kind for constant composition codes of type q over w.

    Rates are in nats and must be nonnegative; values are the attained
    optima of the corresponding divergence programs.
    """
    if q.alphabet_size != w.in_size:
        raise ValueError("input distribution and channel dimensions differ")
    if r < 0.0:
        raise ValueError("rate must be nonnegative")
    qa, wa = q.probs, w.rows
    if kind is ExponentKind.SPHERE_PACKING:
        return ExtReal.of(duals.sp_value(qa, wa, r))
    if kind is ExponentKind.RANDOM_CODING:
        return ExtReal.of(duals.rc_value(qa, wa, r))
    if kind is ExponentKind.CORRECT_DECODING:
        return ExtReal.of(duals.cd_value(qa, wa, r))
    if kind is ExponentKind.EXPURGATED:
        return ExtReal.of(_ex_value(qa, wa, r))
    raise ValueError(f"unknown kind {kind!r}")


def sp_exception_rate(q: Distribution, w: Channel) -> float:
    """The finite-value rate floor of the sphere-packing program, where the
    converse bound is not claimed (values very near it should be flagged)."""
    return duals.augustin_information(q.probs, w.rows, 0.0)


def rate_thresholds(q: Distribution, w: Channel) -> RateThresholds:
    if q.alphabet_size != w.in_size:
        raise ValueError("input distribution and channel dimensions differ")
    qa, wa = q.probs, w.rows
    cap = mutual_information_arr(qa, wa)
    floor_sp = duals.augustin_information(qa, wa, 0.0)
    floor_ex = expurgated_rate_floor(qa, wa)

    crit = _critical_rate(qa, wa, floor_sp, cap)
    cross = _crossover_rate(qa, wa, cap)
    return RateThresholds(
        sp_rate_floor=floor_sp,
        ex_rate_floor=floor_ex,
        critical_rate=crit,
        crossover_rate=min(max(cross, 0.0), cap),
        capacity=cap,
    )


def cc_exponent_many(kind: ExponentKind, qa: np.ndarray, wa: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Constant-composition exponent of one (q, w) pair on a rate grid,
    batched through the binary-output engines whenever they apply."""
    rates = np.asarray(rates, dtype=float)
    if wa.shape[1] == 2 and (wa > 0.0).all() and kind is not ExponentKind.EXPURGATED:
        qb = np.broadcast_to(qa, (rates.shape[0], qa.shape[0]))
        fn = {
            ExponentKind.SPHERE_PACKING: duals.sp_batch,
            ExponentKind.RANDOM_CODING: duals.rc_batch,
            ExponentKind.CORRECT_DECODING: duals.cd_batch,
        }[kind]
        return fn(qb, wa, rates)
    if kind is ExponentKind.EXPURGATED and qa.size == 2:
        return ex_batch_binary(np.full(rates.shape, qa[0]), wa, rates)
    fn = {
        ExponentKind.SPHERE_PACKING: duals.sp_value,
        ExponentKind.RANDOM_CODING: duals.rc_value,
        ExponentKind.CORRECT_DECODING: duals.cd_value,
        ExponentKind.EXPURGATED: _ex_value,
    }[kind]
    return np.array([fn(qa, wa, float(t)) for t in rates])


def _critical_rate(qa, wa, floor_sp, cap) -> float:
    """Smallest rate where the sphere-packing curve has slope -1 (meets its
    supporting line of slope -1); equals capacity in the degenerate case."""
    lo = floor_sp + 1e-9
    if lo >= cap:
        return cap

    def phi(rr):
        return cc_exponent_many(ExponentKind.SPHERE_PACKING, qa, wa, rr) + rr

    left, right = lo, cap
    grid = np.linspace(left, right, 33)
    v = phi(grid)
    for _ in range(6):
        j = int(np.argmin(v))
        left = float(grid[max(0, j - 1)])
        right = float(grid[min(len(grid) - 1, j + 1)])
        grid = np.linspace(left, right, 33)
        v = phi(grid)
    j = int(np.argmin(v))
    r_star, f_star = float(grid[j]), float(v[j])
    # the curve may touch the slope -1 line along a segment; report its left end
    probe = max(lo, r_star - 64.0 * (grid[1] - grid[0]))
    if probe < r_star and phi(np.array([probe]))[0] <= f_star + 1e-13:
        left, right = lo, r_star
        for _ in range(60):
            mid = 0.5 * (left + right)
            if phi(np.array([mid]))[0] <= f_star + 1e-13:
                right = mid
            else:
                left = mid
        r_star = right
    return min(r_star, cap)


def _crossover_rate(qa, wa, cap) -> float:
    """Rate below which the expurgated exponent dominates the random-coding one."""

    def gap(rr):
        ex = cc_exponent_many(ExponentKind.EXPURGATED, qa, wa, rr)
        rc = cc_exponent_many(ExponentKind.RANDOM_CODING, qa, wa, rr)
        return np.where(np.isinf(ex), math.inf, ex - rc)

    left, right = 0.0, cap
    for _ in range(6):
        grid = np.linspace(left, right, 17)
        vals = gap(grid)
        idx = None
        for i in range(len(grid) - 1):
            if vals[i] >= 0.0 > vals[i + 1]:
                idx = i
                break
        if idx is None:
            return cap if vals[-1] >= 0.0 else 0.0
        left, right = float(grid[idx]), float(grid[idx + 1])
    return 0.5 * (left + right)


def degeneracy_report(q: Distribution, w: Channel, tol: float = 1e-9) -> DegeneracyReport:
    qa, wa = q.probs, w.rows
    out = qa @ wa
    support = (qa[:, None] * wa) > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log(wa) - np.log(out)[None, :]
    per_x_spread = 0.0
    for x in range(wa.shape[0]):
        row_vals = ratio[x, support[x]]
        if row_vals.size > 1:
            per_x_spread = max(per_x_spread, float(row_vals.max() - row_vals.min()))
    all_vals = ratio[support]
    glob_spread = float(all_vals.max() - all_vals.min()) if all_vals.size > 1 else 0.0
    return DegeneracyReport(
        per_input=per_x_spread <= tol,
        global_constant=glob_spread <= tol,
        spread_per_input=per_x_spread,
        spread_global=glob_spread,
    )


def degeneracy_predicate(q: Distribution, w: Channel, tol: float = 1e-9) -> bool:
    """True iff log w(y|x)/(qw)(y) is constant in y on the support, letter by
    letter; equivalently the critical rate equals the mutual information."""
    return degeneracy_report(q, w, tol).per_input


# ---------------------------------------------------------------------------
# outer optimization over the input simplex
# ---------------------------------------------------------------------------


def simplex_grid(k: int, denom: int) -> np.ndarray:
    """Lexicographically ordered grid {c/denom} on the probability simplex."""
    if k == 2:
        q0 = np.arange(denom + 1) / denom
        return np.stack([q0, 1.0 - q0], axis=1)
    if k == 3:
        pts = []
        for i in range(denom + 1):
            for j in range(denom + 1 - i):
                pts.append((i / denom, j / denom, (denom - i - j) / denom))
        return np.asarray(pts)
    raise ValueError("simplex grid supports alphabets of size 2 or 3")


def _binary_batch_eval(kind: ExponentKind, w: np.ndarray, q0: np.ndarray, r: float) -> np.ndarray:
    qb = np.stack([q0, 1.0 - q0], axis=1)
    rb = np.full(q0.shape, float(r))
    if kind is ExponentKind.EXPURGATED:
        return ex_batch_binary(q0, w, rb)
    if kind is ExponentKind.SPHERE_PACKING and (w > 0).all() and w.shape[1] == 2:
        return duals.sp_batch(qb, w, rb)
    if kind is ExponentKind.RANDOM_CODING and (w > 0).all() and w.shape[1] == 2:
        return duals.rc_batch(qb, w, rb)
    if kind is ExponentKind.CORRECT_DECODING and (w > 0).all() and w.shape[1] == 2:
        return duals.cd_batch(qb, w, rb)
    fn = {
        ExponentKind.SPHERE_PACKING: duals.sp_value,
        ExponentKind.RANDOM_CODING: duals.rc_value,
        ExponentKind.CORRECT_DECODING: duals.cd_value,
    }[kind]
    return np.array([fn(qv, w, float(rv)) for qv, rv in zip(qb, rb)])


def _optimize_binary(f_batch, maximize: bool, denom: int = GRID_DENOM[2], zooms: int = 2, zoom_pts: int = 41):
    """Deterministic grid + zoom refinement over binary input distributions.

    f_batch maps an array of q0 values to objective values; ties resolve to
    the lexicographically smallest grid point (argmin/argmax keep the first).
    """
    sign = -1.0 if maximize else 1.0
    q0 = np.arange(denom + 1) / denom
    vals = sign * f_batch(q0)
    best = int(np.argmin(vals))
    center, width = q0[best], 1.0 / denom
    best_q, best_v = float(q0[best]), float(vals[best])
    for _ in range(zooms):
        lo, hi = max(0.0, center - width), min(1.0, center + width)
        q0 = np.linspace(lo, hi, zoom_pts)
        vals = sign * f_batch(q0)
        j = int(np.argmin(vals))
        if vals[j] < best_v:
            best_q, best_v = float(q0[j]), float(vals[j])
        center, width = q0[j], (hi - lo) / (zoom_pts - 1)
    return best_q, sign * best_v


def _optimize_ternary(f, maximize: bool, denom: int = GRID_DENOM[3]):
    """Grid + Nelder-Mead refinement over ternary input distributions."""
    sign = -1.0 if maximize else 1.0
    grid = simplex_grid(3, denom)
    vals = np.array([sign * f(qv) for qv in grid])
    j = int(np.argmin(vals))
    best_q, best_v = grid[j], float(vals[j])

    def packed(x):
        q0, q1 = x
        q2 = 1.0 - q0 - q1
        if q0 < -1e-12 or q1 < -1e-12 or q2 < -1e-12:
            return math.inf
        qv = np.clip(np.array([q0, q1, q2]), 0.0, 1.0)
        qv = qv / qv.sum()
        return sign * f(qv)

    res = minimize(packed, best_q[:2], method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": 1e-11, "maxiter": 400})
    if res.fun < best_v:
        q0, q1 = res.x
        qv = np.clip(np.array([q0, q1, 1.0 - q0 - q1]), 0.0, 1.0)
        best_q, best_v = qv / qv.sum(), float(res.fun)
    return best_q, sign * best_v


def general_exponent(kind: ExponentKind, w: Channel, r: float) -> ExtReal:
    """Block-code exponent: optimum of the constant-composition exponent over
    the input simplex (maximum for the error kinds, minimum for correct
    decoding)."""
    if r < 0.0:
        raise ValueError("rate must be nonnegative")
    wa = w.rows
    maximize = kind is not ExponentKind.CORRECT_DECODING
    if w.in_size == 2:
        _, val = _optimize_binary(lambda q0: _binary_batch_eval(kind, wa, q0, r), maximize)
        return ExtReal.of(val)
    if w.in_size == 3:
        fn = {
            ExponentKind.SPHERE_PACKING: duals.sp_value,
            ExponentKind.RANDOM_CODING: duals.rc_value,
            ExponentKind.CORRECT_DECODING: duals.cd_value,
            ExponentKind.EXPURGATED: _ex_value,
        }[kind]
        _, val = _optimize_ternary(lambda qv: fn(qv, wa, r), maximize)
        return ExtReal.of(val)
    raise ValueError("general exponents are certified for input alphabets up to size 3")


def capacity(w: Channel) -> float:
    """max_q I(q, w) over the input simplex."""
    wa = w.rows
    if w.in_size == 2:
        _, val = _optimize_binary(
            lambda q0: np.array([mutual_information_arr(np.array([t, 1 - t]), wa) for t in q0]),
            maximize=True,
        )
    elif w.in_size == 3:
        _, val = _optimize_ternary(lambda qv: mutual_information_arr(qv, wa), maximize=True)
    else:
        raise ValueError("capacity search supports input alphabets up to size 3")
    return val


def sp_rate_floor_channel(w: Channel) -> float:
    """Rate below which the channel-level sphere-packing exponent is infinite:
    -log min_q max_y sum_{x: w(y|x)>0} q(x), solved as a linear program."""
    wa = w.rows
    k, m = wa.shape
    # variables: q_0..q_{k-1}, t
    c = np.zeros(k + 1)
    c[-1] = 1.0
    a_ub = np.zeros((m, k + 1))
    for y in range(m):
        a_ub[y, :k] = (wa[:, y] > 0.0).astype(float)
        a_ub[y, -1] = -1.0
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0.0, None)] * k + [(0.0, 1.0)], method="highs")
    if not res.success:
        raise RuntimeError(f"rate-floor LP failed: {res.message}")
    return max(0.0, float(-math.log(res.x[-1])))


def general_exponent_many(kind: ExponentKind, w: Channel, rates: np.ndarray) -> np.ndarray:
    """Block-code exponent on a whole rate grid; binary inputs run fully
    batched (one flattened evaluation per zoom level)."""
    rates = np.asarray(rates, dtype=float)
    wa = w.rows
    if w.in_size != 2:
        return np.array([float(general_exponent(kind, w, float(t))) for t in rates])
    maximize = kind is not ExponentKind.CORRECT_DECODING
    sign = -1.0 if maximize else 1.0
    denom = GRID_DENOM[2]
    q0 = np.arange(denom + 1) / denom
    R, Q = rates.shape[0], q0.shape[0]

    def eval_grid(q0_mat):  # (R, Qpts) of q0 values
        flatq = q0_mat.reshape(-1)
        flatr = np.repeat(rates, q0_mat.shape[1])
        return _binary_batch_eval_vec(kind, wa, flatq, flatr).reshape(q0_mat.shape)

    q0_mat = np.broadcast_to(q0, (R, Q))
    vals = sign * eval_grid(q0_mat)
    best = np.take_along_axis(vals, np.argmin(vals, axis=1)[:, None], 1)[:, 0]
    center = q0[np.argmin(vals, axis=1)]
    width = 1.0 / denom
    for _ in range(2):
        lo = np.clip(center - width, 0.0, 1.0)
        hi = np.clip(center + width, 0.0, 1.0)
        pts = np.linspace(0.0, 1.0, 41)
        q0_mat = lo[:, None] + (hi - lo)[:, None] * pts[None, :]
        vals = sign * eval_grid(q0_mat)
        j = np.argmin(vals, axis=1)
        cand = np.take_along_axis(vals, j[:, None], 1)[:, 0]
        best = np.minimum(best, cand)
        center = np.take_along_axis(q0_mat, j[:, None], 1)[:, 0]
        width = (hi - lo) / 40.0
    return sign * best


def _binary_batch_eval_vec(kind: ExponentKind, w: np.ndarray, q0: np.ndarray, r: np.ndarray) -> np.ndarray:
    qb = np.stack([q0, 1.0 - q0], axis=1)
    if kind is ExponentKind.EXPURGATED:
        return ex_batch_binary(q0, w, r)
    if (w > 0).all() and w.shape[1] == 2:
        fn = {
            ExponentKind.SPHERE_PACKING: duals.sp_batch,
            ExponentKind.RANDOM_CODING: duals.rc_batch,
            ExponentKind.CORRECT_DECODING: duals.cd_batch,
        }[kind]
        return fn(qb, w, r)
    fn = {
        ExponentKind.SPHERE_PACKING: duals.sp_value,
        ExponentKind.RANDOM_CODING: duals.rc_value,
        ExponentKind.CORRECT_DECODING: duals.cd_value,
    }[kind]
    return np.array([fn(qv, w, float(rv)) for qv, rv in zip(qb, r)])


def straight_line_exponent(w: Channel) -> StraightLine:
    """Smallest linear function through (0, expurgated exponent at rate 0)
    touching the channel sphere-packing curve; rejects channels whose
    zero-rate expurgated exponent is infinite.

    The tangent line of a convex curve lies below it, so the line improves on
    the sphere-packing upper bound over (0, tangent_rate]."""
    e0 = general_exponent(ExponentKind.EXPURGATED, w, 0.0)
    if not e0.finite:
        raise ValueError("zero-rate expurgated exponent is infinite; straight line undefined")
    e0v = float(e0)
    cap = capacity(w)
    floor = sp_rate_floor_channel(w)

    def chord(rr):
        esp = general_exponent_many(ExponentKind.SPHERE_PACKING, w, rr)
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(esp), (esp - e0v) / rr, math.inf)

    lo = max(floor + 1e-9, 1e-6 * cap)
    hi = cap
    j = 0
    for _ in range(5):
        grid = np.linspace(lo, hi, 25)
        cv = chord(grid)
        j = int(np.argmin(cv))
        lo2 = grid[max(0, j - 1)]
        hi2 = grid[min(len(grid) - 1, j + 1)]
        lo, hi = float(lo2), float(hi2)
    grid = np.linspace(lo, hi, 25)
    cv = chord(grid)
    j = int(np.argmin(cv))
    return StraightLine(intercept=e0v, slope=float(cv[j]), tangent_rate=float(grid[j]))


def ex_zero_rate_envelope(w: Channel, q: Distribution) -> float:
    """Concave upper envelope, over input distributions, of the zero-rate
    expurgated exponent, evaluated at q.  Computed on a simplex grid for
    ternary inputs; binary inputs return the (already concave) value itself.
    """
    if q.alphabet_size != w.in_size:
        raise ValueError("input distribution and channel dimensions differ")
    d = bhattacharyya_matrix(w.rows)
    if not np.isfinite(d).all():
        raise ValueError("envelope requires finite pairwise distances")
    if w.in_size == 2:
        return float(q.probs @ d @ q.probs)
    if w.in_size != 3:
        raise ValueError("envelope supports input alphabets up to size 3")
    grid = simplex_grid(3, GRID_DENOM[3])
    vals = np.einsum("ni,ij,nj->n", grid, d, grid)
    # largest convex combination of grid values matching q: a 3-constraint LP
    a_eq = np.vstack([grid.T, np.ones(len(grid))])
    b_eq = np.array([q[0], q[1], q[2], 1.0])
    res = linprog(-vals, A_eq=a_eq, b_eq=b_eq, bounds=[(0.0, None)] * len(grid), method="highs")
    if not res.success:
        raise RuntimeError(f"envelope LP failed: {res.message}")
    return float(-res.fun)
