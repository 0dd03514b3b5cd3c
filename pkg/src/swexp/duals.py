"""Tilted-parameter dual engines for the constrained divergence programs.

Each exponent program handled here is a convex minimization over test
channels.  Lagrangian duality (rigorous by Sion's minimax theorem: the
payoffs are convex in the channel, affine in the multiplier, and the channel
polytope is compact) turns every one of them into a one-dimensional concave
maximization over a tilt parameter ``rho``:

* sphere packing   ``min {D(V||W|Q) : I(Q,V) <= R}``
            =  sup_{rho >= 0} rho * (I_a(Q,W) - R),    a = 1/(1+rho)
* random coding    ``min_V D(V||W|Q) + |I(Q,V)-R|+``
            =  max_{0<=rho<=1} rho * (I_a(Q,W) - R),   a = 1/(1+rho)
* correct decoding ``min_V D(V||W|Q) + |R-I(Q,V)|+``
            =  max_{0<=rho<=1} rho * (R - I_a(Q,W)),   a = 1/(1-rho)

where ``I_a`` is the order-``a`` Augustin information
``min_s sum_x Q(x) D_a(W(.|x) || s)`` over output distributions ``s``.  The
inner problem is convex in ``s`` for every ``a`` (Renyi divergence is convex
in its second argument), and the limit a -> 0 recovers the support-
constrained minimum of mutual information, i.e. the finite-value rate floor
of the sphere-packing program.

The search runs in the variable ``a = 1/(1+rho)`` so that deeply tilted
optima (rates just above the floor) stay resolvable; values are evaluated
through ``S(a) = sum_x Q(x) log A_x(s*)`` with
``A_x(s) = sum_y W(y|x)^a s(y)^(1-a)``, computed in shifted log space so
extreme tilts cannot overflow.

Everything in this module works on raw numpy arrays; the public exponent API
with its container types lives in :mod:`swexp.channel`.
"""

from __future__ import annotations

import math

import numpy as np

from .info_core import entropy_vec, kl_divergence_vec, mutual_information_arr

ALPHA_FLOOR = 1e-9
RHO_CEIL = 1.0 - 1e-12
FEAS_MARGIN = 1e-10  # infeasibility is decided by this rate margin, never by value size


# ---------------------------------------------------------------------------
# batched golden-section search (vectorized over independent 1-D problems)
# ---------------------------------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, iters: int = 56):
    """Vectorized golden-section maximization of a unimodal family.

    ``f`` maps an array of probe points (one per problem) to an array of
    values.  Returns (argmax, max) arrays.  Plateaus are fine: the bracket
    simply settles inside them.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(iters):
        move_up = f1 < f2
        lo = np.where(move_up, x1, lo)
        hi = np.where(move_up, hi, x2)
        x1_new = np.where(move_up, x2, hi - _INVPHI * (hi - lo))
        x2_new = np.where(move_up, lo + _INVPHI * (hi - lo), x1)
        f_probe = f(np.where(move_up, x2_new, x1_new))
        f1, f2 = np.where(move_up, f2, f_probe), np.where(move_up, f_probe, f1)
        x1, x2 = x1_new, x2_new
    xbest = np.where(f1 >= f2, x1, x2)
    fbest = np.maximum(f1, f2)
    return xbest, fbest


def golden_min(f, lo, hi, iters: int = 56):
    x, v = golden_max(lambda t: -f(t), lo, hi, iters)
    return x, -v


# ---------------------------------------------------------------------------
# order-a output-center problems, binary output (safeguarded Newton, batched)
# ---------------------------------------------------------------------------


def _tilted_terms_m2(q, lnw, alpha, s0):
    """Shifted-exponent pieces of A_x at output distribution (s0, 1-s0).

    q: (B,K) weights, lnw: (K,2) log-channel (-inf allowed), alpha,s0: (B,).
    Returns (lnA, r0, r1) with lnA_x of shape (B,K) and r_j = exp(t_j - max t)
    the relative sizes of the two terms of A_x.
    """
    a = alpha[:, None]
    ls0 = np.log(s0)[:, None]
    ls1 = np.log1p(-s0)[:, None]
    t0 = a * lnw[None, :, 0] + (1.0 - a) * ls0
    t1 = a * lnw[None, :, 1] + (1.0 - a) * ls1
    tm = np.maximum(t0, t1)
    tm = np.where(np.isfinite(tm), tm, 0.0)  # both terms vanished: row dead (q must be 0 there)
    r0 = np.exp(t0 - tm)
    r1 = np.exp(t1 - tm)
    lnA = tm + np.log(r0 + r1)
    return lnA, r0, r1


def tilted_log_norm_m2(q, lnw, alpha, iters: int = 40):
    """S(a) = sum_x q_x log A_x at the optimal binary output center.

    Solves the stationarity condition of the convex inner problem with a
    bracket-safeguarded Newton iteration, vectorized across the batch;
    converged elements drop out of the working set.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    alpha = np.asarray(alpha, dtype=float)
    B = alpha.shape[0]
    w = np.exp(lnw)
    s_full = np.clip(q @ w[:, 0], 1e-9, 1.0 - 1e-9)
    idx = np.arange(B)
    s = s_full.copy()
    lo = np.full(B, 1e-15)
    hi = np.full(B, 1.0 - 1e-15)
    qs, a = q, alpha
    for _ in range(iters):
        s1 = 1.0 - s
        _, r0, r1 = _tilted_terms_m2(qs, lnw, a, s)
        rel = r0 + r1
        diff = (r0 / s[:, None] - r1 / s1[:, None]) / rel
        # u = h'(s) = -sum_x q_x (a_x - b_x)/A_x in relative units
        u = -np.einsum("bk,bk->b", qs, diff)
        curv = np.einsum(
            "bk,bk->b",
            qs,
            a[:, None] * (r0 / s[:, None] ** 2 + r1 / s1[:, None] ** 2) / rel
            + (1.0 - a)[:, None] * diff**2,
        )
        lo = np.where(u < 0.0, s, lo)
        hi = np.where(u < 0.0, hi, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = u / curv
        s_new = s - step
        bad = ~np.isfinite(s_new) | (s_new <= lo) | (s_new >= hi)
        s_new = np.where(bad, 0.5 * (lo + hi), s_new)
        done = (hi - lo < 1e-13) | (np.abs(s_new - s) < 1e-14)
        s = s_new
        if done.any():
            s_full[idx] = s
            keep = ~done
            if not keep.any():
                break
            idx, s, lo, hi, qs, a = idx[keep], s[keep], lo[keep], hi[keep], qs[keep], a[keep]
    else:
        s_full[idx] = s
    lnA, _, _ = _tilted_terms_m2(q, lnw, alpha, s_full)
    return np.einsum("bk,bk->b", q, lnA)


def _pair_terms(lnw_i, lnw_j, lnC, alpha, t, mass):
    """Shifted-exponent pieces of A_x = C_x + w_i^a t^(1-a) + w_j^a (mass-t)^(1-a)."""
    a = alpha[:, None]
    with np.errstate(divide="ignore"):
        ti = a * lnw_i[None, :] + (1.0 - a) * np.log(t)[:, None]
        tj = a * lnw_j[None, :] + (1.0 - a) * np.log(mass - t)[:, None]
    tm = np.maximum(np.maximum(ti, tj), lnC)
    tm = np.where(np.isfinite(tm), tm, 0.0)
    ri = np.exp(ti - tm)
    rj = np.exp(tj - tm)
    rC = np.exp(lnC - tm)
    lnA = tm + np.log(ri + rj + rC)
    return lnA, ri, rj, rC


def _pair_newton(q, lnw_i, lnw_j, lnC, alpha, massf, iters: int = 46):
    """Minimize the tilted objective over the split of ``mass`` between two
    output letters, all other letters fixed (their contribution enters as the
    per-row constant lnC).  Returns (S, t*) with S = sum_x q_x log A_x.

    The bracketing sign of the derivative is taken in log space: the offset
    term can dominate A_x so strongly that the pair contributions underflow,
    and a sign lost to underflow would corrupt the bracket.
    """
    B = alpha.shape[0]
    t_full = 0.5 * massf
    idx = np.arange(B)
    t, lo, hi = t_full.copy(), np.zeros(B), massf.copy()
    qs, a, lC, mass = q, alpha, lnC, massf
    with np.errstate(divide="ignore"):
        lnq_full = np.where(q > 0.0, np.log(np.where(q > 0.0, q, 1.0)), -np.inf)
    lnq = lnq_full
    for _ in range(iters):
        aa = a[:, None]
        with np.errstate(divide="ignore"):
            ti = aa * lnw_i[None, :] + (1.0 - aa) * np.log(t)[:, None]
            tj = aa * lnw_j[None, :] + (1.0 - aa) * np.log(mass - t)[:, None]
        tm = np.maximum(np.maximum(ti, tj), lC)
        tm = np.where(np.isfinite(tm), tm, 0.0)
        ri, rj, rC = np.exp(ti - tm), np.exp(tj - tm), np.exp(lC - tm)
        rel = ri + rj + rC
        lnA = tm + np.log(rel)
        # sign of h'(t) via log-space comparison of the two flow terms
        zi = ti + lnq - lnA
        zj = tj + lnq - lnA
        zim = zi.max(axis=1, keepdims=True)
        zjm = zj.max(axis=1, keepdims=True)
        lnFi = zim[:, 0] + np.log(np.exp(zi - zim).sum(axis=1)) - np.log(t)
        lnFj = zjm[:, 0] + np.log(np.exp(zj - zjm).sum(axis=1)) - np.log(mass - t)
        root_right = lnFi > lnFj  # h'(t) < 0
        ai = ri / t[:, None]
        bj = rj / (mass - t)[:, None]
        diff = (ai - bj) / rel
        u = -np.einsum("bk,bk->b", qs, diff)
        curv = np.einsum(
            "bk,bk->b",
            qs,
            aa * (ai / t[:, None] + bj / (mass - t)[:, None]) / rel
            + (1.0 - aa) * diff**2,
        )
        lo = np.where(root_right, t, lo)
        hi = np.where(root_right, hi, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_new = t - u / curv
        bad = ~np.isfinite(t_new) | (t_new <= lo) | (t_new >= hi) | (u == 0.0)
        t_new = np.where(bad, 0.5 * (lo + hi), t_new)
        done = (hi - lo < 1e-13 * np.maximum(mass, 1e-12)) | ((np.abs(t_new - t) < 1e-15) & ~bad)
        t = t_new
        if done.any():
            t_full[idx] = t
            keep = ~done
            if not keep.any():
                break
            idx, t, lo, hi = idx[keep], t[keep], lo[keep], hi[keep]
            qs, a, lC, mass, lnq = qs[keep], a[keep], lC[keep], mass[keep], lnq[keep]
    else:
        t_full[idx] = t
    lnA, _, _, _ = _pair_terms(lnw_i, lnw_j, lnC, alpha, t_full, massf)
    return np.einsum("bk,bk->b", q, lnA), t_full


def tilted_log_norm_m3(q, lnw, alpha, golden_iters: int = 36):
    """S(a) at the optimal ternary output center, batched.

    Nested reduction: golden search over the mass of the first output letter
    (the partially minimized objective is convex in it), Newton on the split
    of the rest.  Valid for every positive tilt order, however extreme.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    alpha = np.asarray(alpha, dtype=float)
    sign = np.where(alpha < 1.0, -1.0, 1.0)  # h = S/(a-1): minimize h <=> sign * S

    def S_at(s0):
        s0c = np.clip(s0, 1e-12, 1.0 - 1e-12)
        with np.errstate(divide="ignore"):
            lnC = alpha[:, None] * lnw[None, :, 0] + (1.0 - alpha)[:, None] * np.log(s0c)[:, None]
        S, _ = _pair_newton(q, lnw[:, 1], lnw[:, 2], lnC, alpha, 1.0 - s0c)
        return S

    lo = np.full(alpha.shape, 1e-12)
    hi = np.full(alpha.shape, 1.0 - 1e-12)
    _, best = golden_max(lambda s0: -sign * S_at(s0), lo, hi, golden_iters)
    return -sign * best


def _tilted_fixpoint_batch(q, lnw, alpha, iters: int = 400, tol: float = 1e-14):
    """Arimoto-style fixed point for the output center, batched; valid for
    tilt orders below one.  Returns (S, converged)."""
    B, K = q.shape
    M = lnw.shape[1]
    w = np.exp(lnw)
    s = np.clip(q @ w, 1e-300, None)
    s = s / s.sum(axis=1, keepdims=True)
    ln_s = np.log(s)
    a = alpha[:, None, None]
    lnq = np.where(q > 0.0, np.log(np.where(q > 0.0, q, 1.0)), -np.inf)
    converged = np.zeros(B, dtype=bool)
    for _ in range(iters):
        t = a * lnw[None, :, :] + (1.0 - a) * ln_s[:, None, :]
        tm = t.max(axis=2, keepdims=True)
        lnA = tm[:, :, 0] + np.log(np.exp(t - tm).sum(axis=2))
        z = a * lnw[None, :, :] - lnA[:, :, None] + lnq[:, :, None]
        zm = z.max(axis=1, keepdims=True)
        zm = np.where(np.isfinite(zm), zm, 0.0)
        lnB = zm[:, 0, :] + np.log(np.exp(z - zm).sum(axis=1))
        ln_s_new = lnB / alpha[:, None]
        nm = ln_s_new.max(axis=1, keepdims=True)
        ln_s_new = ln_s_new - (nm + np.log(np.exp(ln_s_new - nm).sum(axis=1, keepdims=True)))
        delta = np.abs(np.exp(ln_s_new) - np.exp(ln_s)).max(axis=1)
        converged = delta < tol
        ln_s = ln_s_new
        if converged.all():
            break
    t = a * lnw[None, :, :] + (1.0 - a) * ln_s[:, None, :]
    tm = t.max(axis=2, keepdims=True)
    lnA = tm[:, :, 0] + np.log(np.exp(t - tm).sum(axis=2))
    return np.einsum("bk,bk->b", q, lnA), converged


def tilted_log_norm(q, lnw, alpha):
    """S(a) = sum_x q_x log A_x at the optimal output center; output size 2 or 3."""
    if lnw.shape[1] == 2:
        return tilted_log_norm_m2(q, lnw, alpha)
    if lnw.shape[1] == 3:
        below = alpha < 1.0
        out = np.empty(alpha.shape[0])
        if below.any():
            S, ok = _tilted_fixpoint_batch(q[below], lnw, alpha[below])
            if not ok.all():
                bad = np.flatnonzero(below)[~ok]
                S[~ok] = tilted_log_norm_m3(q[bad], lnw, alpha[bad])
            out[below] = S
        if (~below).any():
            out[~below] = tilted_log_norm_m3(q[~below], lnw, alpha[~below])
        return out
    raise ValueError("batched tilt engine supports output alphabets of size 2 or 3")


# ---------------------------------------------------------------------------
# general output alphabets (scalar): fixed point for a < 1, descent for a > 1
# ---------------------------------------------------------------------------


def _S_general(q, w, alpha: float) -> float:
    """sum_x q_x log A_x at the optimal output center, any output size."""
    lnw = np.where(w > 0.0, np.log(np.where(w > 0.0, w, 1.0)), -np.inf)
    M = w.shape[1]
    if M == 1:
        return 0.0
    if M <= 3:
        return float(tilted_log_norm(q[None, :], lnw, np.array([float(alpha)]))[0])
    if alpha < 1.0:
        S, ok = _tilted_fixpoint_batch(q[None, :], lnw, np.array([float(alpha)]), iters=5000)
        if not ok.all():
            raise RuntimeError("tilted fixed point failed to converge")
        return float(S[0])
    raise ValueError("tilt orders above one support output alphabets up to size 3")


def _lse(v: np.ndarray) -> float:
    m = v.max()
    return float(m + np.log(np.exp(v - m).sum()))


def _prune(q, w):
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    keep_x = q > 0.0
    q = q[keep_x]
    w = w[keep_x]
    keep_y = w.sum(axis=0) > 0.0
    return q / q.sum(), w[:, keep_y]


def min_info_dominated(q, w, *, tol: float = 1e-14, max_iter: int = 20000) -> float:
    """min { I(q, V) : V(y|x) = 0 wherever w(y|x) = 0 }.

    Alternating minimization over (V, output center); this is the finite-value
    rate floor of the sphere-packing program and the a -> 0 Augustin limit.
    """
    q, w = _prune(q, w)
    supp = w > 0.0
    if supp.all():
        return 0.0
    s = np.full(w.shape[1], 1.0 / w.shape[1])
    prev = math.inf
    val = math.inf
    for _ in range(max_iter):
        mass = supp @ s  # s(B_x)
        val = float(-(q * np.log(mass)).sum())
        v_rows = supp * s[None, :] / mass[:, None]
        s = q @ v_rows
        if prev - val < tol:
            break
        prev = val
    return max(0.0, val)


def augustin_information(q, w, alpha: float) -> float:
    """Order-``alpha`` Augustin information of input ``q`` and channel ``w`` (nats)."""
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    q, w = _prune(q, w)
    if w.shape[1] == 1 or q.size == 1:
        return 0.0
    if alpha == 0.0:
        return min_info_dominated(q, w)
    if abs(alpha - 1.0) < 1e-14:
        return mutual_information_arr(q, w)
    return _S_general(q, w, alpha) / (alpha - 1.0)


# ---------------------------------------------------------------------------
# batched dual values, binary output (used by the grid engines)
# ---------------------------------------------------------------------------


def _mutual_info_batch(q, w):
    joint = q[:, :, None] * w[None, :, :]
    out = joint.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log(w)[None, :, :] - np.log(out)[:, None, :]
    term = joint * np.where(joint > 0.0, ratio, 0.0)
    return np.maximum(term.sum(axis=(1, 2)), 0.0)


def rank_one_sp_batch(q, lnw):
    """E_sp at rate exactly zero: -log sum_y prod_x w(y|x)^q(x) (batched)."""
    g = q @ lnw  # (B, M)
    gm = g.max(axis=1, keepdims=True)
    return -(gm[:, 0] + np.log(np.exp(g - gm).sum(axis=1)))


def sp_batch(q, w, r, *, golden_iters: int = 48):
    """Sphere-packing exponent, batched; strictly positive w, binary output.

    q: (B,K), w: (K,M) strictly positive with M in {2,3}, r: (B,)
    nonnegative rates.  The rate floor is zero here, so every value is finite.
    """
    assert (np.asarray(w) > 0.0).all(), "sp_batch requires a strictly positive channel"
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    lnw = np.log(w)
    vals = np.zeros(r.shape[0])
    cap = _mutual_info_batch(q, w)
    active = r < cap - 1e-15
    zero_rate = active & (r == 0.0)
    if zero_rate.any():
        vals[zero_rate] = rank_one_sp_batch(q[zero_rate], lnw)
    run = active & ~zero_rate
    if run.any():
        qs, rs = q[run], r[run]

        def J(alpha):
            S = tilted_log_norm(qs, lnw, alpha)
            return -(S + (1.0 - alpha) * rs) / alpha

        _, best = golden_max(J, np.full(rs.shape, ALPHA_FLOOR), np.ones(rs.shape), golden_iters)
        vals[run] = np.maximum(best, 0.0)
    return vals


def rc_batch(q, w, r, *, golden_iters: int = 48):
    """Random-coding exponent, batched; output alphabets of size 2 or 3.

    Valid for any real rates (negative rates raise the value by |r|).
    """
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        lnw = np.where(w > 0.0, np.log(np.where(w > 0.0, w, 1.0)), -np.inf)
    vals = np.zeros(r.shape[0])
    cap = _mutual_info_batch(q, w)
    run = r < cap - 1e-15
    if run.any():
        qs, rs = q[run], r[run]

        def J(alpha):
            S = tilted_log_norm(qs, lnw, alpha)
            return -(S + (1.0 - alpha) * rs) / alpha

        _, best = golden_max(J, np.full(rs.shape, 0.5), np.ones(rs.shape), golden_iters)
        vals[run] = np.maximum(best, 0.0)
    return vals


def cd_batch(q, w, r, *, golden_iters: int = 48):
    """Correct-decoding exponent, batched; output alphabets of size 2 or 3."""
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        lnw = np.where(w > 0.0, np.log(np.where(w > 0.0, w, 1.0)), -np.inf)
    vals = np.zeros(r.shape[0])
    cap = _mutual_info_batch(q, w)
    run = r > cap + 1e-15
    if run.any():
        qs, rs = q[run], r[run]
        # the tilted information grows with the tilt order, so once it reaches
        # the rate the dual objective has gone nonpositive: shrink the bracket
        tail = 1.0 - 1e-4
        hi = np.full(rs.shape, tail)
        open_hi = np.ones(rs.shape, dtype=bool)
        for rho0 in (0.25, 0.5, 0.75, 0.9, 0.97, 0.99):
            if not open_hi.any():
                break
            alpha0 = 1.0 / (1.0 - rho0)
            S0 = tilted_log_norm(qs[open_hi], lnw, np.full(int(open_hi.sum()), alpha0))
            reached = S0 / (alpha0 - 1.0) >= rs[open_hi]
            sub = np.flatnonzero(open_hi)[reached]
            hi[sub] = rho0
            open_hi[sub] = False

        def J(rho):
            alpha = 1.0 / (1.0 - rho)
            S = tilted_log_norm(qs, lnw, alpha)
            return rho * rs - S / alpha

        _, best = golden_max(J, np.zeros(rs.shape), hi, golden_iters)
        if open_hi.any():
            # past the tail marker the objective is monotone to first order in
            # the reciprocal tilt order; the endpoint evaluation covers it
            alpha_end = 1.0 / (1.0 - RHO_CEIL)
            S_end = tilted_log_norm(qs[open_hi], lnw, np.full(int(open_hi.sum()), alpha_end))
            best[open_hi] = np.maximum(best[open_hi], RHO_CEIL * rs[open_hi] - S_end / alpha_end)
        vals[run] = np.maximum(best, 0.0)
    return vals


# ---------------------------------------------------------------------------
# scalar dual values, any alphabet sizes (zeros in w allowed)
# ---------------------------------------------------------------------------


def sp_value(q, w, r: float) -> float:
    """Sphere-packing exponent min{D(V||W|Q): I(Q,V) <= r}; +inf below the rate floor."""
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    if r < 0.0:
        return math.inf
    if r >= mutual_information_arr(q, w) - 1e-15:
        return 0.0
    strictly_positive = bool((w > 0.0).all())
    floor = 0.0 if strictly_positive else min_info_dominated(q, w)
    if r < floor - FEAS_MARGIN:
        return math.inf
    if r == 0.0:
        qp, wp = _prune(q, w)
        lnw = np.where(wp > 0.0, np.log(np.where(wp > 0.0, wp, 1.0)), -np.inf)
        g = qp @ lnw
        g[np.isnan(g)] = -np.inf
        return float(-_lse(g))
    if strictly_positive and w.shape[1] <= 3:
        return float(sp_batch(q[None, :], w, np.array([float(r)]))[0])
    qp, wp = _prune(q, w)

    def J(alpha_arr):
        return np.array([-(_S_general(qp, wp, a) + (1.0 - a) * r) / a for a in alpha_arr])

    _, best = golden_max(J, np.array([ALPHA_FLOOR]), np.array([1.0]))
    return max(0.0, float(best[0]))


def rc_value(q, w, r: float) -> float:
    """Random-coding exponent min_V [D(V||W|Q) + |I(Q,V)-r|+]; finite for all real r."""
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    if r >= mutual_information_arr(q, w) - 1e-15:
        return 0.0
    if w.shape[1] <= 3:
        return float(rc_batch(q[None, :], w, np.array([float(r)]))[0])
    qp, wp = _prune(q, w)

    def J(alpha_arr):
        return np.array([-(_S_general(qp, wp, a) + (1.0 - a) * r) / a for a in alpha_arr])

    _, best = golden_max(J, np.array([0.5]), np.array([1.0]))
    return max(0.0, float(best[0]))


def cd_value(q, w, r: float) -> float:
    """Correct-decoding exponent min_V [D(V||W|Q) + |r-I(Q,V)|+]; zero iff r <= I(Q,W)."""
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    if r <= mutual_information_arr(q, w) + 1e-15:
        return 0.0
    if w.shape[1] > 3:
        raise ValueError("correct-decoding values support output alphabets up to size 3")
    return float(cd_batch(q[None, :], w, np.array([float(r)]))[0])


# ---------------------------------------------------------------------------
# Gallager-form source exponent objective (fixed-rate coding, parametric route)
# ---------------------------------------------------------------------------


def source_tilt_batch(lnP, alpha):
    """-log sum_y (sum_x P(x,y)^a)^(1/a), batched over the tilt a = 1/(1+rho)."""
    t = alpha[:, None, None] * lnP[None, :, :]  # (B,K,M)
    tm = t.max(axis=1, keepdims=True)
    tm = np.where(np.isfinite(tm), tm, 0.0)
    inner = tm[:, 0, :] + np.log(np.exp(t - tm).sum(axis=1))  # (B,M): logsumexp over x
    ty = inner / alpha[:, None]
    tym = ty.max(axis=1, keepdims=True)
    return -(tym[:, 0] + np.log(np.exp(ty - tym).sum(axis=1)))
