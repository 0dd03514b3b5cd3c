"""Independent brute-force oracles.

Everything here evaluates the defining programs directly (lattice search over
test channels, dense grids over coupling parameters, plain per-candidate
scoring) with no tilted duals, no Newton steps, and no shared code with the
solvers being certified.
"""

from __future__ import annotations

import math

import numpy as np


def _row_kl(v: np.ndarray, wrow: np.ndarray) -> np.ndarray:
    """KL of binary rows (v, 1-v) against wrow, elementwise over v."""
    out = np.zeros_like(v)
    m = v > 0
    out = np.where(m, v * (np.log(np.where(m, v, 1.0)) - math.log(wrow[0])), 0.0)
    m1 = v < 1
    out = out + np.where(m1, (1 - v) * (np.log(np.where(m1, 1 - v, 1.0)) - math.log(wrow[1])), 0.0)
    return out


def _hb(v: np.ndarray) -> np.ndarray:
    m = (v > 0) & (v < 1)
    safe = np.where(m, v, 0.5)
    return np.where(m, -(safe * np.log(safe) + (1 - safe) * np.log(1 - safe)), 0.0)


def _lattice_objectives(q, w, r, lo0, hi0, lo1, hi1, points):
    v0 = np.linspace(lo0, hi0, points)[:, None]
    v1 = np.linspace(lo1, hi1, points)[None, :]
    div = q[0] * _row_kl(v0, w[0]) + q[1] * _row_kl(v1, w[1])
    out0 = q[0] * v0 + q[1] * v1
    info = _hb(out0) - (q[0] * _hb(v0) + q[1] * _hb(v1) + 0.0 * v1)
    info = np.maximum(info, 0.0)
    return div, info, v0[:, 0], v1[0, :]


def lattice_channel_value(kind: str, q, w, r: float, points: int = 400, zooms: int = 1) -> float:
    """Direct lattice minimization of the binary-in binary-out programs.

    kind: "sp" (divergence s.t. info <= r), "rc" (divergence + |info-r|+),
    "cd" (divergence + |r-info|+).  Two-stage lattice: a global pass and a
    zoom around the incumbent, both with ``points`` points per free
    parameter; still a pure primal search.
    """
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    box = (0.0, 1.0, 0.0, 1.0)
    best = math.inf
    for _ in range(zooms + 1):
        div, info, g0, g1 = _lattice_objectives(q, w, r, *box, points)
        if kind == "sp":
            obj = np.where(info <= r, div, math.inf)
        elif kind == "rc":
            obj = div + np.maximum(info - r, 0.0)
        elif kind == "cd":
            obj = div + np.maximum(r - info, 0.0)
        else:
            raise ValueError(kind)
        flat = int(np.argmin(obj))
        i, j = np.unravel_index(flat, obj.shape)
        best = min(best, float(obj[i, j]))
        if math.isinf(best):
            return best
        h0 = (box[1] - box[0]) / (points - 1)
        h1 = (box[3] - box[2]) / (points - 1)
        box = (
            max(0.0, g0[i] - 2 * h0),
            min(1.0, g0[i] + 2 * h0),
            max(0.0, g1[j] - 2 * h1),
            min(1.0, g1[j] + 2 * h1),
        )
    return best


def expurgated_grid(q0: float, w, r: float, points: int = 4001) -> float:
    """Dense-grid primal of the binary expurgated program: one free coupling
    parameter a (the off-diagonal mass), objective 2*a*d + I(a) - r subject
    to I(a) <= r."""
    w = np.asarray(w, dtype=float)
    s = float(np.sqrt(w[0] * w[1]).sum())
    if s <= 0.0:
        h = _hb(np.array([q0]))[0]
        return 0.0 if h <= r + 1e-12 else math.inf
    d01 = -math.log(min(s, 1.0))
    q1 = 1.0 - q0
    amax = min(q0, q1)
    if amax == 0.0:
        return 0.0
    a = np.linspace(0.0, amax, points)

    def eta(x):
        m = x > 0
        return np.where(m, -x * np.log(np.where(m, x, 1.0)), 0.0)

    h4 = eta(q0 - a) + 2 * eta(a) + eta(q1 - a)
    info = np.maximum(2 * _hb(np.array([q0]))[0] - h4, 0.0)
    obj = np.where(info <= r + 1e-12, 2 * a * d01 + info - r, math.inf)
    return max(0.0, float(obj.min()))


def score_sequence(joint: np.ndarray, x_seq, y_seq) -> float:
    """-sum_i log P(x_i, y_i), plain Python, +inf on zero-mass pairs."""
    total = 0.0
    for xi, yi in zip(x_seq, y_seq):
        p = joint[int(xi), int(yi)]
        if p <= 0.0:
            return math.inf
        total -= math.log(p)
    return total


def map_decode_oracle(joint: np.ndarray, candidates, y_seq):
    """Exhaustive scorer with lexicographically-smallest tie-breaking."""
    best = None
    best_score = math.inf
    for cand in sorted(tuple(int(v) for v in c) for c in candidates):
        s = score_sequence(joint, cand, y_seq)
        if s < best_score - 1e-12:
            best_score = s
            best = cand
    return best


def entropy_direct(p) -> float:
    return float(sum(-v * math.log(v) for v in p if v > 0.0))


def kl_direct(q, p) -> float:
    total = 0.0
    for qi, pi in zip(q, p):
        if qi > 0.0:
            if pi <= 0.0:
                return math.inf
            total += qi * math.log(qi / pi)
    return total


def mutual_information_direct(q, w) -> float:
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    out = q @ w
    total = 0.0
    for x in range(w.shape[0]):
        for y in range(w.shape[1]):
            j = q[x] * w[x, y]
            if j > 0.0:
                total += j * math.log(w[x, y] / out[y])
    return total
