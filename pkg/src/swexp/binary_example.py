"""Closed-form ground truth for the doubly binary source family.

The family is parameterized by the backward crossover p = P(X=1|Y=0) =
P(X=0|Y=1) and the side-information bias tau = P(Y=0).  Its conditional
entropy is the binary entropy of p regardless of tau, and the fixed-rate
sphere-packing and correct-decoding exponents have the closed form
D(q || p) with q the binary-entropy inverse of the rate.  Every numeric
solver in the package is certified against these forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .info_core import Distribution, JointSource


class ClosedFormKind(Enum):
    FIXED_SP = "fixed_sp"
    FIXED_CORRECT = "fixed_correct"
    EX_ZERO = "ex_zero"
    VAR_SP_AT_HPX = "var_sp_at_hpx"


@dataclass(frozen=True)
class BinaryExample:
    """Doubly binary source with backward crossover p and side bias tau."""

    p: float
    tau: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p < 0.5):
            raise ValueError("p must lie in (0, 1/2)")
        if not (0.0 < self.tau <= 0.5):
            raise ValueError("tau must lie in (0, 1/2]")

    def source(self) -> JointSource:
        p, tau = self.p, self.tau
        joint = np.array(
            [
                [tau * (1.0 - p), (1.0 - tau) * p],
                [tau * p, (1.0 - tau) * (1.0 - p)],
            ]
        )
        return JointSource(joint)

    def marginal_x0(self) -> float:
        return self.tau * (1.0 - self.p) + (1.0 - self.tau) * self.p

    def forward_rows(self) -> np.ndarray:
        p, tau = self.p, self.tau
        a = (1.0 - tau) * p / (tau * (1.0 - p) + (1.0 - tau) * p)  # P(Y=1 | X=0)
        b = tau * p / (tau * p + (1.0 - tau) * (1.0 - p))  # P(Y=0 | X=1)
        return np.array([[1.0 - a, a], [b, 1.0 - b]])


def binary_entropy(q: float) -> float:
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log(q) - (1.0 - q) * math.log(1.0 - q)


def binary_kl(q: float, p: float) -> float:
    """D((q,1-q) || (p,1-p)) in nats; p must be interior."""
    val = 0.0
    if q > 0.0:
        val += q * math.log(q / p)
    if q < 1.0:
        val += (1.0 - q) * math.log((1.0 - q) / (1.0 - p))
    return val


def h_binary_inverse(r: float, *, tol: float = 1e-15, max_iter: int = 200) -> float:
    """The unique q in [0, 1/2] with binary entropy r, by bisection.

    Bisection rather than Newton: the derivative vanishes at 1/2, so Newton
    is unsafe at the top of the range.
    """
    if not (0.0 <= r <= math.log(2.0) + 1e-12):
        raise ValueError("rate outside [0, log 2]")
    lo, hi = 0.0, 0.5
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < r:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def closed_form(kind: ClosedFormKind, ex: BinaryExample, r: float | None = None,
                q: Distribution | None = None) -> float:
    """Closed-form exponent values of the doubly binary family.

    FIXED_SP:       D(q0 || p) with H_b(q0) = r, valid on [H_b(p), log 2]
    FIXED_CORRECT:  D(q0 || p) with H_b(q0) = r, valid on [0, H_b(p)]
    EX_ZERO:        2 q(0) q(1) * pairwise distance of the forward rows
    VAR_SP_AT_HPX:  sphere packing at composition P_X and rate zero, via the
                    explicit geometric-mean output minimizer
    """
    hp = binary_entropy(ex.p)
    if kind is ClosedFormKind.FIXED_SP:
        if r is None or not (hp - 1e-12 <= r <= math.log(2.0) + 1e-12):
            raise ValueError("fixed sphere-packing form is valid on [H_b(p), log 2]")
        return binary_kl(h_binary_inverse(min(r, math.log(2.0))), ex.p)
    if kind is ClosedFormKind.FIXED_CORRECT:
        if r is None or not (-1e-12 <= r <= hp + 1e-12):
            raise ValueError("fixed correct-decoding form is valid on [0, H_b(p)]")
        return binary_kl(h_binary_inverse(max(r, 0.0)), ex.p)
    if kind is ClosedFormKind.EX_ZERO:
        if q is None:
            raise ValueError("EX_ZERO needs an input distribution")
        w = ex.forward_rows()
        d01 = -math.log(float(np.sqrt(w[0] * w[1]).sum()))
        return 2.0 * q[0] * q[1] * d01
    if kind is ClosedFormKind.VAR_SP_AT_HPX:
        w = ex.forward_rows()
        px = np.array([ex.marginal_x0(), 1.0 - ex.marginal_x0()])
        g = np.exp((px[:, None] * np.log(w)).sum(axis=0))
        qy = g / g.sum()
        return float((px[:, None] * qy[None, :] * (np.log(qy)[None, :] - np.log(w))).sum())
    raise ValueError(f"unknown kind {kind!r}")
