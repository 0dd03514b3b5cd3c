"""Finite-alphabet probability containers, information measures, and type-counting utilities.

All information quantities use natural logarithms (nats) with the convention
0*log(0) = 0 and q*log(q/0) = +infinity for q > 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .extreal import INF, ExtReal

#: Stochasticity tolerance on construction: inputs within this distance of a
#: proper distribution are renormalized, anything further is rejected.
STOCH_TOL = 1e-12


def _normalized(vec: np.ndarray, what: str) -> np.ndarray:
    if vec.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if np.any(vec < 0.0):
        raise ValueError(f"{what} has negative entries")
    total = float(vec.sum())
    if abs(total - 1.0) > STOCH_TOL:
        raise ValueError(f"{what} sums to {total!r}, outside tolerance {STOCH_TOL}")
    out = vec / total
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray

    def __init__(self, probs: Sequence[float], *, require_positive: bool = False) -> None:
        arr = _normalized(np.asarray(probs, dtype=float).copy(), "distribution")
        if require_positive and np.any(arr <= 0.0):
            raise ValueError("distribution must be strictly positive")
        if require_positive and arr.size < 2:
            raise ValueError("source marginals need an alphabet of size >= 2")
        object.__setattr__(self, "probs", arr)

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    @classmethod
    def uniform(cls, k: int) -> "Distribution":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point_mass(cls, k: int, index: int) -> "Distribution":
        v = np.zeros(k)
        v[index] = 1.0
        return cls(v)

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic conditional distribution matrix (one row per input letter)."""

    rows: np.ndarray

    def __init__(self, rows: Sequence[Sequence[float]]) -> None:
        mat = np.asarray(rows, dtype=float).copy()
        if mat.ndim != 2:
            raise ValueError("channel matrix must be two-dimensional")
        if np.any(mat < 0.0):
            raise ValueError("channel matrix has negative entries")
        sums = mat.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > STOCH_TOL):
            raise ValueError("channel rows must each sum to 1 within tolerance")
        mat = mat / sums[:, None]
        mat.setflags(write=False)
        object.__setattr__(self, "rows", mat)

    @property
    def in_size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def out_size(self) -> int:
        return int(self.rows.shape[1])

    def row(self, x: int) -> Distribution:
        return Distribution(self.rows[x])


@dataclass(frozen=True, eq=False)
class JointSource:
    """Joint distribution of a source pair with derived marginals and conditionals.

    The decoder-side marginal must be strictly positive and the conditional
    entropy of the encoded letter given the side information must be positive;
    degenerate sources (deterministic given the side information) are rejected.
    """

    joint: np.ndarray
    marginal_x: Distribution
    marginal_y: Distribution
    forward: Channel  # rows: P(y | x)
    backward: Channel  # rows: P(x | y)

    def __init__(self, joint: Sequence[Sequence[float]]) -> None:
        mat = np.asarray(joint, dtype=float).copy()
        if mat.ndim != 2:
            raise ValueError("joint matrix must be two-dimensional")
        if np.any(mat < 0.0):
            raise ValueError("joint matrix has negative entries")
        total = float(mat.sum())
        if abs(total - 1.0) > STOCH_TOL:
            raise ValueError(f"joint matrix sums to {total!r}, outside tolerance {STOCH_TOL}")
        mat = mat / total
        px = mat.sum(axis=1)
        py = mat.sum(axis=0)
        if np.any(px <= 0.0) or np.any(py <= 0.0):
            raise ValueError("both marginals must be strictly positive")
        mat.setflags(write=False)
        object.__setattr__(self, "joint", mat)
        object.__setattr__(self, "marginal_x", Distribution(px, require_positive=True))
        object.__setattr__(self, "marginal_y", Distribution(py, require_positive=True))
        object.__setattr__(self, "forward", Channel(mat / px[:, None]))
        object.__setattr__(self, "backward", Channel(mat.T / py[:, None]))
        if self.conditional_entropy_x_given_y() <= 1e-12:
            raise ValueError("source is degenerate: H(X|Y) must be positive")

    @property
    def alphabet_x(self) -> int:
        return int(self.joint.shape[0])

    @property
    def alphabet_y(self) -> int:
        return int(self.joint.shape[1])

    def conditional_entropy_x_given_y(self) -> float:
        """H(X|Y) in nats (the minimal lossless rate with decoder side information)."""
        py = self.marginal_y.probs
        return float(sum(py[y] * entropy(self.backward.row(y)) for y in range(self.alphabet_y)))

    def mutual_information(self) -> float:
        return mutual_information(self.marginal_x, self.forward)


def load_source(doc: Mapping) -> JointSource:
    """Parse the JSON source document {"alphabet_x": n, "alphabet_y": m, "joint": [[...]]}."""
    try:
        nx = int(doc["alphabet_x"])
        ny = int(doc["alphabet_y"])
        joint = doc["joint"]
    except (KeyError, TypeError) as exc:
        raise ValueError("source document needs fields alphabet_x, alphabet_y, joint") from exc
    mat = np.asarray(joint, dtype=float)
    if mat.shape != (nx, ny):
        raise ValueError(f"joint has shape {mat.shape}, expected ({nx}, {ny})")
    return JointSource(mat)


def source_to_doc(src: JointSource) -> dict:
    return {
        "alphabet_x": src.alphabet_x,
        "alphabet_y": src.alphabet_y,
        "joint": [[float(v) for v in row] for row in src.joint],
    }


# ---------------------------------------------------------------------------
# Information measures
# ---------------------------------------------------------------------------


def entropy_vec(p: np.ndarray) -> float:
    """Entropy of a raw probability vector, 0*log(0) = 0."""
    m = p > 0.0
    return float(-(p[m] * np.log(p[m])).sum())


def entropy(p: Distribution) -> float:
    """Shannon entropy H(p) in nats; lies in [0, log alphabet_size]."""
    return entropy_vec(p.probs)


def mutual_information_arr(q: np.ndarray, w: np.ndarray) -> float:
    """I(q, w) for raw arrays; rows of ``w`` with q = 0 are ignored."""
    joint = q[:, None] * w
    out = joint.sum(axis=0)
    m = joint > 0.0
    wm = np.broadcast_to(w, joint.shape)[m]
    om = np.broadcast_to(out, joint.shape)[m]
    return float(max(0.0, (joint[m] * (np.log(wm) - np.log(om))).sum()))


def mutual_information(q: Distribution, w: Channel) -> float:
    """Mutual information I(q, w) in nats."""
    if q.alphabet_size != w.in_size:
        raise ValueError("input distribution and channel dimensions differ")
    return mutual_information_arr(q.probs, w.rows)


def kl_divergence_vec(q: np.ndarray, p: np.ndarray) -> float:
    """KL divergence of raw vectors as a float, +inf on support violation."""
    m = q > 0.0
    if np.any(p[m] <= 0.0):
        return math.inf
    return float((q[m] * (np.log(q[m]) - np.log(p[m]))).sum())

def kl_divergence(q: Distribution, p: Distribution) -> ExtReal:
    """D(q || p); +infinity iff q puts mass where p has none."""
    if q.alphabet_size != p.alphabet_size:
        raise ValueError("distributions live on different alphabets")
    return ExtReal.of(max(0.0, kl_divergence_vec(q.probs, p.probs)))


def cond_kl_divergence(v: Channel, w: Channel, q: Distribution) -> ExtReal:
    """Conditional divergence D(v || w | q) = sum_x q(x) D(v_x || w_x)."""
    if v.rows.shape != w.rows.shape or q.alphabet_size != v.in_size:
        raise ValueError("channel/distribution dimensions differ")
    total = 0.0
    for x in range(v.in_size):
        qx = q[x]
        if qx <= 0.0:
            continue
        d = kl_divergence_vec(v.rows[x], w.rows[x])
        if math.isinf(d):
            return INF
        total += qx * d
    return ExtReal.of(max(0.0, total))


# ---------------------------------------------------------------------------
# Method-of-types utilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeDescriptor:
    """Occurrence counts of each letter in a length-n sequence."""

    counts: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts) or sum(self.counts) != self.n:
            raise ValueError("counts must be nonnegative and sum to n")

    def distribution(self) -> Distribution:
        return Distribution(np.asarray(self.counts, dtype=float) / self.n)


def enumerate_types(n: int, alphabet_size: int) -> list[TypeDescriptor]:
    """All empirical types of length-n sequences, exhaustively and without duplicates."""
    if n < 1 or alphabet_size < 1:
        raise ValueError("need n >= 1 and alphabet_size >= 1")
    out = []
    for bars in itertools.combinations(range(n + alphabet_size - 1), alphabet_size - 1):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(n + alphabet_size - 2 - prev)
        out.append(TypeDescriptor(tuple(counts), n))
    return out


def type_class_size(t: TypeDescriptor) -> int:
    """Exact number of sequences with type ``t`` (multinomial coefficient, big integer)."""
    size = 1
    rem = t.n
    for c in t.counts:
        size *= math.comb(rem, c)
        rem -= c
    return size


def log_type_class_size(t: TypeDescriptor) -> float:
    """log |type class|, computed in log space for block lengths where the exact integer is unwieldy."""
    return float(math.lgamma(t.n + 1) - sum(math.lgamma(c + 1) for c in t.counts))


def type_class_log_prob(t: TypeDescriptor, p: Distribution) -> float:
    """log-probability of any single sequence of type ``t`` under iid ``p``.

    Equals -n * [D(t/n || p) + H(t/n)]; -infinity when the type uses a letter
    that ``p`` excludes.
    """
    if len(t.counts) != p.alphabet_size:
        raise ValueError("type and distribution alphabets differ")
    q = t.distribution()
    d = kl_divergence(q, p)
    if not d.finite:
        return -math.inf
    return -t.n * (float(d) + entropy(q))


def log_type_probability(t: TypeDescriptor, p: Distribution) -> float:
    """log Pr(type class of t) = log |class| + per-sequence log-probability."""
    return log_type_class_size(t) + type_class_log_prob(t, p)
