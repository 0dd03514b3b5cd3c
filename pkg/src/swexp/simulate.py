"""Desk-scale Monte Carlo verification of the coding definitions.

Three modes:

* ``FIXED_RANDOM_BINNING``: fixed-rate coding by seeded balanced random
  binning of all source sequences, exact posterior (MAP) decoding inside the
  announced bin.  Balanced binning (a seeded permutation dealt round-robin
  into bins) is injective once the bin count reaches the sequence count, so
  rates at or above log |X| decode perfectly.
* ``VARIABLE_EXACT``: the three-step variable-rate scheme: a type header,
  seeded binning inside the protected type classes (greedy accumulation of
  class probability mass up to rate/H(X|Y), nearest the source marginal
  first, restricted to classes the binned rate can actually decode), and
  uncoded transmission of the rest, decoded as the MAP sequence of the whole
  type class.  Empirical rate is averaged from the actual bit lengths.
* ``VARIABLE_MASS_ACCOUNTING``: no sampling; exact protected-mass accounting
  of the same scheme for binary sources, giving the correct-decoding
  probability bound and the exact scheme rate at any block length.

Determinism: trials are partitioned into fixed-size streams seeded by
spawning the configured seed, so results are bit-identical regardless of the
worker count (``EXPLAB_THREADS``).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .info_core import JointSource, enumerate_types, load_source, source_to_doc

#: exhaustive enumeration cap: n * log|X| <= 24 * log 2
ENUM_LIMIT_NATS = 24.0 * math.log(2.0)
#: surrogate protection overhead in the bin count of the variable-rate scheme
PROTECTION_DELTA = 0.05
CHUNK_TRIALS = 10_000
TILE_ELEMENTS = 4_000_000


class EnumerationLimitError(ValueError):
    """The requested block length exceeds the exact-decoding enumeration limit."""


class SimMode(Enum):
    FIXED_RANDOM_BINNING = "fixed_random_binning"
    VARIABLE_EXACT = "variable_exact"
    VARIABLE_MASS_ACCOUNTING = "variable_mass_accounting"


def worker_count() -> int:
    """Worker bound from the EXPLAB_THREADS environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get("EXPLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimConfig:
    src: JointSource
    n: int
    rate: float
    trials: int
    seed: int
    mode: SimMode

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("block length must be positive")
        if self.rate <= 0.0:
            raise ValueError("rate must be positive")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if self.mode in (SimMode.FIXED_RANDOM_BINNING, SimMode.VARIABLE_EXACT):
            if self.n * math.log(self.src.alphabet_x) > ENUM_LIMIT_NATS + 1e-9:
                raise EnumerationLimitError(
                    f"enumeration limit exceeded: n*log|X| = {self.n * math.log(self.src.alphabet_x):.3f} nats "
                    f"> {ENUM_LIMIT_NATS:.3f} nats (n <= {int(ENUM_LIMIT_NATS / math.log(self.src.alphabet_x))} "
                    f"for this alphabet)"
                )
        if self.mode is SimMode.VARIABLE_MASS_ACCOUNTING and self.src.alphabet_x != 2:
            raise ValueError("mass accounting supports binary source alphabets only")

    @classmethod
    def from_doc(cls, doc: Mapping) -> "SimConfig":
        try:
            src = load_source(doc["source"])
            return cls(
                src=src,
                n=int(doc["n"]),
                rate=float(doc["rate"]),
                trials=int(doc["trials"]),
                seed=int(doc["seed"]),
                mode=SimMode(doc["mode"]),
            )
        except KeyError as exc:
            raise ValueError(f"simulation config is missing field {exc}") from exc

    def to_doc(self) -> dict:
        return {
            "source": source_to_doc(self.src),
            "n": self.n,
            "rate": self.rate,
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode.value,
        }


@dataclass(frozen=True)
class SimResult:
    empirical_rate: float
    p_error: float
    p_correct: float
    ci_halfwidth: float
    trials_run: int
    wallclock_ms: float
    metadata: dict = field(default_factory=dict)

    def to_doc(self, config: SimConfig) -> dict:
        return {
            "config": config.to_doc(),
            "empirical_rate": self.empirical_rate,
            "p_error": self.p_error,
            "p_correct": self.p_correct,
            "ci_halfwidth": self.ci_halfwidth,
            "trials_run": self.trials_run,
            "wallclock_ms": self.wallclock_ms,
            "metadata": self.metadata,
        }


def wilson_halfwidth(successes: int, trials: int, z: float = 1.959963984540054) -> float:
    """Half-width of the 95% Wilson score interval (valid at extreme rates)."""
    if trials <= 0:
        return 0.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    return float(z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom)


# ---------------------------------------------------------------------------
# exact MAP decoding
# ---------------------------------------------------------------------------


def _log_joint(src: JointSource) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(src.joint > 0.0, np.log(np.where(src.joint > 0.0, src.joint, 1.0)), -np.inf)


def map_decode(src: JointSource, candidates: Sequence[Sequence[int]], y: Sequence[int]) -> tuple[int, ...]:
    """The candidate minimizing -sum_i log P(x_i, y_i); ties resolve to the
    lexicographically smallest candidate."""
    cand = np.asarray(candidates, dtype=np.int64)
    if cand.ndim != 2 or cand.shape[0] == 0:
        raise ValueError("candidates must be a nonempty set of sequences")
    yv = np.asarray(y, dtype=np.int64)
    order = np.lexsort(cand.T[::-1])
    cand = cand[order]
    lnp = _log_joint(src)
    scores = -lnp[cand, yv[None, :]].sum(axis=1)
    return tuple(int(v) for v in cand[int(np.argmin(scores))])


# ---------------------------------------------------------------------------
# sequence enumeration helpers
# ---------------------------------------------------------------------------


def _enumerate_sequences(k: int, n: int) -> np.ndarray:
    """All k-ary length-n sequences as a (k^n, n) symbol matrix in
    lexicographic (= integer, most significant first) order."""
    total = k**n
    idx = np.arange(total)
    out = np.empty((total, n), dtype=np.uint8)
    for pos in range(n - 1, -1, -1):
        out[:, pos] = idx % k
        idx //= k
    return out


def _sample_pairs(src: JointSource, rng: np.random.Generator, count: int, n: int):
    ky = src.alphabet_y
    flat = rng.choice(src.joint.size, size=(count, n), p=src.joint.reshape(-1))
    return (flat // ky).astype(np.uint8), (flat % ky).astype(np.uint8)


def _chunk_seeds(seed: int, trials: int):
    chunks = max(1, math.ceil(trials / CHUNK_TRIALS))
    seqs = np.random.SeedSequence(seed).spawn(chunks + 1)
    sizes = [CHUNK_TRIALS] * (chunks - 1) + [trials - CHUNK_TRIALS * (chunks - 1)]
    return seqs[0], list(zip(seqs[1:], sizes))


def _run_chunks(worker, chunk_specs):
    threads = worker_count()
    if threads == 1 or len(chunk_specs) == 1:
        return [worker(spec) for spec in chunk_specs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunk_specs))


def _scan_decode(lnp, seqs, members, xs_idx, ys) -> int:
    """Number of decoding errors when each trial's candidate list is
    ``members`` (ascending sequence indices); trials are tiled so the score
    matrix stays within a bounded element count."""
    errors = 0
    tcount = xs_idx.shape[0]
    n = ys.shape[1]
    step = max(1, TILE_ELEMENTS // max(1, members.shape[0] * n))
    cand = seqs[members]  # (m, n)
    for start in range(0, tcount, step):
        sl = slice(start, min(start + step, tcount))
        scores = -lnp[cand[:, None, :], ys[None, sl, :]].sum(axis=2)  # (m, t)
        win = members[np.argmin(scores, axis=0)]
        errors += int((win != xs_idx[sl]).sum())
    return errors


# ---------------------------------------------------------------------------
# fixed-rate random binning
# ---------------------------------------------------------------------------


def _run_fixed_binning(cfg: SimConfig) -> SimResult:
    kx = cfg.src.alphabet_x
    n = cfg.n
    total = kx**n
    bins = math.ceil(math.exp(n * cfg.rate))
    struct_seed, chunk_specs = _chunk_seeds(cfg.seed, cfg.trials)
    rng0 = np.random.default_rng(struct_seed)
    perm = rng0.permutation(total)
    bin_id = np.empty(total, dtype=np.int64)
    bin_id[perm] = np.arange(total) % bins
    members_by_bin = [np.sort(perm[b::bins]) for b in range(min(bins, total))]
    seqs = _enumerate_sequences(kx, n)
    lnp = _log_joint(cfg.src)
    powers = kx ** np.arange(n - 1, -1, -1, dtype=np.int64)

    def worker(spec):
        seed, count = spec
        rng = np.random.default_rng(seed)
        xs, ys = _sample_pairs(cfg.src, rng, count, n)
        xs_idx = xs.astype(np.int64) @ powers
        b_of = bin_id[xs_idx]
        errors = 0
        for b in np.unique(b_of):
            sel = b_of == b
            errors += _scan_decode(lnp, seqs, members_by_bin[int(b)], xs_idx[sel], ys[sel])
        return errors

    errors = sum(_run_chunks(worker, chunk_specs))
    p_err = errors / cfg.trials
    return SimResult(
        empirical_rate=math.log(bins) / n,
        p_error=p_err,
        p_correct=1.0 - p_err,
        ci_halfwidth=wilson_halfwidth(errors, cfg.trials),
        trials_run=cfg.trials,
        wallclock_ms=0.0,
        metadata={"bins": bins, "sequences": total},
    )


# ---------------------------------------------------------------------------
# variable-rate scheme: protected types, binned; the rest uncoded
# ---------------------------------------------------------------------------


def _type_order(counts: np.ndarray, n: int, px: np.ndarray):
    """Deterministic protection order: nearest to the source marginal in
    l1 distance, lexicographically smallest counts on ties."""
    l1 = np.abs(counts / n - px[None, :]).sum(axis=1)
    keys = [counts[:, j] for j in range(counts.shape[1] - 1, -1, -1)] + [l1]
    return np.lexsort(tuple(keys))


def _decodable_types(counts: np.ndarray, n: int, w: np.ndarray, h_cond: float) -> np.ndarray:
    """Types whose classes survive binning at rate H(X|Y) + delta: the class
    residual rate H(type) - (H(X|Y)+delta) must stay below the type's mutual
    information with the forward channel, else the within-bin list is too
    rich to decode and protecting the class would overstate the bound."""
    from .info_core import entropy_vec, mutual_information_arr

    out = np.empty(counts.shape[0], dtype=bool)
    budget = h_cond + PROTECTION_DELTA - 1e-9
    for i, c in enumerate(counts):
        q = c / n
        out[i] = entropy_vec(q) - mutual_information_arr(q, w) < budget
    return out


def _protection_plan(cfg: SimConfig):
    """Greedy protected-type selection and the bit-length bookkeeping."""
    kx = cfg.src.alphabet_x
    n = cfg.n
    px = cfg.src.marginal_x.probs
    h_cond = cfg.src.conditional_entropy_x_given_y()
    types = enumerate_types(n, kx)
    counts = np.array([t.counts for t in types], dtype=np.int64)
    log_sizes = np.array([math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in t.counts) for t in types])
    with np.errstate(divide="ignore"):
        lpx = np.where(px > 0, np.log(px), -np.inf)
    log_mass = log_sizes + counts @ lpx
    mass = np.exp(log_mass)

    theta = min(1.0, cfg.rate / h_cond)
    order = _type_order(counts, n, px)
    decodable = _decodable_types(counts, n, cfg.src.forward.rows, h_cond)
    protected = np.zeros(len(types), dtype=bool)
    cum = 0.0
    for idx in order:
        if not decodable[idx] or cum + mass[idx] > theta + 1e-15:
            continue
        protected[idx] = True
        cum += mass[idx]
    bin_count = math.ceil(math.exp(n * (h_cond + PROTECTION_DELTA)))
    header_bits = math.ceil(math.log2(len(types)))
    bin_bits = math.ceil(math.log2(bin_count))
    return types, counts, mass, protected, cum, bin_count, header_bits, bin_bits, theta, h_cond


def _run_variable_exact(cfg: SimConfig) -> SimResult:
    kx = cfg.src.alphabet_x
    n = cfg.n
    (types, counts, mass, protected, protected_mass, bin_count,
     header_bits, bin_bits, theta, h_cond) = _protection_plan(cfg)
    seqs = _enumerate_sequences(kx, n)
    lnp = _log_joint(cfg.src)
    powers = kx ** np.arange(n - 1, -1, -1, dtype=np.int64)

    # type id per sequence: position of its count vector in the type table
    key_of = {tuple(int(v) for v in c): i for i, c in enumerate(counts)}
    if kx == 2:
        ones = seqs.sum(axis=1, dtype=np.int64)
        seq_counts = np.stack([n - ones, ones], axis=1)
    else:
        seq_counts = np.stack([(seqs == a).sum(axis=1, dtype=np.int64) for a in range(kx)], axis=1)
    type_of_seq = np.array([key_of[tuple(int(v) for v in c)] for c in seq_counts], dtype=np.int64)

    struct_seed, chunk_specs = _chunk_seeds(cfg.seed, cfg.trials)
    rng0 = np.random.default_rng(struct_seed)
    class_members: dict[int, np.ndarray] = {}
    class_bin_of: dict[int, np.ndarray] = {}
    bin_members: dict[int, list[np.ndarray]] = {}
    for tid in range(len(types)):
        mem = np.flatnonzero(type_of_seq == tid)
        class_members[tid] = mem
        if protected[tid]:
            local_perm = rng0.permutation(mem.size)
            local_bin = local_perm % bin_count
            class_bin_of[tid] = local_bin
            buckets = [mem[local_bin == b] for b in np.unique(local_bin)]
            keys = list(np.unique(local_bin))
            bin_members[tid] = dict(zip(keys, buckets))

    lr = None
    if kx == 2:
        lr = lnp[1, :] - lnp[0, :]  # per output letter: gain of symbol 1 over 0

    def decode_unprotected_binary(y_row, ones):
        weights = lr[y_row]
        order = np.lexsort((-np.arange(n), -weights))  # weight desc, index desc on ties
        picked = order[:ones]
        x = np.zeros(n, dtype=np.uint8)
        x[picked] = 1
        return int(x.astype(np.int64) @ powers)

    def worker(spec):
        seed, count = spec
        rng = np.random.default_rng(seed)
        xs, ys = _sample_pairs(cfg.src, rng, count, n)
        xs_idx = xs.astype(np.int64) @ powers
        tids = type_of_seq[xs_idx]
        errors = 0
        bits_total = 0
        for i in range(count):
            tid = int(tids[i])
            if protected[tid]:
                bits_total += header_bits + bin_bits
                mem = class_members[tid]
                local = class_bin_of[tid]
                pos = int(np.searchsorted(mem, xs_idx[i]))
                cand = bin_members[tid][int(local[pos])]
                scores = -lnp[seqs[cand], ys[i][None, :]].sum(axis=1)
                if cand[int(np.argmin(scores))] != xs_idx[i]:
                    errors += 1
            else:
                bits_total += header_bits
                if kx == 2:
                    ones = int(seq_counts[xs_idx[i], 1])
                    win = decode_unprotected_binary(ys[i], ones)
                else:
                    mem = class_members[tid]
                    scores = -lnp[seqs[mem], ys[i][None, :]].sum(axis=1)
                    win = int(mem[int(np.argmin(scores))])
                if win != xs_idx[i]:
                    errors += 1
        return errors, bits_total

    results = _run_chunks(worker, chunk_specs)
    errors = sum(r[0] for r in results)
    bits = sum(r[1] for r in results)
    p_err = errors / cfg.trials
    return SimResult(
        empirical_rate=bits / cfg.trials * math.log(2.0) / n,
        p_error=p_err,
        p_correct=1.0 - p_err,
        ci_halfwidth=wilson_halfwidth(errors, cfg.trials),
        trials_run=cfg.trials,
        wallclock_ms=0.0,
        metadata={
            "protected_mass": float(protected_mass),
            "protected_mass_target": float(theta),
            "protection_delta": PROTECTION_DELTA,
            "bin_count": bin_count,
            "header_bits": header_bits,
            "bin_bits": bin_bits,
            "nominal_rate": float(theta * (h_cond + PROTECTION_DELTA)),
        },
    )


def _run_mass_accounting(cfg: SimConfig) -> SimResult:
    """Exact protected-mass accounting of the variable-rate scheme (binary
    sources, no sampling): the correct-decoding probability is the protected
    mass, and the rate comes from the exact bit-length expectation."""
    n = cfg.n
    px = cfg.src.marginal_x.probs
    h_cond = cfg.src.conditional_entropy_x_given_y()
    k = np.arange(n + 1)
    log_sizes = np.array([math.lgamma(n + 1) - math.lgamma(c + 1) - math.lgamma(n - c + 1) for c in k])
    log_mass = log_sizes + (n - k) * math.log(px[0]) + k * math.log(px[1])
    mass = np.exp(log_mass)
    counts = np.stack([n - k, k], axis=1)
    theta = min(1.0, cfg.rate / h_cond)
    order = _type_order(counts, n, px)
    decodable = _decodable_types(counts, n, cfg.src.forward.rows, h_cond)
    cum = 0.0
    chosen = 0
    for idx in order:
        if not decodable[idx] or cum + mass[idx] > theta + 1e-15:
            continue
        cum += mass[idx]
        chosen += 1
    header_bits = math.ceil(math.log2(n + 1))
    bin_bits = math.ceil(n * (h_cond + PROTECTION_DELTA) / math.log(2.0))
    rate = (header_bits + cum * bin_bits) * math.log(2.0) / n
    return SimResult(
        empirical_rate=rate,
        p_error=1.0 - cum,
        p_correct=cum,
        ci_halfwidth=0.0,
        trials_run=0,
        wallclock_ms=0.0,
        metadata={
            "protected_mass_target": float(theta),
            "protected_types": chosen,
            "protection_delta": PROTECTION_DELTA,
            "header_bits": header_bits,
            "bin_bits": bin_bits,
            "accounting": "p_correct is the exact protected probability mass; "
                          "errors inside protected bins are not sampled in this mode",
        },
    )


def run(cfg: SimConfig) -> SimResult:
    """Run one simulation; identical configs (including seed) give identical
    results regardless of the worker count."""
    t0 = time.perf_counter()
    if cfg.mode is SimMode.FIXED_RANDOM_BINNING:
        res = _run_fixed_binning(cfg)
    elif cfg.mode is SimMode.VARIABLE_EXACT:
        res = _run_variable_exact(cfg)
    else:
        res = _run_mass_accounting(cfg)
    wall = (time.perf_counter() - t0) * 1000.0
    return SimResult(
        empirical_rate=res.empirical_rate,
        p_error=res.p_error,
        p_correct=res.p_correct,
        ci_halfwidth=res.ci_halfwidth,
        trials_run=res.trials_run,
        wallclock_ms=wall,
        metadata=res.metadata,
    )
