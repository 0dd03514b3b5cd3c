"""Rate sweeps producing curve rows for CSV export.

Each row carries the fixed-rate exponents (sphere packing, random coding,
expurgated, correct decoding) and the variable-rate bounds (lower, sphere
packing upper, straight line, zero-rate envelope) at one coding rate, plus a
flag marking exception points where no upper-bound claim is made.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import duals
from .channel import ExponentKind, ex_batch_binary
from .info_core import JointSource
from .slepian_wolf import (
    VariableRateContext,
    fixed_exponent_many,
    fixed_sp_rate_ceiling,
    variable_context,
    variable_exponent_bounds,
)

QUANTITY_COLUMNS = (
    "fixed_sp",
    "fixed_rc",
    "fixed_ex",
    "fixed_correct",
    "var_lower",
    "var_upper_sp",
    "var_upper_sl",
    "var_upper_env",
)

MAX_SWEEP_POINTS = 1_000_000


@dataclass(frozen=True)
class SwCurvePoint:
    """One sweep row; exponent fields are floats with +inf allowed, the
    window-limited upper bounds are None outside their validity windows."""

    rate: float
    fixed_sp: float
    fixed_rc: float
    fixed_ex: float
    fixed_correct: float
    var_lower: float
    var_upper_sp: float
    var_upper_sl: float | None
    var_upper_env: float | None
    var_exact: float | None
    flag: str


@dataclass(frozen=True)
class SweepSpec:
    r_min: float
    r_max: float
    points: int
    quantities: tuple[str, ...] = QUANTITY_COLUMNS

    def __post_init__(self) -> None:
        if not (self.r_min < self.r_max):
            raise ValueError("need r_min < r_max")
        if self.r_min < 0.0:
            raise ValueError("rates must be nonnegative")
        if not (2 <= self.points <= MAX_SWEEP_POINTS):
            raise ValueError(f"points must lie in [2, {MAX_SWEEP_POINTS}]")
        unknown = set(self.quantities) - set(QUANTITY_COLUMNS)
        if unknown:
            raise ValueError(f"unknown quantities: {sorted(unknown)}")


def _var_flags(ctx: VariableRateContext, src: JointSource, rates: np.ndarray) -> list[str]:
    ceiling = fixed_sp_rate_ceiling(src)
    flags = []
    for r in rates:
        rin = ctx.h_marginal - r
        parts = []
        if abs(rin - ctx.thresholds.sp_rate_floor) <= 1e-9:
            parts.append("sp-floor-exception")
        if abs(r - ceiling) <= 1e-9:
            parts.append("fixed-sp-ceiling")
        flags.append("+".join(parts))
    return flags


def sweep_curve(src: JointSource, spec: SweepSpec) -> list[SwCurvePoint]:
    """Evaluate the requested quantities on a uniform rate grid."""
    rates = np.linspace(spec.r_min, spec.r_max, spec.points)
    ctx = variable_context(src)
    want = set(spec.quantities)
    n = rates.shape[0]
    cols: dict[str, np.ndarray] = {}

    for kind, name in (
        (ExponentKind.SPHERE_PACKING, "fixed_sp"),
        (ExponentKind.RANDOM_CODING, "fixed_rc"),
        (ExponentKind.EXPURGATED, "fixed_ex"),
        (ExponentKind.CORRECT_DECODING, "fixed_correct"),
    ):
        if name in want:
            cols[name] = fixed_exponent_many(kind, src, rates)

    need_var = want & {"var_lower", "var_upper_sp", "var_upper_sl", "var_upper_env"}
    var_sl: list[float | None] = [None] * n
    var_env: list[float | None] = [None] * n
    var_exact: list[float | None] = [None] * n
    if need_var:
        px = src.marginal_x.probs
        w = src.forward.rows
        rin = ctx.h_marginal - rates
        fast = src.alphabet_x == 2 and w.shape[1] in (2, 3) and (w > 0).all()
        if fast:
            pos = rin >= 0.0
            ex = np.full(n, math.inf)
            ex[pos] = ex_batch_binary(np.full(int(pos.sum()), px[0]), w, rin[pos])
            rc = duals.rc_batch(np.broadcast_to(px, (n, px.size)), w, rin)
            sp = np.full(n, math.inf)
            sp[pos] = duals.sp_batch(np.broadcast_to(px, (int(pos.sum()), px.size)), w, rin[pos])
            cols["var_lower"] = np.maximum(ex, rc)
            cols["var_upper_sp"] = sp
            for i, r in enumerate(rates):
                if ctx.line is not None and 0.0 < rin[i] <= ctx.line.tangent_rate + 1e-12:
                    var_sl[i] = float(ctx.line.value(rin[i]))
                if ctx.envelope_zero is not None and rin[i] > 0.0:
                    var_env[i] = ctx.envelope_zero
                guard = 1e-6
                near_floor = abs(rin[i] - ctx.thresholds.sp_rate_floor) <= 1e-9
                if not near_floor and (
                    ctx.sw_limit + guard <= r <= ctx.h_marginal - ctx.thresholds.critical_rate - guard
                    or abs(r - ctx.sw_limit) <= guard
                ):
                    var_exact[i] = float(sp[i])
        else:
            lower = np.empty(n)
            upper = np.empty(n)
            for i, r in enumerate(rates):
                b = variable_exponent_bounds(src, float(r), ctx)
                lower[i] = float(b.lower)
                upper[i] = float(b.upper_sp)
                var_sl[i] = b.upper_sl
                var_env[i] = b.upper_env
                var_exact[i] = None if b.exact is None else float(b.exact)
            cols["var_lower"] = lower
            cols["var_upper_sp"] = upper

    flags = _var_flags(ctx, src, rates)
    out = []
    nanv = math.nan
    for i, r in enumerate(rates):
        out.append(
            SwCurvePoint(
                rate=float(r),
                fixed_sp=float(cols["fixed_sp"][i]) if "fixed_sp" in cols else nanv,
                fixed_rc=float(cols["fixed_rc"][i]) if "fixed_rc" in cols else nanv,
                fixed_ex=float(cols["fixed_ex"][i]) if "fixed_ex" in cols else nanv,
                fixed_correct=float(cols["fixed_correct"][i]) if "fixed_correct" in cols else nanv,
                var_lower=float(cols["var_lower"][i]) if "var_lower" in cols else nanv,
                var_upper_sp=float(cols["var_upper_sp"][i]) if "var_upper_sp" in cols else nanv,
                var_upper_sl=var_sl[i],
                var_upper_env=var_env[i],
                var_exact=var_exact[i],
                flag=flags[i],
            )
        )
    return out


# ---------------------------------------------------------------------------
# CSV serialization (12 significant digits; inf as the literal "inf")
# ---------------------------------------------------------------------------


def _fmt(v: float | None, scale: float) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if math.isinf(v):
        return "inf"
    return f"{v / scale:.12g}"


def curve_csv_text(points: list[SwCurvePoint], quantities: tuple[str, ...], *, bits: bool = False) -> str:
    scale = math.log(2.0) if bits else 1.0
    unit = "bits" if bits else "nats"
    lines = [
        f"# units: {unit} (rates and exponents); inf marks infeasible (zero-error) programs",
        "# residual rates below zero follow each program's own feasibility semantics",
        "# empty cells: quantity undefined or outside its validity window",
    ]
    header = ["rate"] + list(quantities) + ["flag"]
    lines.append(",".join(header))
    for p in points:
        row = [_fmt(p.rate, scale)]
        for qname in quantities:
            row.append(_fmt(getattr(p, qname), scale))
        row.append(p.flag)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_atomic(text: str, path: str) -> None:
    """Write to a temp file in the destination directory, then rename, so a
    failure never leaves a partial output file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".swexp-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_curve_csv(path: str) -> tuple[list[str], list[dict]]:
    """Parse a curve CSV back into (header, row dicts); inverse of the writer
    at the serialized precision."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    data = [ln for ln in lines if not ln.startswith("#")]
    header = data[0].split(",")
    rows = []
    for ln in data[1:]:
        cells = ln.split(",")
        row: dict = {}
        for name, cell in zip(header, cells):
            if name == "flag":
                row[name] = cell
            elif cell == "":
                row[name] = None
            elif cell == "inf":
                row[name] = math.inf
            else:
                row[name] = float(cell)
        rows.append(row)
    return header, rows
