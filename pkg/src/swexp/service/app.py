"""HTTP service exposing the exponent toolkit.

Stateless compute endpoints; every quantity the CLI can emit is served here,
with the CLI acting as a thin client.  Run with
``uvicorn swexp.service.app:app``.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..channel import degeneracy_predicate, rate_thresholds
from ..curves import QUANTITY_COLUMNS, SweepSpec, sweep_curve
from ..simulate import EnumerationLimitError, SimConfig, SimMode, run
from ..slepian_wolf import (
    fixed_critical_rate,
    fixed_sp_rate_ceiling,
    max_correct_probability,
    second_order_coefficient,
    variable_context,
    zero_error_rate_window,
)
from .models import (
    CurveRequest,
    CurveResponse,
    PcmaxRequest,
    PcmaxResponse,
    SecondOrderRequest,
    SecondOrderResponse,
    SimulateRequest,
    SimulateResponse,
    ThresholdsRequest,
    ThresholdsResponse,
    to_wire,
)

app = FastAPI(
    title="swexp",
    description="Error exponents and correct-decoding quantities for "
    "Slepian-Wolf and channel coding, with a desk-scale Monte Carlo simulator.",
)


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.post("/curve", response_model=CurveResponse)
def curve(req: CurveRequest) -> CurveResponse:
    try:
        src = req.source.build()
        quantities = tuple(req.sweep.quantities) if req.sweep.quantities else QUANTITY_COLUMNS
        spec = SweepSpec(r_min=req.sweep.r_min, r_max=req.sweep.r_max,
                         points=req.sweep.points, quantities=quantities)
        points = sweep_curve(src, spec)
    except ValueError as exc:
        raise _bad_request(exc)
    columns = ["rate", *spec.quantities, "flag"]
    rows = []
    for p in points:
        row: list = [p.rate]
        for qname in spec.quantities:
            row.append(to_wire(getattr(p, qname)))
        row.append(p.flag)
        rows.append(row)
    return CurveResponse(
        columns=columns,
        units="nats",
        rows=rows,
        notes=[
            "residual rates below zero follow each program's own feasibility semantics",
            "flagged rows mark exception rates where the upper bound is not claimed",
        ],
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    try:
        cfg = SimConfig(
            src=req.source.build(),
            n=req.n,
            rate=req.rate,
            trials=req.trials,
            seed=req.seed,
            mode=SimMode(req.mode),
        )
    except EnumerationLimitError as exc:
        raise HTTPException(status_code=422, detail=f"enumeration limit: {exc}")
    except ValueError as exc:
        raise _bad_request(exc)
    res = run(cfg)
    doc = res.to_doc(cfg)
    return SimulateResponse(**doc)


@app.post("/thresholds", response_model=ThresholdsResponse)
def thresholds(req: ThresholdsRequest) -> ThresholdsResponse:
    try:
        src = req.source.build()
    except ValueError as exc:
        raise _bad_request(exc)
    ctx = variable_context(src)
    th = ctx.thresholds
    window = zero_error_rate_window(src)
    return ThresholdsResponse(
        capacity=th.capacity,
        sp_rate_floor=th.sp_rate_floor,
        ex_rate_floor=th.ex_rate_floor,
        critical_rate=th.critical_rate,
        crossover_rate=th.crossover_rate,
        sw_limit=ctx.sw_limit,
        marginal_entropy=ctx.h_marginal,
        fixed_critical_rate=fixed_critical_rate(src),
        fixed_sp_rate_ceiling=fixed_sp_rate_ceiling(src),
        zero_error_window=(to_wire(window[0]), to_wire(window[1])),
        degenerate=degeneracy_predicate(src.marginal_x, src.forward),
    )


@app.post("/second-order", response_model=SecondOrderResponse)
def second_order(req: SecondOrderRequest) -> SecondOrderResponse:
    try:
        src = req.source.build()
    except ValueError as exc:
        raise _bad_request(exc)
    return SecondOrderResponse(coefficient=to_wire(float(second_order_coefficient(src))))


@app.post("/pcmax", response_model=PcmaxResponse)
def pcmax(req: PcmaxRequest) -> PcmaxResponse:
    try:
        src = req.source.build()
        value = max_correct_probability(src, req.rate)
    except ValueError as exc:
        raise _bad_request(exc)
    return PcmaxResponse(rate=req.rate, sw_limit=src.conditional_entropy_x_given_y(), p_c_max=value)
