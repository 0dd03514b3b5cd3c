"""Request/response models of the HTTP surface.

JSON has no representation for infinity, so exponent values travel as
numbers or the literal string "inf"; empty window-limited quantities travel
as null.
"""

from __future__ import annotations

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from ..binary_example import BinaryExample
from ..info_core import JointSource, load_source

WireReal = Union[float, Literal["inf"]]


def to_wire(v: Optional[float]) -> Optional[WireReal]:
    if v is None:
        return None
    if math.isinf(v):
        return "inf"
    if isinstance(v, float) and math.isnan(v):
        return None
    return float(v)


class BinaryPreset(BaseModel):
    p: float = Field(gt=0.0, lt=0.5)
    tau: float = Field(gt=0.0, le=0.5)


class SourceSpec(BaseModel):
    """Either an explicit joint matrix or the doubly binary preset."""

    alphabet_x: Optional[int] = None
    alphabet_y: Optional[int] = None
    joint: Optional[list[list[float]]] = None
    preset: Optional[BinaryPreset] = None

    @model_validator(mode="after")
    def _one_of(self) -> "SourceSpec":
        explicit = self.joint is not None
        if explicit == (self.preset is not None):
            raise ValueError("give either a joint matrix (with alphabet sizes) or a preset, not both")
        if explicit and (self.alphabet_x is None or self.alphabet_y is None):
            raise ValueError("explicit sources need alphabet_x and alphabet_y")
        return self

    def build(self) -> JointSource:
        if self.preset is not None:
            return BinaryExample(self.preset.p, self.preset.tau).source()
        return load_source({"alphabet_x": self.alphabet_x, "alphabet_y": self.alphabet_y, "joint": self.joint})


class SweepModel(BaseModel):
    r_min: float = Field(ge=0.0)
    r_max: float
    points: int = Field(ge=2, le=1_000_000)
    quantities: Optional[list[str]] = None


class CurveRequest(BaseModel):
    source: SourceSpec
    sweep: SweepModel


class CurveResponse(BaseModel):
    columns: list[str]
    units: str
    rows: list[list[Union[float, str, None]]]
    notes: list[str]


class SimulateRequest(BaseModel):
    source: SourceSpec
    n: int = Field(ge=1)
    rate: float = Field(gt=0.0)
    trials: int = Field(ge=0)
    seed: int
    mode: Literal["fixed_random_binning", "variable_exact", "variable_mass_accounting"]


class SimulateResponse(BaseModel):
    config: dict
    empirical_rate: float
    p_error: float
    p_correct: float
    ci_halfwidth: float
    trials_run: int
    wallclock_ms: float
    metadata: dict


class ThresholdsRequest(BaseModel):
    source: SourceSpec


class ThresholdsResponse(BaseModel):
    """Rate landmarks of the source pair (nats): channel-side thresholds at
    the source marginal, plus the source-side rates."""

    capacity: float
    sp_rate_floor: float
    ex_rate_floor: float
    critical_rate: float
    crossover_rate: float
    sw_limit: float
    marginal_entropy: float
    fixed_critical_rate: float
    fixed_sp_rate_ceiling: float
    zero_error_window: tuple[WireReal, WireReal]
    degenerate: bool


class SecondOrderRequest(BaseModel):
    source: SourceSpec


class SecondOrderResponse(BaseModel):
    coefficient: WireReal


class PcmaxRequest(BaseModel):
    source: SourceSpec
    rate: float = Field(ge=0.0)


class PcmaxResponse(BaseModel):
    rate: float
    sw_limit: float
    p_c_max: float
