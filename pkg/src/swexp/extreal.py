"""Nonnegative extended reals for exponent values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering


@total_ordering
@dataclass(frozen=True, eq=False)
class ExtReal:
    """A nonnegative real or +infinity, with a total order.

    Exponent programs return +infinity when infeasible (zero-error regimes).
    The marker is explicit so that infeasibility never leaks into float
    arithmetic as a sentinel; ``float(x)`` converts at the boundary.
    """

    finite: bool
    value: float = math.inf

    def __post_init__(self) -> None:
        if self.finite:
            if not math.isfinite(self.value) or self.value < 0.0:
                raise ValueError(f"finite ExtReal requires a nonnegative finite value, got {self.value}")
        else:
            object.__setattr__(self, "value", math.inf)

    @classmethod
    def of(cls, x: float) -> "ExtReal":
        """Wrap a float; math.inf maps to the infinite variant."""
        if math.isinf(x):
            if x < 0:
                raise ValueError("ExtReal is nonnegative; -inf not representable")
            return cls(finite=False)
        return cls(finite=True, value=float(x))

    @classmethod
    def infinity(cls) -> "ExtReal":
        return cls(finite=False)

    def __float__(self) -> float:
        return self.value

    def _coerce(self, other) -> float:
        if isinstance(other, ExtReal):
            return other.value
        if isinstance(other, (int, float)):
            return float(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return self.value == v

    def __lt__(self, other) -> bool:
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return self.value < v

    def __add__(self, other) -> "ExtReal":
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if not self.finite or math.isinf(v):
            return ExtReal.infinity()
        return ExtReal.of(self.value + v)

    __radd__ = __add__

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return "ExtReal(inf)" if not self.finite else f"ExtReal({self.value!r})"


INF = ExtReal.infinity()
