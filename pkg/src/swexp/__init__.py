"""Error exponents, rate thresholds, and correct-decoding quantities for
finite-alphabet Slepian-Wolf and channel coding, certified against the
closed-form doubly binary family, with a desk-scale Monte Carlo simulator."""

from .extreal import INF, ExtReal
from .info_core import Channel, Distribution, JointSource, TypeDescriptor

__all__ = ["INF", "ExtReal", "Channel", "Distribution", "JointSource", "TypeDescriptor"]
