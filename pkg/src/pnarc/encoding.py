"""Field-cycle input encoding.

A scalar sample u maps to an amplitude h(u) linear in u between h_min and
h_max, and the amplitude is applied as n_cycles alternating +/- field pairs
along a fixed in-plane angle.  The pairs cancel exactly, so a protocol sums
to the zero vector; what the array retains is the hysteresis of the cycle.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .dynamics import ExternalField
from .exceptions import InputRangeError, InvalidParameterError

FieldProtocol = List[ExternalField]


@dataclass(frozen=True)
class EncodingConfig:
    n_cycles: int = 5
    h_min: float = 0.6
    h_max: float = 1.1
    field_angle: float = np.pi / 4
    input_range: tuple = (0.0, 1.0)
    range_tolerance: float = 1e-9

    def __post_init__(self):
        if self.n_cycles < 1:
            raise InvalidParameterError("n_cycles must be >= 1")
        if not (0 < self.h_min < self.h_max):
            raise InvalidParameterError("need 0 < h_min < h_max")
        lo, hi = self.input_range
        if not lo < hi:
            raise InvalidParameterError("input_range must satisfy lo < hi")


def amplitude(u: float, config: EncodingConfig) -> float:
    """Field amplitude for sample u: linear from h_min at lo to h_max at hi."""
    lo, hi = config.input_range
    if u < lo - config.range_tolerance or u > hi + config.range_tolerance:
        raise InputRangeError(
            f"sample {u!r} outside input range [{lo}, {hi}] "
            f"(tolerance {config.range_tolerance})"
        )
    u = min(max(u, lo), hi)
    return config.h_min + (config.h_max - config.h_min) * (u - lo) / (hi - lo)


def encode_sample(u: float, config: EncodingConfig) -> FieldProtocol:
    """Alternating +/- field pairs for one sample; length 2 * n_cycles."""
    h = amplitude(u, config)
    hx = h * np.cos(config.field_angle)
    hy = h * np.sin(config.field_angle)
    protocol = []
    for _ in range(config.n_cycles):
        protocol.append(ExternalField(hx, hy))
        protocol.append(ExternalField(-hx, -hy))
    return protocol
