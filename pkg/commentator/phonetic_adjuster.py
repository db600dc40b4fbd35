"""
Phonetic adjuster: turns a Highlight value into TTS pitch and volume.

Five experimental designs decide which channel follows the highlight:

    Design  Volume           Pitch
    D1      default          default
    D2      highlight        default
    D3      1 - highlight    default
    D4      default          highlight
    D5      default          1 - highlight
"""

import functools
import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

logger = logging.getLogger(__name__)


class PhoneticRange(BaseModel):
    """Range and default of one TTS knob (semitones for pitch, dB for volume)."""

    model_config = ConfigDict(frozen=True)

    min: float
    max: float
    default: float = 0.0

    @model_validator(mode="after")
    def check_bounds(self) -> "PhoneticRange":
        if not self.min < self.max:
            raise ValueError(f"min ({self.min}) must be below max ({self.max})")
        if not self.min <= self.default <= self.max:
            raise ValueError(f"default {self.default} outside [{self.min}, {self.max}]")
        return self

    def clamp(self, value: float) -> float:
        return min(max(value, self.min), self.max)


PITCH_RANGE = PhoneticRange(min=-6.0, max=14.0, default=0.0)
# Declared TTS range; applied as a hard clamp.
VOLUME_CLAMP_RANGE = PhoneticRange(min=-6.0, max=6.0, default=0.0)
# Span that reproduces the published volume values.
VOLUME_MAP_RANGE = PhoneticRange(min=-4.0, max=4.0, default=0.0)


class ChannelPolicy(Enum):
    DEFAULT = "default"
    HIGHLIGHT = "h"
    INVERSE = "1-h"


class DesignId(IntEnum):
    D1 = 1
    D2 = 2
    D3 = 3
    D4 = 4
    D5 = 5

    @property
    def policy(self) -> Tuple[ChannelPolicy, ChannelPolicy]:
        """(volume policy, pitch policy)"""
        return _DESIGN_POLICIES[self]

    @property
    def label(self) -> str:
        return _DESIGN_LABELS[self]


_DESIGN_POLICIES = {
    DesignId.D1: (ChannelPolicy.DEFAULT, ChannelPolicy.DEFAULT),
    DesignId.D2: (ChannelPolicy.HIGHLIGHT, ChannelPolicy.DEFAULT),
    DesignId.D3: (ChannelPolicy.INVERSE, ChannelPolicy.DEFAULT),
    DesignId.D4: (ChannelPolicy.DEFAULT, ChannelPolicy.HIGHLIGHT),
    DesignId.D5: (ChannelPolicy.DEFAULT, ChannelPolicy.INVERSE),
}

_DESIGN_LABELS = {
    DesignId.D1: "baseline",
    DesignId.D2: "volume up",
    DesignId.D3: "volume down",
    DesignId.D4: "pitch up",
    DesignId.D5: "pitch down",
}


@dataclass(frozen=True)
class PhoneticParams:
    pitch: float
    volume_gain_db: float


@functools.cache
def _warn_highlight_clamped() -> None:
    logger.warning("Highlight value outside [0, 1]; clamping (reported once per run)")


def _clamp_unit(h: float) -> float:
    if 0.0 <= h <= 1.0:
        return h
    _warn_highlight_clamped()
    return min(max(h, 0.0), 1.0)


def map_to_range(h: float, r: PhoneticRange) -> float:
    """Affine map of h in [0, 1] onto [r.min, r.max]; h is clamped first."""
    h = _clamp_unit(h)
    return r.min + (r.max - r.min) * h


def _channel_value(
    policy: ChannelPolicy, h: float, r: PhoneticRange, clamp: PhoneticRange
) -> float:
    if policy is ChannelPolicy.DEFAULT:
        return r.default
    if policy is ChannelPolicy.INVERSE:
        h = 1.0 - _clamp_unit(h)
    return clamp.clamp(map_to_range(h, r))


def adjust(
    h: float,
    design: DesignId,
    pitch_r: PhoneticRange = PITCH_RANGE,
    vol_r: PhoneticRange = VOLUME_MAP_RANGE,
    *,
    pitch_clamp: Optional[PhoneticRange] = None,
    vol_clamp: Optional[PhoneticRange] = VOLUME_CLAMP_RANGE,
) -> PhoneticParams:
    """
    Resolve pitch and volume for one utterance.

    Args:
        h: Highlight value (clamped to [0, 1])
        design: Which channel follows the highlight
        pitch_r: Pitch mapping range
        vol_r: Volume mapping range
        pitch_clamp: Hard limits applied after mapping (defaults to pitch_r)
        vol_clamp: Hard limits applied after mapping (defaults to the declared [-6, 6])

    Returns:
        PhoneticParams with default values on the untouched channel
    """
    volume_policy, pitch_policy = DesignId(design).policy
    return PhoneticParams(
        pitch=_channel_value(pitch_policy, h, pitch_r, pitch_clamp or pitch_r),
        volume_gain_db=_channel_value(volume_policy, h, vol_r, vol_clamp or vol_r),
    )
