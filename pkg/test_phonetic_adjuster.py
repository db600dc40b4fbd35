"""
Tests for the highlight-to-pitch/volume designs.
"""

import logging
import random

import pytest

from commentator.phonetic_adjuster import (
    PITCH_RANGE,
    VOLUME_CLAMP_RANGE,
    VOLUME_MAP_RANGE,
    ChannelPolicy,
    DesignId,
    PhoneticRange,
    _warn_highlight_clamped,
    adjust,
    map_to_range,
)

HIGH_SCENE = 0.6239
LOW_SCENE = 0.2349


@pytest.fixture(autouse=True)
def reset_clamp_warning():
    _warn_highlight_clamped.cache_clear()
    yield
    _warn_highlight_clamped.cache_clear()


def test_map_to_range_endpoints():
    assert map_to_range(0.0, PITCH_RANGE) == -6.0
    assert map_to_range(1.0, PITCH_RANGE) == 14.0
    assert map_to_range(HIGH_SCENE, PITCH_RANGE) == pytest.approx(6.478, abs=5e-3)


@pytest.mark.parametrize(
    "h, design, pitch",
    [
        (HIGH_SCENE, DesignId.D4, 6.4772),
        (HIGH_SCENE, DesignId.D5, 1.5228),
        (LOW_SCENE, DesignId.D4, -1.3015),
        (LOW_SCENE, DesignId.D5, 9.3014),
    ],
)
def test_pitch_designs(h, design, pitch):
    params = adjust(h, design)
    assert params.pitch == pytest.approx(pitch, abs=5e-3)
    assert params.volume_gain_db == VOLUME_MAP_RANGE.default


@pytest.mark.parametrize(
    "h, design, volume",
    [
        (HIGH_SCENE, DesignId.D2, 0.9909),
        (HIGH_SCENE, DesignId.D3, -0.9909),
        (LOW_SCENE, DesignId.D2, -2.1205),
        (LOW_SCENE, DesignId.D3, 2.1205),
    ],
)
def test_volume_designs(h, design, volume):
    params = adjust(h, design)
    assert params.volume_gain_db == pytest.approx(volume, abs=5e-3)
    assert params.pitch == PITCH_RANGE.default


def test_declared_volume_range_as_map():
    # Mapping over the full [-6, 6] span is supported too.
    params = adjust(1.0, DesignId.D2, vol_r=VOLUME_CLAMP_RANGE)
    assert params.volume_gain_db == 6.0


def test_complementarity():
    rng = random.Random(99)
    for _ in range(1000):
        h = rng.random()
        assert adjust(h, DesignId.D4).pitch + adjust(h, DesignId.D5).pitch == pytest.approx(8.0, abs=1e-9)
        assert adjust(h, DesignId.D2).volume_gain_db + adjust(
            h, DesignId.D3
        ).volume_gain_db == pytest.approx(0.0, abs=1e-9)


def test_monotonicity():
    values = [i / 50 for i in range(51)]
    d2 = [adjust(h, DesignId.D2).volume_gain_db for h in values]
    d3 = [adjust(h, DesignId.D3).volume_gain_db for h in values]
    d4 = [adjust(h, DesignId.D4).pitch for h in values]
    d5 = [adjust(h, DesignId.D5).pitch for h in values]
    assert d2 == sorted(d2) and d4 == sorted(d4)
    assert d3 == sorted(d3, reverse=True) and d5 == sorted(d5, reverse=True)


@pytest.mark.parametrize("design", list(DesignId))
def test_clamping_matches_endpoints(design):
    assert adjust(-0.5, design) == adjust(0.0, design)
    assert adjust(1.7, design) == adjust(1.0, design)


@pytest.mark.parametrize("h", [0.0, 0.37, 1.0, 5.0])
def test_baseline_is_constant(h):
    params = adjust(h, DesignId.D1)
    assert params.pitch == 0.0
    assert params.volume_gain_db == 0.0


def test_at_most_one_channel_follows_highlight():
    for design in DesignId:
        volume, pitch = design.policy
        assert ChannelPolicy.DEFAULT in (volume, pitch)
    assert DesignId.D2.label == "volume up"


def test_clamp_warning_logged_once(caplog):
    with caplog.at_level(logging.WARNING, logger="commentator.phonetic_adjuster"):
        adjust(1.5, DesignId.D4)
        adjust(-0.2, DesignId.D2)
        adjust(0.5, DesignId.D2)
    warnings = [r for r in caplog.records if "clamping" in r.getMessage()]
    assert len(warnings) == 1


def test_outputs_stay_within_clamp_ranges():
    narrow = PhoneticRange(min=-1.0, max=1.0, default=0.0)
    params = adjust(1.0, DesignId.D2, vol_r=VOLUME_CLAMP_RANGE, vol_clamp=narrow)
    assert params.volume_gain_db == 1.0


@pytest.mark.parametrize(
    "bounds",
    [dict(min=1.0, max=1.0), dict(min=2.0, max=1.0), dict(min=0.0, max=1.0, default=3.0)],
)
def test_invalid_range(bounds):
    with pytest.raises(ValueError):
        PhoneticRange(**bounds)
