from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from geodesy import (
    EARTH_RADIUS_M,
    GeodeticCoord,
    field_from_heading,
    from_ltp,
    heading_from_magnetometer,
    make_ltp,
    to_ltp,
)
from navsim.navsim_error import DegenerateFieldError, GeodesyError
from utils import wrap_angle


@pytest.fixture
def frame(default_config):
    return make_ltp(default_config.scenario.origin, heading=0.0)


def test_origin_maps_to_zero(frame):
    assert to_ltp(frame, frame.origin) == (0.0, 0.0)


def test_make_ltp_stores_fields():
    origin = GeodeticCoord(lat=43.07, lon=-89.40)
    frame = make_ltp(origin, heading=0.3)
    assert frame.origin == origin
    assert frame.heading_offset == 0.3
    assert make_ltp(origin).heading_offset == 0.0


def test_milli_degree_north(frame):
    north = GeodeticCoord(lat=frame.origin.lat + 1e-3, lon=frame.origin.lon)
    x, y = to_ltp(frame, north)
    assert x == 0.0
    assert y == pytest.approx(1e-3 * math.pi / 180.0 * EARTH_RADIUS_M, rel=1e-9)


def test_round_trip_within_five_kilometres(frame):
    rng = np.random.default_rng(5)
    for _ in range(100):
        x, y = rng.uniform(-3500.0, 3500.0, size=2)
        geo = from_ltp(frame, float(x), float(y))
        again = from_ltp(frame, *to_ltp(frame, geo))
        assert again.lat == pytest.approx(geo.lat, abs=1e-9)
        assert again.lon == pytest.approx(geo.lon, abs=1e-9)
        assert to_ltp(frame, geo) == pytest.approx((x, y), abs=1e-6)


def test_from_ltp_examples(frame):
    assert from_ltp(frame, 0.0, 0.0) == frame.origin
    assert from_ltp(frame, 125.0, 0.0).lat == frame.origin.lat


def test_projection_is_affine(frame):
    a = GeodeticCoord(lat=frame.origin.lat + 0.01, lon=frame.origin.lon - 0.02)
    b = GeodeticCoord(lat=frame.origin.lat - 0.004, lon=frame.origin.lon + 0.03)
    mid = GeodeticCoord(lat=0.5 * (a.lat + b.lat), lon=0.5 * (a.lon + b.lon))
    pa, pb = np.array(to_ltp(frame, a)), np.array(to_ltp(frame, b))
    assert np.array(to_ltp(frame, mid)) == pytest.approx(0.5 * (pa + pb), abs=1e-6)


def test_antimeridian_takes_the_short_way():
    frame = make_ltp(GeodeticCoord(lat=0.0, lon=179.9999))
    x, _ = to_ltp(frame, GeodeticCoord(lat=0.0, lon=-179.9999))
    assert 0.0 < x < 50.0
    back = from_ltp(frame, x, 0.0)
    assert back.lon == pytest.approx(-179.9999, abs=1e-9)


def test_outside_validity_radius_warns(frame, caplog):
    far = from_ltp(frame, 0.0, 60_000.0)
    with caplog.at_level(logging.WARNING, logger="geodesy.ltp"):
        to_ltp(frame, far)
    assert any("validity radius" in record.getMessage() for record in caplog.records)


def test_invalid_coordinates_are_rejected():
    with pytest.raises(GeodesyError):
        GeodeticCoord(lat=91.0, lon=0.0)
    with pytest.raises(GeodesyError):
        GeodeticCoord(lat=0.0, lon=-180.0)
    with pytest.raises(GeodesyError):
        GeodeticCoord(lat=math.nan, lon=0.0)
    with pytest.raises(GeodesyError):
        make_ltp(GeodeticCoord(lat=90.0, lon=0.0))
    assert GeodeticCoord(lat=0.0, lon=180.0).lon == 180.0


# ---------------------------------------------------------------------------
# Magnetometer heading
# ---------------------------------------------------------------------------

def test_heading_examples(frame):
    assert heading_from_magnetometer(field_from_heading(0.0, frame), frame) == pytest.approx(0.0, abs=1e-12)
    assert heading_from_magnetometer(field_from_heading(math.pi / 2.0, frame), frame) == pytest.approx(math.pi / 2.0, abs=1e-12)


def test_heading_round_trip(frame):
    rng = np.random.default_rng(8)
    for heading in rng.uniform(-math.pi, math.pi, size=200):
        field = field_from_heading(float(heading), frame, strength=0.45, vertical=-0.3)
        recovered = heading_from_magnetometer(field, frame)
        assert -math.pi < recovered <= math.pi
        assert abs(wrap_angle(recovered - heading)) <= 1e-12


def test_degenerate_field_is_rejected(frame):
    with pytest.raises(DegenerateFieldError):
        heading_from_magnetometer(np.array([0.0, 0.0, 0.5]), frame)
    with pytest.raises(ValueError):
        heading_from_magnetometer(np.array([1.0, 0.0]), frame)
