"""Tests for viewport pan/zoom math and zoo range checks."""

import math
import random

import pytest

from zoooz.geo import GeoPoint, M_PER_DEG, PixelPoint, fit_affine, geo_to_pixel, haversine_m
from zoooz.geofence import Circle, Hotspot
from zoooz.viewport import (
    ScreenPoint,
    Viewport,
    ZOOM_LADDER,
    ZooBounds,
    center_on,
    in_zoo_range,
    map_to_screen,
    screen_to_map,
    visible_hotspots,
    zoom_step,
)

IDENTITY_PAIRS = [
    (GeoPoint(0.0, 0.0), PixelPoint(0.0, 0.0)),
    (GeoPoint(0.0, 1.0), PixelPoint(1.0, 0.0)),
    (GeoPoint(1.0, 0.0), PixelPoint(0.0, 1.0)),
]


def base_viewport(zoom=1.0):
    return Viewport(center=PixelPoint(1000.0, 750.0), zoom=zoom, screen=(480, 640), map_extent=(2000, 1500))


class TestCenterOn:
    def test_idempotent(self):
        v = base_viewport()
        p = PixelPoint(123.0, 456.0)
        assert center_on(center_on(v, p), p) == center_on(v, p)

    def test_fix_lands_at_screen_center(self):
        v = center_on(base_viewport(), PixelPoint(321.5, 87.25))
        s = map_to_screen(v, PixelPoint(321.5, 87.25))
        assert (s.x, s.y) == (240.0, 320.0)

    def test_eastward_fixes_slide_landmark_west(self):
        v = base_viewport()
        landmark = PixelPoint(900.0, 700.0)
        xs = []
        for step in range(10):
            v = center_on(v, PixelPoint(1000.0 + step * 10.0, 750.0))
            xs.append(map_to_screen(v, landmark).x)
        assert all(b < a for a, b in zip(xs, xs[1:]))


class TestZoomStep:
    def test_clamped_at_top(self):
        v = base_viewport(zoom=2.0)
        assert zoom_step(v, +1).zoom == 2.0

    def test_clamped_at_bottom(self):
        v = base_viewport(zoom=0.5)
        assert zoom_step(v, -1).zoom == 0.5

    def test_up_then_down_returns(self):
        v = base_viewport(zoom=1.0)
        assert zoom_step(zoom_step(v, +1), -1).zoom == 1.0

    def test_center_is_fixed_point(self):
        v = base_viewport(zoom=1.0)
        for direction in (+1, +1, +1, -1, -1, -1, -1, +1):
            v = zoom_step(v, direction)
            s = map_to_screen(v, v.center)
            assert (s.x, s.y) == (240.0, 320.0)

    def test_random_walk_stays_on_ladder(self):
        rng = random.Random(61)
        v = base_viewport()
        for _ in range(100):
            v = zoom_step(v, rng.choice([1, -1]))
            assert v.zoom in ZOOM_LADDER

    def test_bad_direction_rejected(self):
        with pytest.raises(ValueError):
            zoom_step(base_viewport(), 2)


class TestMapScreenTransforms:
    def test_center_maps_to_screen_center(self):
        v = base_viewport()
        s = map_to_screen(v, v.center)
        assert (s.x, s.y) == (240.0, 320.0)

    def test_zoom_scales_offsets(self):
        v = base_viewport(zoom=2.0)
        s = map_to_screen(v, PixelPoint(v.center.x + 10.0, v.center.y))
        assert s.x == 240.0 + 20.0

    def test_round_trip(self):
        rng = random.Random(67)
        for zoom in ZOOM_LADDER:
            v = base_viewport(zoom=zoom)
            for _ in range(100):
                p = PixelPoint(rng.uniform(-500, 2500), rng.uniform(-500, 2000))
                back = screen_to_map(v, map_to_screen(v, p))
                assert back.x == pytest.approx(p.x, abs=1e-9)
                assert back.y == pytest.approx(p.y, abs=1e-9)


class TestVisibleHotspots:
    def circle(self, hid, lat, lon):
        return Hotspot(hid, hid, Circle(GeoPoint(lat, lon), 25.0), hid)

    def test_empty(self):
        cal = fit_affine(IDENTITY_PAIRS)
        assert visible_hotspots(base_viewport(), [], cal) == []

    def test_hotspot_at_center(self):
        cal = fit_affine(IDENTITY_PAIRS)
        v = Viewport(PixelPoint(0.5, 0.25), 1.0, (480, 640), (2000, 1500))
        result = visible_hotspots(v, [self.circle("mid", 0.25, 0.5)], cal)
        assert len(result) == 1
        assert result[0][0] == "mid"
        assert (result[0][1].x, result[0][1].y) == (240.0, 320.0)

    def test_matches_bruteforce_filter(self, pack):
        rng = random.Random(71)
        spots = list(pack.hotspots.values())
        for _ in range(100):
            v = Viewport(
                center=PixelPoint(rng.uniform(0, 2000), rng.uniform(0, 1500)),
                zoom=rng.choice(ZOOM_LADDER),
                screen=(480, 640),
                map_extent=(2000, 1500),
            )
            got = visible_hotspots(v, spots, pack.calibration)
            want = []
            for h in sorted(spots, key=lambda h: h.id):
                from zoooz.geofence import anchor_point

                s = map_to_screen(v, geo_to_pixel(pack.calibration, anchor_point(h)))
                if 0 <= s.x <= 480 and 0 <= s.y <= 640:
                    want.append((h.id, s))
            assert got == want

    def test_input_order_irrelevant(self, pack):
        rng = random.Random(73)
        spots = list(pack.hotspots.values())
        v = Viewport(PixelPoint(1000, 750), 0.5, (480, 640), (2000, 1500))
        baseline = visible_hotspots(v, spots, pack.calibration)
        for _ in range(10):
            rng.shuffle(spots)
            assert visible_hotspots(v, spots, pack.calibration) == baseline


class TestInZooRange:
    BOUNDS = ZooBounds(min_lat=-37.7875, max_lat=-37.78, min_lon=144.946, max_lon=144.956)

    def test_corner_inclusive_with_zero_margin(self):
        assert in_zoo_range(GeoPoint(-37.7875, 144.946), self.BOUNDS)
        assert in_zoo_range(GeoPoint(-37.78, 144.956), self.BOUNDS)

    def test_one_degree_outside_always_false(self):
        bounds = ZooBounds(-37.7875, -37.78, 144.946, 144.956, margin_m=100.0)
        assert not in_zoo_range(GeoPoint(-36.78, 144.95), bounds)
        assert not in_zoo_range(GeoPoint(-37.784, 145.956), bounds)

    def test_margin_matches_distance_to_edge_oracle(self):
        margin = 100.0
        bounds = ZooBounds(-37.7875, -37.78, 144.946, 144.956, margin_m=margin)
        rng = random.Random(79)

        def rect_distance_m(p: GeoPoint) -> float:
            # haversine from p to the nearest point of the rectangle
            clamped = GeoPoint(
                min(max(p.latitude, bounds.min_lat), bounds.max_lat),
                min(max(p.longitude, bounds.min_lon), bounds.max_lon),
            )
            return haversine_m(p, clamped)

        for _ in range(500):
            # probe points pushed out past a random edge by a random distance
            d = rng.uniform(0.0, 2.0 * margin)
            side = rng.randrange(4)
            lat = rng.uniform(bounds.min_lat, bounds.max_lat)
            lon = rng.uniform(bounds.min_lon, bounds.max_lon)
            if side == 0:
                lat = bounds.max_lat + d / M_PER_DEG
            elif side == 1:
                lat = bounds.min_lat - d / M_PER_DEG
            elif side == 2:
                lon = bounds.max_lon + d / (
                    M_PER_DEG * math.cos(math.radians(bounds.mid_latitude))
                )
            else:
                lon = bounds.min_lon - d / (
                    M_PER_DEG * math.cos(math.radians(bounds.mid_latitude))
                )
            p = GeoPoint(lat, lon)
            actual = rect_distance_m(p)
            if actual < margin * (1 - 1e-3):
                assert in_zoo_range(p, bounds)
            elif actual > margin * (1 + 1e-3):
                assert not in_zoo_range(p, bounds)

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError):
            ZooBounds(min_lat=1.0, max_lat=0.0, min_lon=0.0, max_lon=1.0)
