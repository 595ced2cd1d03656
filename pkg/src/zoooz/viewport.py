"""Three-layer map viewport: background raster, hotspot overlay, centered cursor.

The viewport keeps the current fix under the exact screen center; the cursor
layer is therefore not part of the math at all, renderers simply draw it at
mid-screen. Zoom moves along a fixed ladder and panning may run past the map
raster (the background shows void fill there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geo import GeoPoint, M_PER_DEG, MapCalibration, PixelPoint, geo_to_pixel
from .geofence import Hotspot, anchor_point

ZOOM_LADDER = (0.5, 0.75, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class ScreenPoint:
    x: float
    y: float


@dataclass(frozen=True)
class Viewport:
    center: PixelPoint  # map-frame point pinned under the screen center
    zoom: float
    screen: tuple[int, int]  # width, height in screen pixels
    map_extent: tuple[int, int]  # width, height of the raster in map pixels

    def __post_init__(self):
        if self.zoom not in ZOOM_LADDER:
            raise ValueError(f"zoom {self.zoom} not on the ladder {ZOOM_LADDER}")
        if self.screen[0] <= 0 or self.screen[1] <= 0:
            raise ValueError("screen dimensions must be positive")


@dataclass(frozen=True)
class ZooBounds:
    """Geographic rectangle the map is valid for, with an optional slack margin."""

    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float
    margin_m: float = 0.0

    def __post_init__(self):
        if self.min_lat >= self.max_lat or self.min_lon >= self.max_lon:
            raise ValueError("bounds must have min < max on both axes")

    @property
    def mid_latitude(self) -> float:
        return (self.min_lat + self.max_lat) / 2.0


def center_on(v: Viewport, fix_px: PixelPoint) -> Viewport:
    """Pan so the given map point sits under the screen center."""
    return replace(v, center=fix_px)


def zoom_step(v: Viewport, direction: int) -> Viewport:
    """Move one step along the zoom ladder, clamped at the ends."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    idx = ZOOM_LADDER.index(v.zoom) + direction
    idx = max(0, min(len(ZOOM_LADDER) - 1, idx))
    return replace(v, zoom=ZOOM_LADDER[idx])


def map_to_screen(v: Viewport, p: PixelPoint) -> ScreenPoint:
    return ScreenPoint(
        (p.x - v.center.x) * v.zoom + v.screen[0] / 2.0,
        (p.y - v.center.y) * v.zoom + v.screen[1] / 2.0,
    )


def screen_to_map(v: Viewport, s: ScreenPoint) -> PixelPoint:
    return PixelPoint(
        (s.x - v.screen[0] / 2.0) / v.zoom + v.center.x,
        (s.y - v.screen[1] / 2.0) / v.zoom + v.center.y,
    )


def visible_hotspots(
    v: Viewport, hotspots: list[Hotspot], cal: MapCalibration
) -> list[tuple[str, ScreenPoint]]:
    """Hotspots whose anchor falls on screen, with positions, ordered by id."""
    out = []
    for h in sorted(hotspots, key=lambda h: h.id):
        s = map_to_screen(v, geo_to_pixel(cal, anchor_point(h)))
        if 0.0 <= s.x <= v.screen[0] and 0.0 <= s.y <= v.screen[1]:
            out.append((h.id, s))
    return out


def in_zoo_range(p: GeoPoint, bounds: ZooBounds) -> bool:
    """Rectangle containment, inclusive, with the margin applied in metres.

    The metre margin converts to degrees at the bounds' mid-latitude.
    """
    dlat = bounds.margin_m / M_PER_DEG
    dlon = bounds.margin_m / (M_PER_DEG * math.cos(math.radians(bounds.mid_latitude)))
    return (
        bounds.min_lat - dlat <= p.latitude <= bounds.max_lat + dlat
        and bounds.min_lon - dlon <= p.longitude <= bounds.max_lon + dlon
    )
