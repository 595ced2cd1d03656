"""Hotspot geofencing with enter/exit hysteresis.

Circles are tested with great-circle distance. Polygon tests run in a local
equirectangular plane (metres, centered on the polygon centroid), which is
exact enough at the sub-100 m scale of zoo exhibits. Exits use the geometry
inflated by a buffer so GPS noise cannot flicker events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geo import GeoPoint, M_PER_DEG, haversine_m

_BOUNDARY_EPS_M = 1e-9


@dataclass(frozen=True)
class Circle:
    center: GeoPoint
    radius_m: float


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[GeoPoint, ...]  # implicitly closed, must be simple


Geometry = Circle | Polygon


@dataclass(frozen=True)
class Hotspot:
    id: str
    name: str
    geometry: Geometry
    content_id: str
    category: str = ""


@dataclass(frozen=True)
class FenceState:
    """Set of hotspot ids the visitor currently occupies."""

    inside: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class Entered:
    hotspot_id: str


@dataclass(frozen=True)
class Exited:
    hotspot_id: str


FenceEvent = Entered | Exited


def _polygon_centroid(poly: Polygon) -> GeoPoint:
    lat = sum(v.latitude for v in poly.vertices) / len(poly.vertices)
    lon = sum(v.longitude for v in poly.vertices) / len(poly.vertices)
    return GeoPoint(lat, lon)


def _to_plane(p: GeoPoint, origin: GeoPoint) -> tuple[float, float]:
    """Local east/north offsets in metres from the origin."""
    east = (p.longitude - origin.longitude) * M_PER_DEG * math.cos(math.radians(origin.latitude))
    north = (p.latitude - origin.latitude) * M_PER_DEG
    return east, north


def _segment_distance(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    """Planar distance from point P to segment AB."""
    abx, aby = bx - ax, by - ay
    apx, apy = px - ax, py - ay
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return math.hypot(apx, apy)
    t = max(0.0, min(1.0, (apx * abx + apy * aby) / denom))
    return math.hypot(apx - t * abx, apy - t * aby)


def _polygon_plane(poly: Polygon) -> tuple[GeoPoint, list[tuple[float, float]]]:
    origin = _polygon_centroid(poly)
    return origin, [_to_plane(v, origin) for v in poly.vertices]


def _point_in_ring(x: float, y: float, ring: list[tuple[float, float]]) -> bool:
    """Even-odd ray casting; points on the boundary count as inside."""
    n = len(ring)
    for i in range(n):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % n]
        if _segment_distance(x, y, ax, ay, bx, by) <= _BOUNDARY_EPS_M:
            return True
    inside = False
    for i in range(n):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % n]
        if (ay > y) != (by > y):
            x_cross = ax + (y - ay) * (bx - ax) / (by - ay)
            if x < x_cross:
                inside = not inside
    return inside


def _ring_boundary_distance(x: float, y: float, ring: list[tuple[float, float]]) -> float:
    n = len(ring)
    return min(
        _segment_distance(x, y, *ring[i], *ring[(i + 1) % n]) for i in range(n)
    )


def polygon_area_m2(poly: Polygon) -> float:
    """Unsigned shoelace area in the polygon's local plane."""
    _, ring = _polygon_plane(poly)
    total = 0.0
    n = len(ring)
    for i in range(n):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % n]
        total += ax * by - bx * ay
    return abs(total) / 2.0


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def polygon_is_simple(poly: Polygon) -> bool:
    """True when no two non-adjacent edges intersect."""
    _, ring = _polygon_plane(poly)
    n = len(ring)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # shared endpoint
            if _segments_cross(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]):
                return False
    return True


def anchor_point(h: Hotspot) -> GeoPoint:
    """Representative point: circle center or polygon centroid."""
    if isinstance(h.geometry, Circle):
        return h.geometry.center
    return _polygon_centroid(h.geometry)


def contains(h: Hotspot, p: GeoPoint) -> bool:
    """Whether the point is inside the hotspot; the boundary counts as inside."""
    if isinstance(h.geometry, Circle):
        return haversine_m(h.geometry.center, p) <= h.geometry.radius_m
    origin, ring = _polygon_plane(h.geometry)
    x, y = _to_plane(p, origin)
    return _point_in_ring(x, y, ring)


def _outside_inflated(h: Hotspot, p: GeoPoint, buffer_m: float) -> bool:
    """Whether the point is outside the geometry inflated by the exit buffer."""
    if isinstance(h.geometry, Circle):
        return haversine_m(h.geometry.center, p) > h.geometry.radius_m + buffer_m
    origin, ring = _polygon_plane(h.geometry)
    x, y = _to_plane(p, origin)
    if _point_in_ring(x, y, ring):
        return False
    return _ring_boundary_distance(x, y, ring) > buffer_m


def update(
    state: FenceState,
    hotspots: list[Hotspot],
    p: GeoPoint,
    exit_buffer_m: float,
) -> tuple[FenceState, list[FenceEvent]]:
    """Advance the fence state for one position sample.

    Emits Entered for hotspots the point is inside but the state is not, and
    Exited for occupied hotspots the point has left by more than the exit
    buffer. Events come out ordered by hotspot id so logs are deterministic.
    """
    if exit_buffer_m < 0:
        raise ValueError("exit buffer must be >= 0")
    inside = set(state.inside)
    events: list[FenceEvent] = []
    for h in sorted(hotspots, key=lambda h: h.id):
        if h.id in inside:
            if _outside_inflated(h, p, exit_buffer_m):
                inside.discard(h.id)
                events.append(Exited(h.id))
        elif contains(h, p):
            inside.add(h.id)
            events.append(Entered(h.id))
    return FenceState(frozenset(inside)), events


def nearest_hotspots(
    hotspots: list[Hotspot], p: GeoPoint, k: int
) -> list[tuple[str, float]]:
    """The k nearest hotspots by distance to their anchor point, ascending.

    Ties break on id lexicographic order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(
        ((h.id, haversine_m(anchor_point(h), p)) for h in hotspots),
        key=lambda pair: (pair[1], pair[0]),
    )
    return ranked[:k]
