"""Geodetic distance and the affine mapping between degrees and map pixels.

The site is well under a kilometre across, so geographic coordinates map to
the raster through a single 6-coefficient affine transform instead of a
formal projection; the error this introduces is far below GPS noise.
Distances use a spherical earth of mean radius 6,371,000 m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, InsufficientPoints

EARTH_RADIUS_M = 6_371_000.0
#: metres per degree of latitude on the sphere (also longitude at the equator)
M_PER_DEG = EARTH_RADIUS_M * math.pi / 180.0


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float


@dataclass(frozen=True)
class PixelPoint:
    x: float
    y: float


@dataclass(frozen=True)
class MapCalibration:
    """Affine transform ``x = a*lon + b*lat + c``, ``y = d*lon + e*lat + f``.

    x runs rightward and y downward in the map raster. ``rms_residual`` is
    the root-mean-square of the control points' Euclidean mapping errors in
    pixels.
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    rms_residual: float = 0.0
    control_points: tuple[tuple[GeoPoint, PixelPoint], ...] = ()

    def determinant(self) -> float:
        return self.a * self.e - self.b * self.d


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in metres."""
    lat1, lon1 = math.radians(a.latitude), math.radians(a.longitude)
    lat2, lon2 = math.radians(b.latitude), math.radians(b.longitude)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def fit_affine(pairs: list[tuple[GeoPoint, PixelPoint]]) -> MapCalibration:
    """Least-squares fit of the degree-to-pixel affine from control points.

    Needs at least 3 pairs whose geographic points are not collinear. The
    solve runs on mean-centered coordinates to keep the system well
    conditioned even when the site spans a tiny fraction of a degree.
    """
    if len(pairs) < 3:
        raise InsufficientPoints(f"affine fit needs >= 3 control points, got {len(pairs)}")
    lons = np.array([g.longitude for g, _ in pairs], dtype=float)
    lats = np.array([g.latitude for g, _ in pairs], dtype=float)
    xs = np.array([p.x for _, p in pairs], dtype=float)
    ys = np.array([p.y for _, p in pairs], dtype=float)

    dlon = lons - lons.mean()
    dlat = lats - lats.mean()
    design = np.column_stack([dlon, dlat])
    if np.linalg.matrix_rank(design) < 2:
        raise DegenerateGeometry("control points are collinear")

    (a, b), *_ = np.linalg.lstsq(design, xs - xs.mean(), rcond=None)
    (d, e), *_ = np.linalg.lstsq(design, ys - ys.mean(), rcond=None)
    c = xs.mean() - a * lons.mean() - b * lats.mean()
    f = ys.mean() - d * lons.mean() - e * lats.mean()

    px_err = a * lons + b * lats + c - xs
    py_err = d * lons + e * lats + f - ys
    rms = float(math.sqrt(np.mean(px_err**2 + py_err**2)))
    return MapCalibration(
        float(a), float(b), float(c), float(d), float(e), float(f),
        rms_residual=rms,
        control_points=tuple(pairs),
    )


def geo_to_pixel(cal: MapCalibration, p: GeoPoint) -> PixelPoint:
    """Apply the affine form exactly."""
    return PixelPoint(
        cal.a * p.longitude + cal.b * p.latitude + cal.c,
        cal.d * p.longitude + cal.e * p.latitude + cal.f,
    )


def pixel_to_geo(cal: MapCalibration, q: PixelPoint) -> GeoPoint:
    """Invert the affine; raises DegenerateGeometry when it is not invertible."""
    det = cal.determinant()
    if abs(det) < 1e-12:
        raise DegenerateGeometry(f"calibration determinant {det} too small to invert")
    u = q.x - cal.c
    v = q.y - cal.f
    lon = (cal.e * u - cal.b * v) / det
    lat = (-cal.d * u + cal.a * v) / det
    return GeoPoint(lat, lon)
