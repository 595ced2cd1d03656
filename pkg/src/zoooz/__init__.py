"""GPS-driven interactive zoo tour guide.

Parses receiver sentences, georeferences fixes onto a zoo map, pans a
three-layer viewport around a centered cursor, fires geofenced hotspot
content, and serves a steerable simulated tour.
"""

from . import content, engine, errors, geo, geofence, nmea, simulator, viewport
from .content import ContentPack, load_pack, validate_pack
from .engine import Session, SessionConfig, new_session, run_tour
from .geo import GeoPoint, MapCalibration, PixelPoint, fit_affine, haversine_m
from .geofence import FenceState, Hotspot
from .nmea import GeoFix, format_gga, parse_sentence
from .simulator import FixStream, WalkScript, build_walk, load_walk

__version__ = "0.1.0"

__all__ = [
    "content",
    "engine",
    "errors",
    "geo",
    "geofence",
    "nmea",
    "simulator",
    "viewport",
    "ContentPack",
    "load_pack",
    "validate_pack",
    "Session",
    "SessionConfig",
    "new_session",
    "run_tour",
    "GeoPoint",
    "MapCalibration",
    "PixelPoint",
    "fit_affine",
    "haversine_m",
    "FenceState",
    "Hotspot",
    "GeoFix",
    "format_gga",
    "parse_sentence",
    "FixStream",
    "WalkScript",
    "build_walk",
    "load_walk",
    "__version__",
]
