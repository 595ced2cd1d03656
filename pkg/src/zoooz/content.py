"""Portable content packs: animals, hotspots, events, calibration, map assets.

A pack is a directory with a ``manifest.json`` plus one-record-per-line
tables (``animals.jsonl``, ``hotspots.jsonl``, ``events.jsonl``), a
``calibration.csv`` of control points, and a ``media/`` tree referenced by
relative paths. The relational constraints (unique slugs, referential
integrity, calibration consistency) are enforced at load time.

The schema is this project's own portable design; the original guide kept
the same data in a relational database, and this layout is a diffable
file-based reconstruction of that idea.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from .errors import (
    BrokenReference,
    CalibrationMismatch,
    DegenerateGeometry,
    InsufficientPoints,
    MissingFile,
    PackError,
    SchemaViolation,
    UnknownHotspot,
)
from .geo import GeoPoint, MapCalibration, PixelPoint, fit_affine
from .geofence import Circle, Hotspot, Polygon, polygon_area_m2, polygon_is_simple
from .viewport import ZooBounds, in_zoo_range

FORMAT_VERSION = 1
MEDIA_KINDS = ("image", "audio", "video", "text")

_SLUG_RE = re.compile(r"^[a-z0-9]+(-[a-z0-9]+)*$")
_HHMM_RE = re.compile(r"^([01]\d|2[0-3]):([0-5]\d)$")

#: relative tolerance for cached-vs-refit calibration coefficients, with a
#: floor of 1.0 so exact-zero coefficients compare sensibly
_CAL_TOL = 1e-6


@dataclass(frozen=True)
class MediaRef:
    kind: str
    path: str
    caption: str = ""


@dataclass(frozen=True)
class AnimalRecord:
    id: str
    name: str
    species: str
    description: str
    media: tuple[MediaRef, ...] = ()


@dataclass(frozen=True)
class EventRecord:
    id: str
    title: str
    start_min: int  # minutes since local midnight
    end_min: int
    location_hotspot_id: str | None = None


@dataclass(frozen=True)
class ContentPack:
    name: str
    version: str
    format_version: int
    root: Path
    map_image: str
    map_extent: tuple[int, int]
    bounds: ZooBounds
    calibration: MapCalibration
    animals: dict[str, AnimalRecord] = field(default_factory=dict)
    hotspots: dict[str, Hotspot] = field(default_factory=dict)
    events: tuple[EventRecord, ...] = ()


def parse_hhmm(text: str) -> int:
    """Parse a local HH:MM time of day to minutes since midnight."""
    m = _HHMM_RE.match(text)
    if not m:
        raise ValueError(f"bad HH:MM time {text!r}")
    return int(m.group(1)) * 60 + int(m.group(2))


def format_minutes(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


class _Collector:
    """Accumulates pack issues so validation can report everything at once."""

    def __init__(self):
        self.issues: list[PackError] = []

    def add(self, issue: PackError) -> None:
        self.issues.append(issue)


def _check_slug(value, file: str, locator: str, col: _Collector) -> str | None:
    if not isinstance(value, str) or not _SLUG_RE.match(value):
        col.add(SchemaViolation(f"id {value!r} is not a slug", file=file, locator=locator))
        return None
    return value


def _require(record: dict, key: str, kind, file: str, locator: str, col: _Collector):
    value = record.get(key)
    if not isinstance(value, kind):
        col.add(
            SchemaViolation(
                f"field {key!r} missing or not {kind.__name__}", file=file, locator=locator
            )
        )
        return None
    return value


def _iter_jsonl(path: Path, col: _Collector):
    """Yield (locator, record) per line, collecting JSON syntax errors."""
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            locator = f"line {lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                col.add(SchemaViolation(f"invalid JSON ({exc.msg})", file=path.name, locator=locator))
                continue
            if not isinstance(record, dict):
                col.add(SchemaViolation("record is not an object", file=path.name, locator=locator))
                continue
            yield locator, record


def _parse_geo_pair(value, file: str, locator: str, col: _Collector) -> GeoPoint | None:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) for v in value)
    ):
        col.add(SchemaViolation(f"expected [lat, lon] pair, got {value!r}", file=file, locator=locator))
        return None
    lat, lon = float(value[0]), float(value[1])
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        col.add(SchemaViolation(f"coordinates {value!r} out of range", file=file, locator=locator))
        return None
    return GeoPoint(lat, lon)


def _load_animals(path: Path, col: _Collector) -> dict[str, AnimalRecord]:
    animals: dict[str, AnimalRecord] = {}
    fname = path.name
    for locator, rec in _iter_jsonl(path, col):
        rid = _check_slug(rec.get("id"), fname, locator, col)
        name = _require(rec, "name", str, fname, locator, col)
        species = _require(rec, "species", str, fname, locator, col)
        description = _require(rec, "description", str, fname, locator, col)
        if rid is None or name is None or species is None or description is None:
            continue
        loc = f"{locator} ({rid})"
        media_list = []
        ok = True
        for item in rec.get("media", []):
            if not isinstance(item, dict):
                col.add(SchemaViolation("media entry is not an object", file=fname, locator=loc))
                ok = False
                continue
            kind = item.get("kind")
            mpath = item.get("path")
            if kind not in MEDIA_KINDS:
                col.add(SchemaViolation(f"unknown media kind {kind!r}", file=fname, locator=loc))
                ok = False
                continue
            if not isinstance(mpath, str) or not mpath:
                col.add(SchemaViolation("media path missing", file=fname, locator=loc))
                ok = False
                continue
            pure = PurePosixPath(mpath)
            if pure.is_absolute() or ".." in pure.parts:
                col.add(
                    SchemaViolation(
                        f"media path {mpath!r} must be pack-relative", file=fname, locator=loc
                    )
                )
                ok = False
                continue
            media_list.append(MediaRef(kind, mpath, str(item.get("caption", ""))))
        if rid in animals:
            col.add(SchemaViolation(f"duplicate animal id {rid!r}", file=fname, locator=loc))
            continue
        if ok:
            animals[rid] = AnimalRecord(rid, name, species, description, tuple(media_list))
    return animals


def _parse_geometry(rec: dict, fname: str, locator: str, col: _Collector):
    geom = rec.get("geometry")
    if not isinstance(geom, dict):
        col.add(SchemaViolation("geometry missing", file=fname, locator=locator))
        return None
    gtype = geom.get("type")
    if gtype == "circle":
        center = _parse_geo_pair(geom.get("center"), fname, locator, col)
        radius = geom.get("radius_m")
        if center is None:
            return None
        if not isinstance(radius, (int, float)) or radius <= 0:
            col.add(SchemaViolation(f"circle radius {radius!r} must be > 0", file=fname, locator=locator))
            return None
        return Circle(center, float(radius))
    if gtype == "polygon":
        raw = geom.get("vertices")
        if not isinstance(raw, list) or len(raw) < 3:
            col.add(SchemaViolation("polygon needs >= 3 vertices", file=fname, locator=locator))
            return None
        vertices = [_parse_geo_pair(v, fname, locator, col) for v in raw]
        if any(v is None for v in vertices):
            return None
        poly = Polygon(tuple(vertices))  # type: ignore[arg-type]
        if not polygon_is_simple(poly):
            col.add(SchemaViolation("polygon is self-intersecting", file=fname, locator=locator))
            return None
        if polygon_area_m2(poly) <= 1e-6:
            col.add(SchemaViolation("polygon is degenerate (zero area)", file=fname, locator=locator))
            return None
        return poly
    col.add(SchemaViolation(f"unknown geometry type {gtype!r}", file=fname, locator=locator))
    return None


def _load_hotspots(path: Path, col: _Collector) -> dict[str, Hotspot]:
    hotspots: dict[str, Hotspot] = {}
    fname = path.name
    for locator, rec in _iter_jsonl(path, col):
        rid = _check_slug(rec.get("id"), fname, locator, col)
        name = _require(rec, "name", str, fname, locator, col)
        content_id = rec.get("content_id")
        if rid is None or name is None:
            continue
        loc = f"{locator} ({rid})"
        if not isinstance(content_id, str):
            col.add(SchemaViolation("content_id missing", file=fname, locator=loc))
            continue
        geometry = _parse_geometry(rec, fname, loc, col)
        if geometry is None:
            continue
        if rid in hotspots:
            col.add(SchemaViolation(f"duplicate hotspot id {rid!r}", file=fname, locator=loc))
            continue
        hotspots[rid] = Hotspot(rid, name, geometry, content_id, str(rec.get("category", "")))
    return hotspots


def _load_events(path: Path, col: _Collector) -> tuple[EventRecord, ...]:
    events = []
    seen = set()
    fname = path.name
    for locator, rec in _iter_jsonl(path, col):
        rid = _check_slug(rec.get("id"), fname, locator, col)
        title = _require(rec, "title", str, fname, locator, col)
        if rid is None or title is None:
            continue
        loc = f"{locator} ({rid})"
        try:
            start = parse_hhmm(str(rec.get("start")))
            end = parse_hhmm(str(rec.get("end")))
        except ValueError as exc:
            col.add(SchemaViolation(str(exc), file=fname, locator=loc))
            continue
        if end <= start:
            col.add(
                SchemaViolation(
                    f"event ends at {format_minutes(end)}, not after {format_minutes(start)}",
                    file=fname,
                    locator=loc,
                )
            )
            continue
        hotspot_id = rec.get("hotspot_id")
        if hotspot_id is not None and not isinstance(hotspot_id, str):
            col.add(SchemaViolation("hotspot_id must be a slug or null", file=fname, locator=loc))
            continue
        if rid in seen:
            col.add(SchemaViolation(f"duplicate event id {rid!r}", file=fname, locator=loc))
            continue
        seen.add(rid)
        events.append(EventRecord(rid, title, start, end, hotspot_id))
    return tuple(events)


def load_control_points(path: Path) -> list[tuple[GeoPoint, PixelPoint]]:
    """Read a calibration CSV with header lat,lon,x_px,y_px."""
    pairs = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"lat", "lon", "x_px", "y_px"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise SchemaViolation(
                f"expected columns {sorted(required)}", file=path.name, locator="header"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                geo = GeoPoint(float(row["lat"]), float(row["lon"]))
                px = PixelPoint(float(row["x_px"]), float(row["y_px"]))
            except (TypeError, ValueError):
                raise SchemaViolation(
                    "non-numeric control point", file=path.name, locator=f"line {lineno}"
                ) from None
            pairs.append((geo, px))
    return pairs


def _load_calibration(
    root: Path, cached: dict, bounds: ZooBounds | None, col: _Collector
) -> MapCalibration | None:
    path = root / "calibration.csv"
    if not path.is_file():
        col.add(MissingFile("calibration.csv not found", file="calibration.csv"))
        return None
    try:
        pairs = load_control_points(path)
    except SchemaViolation as exc:
        col.add(exc)
        return None
    try:
        fitted = fit_affine(pairs)
    except (InsufficientPoints, DegenerateGeometry) as exc:
        col.add(SchemaViolation(f"cannot fit calibration: {exc}", file="calibration.csv"))
        return None
    for key in ("a", "b", "c", "d", "e", "f"):
        cached_v = cached.get(key)
        if not isinstance(cached_v, (int, float)):
            col.add(SchemaViolation(f"calibration coefficient {key!r} missing", file="manifest.json"))
            return None
        fit_v = getattr(fitted, key)
        if abs(cached_v - fit_v) > _CAL_TOL * max(1.0, abs(fit_v)):
            col.add(
                CalibrationMismatch(
                    f"coefficient {key}: cached {cached_v!r} vs re-fit {fit_v!r}",
                    file="manifest.json",
                )
            )
            return None
    if bounds is not None:
        for geo, _ in pairs:
            if not in_zoo_range(geo, bounds):
                col.add(
                    SchemaViolation(
                        f"control point ({geo.latitude}, {geo.longitude}) outside zoo bounds",
                        file="calibration.csv",
                    )
                )
    return fitted


def _load(root: Path) -> tuple[ContentPack | None, list[PackError]]:
    col = _Collector()
    manifest_path = root / "manifest.json"
    if not root.is_dir():
        return None, [MissingFile(f"pack directory {root} not found")]
    if not manifest_path.is_file():
        return None, [MissingFile("manifest.json not found", file="manifest.json")]
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        return None, [SchemaViolation(f"invalid JSON ({exc.msg})", file="manifest.json")]
    if not isinstance(manifest, dict):
        return None, [SchemaViolation("manifest is not an object", file="manifest.json")]

    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        return None, [
            SchemaViolation(
                f"unsupported format_version {version!r} (this loader reads {FORMAT_VERSION})",
                file="manifest.json",
            )
        ]

    name = _require(manifest, "name", str, "manifest.json", "", col)
    pack_version = str(manifest.get("version", "0"))
    map_image = _require(manifest, "map_image", str, "manifest.json", "", col)
    extent_raw = manifest.get("map_extent")
    map_extent = None
    if (
        isinstance(extent_raw, list)
        and len(extent_raw) == 2
        and all(isinstance(v, int) and v > 0 for v in extent_raw)
    ):
        map_extent = (extent_raw[0], extent_raw[1])
    else:
        col.add(SchemaViolation("map_extent must be [width, height] > 0", file="manifest.json"))

    bounds = None
    bounds_raw = manifest.get("bounds")
    if isinstance(bounds_raw, dict):
        try:
            bounds = ZooBounds(
                min_lat=float(bounds_raw["min_lat"]),
                max_lat=float(bounds_raw["max_lat"]),
                min_lon=float(bounds_raw["min_lon"]),
                max_lon=float(bounds_raw["max_lon"]),
                margin_m=float(bounds_raw.get("margin_m", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            col.add(SchemaViolation(f"bad bounds: {exc}", file="manifest.json"))
    else:
        col.add(SchemaViolation("bounds missing", file="manifest.json"))

    if map_image is not None and not (root / map_image).is_file():
        col.add(MissingFile(f"map image {map_image!r} not found", file=str(map_image)))

    cached_cal = manifest.get("calibration")
    calibration = None
    if isinstance(cached_cal, dict):
        calibration = _load_calibration(root, cached_cal, bounds, col)
    else:
        col.add(SchemaViolation("calibration block missing", file="manifest.json"))

    animals: dict[str, AnimalRecord] = {}
    hotspots: dict[str, Hotspot] = {}
    events: tuple[EventRecord, ...] = ()
    for fname in ("animals.jsonl", "hotspots.jsonl", "events.jsonl"):
        if not (root / fname).is_file():
            col.add(MissingFile(f"{fname} not found", file=fname))
    if (root / "animals.jsonl").is_file():
        animals = _load_animals(root / "animals.jsonl", col)
    if (root / "hotspots.jsonl").is_file():
        hotspots = _load_hotspots(root / "hotspots.jsonl", col)
    if (root / "events.jsonl").is_file():
        events = _load_events(root / "events.jsonl", col)

    # cross-table references and media existence
    for hid, h in hotspots.items():
        if h.content_id not in animals:
            col.add(
                BrokenReference(
                    f"hotspot {hid!r} references unknown content_id {h.content_id!r}",
                    file="hotspots.jsonl",
                    locator=hid,
                )
            )
    for ev in events:
        if ev.location_hotspot_id is not None and ev.location_hotspot_id not in hotspots:
            col.add(
                BrokenReference(
                    f"event {ev.id!r} references unknown hotspot {ev.location_hotspot_id!r}",
                    file="events.jsonl",
                    locator=ev.id,
                )
            )
    for animal in animals.values():
        for ref in animal.media:
            if not (root / ref.path).is_file():
                col.add(
                    MissingFile(
                        f"media file {ref.path!r} for animal {animal.id!r} not found",
                        file=ref.path,
                    )
                )

    if col.issues or calibration is None or bounds is None or map_extent is None or name is None:
        return None, col.issues

    pack = ContentPack(
        name=name,
        version=pack_version,
        format_version=FORMAT_VERSION,
        root=root,
        map_image=map_image,
        map_extent=map_extent,
        bounds=bounds,
        calibration=calibration,
        animals=animals,
        hotspots=hotspots,
        events=events,
    )
    return pack, []


def load_pack(root: str | Path) -> ContentPack:
    """Load and fully validate a pack; raises the first violation found."""
    pack, issues = _load(Path(root))
    if issues:
        raise issues[0]
    assert pack is not None
    return pack


def validate_pack(root: str | Path) -> tuple[ContentPack | None, list[PackError]]:
    """Load a pack collecting every violation instead of failing fast."""
    return _load(Path(root))


def search(pack: ContentPack, query: str) -> list[AnimalRecord]:
    """Case-insensitive substring search over name, species, and description.

    Results order by match-field priority (name, then species, then
    description) and id; an empty query returns nothing.
    """
    if not query:
        return []
    needle = query.casefold()
    ranked = []
    for animal in pack.animals.values():
        for priority, text in enumerate((animal.name, animal.species, animal.description)):
            if needle in text.casefold():
                ranked.append((priority, animal.id, animal))
                break
    ranked.sort(key=lambda item: (item[0], item[1]))
    return [animal for _, _, animal in ranked]


def events_between(pack: ContentPack, t0_min: int, t1_min: int) -> list[EventRecord]:
    """Events overlapping [t0, t1) by the start < t1 and end > t0 rule."""
    if t0_min > t1_min:
        raise ValueError("window start must not be after its end")
    hits = [ev for ev in pack.events if ev.start_min < t1_min and ev.end_min > t0_min]
    hits.sort(key=lambda ev: (ev.start_min, ev.id))
    return hits


def get_content(pack: ContentPack, hotspot_id: str) -> AnimalRecord:
    """Resolve a hotspot trigger to its animal record."""
    hotspot = pack.hotspots.get(hotspot_id)
    if hotspot is None:
        raise UnknownHotspot(f"no hotspot {hotspot_id!r} in pack {pack.name!r}")
    return pack.animals[hotspot.content_id]
