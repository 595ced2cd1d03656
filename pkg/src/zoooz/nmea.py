"""NMEA-0183 sentence parsing and generation for GGA and RMC.

The receiver wire format is plain ASCII: ``$<body>*<checksum>`` where the
checksum is the XOR of every byte between ``$`` and ``*`` rendered as two
uppercase hex digits. Input lines may or may not carry a CR/LF terminator;
generated sentences always end with CR LF.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import ChecksumMismatch, MalformedField


class FixQuality(Enum):
    NO_FIX = 0
    GPS_FIX = 1
    DGPS_FIX = 2


@dataclass(frozen=True)
class NmeaTime:
    """UTC time of day as carried in the sentence time field."""

    hour: int
    minute: int
    second: float


@dataclass(frozen=True)
class GeoFix:
    """One timestamped GPS position report.

    Coordinates are signed decimal degrees (WGS84). A NO_FIX quality fix has
    no usable position: ``latitude``/``longitude`` are None and the fix must
    never reach the geofence engine.
    """

    latitude: float | None
    longitude: float | None
    timestamp: NmeaTime | None
    quality: FixQuality
    satellites: int = 0
    hdop: float | None = None

    @property
    def has_position(self) -> bool:
        return (
            self.quality is not FixQuality.NO_FIX
            and self.latitude is not None
            and self.longitude is not None
        )


@dataclass(frozen=True)
class GgaFix:
    fix: GeoFix


@dataclass(frozen=True)
class RmcFix:
    fix: GeoFix
    speed_knots: float | None
    course_deg: float | None


@dataclass(frozen=True)
class Unsupported:
    """A well-formed sentence of a type this parser does not interpret."""

    talker: str
    sentence_type: str


ParsedSentence = GgaFix | RmcFix | Unsupported

_CHECKSUM_RE = re.compile(r"^[0-9A-Fa-f]{2}$")
_DDMM_RE = re.compile(r"^\d{4,5}(\.\d+)?$")


def compute_checksum(body: str) -> str:
    """XOR of all body byte values, as two uppercase hex digits."""
    total = 0
    for ch in body:
        total ^= ord(ch)
    return f"{total:02X}"


def ddmm_to_degrees(field: str, hemisphere: str) -> float:
    """Convert an NMEA ``ddmm.mmmm`` / ``dddmm.mmmm`` field to signed degrees.

    S and W hemispheres negate the value. Raises MalformedField on
    non-numeric text, bad hemisphere letters, or minutes >= 60.
    """
    if hemisphere not in ("N", "S", "E", "W"):
        raise MalformedField(f"bad hemisphere {hemisphere!r}")
    if not _DDMM_RE.match(field):
        raise MalformedField(f"bad coordinate field {field!r}")
    int_part = field.split(".", 1)[0]
    degrees = int(int_part[:-2])
    minutes = float(field[len(int_part) - 2 :])
    if minutes >= 60.0:
        raise MalformedField(f"minutes out of range in {field!r}")
    value = degrees + minutes / 60.0
    if hemisphere in ("S", "W"):
        value = -value
    return value + 0.0  # normalize -0.0


def _split_frame(line: str) -> tuple[str, str]:
    """Return (body, checksum) or raise ChecksumMismatch on broken framing."""
    line = line.strip("\r\n")
    if not line.startswith("$"):
        raise ChecksumMismatch("sentence does not start with '$'")
    star = line.rfind("*")
    if star < 0:
        raise ChecksumMismatch("no checksum delimiter")
    body = line[1:star]
    checksum = line[star + 1 :].strip()
    if not _CHECKSUM_RE.match(checksum):
        raise ChecksumMismatch(f"bad checksum field {checksum!r}")
    return body, checksum.upper()


def _parse_time(field: str) -> NmeaTime | None:
    if field == "":
        return None
    if not re.match(r"^\d{6}(\.\d+)?$", field):
        raise MalformedField(f"bad time field {field!r}")
    hour = int(field[0:2])
    minute = int(field[2:4])
    second = float(field[4:])
    if hour > 23 or minute > 59 or second >= 61.0:  # leap second slack
        raise MalformedField(f"time out of range {field!r}")
    return NmeaTime(hour, minute, second)


def _parse_coordinates(
    lat_f: str, ns: str, lon_f: str, ew: str, *, required: bool
) -> tuple[float | None, float | None]:
    if lat_f == "" and lon_f == "":
        if required:
            raise MalformedField("empty coordinates on a sentence reporting a fix")
        return None, None
    lat = ddmm_to_degrees(lat_f, ns)
    lon = ddmm_to_degrees(lon_f, ew)
    if ns not in ("N", "S") or ew not in ("E", "W"):
        raise MalformedField(f"hemisphere letters swapped: {ns!r}/{ew!r}")
    if not -90.0 <= lat <= 90.0:
        raise MalformedField(f"latitude {lat} out of range")
    if not -180.0 <= lon <= 180.0:
        raise MalformedField(f"longitude {lon} out of range")
    return lat, lon


def _opt_float(field: str, name: str) -> float | None:
    if field == "":
        return None
    try:
        return float(field)
    except ValueError:
        raise MalformedField(f"bad {name} field {field!r}") from None


def _parse_gga(fields: list[str]) -> GgaFix:
    # GGA body: time, lat, N/S, lon, E/W, quality, sats, hdop, alt, M, geoid, M, age, station
    if len(fields) < 8:
        raise MalformedField(f"GGA sentence has only {len(fields)} fields")
    timestamp = _parse_time(fields[1])
    try:
        quality_code = int(fields[6]) if fields[6] else 0
    except ValueError:
        raise MalformedField(f"bad quality field {fields[6]!r}") from None
    if quality_code == 0:
        quality = FixQuality.NO_FIX
    elif quality_code == 2:
        quality = FixQuality.DGPS_FIX
    else:
        quality = FixQuality.GPS_FIX
    lat, lon = _parse_coordinates(
        fields[2], fields[3] or "N", fields[4], fields[5] or "E",
        required=quality is not FixQuality.NO_FIX,
    )
    try:
        satellites = int(fields[7]) if fields[7] else 0
    except ValueError:
        raise MalformedField(f"bad satellite count {fields[7]!r}") from None
    if satellites < 0:
        raise MalformedField(f"negative satellite count {satellites}")
    hdop = _opt_float(fields[8], "hdop") if len(fields) > 8 else None
    if hdop is not None and hdop < 0:
        raise MalformedField(f"negative hdop {hdop}")
    return GgaFix(GeoFix(lat, lon, timestamp, quality, satellites, hdop))


def _parse_rmc(fields: list[str]) -> RmcFix:
    # RMC body: time, status, lat, N/S, lon, E/W, speed, course, date, ...
    if len(fields) < 7:
        raise MalformedField(f"RMC sentence has only {len(fields)} fields")
    timestamp = _parse_time(fields[1])
    status = fields[2]
    if status not in ("A", "V", ""):
        raise MalformedField(f"bad RMC status {status!r}")
    quality = FixQuality.GPS_FIX if status == "A" else FixQuality.NO_FIX
    lat, lon = _parse_coordinates(
        fields[3], fields[4] or "N", fields[5], fields[6] or "E",
        required=quality is not FixQuality.NO_FIX,
    )
    speed = _opt_float(fields[7], "speed") if len(fields) > 7 else None
    course = _opt_float(fields[8], "course") if len(fields) > 8 else None
    return RmcFix(GeoFix(lat, lon, timestamp, quality), speed, course)


def parse_sentence(line: str | bytes) -> ParsedSentence:
    """Parse one NMEA sentence.

    Total over arbitrary input: raises only ChecksumMismatch (corrupt line,
    caller should drop it) or MalformedField (recognized sentence type with
    an unparseable field). Unknown sentence types parse to Unsupported.
    """
    if isinstance(line, bytes):
        line = line.decode("latin-1")
    body, checksum = _split_frame(line)
    if compute_checksum(body) != checksum:
        raise ChecksumMismatch(
            f"checksum {checksum} does not match body (expected {compute_checksum(body)})"
        )
    fields = body.split(",")
    address = fields[0]
    if len(address) < 3:
        return Unsupported(talker=address, sentence_type="")
    talker, stype = address[:-3], address[-3:]
    if stype == "GGA":
        return _parse_gga(fields)
    if stype == "RMC":
        return _parse_rmc(fields)
    return Unsupported(talker=talker, sentence_type=stype)


def _format_angle(value: float, deg_width: int, pos: str, neg: str) -> tuple[str, str]:
    hemisphere = pos if value >= 0 else neg
    magnitude = abs(value)
    degrees = int(magnitude)
    minutes = (magnitude - degrees) * 60.0
    text = f"{minutes:07.4f}"
    if text == "60.0000":  # rounding carried into the next degree
        degrees += 1
        text = "00.0000"
    return f"{degrees:0{deg_width}d}{text}", hemisphere


def _format_time(t: NmeaTime | None) -> str:
    if t is None:
        return "000000.00"
    hour, minute, second = t.hour, t.minute, t.second
    hundredths = round((second - int(second)) * 100)
    whole = int(second)
    if hundredths >= 100:
        hundredths -= 100
        whole += 1
    if whole >= 60:
        whole -= 60
        minute += 1
    if minute >= 60:
        minute -= 60
        hour = (hour + 1) % 24
    return f"{hour:02d}{minute:02d}{whole:02d}.{hundredths:02d}"


def format_gga(fix: GeoFix) -> str:
    """Render a fix as a GGA sentence with a correct checksum and CR LF.

    Minutes carry four decimal places, so a parse of the output recovers the
    coordinates within 1e-5 degrees. Exactly-zero coordinates format with the
    N/E hemisphere letters. A NO_FIX quality fix emits quality 0 with empty
    coordinate fields, mirroring what receivers send before acquisition.
    """
    time_field = _format_time(fix.timestamp)
    if fix.quality is FixQuality.NO_FIX or not fix.has_position:
        body = f"GPGGA,{time_field},,,,,0,{fix.satellites:02d},,,M,,M,,"
        return f"${body}*{compute_checksum(body)}\r\n"
    assert fix.latitude is not None and fix.longitude is not None
    lat_field, ns = _format_angle(fix.latitude, 2, "N", "S")
    lon_field, ew = _format_angle(fix.longitude, 3, "E", "W")
    hdop_field = f"{fix.hdop:.1f}" if fix.hdop is not None else ""
    body = (
        f"GPGGA,{time_field},{lat_field},{ns},{lon_field},{ew},"
        f"{fix.quality.value},{fix.satellites:02d},{hdop_field},0.0,M,0.0,M,,"
    )
    return f"${body}*{compute_checksum(body)}\r\n"
