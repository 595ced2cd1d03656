"""Scripted GPS walks: the desk-scale stand-in for a real receiver.

A walk script interpolates linearly in degrees along its waypoints (at zoo
scale this deviates from the great circle by well under a millimetre),
samples at a fixed rate, perturbs each sample with seeded isotropic Gaussian
noise in the local east/north plane, and renders each sample as a GGA
sentence. Fault windows reproduce receiver misbehavior: silent gaps,
quality-0 sentences, and raw garbage bytes.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

from . import nmea
from .errors import ChecksumMismatch, MalformedField, ScriptInvalid
from .geo import GeoPoint, M_PER_DEG, haversine_m

WALKING_SPEED_MPS = 1.4


class FaultKind(Enum):
    SILENCE = "silence"
    NO_FIX_QUALITY = "no_fix_quality"
    GARBAGE_BYTES = "garbage_bytes"


@dataclass(frozen=True)
class FaultWindow:
    start_s: float
    end_s: float
    kind: FaultKind


@dataclass(frozen=True)
class WalkScript:
    waypoints: tuple[GeoPoint, ...]
    speed_mps: float
    sample_rate_hz: float = 1.0
    noise_sigma_m: float = 0.0
    seed: int = 0
    faults: tuple[FaultWindow, ...] = ()


@dataclass(frozen=True)
class StreamItem:
    elapsed_s: float
    payload: str | bytes  # NMEA sentence text, or raw bytes for garbage


@dataclass(frozen=True)
class FixStream:
    items: tuple[StreamItem, ...]
    duration_s: float
    sample_period_s: float


@dataclass
class ReplaySummary:
    delivered: int = 0  # parsed GGA/RMC sentences handed to the sink
    dropped: int = 0  # well-formed sentences of types the sink cannot use
    garbage: int = 0  # items that failed checksum or field parsing


def _validate_script(script: WalkScript) -> None:
    if len(script.waypoints) < 2:
        raise ScriptInvalid("a walk needs at least 2 waypoints")
    for i, a in enumerate(script.waypoints):
        for b in script.waypoints[i + 1 :]:
            if a == b:
                raise ScriptInvalid(f"waypoints must be pairwise distinct, {a} repeats")
    if script.speed_mps <= 0:
        raise ScriptInvalid("speed must be > 0 m/s")
    if script.sample_rate_hz <= 0:
        raise ScriptInvalid("sample rate must be > 0 Hz")
    if script.noise_sigma_m < 0:
        raise ScriptInvalid("noise sigma must be >= 0 m")
    for w in script.faults:
        if w.start_s >= w.end_s:
            raise ScriptInvalid(f"fault window [{w.start_s}, {w.end_s}) is empty")


def _position_at(waypoints: tuple[GeoPoint, ...], cum: list[float], dist: float) -> GeoPoint:
    """Point at the given arc length along the waypoint chain."""
    total = cum[-1]
    dist = min(max(dist, 0.0), total)
    for i in range(len(cum) - 1):
        if dist <= cum[i + 1] or i == len(cum) - 2:
            leg = cum[i + 1] - cum[i]
            t = (dist - cum[i]) / leg if leg > 0 else 0.0
            a, b = waypoints[i], waypoints[i + 1]
            return GeoPoint(
                a.latitude + t * (b.latitude - a.latitude),
                a.longitude + t * (b.longitude - a.longitude),
            )
    return waypoints[-1]


def _fault_at(faults: tuple[FaultWindow, ...], t: float) -> FaultKind | None:
    for w in faults:
        if w.start_s <= t < w.end_s:
            return w.kind
    return None


def _timestamp(elapsed_s: float) -> nmea.NmeaTime:
    day_s = elapsed_s % 86400.0
    hour = int(day_s // 3600)
    minute = int(day_s % 3600 // 60)
    return nmea.NmeaTime(hour, minute, day_s % 60.0)


def walk_positions(script: WalkScript) -> list[tuple[float, GeoPoint]]:
    """Noise-perturbed sample positions at full precision, one per sample.

    These are the exact points build_walk renders to sentences (the sentence
    coordinates quantize to the 1e-4 arc-minute wire resolution, about
    0.2 m); fault windows are not applied here.
    """
    _validate_script(script)
    cum = [0.0]
    for a, b in zip(script.waypoints, script.waypoints[1:]):
        cum.append(cum[-1] + haversine_m(a, b))
    duration = cum[-1] / script.speed_mps
    period = 1.0 / script.sample_rate_hz
    n_samples = int(math.floor(duration / period + 1e-9)) + 1

    rng = random.Random(script.seed)
    out = []
    for i in range(n_samples):
        t = i * period
        point = _position_at(script.waypoints, cum, script.speed_mps * t)
        de = rng.gauss(0.0, script.noise_sigma_m)
        dn = rng.gauss(0.0, script.noise_sigma_m)
        out.append(
            (
                t,
                GeoPoint(
                    point.latitude + dn / M_PER_DEG,
                    point.longitude
                    + de / (M_PER_DEG * math.cos(math.radians(point.latitude))),
                ),
            )
        )
    return out


def build_walk(script: WalkScript) -> FixStream:
    """Render a walk script to a reproducible stream of timed sentences."""
    positions = walk_positions(script)
    cum = [0.0]
    for a, b in zip(script.waypoints, script.waypoints[1:]):
        cum.append(cum[-1] + haversine_m(a, b))
    duration = cum[-1] / script.speed_mps
    period = 1.0 / script.sample_rate_hz

    # separate stream so garbage length draws cannot disturb the noise draws
    garbage_rng = random.Random(script.seed ^ 0x5EED)
    items: list[StreamItem] = []
    for t, point in positions:
        fault = _fault_at(script.faults, t)
        if fault is FaultKind.SILENCE:
            continue
        if fault is FaultKind.GARBAGE_BYTES:
            items.append(StreamItem(t, garbage_rng.randbytes(garbage_rng.randint(8, 64))))
            continue
        if fault is FaultKind.NO_FIX_QUALITY:
            fix = nmea.GeoFix(None, None, _timestamp(t), nmea.FixQuality.NO_FIX)
        else:
            fix = nmea.GeoFix(
                point.latitude, point.longitude, _timestamp(t), nmea.FixQuality.GPS_FIX, 8, 0.9
            )
        items.append(StreamItem(t, nmea.format_gga(fix)))
    return FixStream(tuple(items), duration_s=duration, sample_period_s=period)


def replay(
    stream: FixStream,
    sink: Callable[[float, nmea.ParsedSentence], None],
    realtime: bool = False,
) -> ReplaySummary:
    """Deliver stream items to the sink in order, parsing each line first.

    With ``realtime`` the delivery paces itself on the wall clock; otherwise
    it runs as fast as possible. Fix-bearing sentences (GGA/RMC) reach the
    sink; unsupported types count as dropped; unparseable items as garbage.
    """
    summary = ReplaySummary()
    previous_t = None
    for item in stream.items:
        if realtime and previous_t is not None:
            time.sleep(max(0.0, item.elapsed_s - previous_t))
        previous_t = item.elapsed_s
        try:
            parsed = nmea.parse_sentence(item.payload)
        except (ChecksumMismatch, MalformedField):
            summary.garbage += 1
            continue
        if isinstance(parsed, nmea.Unsupported):
            summary.dropped += 1
            continue
        summary.delivered += 1
        sink(item.elapsed_s, parsed)
    return summary


class InteractiveWalker:
    """A steerable visitor: walks toward its current target at a fixed speed.

    Used by the serve mode's click-to-walk loop; each click replaces the
    target and the walker closes in on it one time step at a time.
    """

    def __init__(self, start: GeoPoint, speed_mps: float = WALKING_SPEED_MPS):
        if speed_mps <= 0:
            raise ScriptInvalid("walker speed must be > 0 m/s")
        self.position = start
        self.speed_mps = speed_mps
        self.target: GeoPoint | None = None

    def set_target(self, target: GeoPoint) -> None:
        self.target = target

    def advance(self, dt: float) -> GeoPoint:
        """Move for dt seconds toward the target; stop on arrival."""
        if self.target is None:
            return self.position
        remaining = haversine_m(self.position, self.target)
        step = self.speed_mps * dt
        if step >= remaining or remaining == 0.0:
            self.position = self.target
            self.target = None
            return self.position
        t = step / remaining
        self.position = GeoPoint(
            self.position.latitude + t * (self.target.latitude - self.position.latitude),
            self.position.longitude + t * (self.target.longitude - self.position.longitude),
        )
        return self.position


# --- walk script and stream files ---


def load_walk(path: str | Path) -> WalkScript:
    """Read a walk script: one JSON record per line.

    The first record is the header (``{"type": "walk", ...}``); each
    subsequent ``waypoint`` record adds a vertex and ``fault`` records add
    fault windows.
    """
    path = Path(path)
    header: dict | None = None
    waypoints: list[GeoPoint] = []
    faults: list[FaultWindow] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ScriptInvalid(f"cannot read walk script {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScriptInvalid(f"{path.name}:{lineno}: invalid JSON ({exc.msg})") from None
        kind = rec.get("type")
        if kind == "walk":
            header = rec
        elif kind == "waypoint":
            try:
                waypoints.append(GeoPoint(float(rec["lat"]), float(rec["lon"])))
            except (KeyError, TypeError, ValueError):
                raise ScriptInvalid(f"{path.name}:{lineno}: waypoint needs lat and lon") from None
        elif kind == "fault":
            try:
                faults.append(
                    FaultWindow(float(rec["start_s"]), float(rec["end_s"]), FaultKind(rec["kind"]))
                )
            except (KeyError, TypeError, ValueError):
                raise ScriptInvalid(f"{path.name}:{lineno}: bad fault record") from None
        else:
            raise ScriptInvalid(f"{path.name}:{lineno}: unknown record type {kind!r}")
    if header is None:
        raise ScriptInvalid(f"{path.name}: missing walk header record")
    script = WalkScript(
        waypoints=tuple(waypoints),
        speed_mps=float(header.get("speed_mps", WALKING_SPEED_MPS)),
        sample_rate_hz=float(header.get("sample_rate_hz", 1.0)),
        noise_sigma_m=float(header.get("noise_sigma_m", 0.0)),
        seed=int(header.get("seed", 0)),
        faults=tuple(faults),
    )
    _validate_script(script)
    return script


def dump_stream(stream: FixStream, path: str | Path) -> None:
    """Write the stream as a .nmea log, one sentence per line."""
    with Path(path).open("wb") as fh:
        for item in stream.items:
            data = item.payload.encode("ascii") if isinstance(item.payload, str) else item.payload
            fh.write(data.rstrip(b"\r\n") + b"\r\n")


def load_stream(path: str | Path, sample_rate_hz: float = 1.0) -> FixStream:
    """Read a .nmea log back into a stream.

    Elapsed times come from each sentence's own UTC time field when it
    parses; lines without a usable time advance by one sample period.
    """
    period = 1.0 / sample_rate_hz
    items: list[StreamItem] = []
    t = 0.0
    raw = Path(path).read_bytes()
    for line in raw.splitlines():
        if not line.strip():
            continue
        elapsed = None
        try:
            parsed = nmea.parse_sentence(line)
        except (ChecksumMismatch, MalformedField):
            parsed = None
        if isinstance(parsed, (nmea.GgaFix, nmea.RmcFix)) and parsed.fix.timestamp:
            ts = parsed.fix.timestamp
            elapsed = ts.hour * 3600.0 + ts.minute * 60.0 + ts.second
        if elapsed is None or (items and elapsed <= items[-1].elapsed_s):
            elapsed = t + period
        t = elapsed
        payload: str | bytes
        try:
            payload = line.decode("ascii")
        except UnicodeDecodeError:
            payload = line
        items.append(StreamItem(elapsed, payload))
    duration = items[-1].elapsed_s if items else 0.0
    return FixStream(tuple(items), duration_s=duration, sample_period_s=period)
