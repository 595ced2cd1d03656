"""Session orchestration: connection lifecycle, fix intake, menu surface.

A session owns one visitor's state: the connection machine, the viewport,
the geofence occupancy, and an append-only event log with gapless sequence
numbers. All operations are applied by a single logical writer; observers
get immutable event values.

Connection transition table (inputs: tick, fix = accepted position report,
restart, close; close is the menu's Close and works from any live state):

    state       tick condition                        -> next
    ---------   -----------------------------------   ----------
    SPLASH      clock >= splash_seconds               -> CONNECTING
    CONNECTING  clock - connecting_since >= timeout   -> FAILED
    CONNECTED   clock - last_fix >= fix_gap           -> LOST
    LOST        clock - lost_since >= timeout         -> FAILED
    FAILED      attempt_count >= 2                    -> EXITED

    state       fix            restart                     close
    ---------   ------------   -------------------------   -------
    SPLASH      ignored        InvalidState                -> EXITED
    CONNECTING  -> CONNECTED   InvalidState                -> EXITED
    CONNECTED   (processed)    InvalidState                -> EXITED
    LOST        -> CONNECTED   InvalidState                -> EXITED
    FAILED      ignored        -> CONNECTING (attempt 2)   -> EXITED
    EXITED      ignored        InvalidState                SessionClosed

Exactly one manual restart is permitted; when the restarted connection also
times out, the machine falls through FAILED to EXITED on the same tick.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from . import content as content_mod
from . import geofence, nmea
from .content import AnimalRecord, ContentPack, EventRecord
from .errors import ChecksumMismatch, ConfigInvalid, InvalidState, MalformedField, NotReady, SessionClosed
from .geo import GeoPoint, PixelPoint, geo_to_pixel
from .nmea import GeoFix
from .simulator import FixStream
from .viewport import Viewport, ZOOM_LADDER, center_on, in_zoo_range


class ConnectionPhase(Enum):
    SPLASH = "splash"
    CONNECTING = "connecting"
    CONNECTED = "connected"
    LOST = "lost"
    FAILED = "failed"
    EXITED = "exited"


@dataclass(frozen=True)
class ConnectionState:
    phase: ConnectionPhase
    attempt_count: int


# --- guide events ---


@dataclass(frozen=True)
class ContentSummary:
    content_id: str
    animal_name: str
    species: str


@dataclass(frozen=True)
class FixAccepted:
    fix: GeoFix
    pixel: PixelPoint
    in_range: bool


@dataclass(frozen=True)
class HotspotEntered:
    hotspot_id: str
    content: ContentSummary


@dataclass(frozen=True)
class HotspotExited:
    hotspot_id: str


@dataclass(frozen=True)
class ConnectionChanged:
    state: ConnectionState


@dataclass(frozen=True)
class OutOfRange:
    fix: GeoFix


GuideEvent = FixAccepted | HotspotEntered | HotspotExited | ConnectionChanged | OutOfRange


@dataclass(frozen=True)
class LogRecord:
    seq: int
    elapsed_s: float
    event: GuideEvent


@dataclass(frozen=True)
class SessionConfig:
    splash_seconds: float = 5.0
    connect_timeout_s: float = 30.0
    fix_gap_s: float = 10.0
    exit_buffer_m: float = 5.0
    nearest_count: int = 5
    screen: tuple[int, int] = (480, 640)
    zoom_ladder: tuple[float, ...] = ZOOM_LADDER

    def validate(self) -> None:
        if self.splash_seconds < 0:
            raise ConfigInvalid("splash_seconds must be >= 0")
        if self.connect_timeout_s <= 0 or self.fix_gap_s <= 0:
            raise ConfigInvalid("timeouts must be > 0")
        if self.exit_buffer_m < 0:
            raise ConfigInvalid("exit_buffer_m must be >= 0")
        if self.nearest_count < 1:
            raise ConfigInvalid("nearest_count must be >= 1")
        if self.screen[0] <= 0 or self.screen[1] <= 0:
            raise ConfigInvalid("screen dimensions must be positive")
        if tuple(self.zoom_ladder) != ZOOM_LADDER:
            raise ConfigInvalid(f"zoom ladder is fixed at {ZOOM_LADDER}")


@dataclass
class Session:
    pack: ContentPack
    config: SessionConfig
    viewport: Viewport
    fence: geofence.FenceState = field(default_factory=geofence.FenceState)
    phase: ConnectionPhase = ConnectionPhase.SPLASH
    attempt_count: int = 1
    clock: float = 0.0
    connecting_since: float | None = None
    lost_since: float | None = None
    last_fix: GeoFix | None = None
    last_fix_at: float | None = None
    log: list[LogRecord] = field(default_factory=list)

    @property
    def connection(self) -> ConnectionState:
        return ConnectionState(self.phase, self.attempt_count)


def new_session(pack: ContentPack, config: SessionConfig | None = None) -> Session:
    """Start a session in the splash phase, viewport on the map midpoint."""
    config = config or SessionConfig()
    config.validate()
    vp = Viewport(
        center=PixelPoint(pack.map_extent[0] / 2.0, pack.map_extent[1] / 2.0),
        zoom=1.0,
        screen=config.screen,
        map_extent=pack.map_extent,
    )
    session = Session(pack=pack, config=config, viewport=vp)
    _append(session, ConnectionChanged(session.connection))
    return session


def _append(session: Session, event: GuideEvent) -> GuideEvent:
    session.log.append(LogRecord(len(session.log), session.clock, event))
    return event


def _set_phase(session: Session, phase: ConnectionPhase, events: list[GuideEvent]) -> None:
    session.phase = phase
    events.append(_append(session, ConnectionChanged(session.connection)))


def on_tick(session: Session, elapsed_s: float) -> list[GuideEvent]:
    """Advance the session clock and fire any timeout-driven transitions."""
    events: list[GuideEvent] = []
    if session.phase is ConnectionPhase.EXITED:
        return events
    session.clock = max(session.clock, elapsed_s)
    cfg = session.config
    while True:
        if session.phase is ConnectionPhase.SPLASH and session.clock >= cfg.splash_seconds:
            session.connecting_since = session.clock
            _set_phase(session, ConnectionPhase.CONNECTING, events)
        elif (
            session.phase is ConnectionPhase.CONNECTING
            and session.connecting_since is not None
            and session.clock - session.connecting_since >= cfg.connect_timeout_s
        ):
            _set_phase(session, ConnectionPhase.FAILED, events)
        elif (
            session.phase is ConnectionPhase.CONNECTED
            and session.last_fix_at is not None
            and session.clock - session.last_fix_at >= cfg.fix_gap_s
        ):
            session.lost_since = session.clock
            _set_phase(session, ConnectionPhase.LOST, events)
        elif (
            session.phase is ConnectionPhase.LOST
            and session.lost_since is not None
            and session.clock - session.lost_since >= cfg.connect_timeout_s
        ):
            _set_phase(session, ConnectionPhase.FAILED, events)
        elif session.phase is ConnectionPhase.FAILED and session.attempt_count >= 2:
            _set_phase(session, ConnectionPhase.EXITED, events)
        else:
            return events


def on_fix(session: Session, fix: GeoFix) -> list[GuideEvent]:
    """Process one position report at the current session clock.

    Callers advance time with on_tick before delivering the fix. No-fix
    quality reports are dropped; fixes arriving before the connection phase
    or after failure are ignored.
    """
    events: list[GuideEvent] = []
    if session.phase in (ConnectionPhase.SPLASH, ConnectionPhase.FAILED, ConnectionPhase.EXITED):
        return events
    if not fix.has_position:
        return events

    if session.phase in (ConnectionPhase.CONNECTING, ConnectionPhase.LOST):
        session.lost_since = None
        _set_phase(session, ConnectionPhase.CONNECTED, events)

    session.last_fix = fix
    session.last_fix_at = session.clock
    point = GeoPoint(fix.latitude, fix.longitude)  # type: ignore[arg-type]
    if not in_zoo_range(point, session.pack.bounds):
        events.append(_append(session, OutOfRange(fix)))
        return events

    pixel = geo_to_pixel(session.pack.calibration, point)
    session.viewport = center_on(session.viewport, pixel)
    events.append(_append(session, FixAccepted(fix, pixel, in_range=True)))

    session.fence, fence_events = geofence.update(
        session.fence,
        list(session.pack.hotspots.values()),
        point,
        session.config.exit_buffer_m,
    )
    for fe in fence_events:
        if isinstance(fe, geofence.Entered):
            animal = content_mod.get_content(session.pack, fe.hotspot_id)
            summary = ContentSummary(animal.id, animal.name, animal.species)
            events.append(_append(session, HotspotEntered(fe.hotspot_id, summary)))
        else:
            events.append(_append(session, HotspotExited(fe.hotspot_id)))
    return events


def restart(session: Session) -> GuideEvent:
    """The single permitted manual reconnection attempt from FAILED."""
    if session.phase is not ConnectionPhase.FAILED or session.attempt_count != 1:
        raise InvalidState(
            f"restart is only available once, from failed (state {session.phase.value}, "
            f"attempt {session.attempt_count})"
        )
    session.attempt_count = 2
    session.connecting_since = session.clock
    session.phase = ConnectionPhase.CONNECTING
    return _append(session, ConnectionChanged(session.connection))


# --- the six-item menu ---


@dataclass(frozen=True)
class CheckConnection:
    pass


@dataclass(frozen=True)
class ShowCoordinates:
    pass


@dataclass(frozen=True)
class TourGuide:
    pass


@dataclass(frozen=True)
class Search:
    query: str


@dataclass(frozen=True)
class Events:
    start_min: int
    end_min: int


@dataclass(frozen=True)
class Close:
    pass


MenuAction = CheckConnection | ShowCoordinates | TourGuide | Search | Events | Close

MENU_ACTION_TAGS = (
    "check_connection",
    "show_coordinates",
    "tour_guide",
    "search",
    "events",
    "close",
)


def parse_menu_action(tag: str, params: dict | None = None) -> MenuAction:
    """Boundary parser for wire and CLI callers; rejects unknown tags."""
    params = params or {}
    if tag == "check_connection":
        return CheckConnection()
    if tag == "show_coordinates":
        return ShowCoordinates()
    if tag == "tour_guide":
        return TourGuide()
    if tag == "search":
        return Search(query=str(params.get("query", "")))
    if tag == "events":
        start = content_mod.parse_hhmm(str(params.get("from", "00:00")))
        end = content_mod.parse_hhmm(str(params.get("to", "23:59")))
        return Events(start, end)
    if tag == "close":
        return Close()
    raise ValueError(f"unknown menu action {tag!r}; the menu has exactly {MENU_ACTION_TAGS}")


@dataclass(frozen=True)
class ConnectionReport:
    state: ConnectionState
    seconds_since_fix: float | None


@dataclass(frozen=True)
class CoordinatesReport:
    latitude: float
    longitude: float

    @property
    def text(self) -> str:
        return f"lat {self.latitude:.6f}, lon {self.longitude:.6f}"


@dataclass(frozen=True)
class NearbyHotspot:
    hotspot_id: str
    name: str
    distance_m: float


@dataclass(frozen=True)
class TourGuideList:
    entries: tuple[NearbyHotspot, ...]


@dataclass(frozen=True)
class SearchResults:
    animals: tuple[AnimalRecord, ...]


@dataclass(frozen=True)
class EventsList:
    events: tuple[EventRecord, ...]


@dataclass(frozen=True)
class Closed:
    pass


MenuResponse = (
    ConnectionReport | CoordinatesReport | TourGuideList | SearchResults | EventsList | Closed
)


def menu_action(session: Session, action: MenuAction) -> MenuResponse:
    """Dispatch one of the six menu actions.

    CheckConnection and Close work in any live state; the rest need an
    established connection. A closed session refuses everything.
    """
    if session.phase is ConnectionPhase.EXITED:
        raise SessionClosed("the session has exited")
    if isinstance(action, CheckConnection):
        since = None if session.last_fix_at is None else session.clock - session.last_fix_at
        return ConnectionReport(session.connection, since)
    if isinstance(action, Close):
        _set_phase(session, ConnectionPhase.EXITED, [])
        return Closed()
    if session.phase is not ConnectionPhase.CONNECTED:
        raise NotReady(f"menu needs an established connection (state {session.phase.value})")
    if isinstance(action, ShowCoordinates):
        assert session.last_fix is not None
        return CoordinatesReport(session.last_fix.latitude, session.last_fix.longitude)
    if isinstance(action, TourGuide):
        assert session.last_fix is not None
        point = GeoPoint(session.last_fix.latitude, session.last_fix.longitude)
        ranked = geofence.nearest_hotspots(
            list(session.pack.hotspots.values()), point, session.config.nearest_count
        )
        entries = tuple(
            NearbyHotspot(hid, session.pack.hotspots[hid].name, dist) for hid, dist in ranked
        )
        return TourGuideList(entries)
    if isinstance(action, Search):
        return SearchResults(tuple(content_mod.search(session.pack, action.query)))
    if isinstance(action, Events):
        return EventsList(
            tuple(content_mod.events_between(session.pack, action.start_min, action.end_min))
        )
    raise ValueError(f"unknown menu action {action!r}")


# --- event log export ---


def record_to_dict(record: LogRecord) -> dict:
    """One log record as a plain dict with a fixed key order."""
    base: dict = {"seq": record.seq, "t": round(record.elapsed_s, 3)}
    ev = record.event
    if isinstance(ev, ConnectionChanged):
        base["event"] = "connection_changed"
        base["phase"] = ev.state.phase.value
        base["attempt"] = ev.state.attempt_count
    elif isinstance(ev, FixAccepted):
        base["event"] = "fix_accepted"
        base["lat"] = round(ev.fix.latitude, 6)  # type: ignore[arg-type]
        base["lon"] = round(ev.fix.longitude, 6)  # type: ignore[arg-type]
        base["x"] = round(ev.pixel.x, 2)
        base["y"] = round(ev.pixel.y, 2)
        base["in_range"] = ev.in_range
    elif isinstance(ev, HotspotEntered):
        base["event"] = "hotspot_entered"
        base["hotspot"] = ev.hotspot_id
        base["content"] = ev.content.content_id
        base["animal"] = ev.content.animal_name
    elif isinstance(ev, HotspotExited):
        base["event"] = "hotspot_exited"
        base["hotspot"] = ev.hotspot_id
    elif isinstance(ev, OutOfRange):
        base["event"] = "out_of_range"
        base["lat"] = round(ev.fix.latitude, 6)  # type: ignore[arg-type]
        base["lon"] = round(ev.fix.longitude, 6)  # type: ignore[arg-type]
    else:
        raise TypeError(f"unknown event {ev!r}")
    return base


def export_log(session: Session) -> str:
    """The event log as deterministic JSON lines (the golden-test format)."""
    lines = [json.dumps(record_to_dict(r), separators=(",", ":")) for r in session.log]
    return "".join(line + "\n" for line in lines)


def run_tour(
    pack: ContentPack, stream: FixStream, config: SessionConfig | None = None
) -> Session:
    """Replay a fix stream through a fresh session as fast as possible.

    Ticks walk the full sample grid (including silent stretches, so loss
    timeouts fire) and each stream item is parsed and delivered at its slot.
    """
    session = new_session(pack, config)
    period = stream.sample_period_s
    steps = int(math.floor(stream.duration_s / period + 1e-9)) + 1
    idx = 0
    for i in range(steps):
        t = i * period
        on_tick(session, t)
        while idx < len(stream.items) and stream.items[idx].elapsed_s <= t + 1e-9:
            item = stream.items[idx]
            idx += 1
            try:
                parsed = nmea.parse_sentence(item.payload)
            except (ChecksumMismatch, MalformedField):
                continue
            if isinstance(parsed, (nmea.GgaFix, nmea.RmcFix)):
                on_fix(session, parsed.fix)
        if session.phase is ConnectionPhase.EXITED:
            break
    return session
