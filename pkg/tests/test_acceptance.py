"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints a PASS line with its measured runtime (visible with -s):

    pytest tests/test_acceptance.py -v -s
"""

import json
import math
import random
import time

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from zoooz import engine
from zoooz.cli import main as cli_main
from zoooz.engine import (
    CheckConnection,
    Close,
    ConnectionPhase,
    Events,
    MENU_ACTION_TAGS,
    Search,
    ShowCoordinates,
    TourGuide,
    menu_action,
    new_session,
    on_fix,
    on_tick,
    parse_menu_action,
    record_to_dict,
    restart,
    run_tour,
)
from zoooz.errors import ChecksumMismatch, InvalidState, MalformedField, SessionClosed
from zoooz.geo import GeoPoint, M_PER_DEG, fit_affine
from zoooz.geofence import Circle, Entered, Exited, FenceState, Hotspot, contains, update
from zoooz.nmea import FixQuality, GeoFix, GgaFix, NmeaTime, format_gga, parse_sentence
from zoooz.service import create_app
from zoooz.simulator import build_walk, load_walk

from test_geo import normal_equations_oracle, random_affine_instance
from test_geofence import random_simple_polygon, winding_number_oracle

ZOO_LAT, ZOO_LON = -37.7845, 144.9515


def report(name: str, elapsed: float, bound: float) -> None:
    assert elapsed < bound, f"{name}: {elapsed:.2f}s exceeded the {bound}s budget"
    print(f"\nACCEPTANCE PASS: {name} ({elapsed:.2f}s < {bound:.0f}s)")


def random_fix(rng: random.Random) -> GeoFix:
    return GeoFix(
        latitude=rng.uniform(-90.0, 90.0),
        longitude=rng.uniform(-180.0, 180.0),
        timestamp=NmeaTime(rng.randrange(24), rng.randrange(60), rng.uniform(0, 59.99)),
        quality=rng.choice([FixQuality.GPS_FIX, FixQuality.DGPS_FIX]),
        satellites=rng.randrange(0, 13),
        hdop=round(rng.uniform(0.5, 9.9), 1),
    )


def test_nmea_round_trip_and_mutation_rejection():
    rng = random.Random(1001)
    started = time.perf_counter()
    for _ in range(10_000):
        fix = random_fix(rng)
        parsed = parse_sentence(format_gga(fix))
        assert isinstance(parsed, GgaFix)
        assert abs(parsed.fix.latitude - fix.latitude) < 1e-5
        assert abs(parsed.fix.longitude - fix.longitude) < 1e-5
    rejected = 0
    for _ in range(10_000):
        sentence = format_gga(random_fix(rng)).strip()
        star = sentence.index("*")
        pos = rng.randrange(1, star)
        replacement = chr(rng.choice([b for b in range(0x20, 0x7F) if chr(b) != sentence[pos]]))
        mutated = sentence[:pos] + replacement + sentence[pos + 1 :]
        try:
            parse_sentence(mutated)
        except ChecksumMismatch:
            rejected += 1
    assert rejected == 10_000
    report("NMEA round-trip and mutation rejection", time.perf_counter() - started, 5.0)


def test_parser_fuzz_robustness():
    rng = random.Random(1002)
    started = time.perf_counter()
    for i in range(1_000_000):
        size = rng.randrange(0, 65) if i % 10 else rng.randrange(0, 1025)
        blob = rng.randbytes(size)
        try:
            parse_sentence(blob)
        except (ChecksumMismatch, MalformedField):
            pass  # the only permitted outcomes
    report("parser fuzz, 1e6 byte strings, zero crashes", time.perf_counter() - started, 60.0)


def test_georeferencing_recovery_and_oracle_agreement():
    rng = random.Random(1003)
    started = time.perf_counter()
    for _ in range(100):
        truth, pairs = random_affine_instance(rng, noise=0.0, n=rng.randrange(4, 10))
        cal = fit_affine(pairs)
        fitted = (cal.a, cal.b, cal.c, cal.d, cal.e, cal.f)
        for got, want in zip(fitted, truth):
            assert abs(got - want) <= 1e-6 * max(1.0, abs(want))
        oracle = normal_equations_oracle(pairs)
        for got, want in zip(fitted, oracle):
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
    report("affine fit recovery and normal-equations agreement", time.perf_counter() - started, 5.0)


def test_geofence_oracle_equivalence_and_hysteresis():
    rng = random.Random(1004)
    started = time.perf_counter()
    disagreements = 0
    for _ in range(500):
        poly = random_simple_polygon(rng, ZOO_LAT, ZOO_LON)
        spot = Hotspot("p", "p", poly, "p")
        for _ in range(20):
            radius = rng.uniform(0.0, 90.0)
            angle = rng.uniform(0, 2 * math.pi)
            point = GeoPoint(
                ZOO_LAT + radius * math.sin(angle) / M_PER_DEG,
                ZOO_LON + radius * math.cos(angle) / (M_PER_DEG * math.cos(math.radians(ZOO_LAT))),
            )
            if contains(spot, point) != winding_number_oracle(list(poly.vertices), point):
                disagreements += 1
    assert disagreements == 0

    for _ in range(10_000):
        radius = rng.uniform(10.0, 50.0)
        buffer_m = rng.uniform(2.0, 10.0)
        center = GeoPoint(ZOO_LAT + rng.uniform(-0.001, 0.001), ZOO_LON + rng.uniform(-0.001, 0.001))
        spot = Hotspot("h", "h", Circle(center, radius), "h")
        state = FenceState()
        events = []
        for i in range(12):
            dist = radius - 1.0 if i % 2 == 0 else radius + buffer_m / 2.0
            angle = rng.uniform(0, 2 * math.pi)
            point = GeoPoint(
                center.latitude + dist * math.sin(angle) / M_PER_DEG,
                center.longitude
                + dist * math.cos(angle) / (M_PER_DEG * math.cos(math.radians(center.latitude))),
            )
            state, new_events = update(state, [spot], point, buffer_m)
            events.extend(new_events)
        assert events == [Entered("h")], f"dither broke hysteresis: {events}"
    report(
        "geofence winding-oracle equivalence and dither hysteresis",
        time.perf_counter() - started,
        30.0,
    )


def test_end_to_end_golden_tour(pack_dir, walk_file, golden_tour_file, tmp_path):
    started = time.perf_counter()
    out = tmp_path / "tour.jsonl"
    result = CliRunner().invoke(
        cli_main, ["tour", str(pack_dir), "--walk", str(walk_file), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert out.read_bytes() == golden_tour_file.read_bytes(), "tour log deviates from golden"

    records = [json.loads(line) for line in golden_tour_file.read_text().splitlines()]
    phases = [r["phase"] for r in records if r["event"] == "connection_changed"]
    assert phases[:3] == ["splash", "connecting", "connected"]
    splash, connecting, connected = records[0], records[1], records[2]
    assert splash["t"] == 0.0
    assert connecting["t"] == 5.0, "splash must last exactly 5 seconds"
    assert connected["t"] >= 5.0
    entered = [r["hotspot"] for r in records if r["event"] == "hotspot_entered"]
    assert entered == ["tiger-spot", "lion-spot", "jaguar-spot", "leopard-spot"], (
        "one visit per scripted hotspot, in visit order"
    )
    report("end-to-end golden tour, byte-for-byte", time.perf_counter() - started, 2.0)


def test_connection_state_machine_exhaustive(pack):
    started = time.perf_counter()
    gate = GeoFix(-37.7830, 144.9500, None, FixQuality.GPS_FIX, 8, 0.9)

    def build(phase: ConnectionPhase):
        s = new_session(pack)
        if phase is ConnectionPhase.SPLASH:
            return s
        on_tick(s, 5.0)
        if phase is ConnectionPhase.CONNECTING:
            return s
        if phase is ConnectionPhase.CONNECTED:
            on_fix(s, gate)
            return s
        if phase is ConnectionPhase.LOST:
            on_fix(s, gate)
            on_tick(s, 15.0)
            return s
        if phase is ConnectionPhase.FAILED:
            on_tick(s, 35.0)
            return s
        menu_action(s, Close())
        return s

    def tick_timeout_target(s):
        cfg = s.config
        if s.phase is ConnectionPhase.SPLASH:
            return cfg.splash_seconds
        if s.phase is ConnectionPhase.CONNECTING:
            return s.connecting_since + cfg.connect_timeout_s
        if s.phase is ConnectionPhase.CONNECTED:
            return s.last_fix_at + cfg.fix_gap_s
        if s.phase is ConnectionPhase.LOST:
            return s.lost_since + cfg.connect_timeout_s
        return s.clock + 1000.0

    # documented transition table: (state, input) -> expected phase or error
    P = ConnectionPhase
    table = {
        (P.SPLASH, "tick_short"): P.SPLASH,
        (P.SPLASH, "tick_timeout"): P.CONNECTING,
        (P.SPLASH, "fix"): P.SPLASH,
        (P.SPLASH, "restart"): InvalidState,
        (P.SPLASH, "close"): P.EXITED,
        (P.CONNECTING, "tick_short"): P.CONNECTING,
        (P.CONNECTING, "tick_timeout"): P.FAILED,
        (P.CONNECTING, "fix"): P.CONNECTED,
        (P.CONNECTING, "restart"): InvalidState,
        (P.CONNECTING, "close"): P.EXITED,
        (P.CONNECTED, "tick_short"): P.CONNECTED,
        (P.CONNECTED, "tick_timeout"): P.LOST,
        (P.CONNECTED, "fix"): P.CONNECTED,
        (P.CONNECTED, "restart"): InvalidState,
        (P.CONNECTED, "close"): P.EXITED,
        (P.LOST, "tick_short"): P.LOST,
        (P.LOST, "tick_timeout"): P.FAILED,
        (P.LOST, "fix"): P.CONNECTED,
        (P.LOST, "restart"): InvalidState,
        (P.LOST, "close"): P.EXITED,
        (P.FAILED, "tick_short"): P.FAILED,
        (P.FAILED, "tick_timeout"): P.FAILED,  # first failure waits for the user
        (P.FAILED, "fix"): P.FAILED,
        (P.FAILED, "restart"): P.CONNECTING,
        (P.FAILED, "close"): P.EXITED,
        (P.EXITED, "tick_short"): P.EXITED,
        (P.EXITED, "tick_timeout"): P.EXITED,
        (P.EXITED, "fix"): P.EXITED,
        (P.EXITED, "restart"): InvalidState,
        (P.EXITED, "close"): SessionClosed,
    }
    for (phase, input_name), expected in table.items():
        s = build(phase)
        assert s.phase is phase, f"builder failed for {phase}"

        def apply():
            if input_name == "tick_short":
                on_tick(s, s.clock + 1.0)
            elif input_name == "tick_timeout":
                on_tick(s, tick_timeout_target(s))
            elif input_name == "fix":
                on_fix(s, gate)
            elif input_name == "restart":
                restart(s)
            else:
                menu_action(s, Close())

        if isinstance(expected, type) and issubclass(expected, Exception):
            with pytest.raises(expected):
                apply()
        else:
            apply()
            assert s.phase is expected, f"{phase} x {input_name} -> {s.phase}, want {expected}"

    # the documented single-restart path: failed -> restart -> timeout -> exited
    s = build(ConnectionPhase.FAILED)
    assert restart(s).state.phase is ConnectionPhase.CONNECTING
    assert s.attempt_count == 2
    events = on_tick(s, s.connecting_since + s.config.connect_timeout_s)
    assert [e.state.phase for e in events] == [ConnectionPhase.FAILED, ConnectionPhase.EXITED]
    report("connection state machine, exhaustive enumeration", time.perf_counter() - started, 1.0)


def test_menu_surface(pack):
    started = time.perf_counter()
    assert len(MENU_ACTION_TAGS) == 6
    with pytest.raises(ValueError):
        parse_menu_action("anything_else")

    s = new_session(pack)
    report_early = menu_action(s, CheckConnection())  # works before connecting
    assert report_early.state.phase is ConnectionPhase.SPLASH
    on_tick(s, 5.0)
    on_fix(s, GeoFix(-37.784100, 144.951500, None, FixQuality.GPS_FIX, 8, 0.9))

    coords = menu_action(s, ShowCoordinates())
    assert coords.text == "lat -37.784100, lon 144.951500"

    guide = menu_action(s, TourGuide())
    assert [e.hotspot_id for e in guide.entries] == [
        "tiger-spot",
        "lion-spot",
        "leopard-spot",
        "jaguar-spot",
    ]
    distances = [e.distance_m for e in guide.entries]
    assert distances == sorted(distances)

    found = menu_action(s, Search("tiger"))
    assert [a.id for a in found.animals] == ["tiger"]

    window = menu_action(s, Events(11 * 60, 12 * 60))
    assert [e.id for e in window.events] == ["big-cats-keeper-talk"]

    assert menu_action(s, Close()) == engine.Closed()
    with pytest.raises(SessionClosed):
        menu_action(s, CheckConnection())
    report("menu surface: exactly six actions per contract", time.perf_counter() - started, 1.0)


def test_serve_stream_equals_headless_tour(pack, walk_file):
    started = time.perf_counter()
    walk = load_walk(walk_file)
    client = TestClient(create_app(pack, walk=walk, pace="fast"))
    with client.websocket_connect("/ws/session") as ws:
        wire_records = []
        while True:
            message = ws.receive_json()
            if message["type"] == "event":
                wire_records.append(message["record"])
            elif message["type"] == "tour_complete":
                break
    headless = [record_to_dict(r) for r in run_tour(pack, build_walk(walk)).log]
    assert wire_records == headless, "transport changed the event sequence"
    report("serve stream equals headless tour", time.perf_counter() - started, 10.0)
