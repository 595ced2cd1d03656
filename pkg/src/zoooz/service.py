"""HTTP and live-stream service hosting a steerable simulated tour.

Read-only JSON endpoints expose the loaded pack (manifest, animals, events,
hotspots, media); ``/ws/session`` carries the versioned wire protocol: the
server streams session event records and viewport snapshots, the client
sends steering clicks, zoom steps, menu actions, and restart. One session
lives and dies with each stream connection. Every message in both
directions carries ``protocol_version`` and the session id; malformed or
unknown messages get a structured error reply and the connection stays up.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math
import uuid
from pathlib import Path

from fastapi import FastAPI, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import engine, nmea
from .content import AnimalRecord, ContentPack, format_minutes, parse_hhmm, search, events_between
from .errors import InvalidState, NotReady, SessionClosed
from .geo import GeoPoint, PixelPoint, geo_to_pixel, pixel_to_geo
from .geofence import Circle, Polygon, anchor_point
from .simulator import InteractiveWalker, WalkScript, build_walk
from .viewport import ScreenPoint, in_zoo_range, screen_to_map, visible_hotspots, zoom_step

PROTOCOL_VERSION = 1

log = logging.getLogger("zoooz.service")


def _animal_dict(animal: AnimalRecord) -> dict:
    return {
        "id": animal.id,
        "name": animal.name,
        "species": animal.species,
        "description": animal.description,
        "media": [
            {"kind": m.kind, "path": m.path, "caption": m.caption} for m in animal.media
        ],
    }


def _geometry_dict(geometry) -> dict:
    if isinstance(geometry, Circle):
        return {
            "type": "circle",
            "center": [geometry.center.latitude, geometry.center.longitude],
            "radius_m": geometry.radius_m,
        }
    assert isinstance(geometry, Polygon)
    return {
        "type": "polygon",
        "vertices": [[v.latitude, v.longitude] for v in geometry.vertices],
    }


def _snapshot(session: engine.Session) -> dict:
    vp = session.viewport
    visible = [
        {
            "id": hid,
            "x": round(pt.x, 2),
            "y": round(pt.y, 2),
            "name": session.pack.hotspots[hid].name,
        }
        for hid, pt in visible_hotspots(vp, list(session.pack.hotspots.values()), session.pack.calibration)
    ]
    in_range = None
    if session.last_fix is not None and session.last_fix.has_position:
        point = GeoPoint(session.last_fix.latitude, session.last_fix.longitude)
        in_range = in_zoo_range(point, session.pack.bounds)
    return {
        "t": round(session.clock, 3),
        "connection": session.phase.value,
        "attempt": session.attempt_count,
        "center": [round(vp.center.x, 2), round(vp.center.y, 2)],
        "zoom": vp.zoom,
        "screen": list(vp.screen),
        "map_extent": list(vp.map_extent),
        "in_range": in_range,
        "visible_hotspots": visible,
    }


def _menu_response_dict(response: engine.MenuResponse) -> dict:
    if isinstance(response, engine.ConnectionReport):
        return {
            "state": response.state.phase.value,
            "attempt": response.state.attempt_count,
            "seconds_since_fix": response.seconds_since_fix,
        }
    if isinstance(response, engine.CoordinatesReport):
        return {"text": response.text, "lat": response.latitude, "lon": response.longitude}
    if isinstance(response, engine.TourGuideList):
        return {
            "entries": [
                {"id": e.hotspot_id, "name": e.name, "distance_m": round(e.distance_m, 1)}
                for e in response.entries
            ]
        }
    if isinstance(response, engine.SearchResults):
        return {"animals": [_animal_dict(a) for a in response.animals]}
    if isinstance(response, engine.EventsList):
        return {
            "events": [
                {
                    "id": ev.id,
                    "title": ev.title,
                    "hotspot_id": ev.location_hotspot_id,
                    "start": format_minutes(ev.start_min),
                    "end": format_minutes(ev.end_min),
                }
                for ev in response.events
            ]
        }
    assert isinstance(response, engine.Closed)
    return {"closed": True}


class _WireSession:
    """Owns one engine session on behalf of one stream connection."""

    def __init__(self, ws: WebSocket, pack: ContentPack, pace: str):
        self.ws = ws
        self.pack = pack
        self.pace = pace
        self.sid = uuid.uuid4().hex
        self.session = engine.new_session(pack)
        self.cursor = 0  # log records already sent
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.closed = False
        self.walker: InteractiveWalker | None = None

    async def send(self, msg_type: str, **payload) -> None:
        message = {"protocol_version": PROTOCOL_VERSION, "session": self.sid, "type": msg_type}
        message.update(payload)
        await self.ws.send_text(json.dumps(message, separators=(",", ":")))

    async def flush_events(self) -> None:
        while self.cursor < len(self.session.log):
            record = self.session.log[self.cursor]
            self.cursor += 1
            extra = {}
            ev = record.event
            if isinstance(ev, engine.HotspotEntered):
                animal = self.pack.animals[ev.content.content_id]
                extra["content_detail"] = _animal_dict(animal)
            await self.send("event", record=engine.record_to_dict(record), **extra)

    async def send_snapshot(self) -> None:
        await self.send("snapshot", viewport=_snapshot(self.session))

    async def reader(self) -> None:
        try:
            while True:
                text = await self.ws.receive_text()
                await self.inbox.put(text)
        except WebSocketDisconnect:
            await self.inbox.put(None)
        except RuntimeError:  # socket torn down mid-receive
            await self.inbox.put(None)

    async def handle_raw(self, raw: str) -> None:
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            await self.send("error", error="bad_json", detail="message is not valid JSON")
            return
        if not isinstance(msg, dict):
            await self.send("error", error="bad_json", detail="message is not an object")
            return
        if msg.get("protocol_version") != PROTOCOL_VERSION:
            await self.send(
                "error",
                error="bad_version",
                detail=f"this server speaks protocol_version {PROTOCOL_VERSION}",
            )
            return
        if msg.get("session") != self.sid:
            await self.send("error", error="bad_session", detail="unknown session id")
            return
        await self.handle(msg)

    async def handle(self, msg: dict) -> None:
        kind = msg.get("type")
        session = self.session
        if kind == "zoom":
            direction = msg.get("direction")
            if direction not in (1, -1):
                await self.send("error", error="bad_zoom", detail="direction must be +1 or -1")
                return
            session.viewport = zoom_step(session.viewport, direction)
            await self.send_snapshot()
        elif kind == "steer":
            if self.walker is None:
                await self.send(
                    "error", error="steering_unavailable", detail="this session replays a script"
                )
                return
            try:
                sx, sy = float(msg["x"]), float(msg["y"])
            except (KeyError, TypeError, ValueError):
                await self.send("error", error="bad_steer", detail="steer needs screen x and y")
                return
            map_px = screen_to_map(session.viewport, ScreenPoint(sx, sy))
            target = pixel_to_geo(self.pack.calibration, map_px)
            self.walker.set_target(target)
            await self.send(
                "steer_accepted",
                lat=round(target.latitude, 6),
                lon=round(target.longitude, 6),
            )
        elif kind == "menu":
            tag = msg.get("action")
            try:
                action = engine.parse_menu_action(str(tag), msg.get("params") or {})
            except ValueError as exc:
                await self.send("error", error="unknown_action", detail=str(exc))
                return
            try:
                response = engine.menu_action(session, action)
            except NotReady as exc:
                await self.send("error", error="not_ready", detail=str(exc))
                return
            except SessionClosed as exc:
                await self.send("error", error="session_closed", detail=str(exc))
                return
            await self.send("menu_result", action=tag, result=_menu_response_dict(response))
            await self.flush_events()
            if isinstance(response, engine.Closed):
                self.closed = True
        elif kind == "restart":
            try:
                engine.restart(session)
            except InvalidState as exc:
                await self.send("error", error="invalid_state", detail=str(exc))
                return
            await self.flush_events()
            await self.send_snapshot()
        else:
            await self.send("error", error="unknown_type", detail=f"unknown message type {kind!r}")

    async def drain_inbox(self) -> bool:
        """Handle queued client messages; False once the client is gone."""
        while True:
            try:
                raw = self.inbox.get_nowait()
            except asyncio.QueueEmpty:
                return True
            if raw is None:
                return False
            await self.handle_raw(raw)

    async def run_scripted(self, script: WalkScript) -> None:
        stream = build_walk(script)
        period = stream.sample_period_s
        steps = int(math.floor(stream.duration_s / period + 1e-9)) + 1
        idx = 0
        for i in range(steps):
            if not await self.drain_inbox():
                return
            t = i * period
            engine.on_tick(self.session, t)
            while idx < len(stream.items) and stream.items[idx].elapsed_s <= t + 1e-9:
                item = stream.items[idx]
                idx += 1
                try:
                    parsed = nmea.parse_sentence(item.payload)
                except Exception:
                    continue
                if isinstance(parsed, (nmea.GgaFix, nmea.RmcFix)):
                    engine.on_fix(self.session, parsed.fix)
            await self.flush_events()
            await self.send_snapshot()
            if self.closed or self.session.phase is engine.ConnectionPhase.EXITED:
                break
            if self.pace == "real":
                await asyncio.sleep(period)
            else:
                await asyncio.sleep(0)
        await self.send("tour_complete")
        # keep serving menu traffic until the client leaves
        while not self.closed:
            raw = await self.inbox.get()
            if raw is None:
                return
            await self.handle_raw(raw)

    async def run_interactive(self) -> None:
        pack = self.pack
        start = pixel_to_geo(
            pack.calibration,
            PixelPoint(pack.map_extent[0] / 2.0, pack.map_extent[1] / 2.0),
        )
        self.walker = InteractiveWalker(start)
        period = 1.0
        t = 0.0
        while not self.closed and self.session.phase is not engine.ConnectionPhase.EXITED:
            if not await self.drain_inbox():
                return
            engine.on_tick(self.session, t)
            point = self.walker.advance(period)
            fix = nmea.parse_sentence(
                nmea.format_gga(
                    nmea.GeoFix(
                        point.latitude,
                        point.longitude,
                        None,
                        nmea.FixQuality.GPS_FIX,
                        8,
                        0.9,
                    )
                )
            )
            assert isinstance(fix, nmea.GgaFix)
            engine.on_fix(self.session, fix.fix)
            await self.flush_events()
            await self.send_snapshot()
            t += period
            await asyncio.sleep(period if self.pace == "real" else 0.005)


def create_app(
    pack: ContentPack,
    walk: WalkScript | None = None,
    pace: str = "real",
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service around one loaded pack."""
    app = FastAPI(title=f"zoooz: {pack.name}")

    @app.get("/api/manifest")
    def manifest() -> dict:
        cal = pack.calibration
        b = pack.bounds
        return {
            "protocol_version": PROTOCOL_VERSION,
            "name": pack.name,
            "version": pack.version,
            "format_version": pack.format_version,
            "map_image_url": f"/media/{pack.map_image}",
            "map_extent": list(pack.map_extent),
            "bounds": {
                "min_lat": b.min_lat,
                "max_lat": b.max_lat,
                "min_lon": b.min_lon,
                "max_lon": b.max_lon,
                "margin_m": b.margin_m,
            },
            "calibration": {
                "a": cal.a,
                "b": cal.b,
                "c": cal.c,
                "d": cal.d,
                "e": cal.e,
                "f": cal.f,
                "rms_residual": cal.rms_residual,
            },
        }

    @app.get("/api/animals")
    def animals(q: str | None = Query(default=None)) -> list[dict]:
        if q is None:
            return [_animal_dict(a) for a in pack.animals.values()]
        return [_animal_dict(a) for a in search(pack, q)]

    @app.get("/api/events")
    def events(
        from_: str = Query(default="00:00", alias="from"),
        to: str = Query(default="23:59"),
    ):
        try:
            t0, t1 = parse_hhmm(from_), parse_hhmm(to)
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"error": "bad_time", "detail": str(exc)})
        if t0 > t1:
            return JSONResponse(
                status_code=422, content={"error": "bad_window", "detail": "from is after to"}
            )
        return [
            {
                "id": ev.id,
                "title": ev.title,
                "hotspot_id": ev.location_hotspot_id,
                "start": format_minutes(ev.start_min),
                "end": format_minutes(ev.end_min),
            }
            for ev in events_between(pack, t0, t1)
        ]

    @app.get("/api/hotspots")
    def hotspots() -> list[dict]:
        out = []
        for h in sorted(pack.hotspots.values(), key=lambda h: h.id):
            anchor = anchor_point(h)
            px = geo_to_pixel(pack.calibration, anchor)
            out.append(
                {
                    "id": h.id,
                    "name": h.name,
                    "category": h.category,
                    "content_id": h.content_id,
                    "geometry": _geometry_dict(h.geometry),
                    "anchor": {"lat": anchor.latitude, "lon": anchor.longitude},
                    "anchor_px": {"x": round(px.x, 2), "y": round(px.y, 2)},
                }
            )
        return out

    @app.get("/media/{asset_path:path}")
    def media(asset_path: str):
        root = pack.root.resolve()
        target = (root / asset_path).resolve()
        if not target.is_relative_to(root) or not target.is_file():
            return JSONResponse(status_code=404, content={"error": "not_found"})
        return FileResponse(target)

    @app.websocket("/ws/session")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        wire = _WireSession(ws, pack, pace)
        reader_task = asyncio.create_task(wire.reader())
        try:
            await wire.send(
                "hello",
                pack=pack.name,
                mode="scripted" if walk is not None else "interactive",
            )
            await wire.flush_events()  # the initial splash record
            await wire.send_snapshot()
            if walk is not None:
                await wire.run_scripted(walk)
            else:
                await wire.run_interactive()
        except WebSocketDisconnect:
            pass
        except RuntimeError:
            pass  # send on a closed socket during teardown
        finally:
            reader_task.cancel()
            log.info("session %s finished", wire.sid)

    resolved_ui = Path(ui_dir) if ui_dir else None
    if resolved_ui and resolved_ui.is_dir():
        app.mount("/", StaticFiles(directory=resolved_ui, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def placeholder() -> str:
            return (
                "<html><body><h1>zoooz service</h1>"
                "<p>No UI bundle configured. The JSON API lives under /api/, "
                "media under /media/, and the live stream at /ws/session.</p>"
                "</body></html>"
            )

    return app
