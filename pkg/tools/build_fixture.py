#!/usr/bin/env python3
"""Regenerate the bundled big-cats fixture pack deterministically.

Writes the manifest (with calibration coefficients re-fit from the control
points), the record tables, placeholder media, and a synthetic 2000x1500
map raster. Run from the repository root:

    python3 tools/build_fixture.py
"""

from __future__ import annotations

import json
import struct
import sys
import wave
import zlib
from pathlib import Path

from PIL import Image, ImageDraw

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from zoooz.content import load_control_points  # noqa: E402
from zoooz.geo import fit_affine  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
PACK = ROOT / "packs" / "big-cats"

CONTROL_POINTS = [
    # lat, lon, x_px, y_px
    (-37.7800, 144.9460, 0.0, 0.0),
    (-37.7800, 144.9560, 2000.0, 0.0),
    (-37.7875, 144.9460, 0.0, 1500.0),
    (-37.7875, 144.9560, 2000.0, 1500.0),
    (-37.78375, 144.9510, 1000.0, 750.0),
]

ANIMALS = [
    {
        "id": "tiger",
        "name": "Sumatran Tiger",
        "species": "Panthera tigris sumatrae",
        "description": "The smallest of the living subspecies, with close-set dark stripes and a taste for afternoon swims in the moat.",
        "media": [
            {"kind": "image", "path": "media/tiger.png", "caption": "Resting by the pool"},
            {"kind": "audio", "path": "media/tiger.wav", "caption": "Territorial call"},
            {"kind": "text", "path": "media/tiger.txt", "caption": "Keeper notes"},
        ],
    },
    {
        "id": "lion",
        "name": "African Lion",
        "species": "Panthera leo",
        "description": "The pride dozes on the warm rocks for most of the day and wakes for the late feeding sessions.",
        "media": [
            {"kind": "image", "path": "media/lion.png", "caption": "The pride at rest"},
            {"kind": "text", "path": "media/lion.txt", "caption": "Keeper notes"},
        ],
    },
    {
        "id": "jaguar",
        "name": "Jaguar",
        "species": "Panthera onca",
        "description": "A powerful swimmer from the American tropics; look for the rosettes with central spots.",
        "media": [
            {"kind": "image", "path": "media/jaguar.png", "caption": "Patrolling the grove"},
            {"kind": "text", "path": "media/jaguar.txt", "caption": "Keeper notes"},
        ],
    },
    {
        "id": "leopard",
        "name": "Leopard",
        "species": "Panthera pardus",
        "description": "Solitary and secretive, usually draped along the high branches of the lookout trees.",
        "media": [
            {"kind": "image", "path": "media/leopard.png", "caption": "Up in the branches"},
            {"kind": "text", "path": "media/leopard.txt", "caption": "Keeper notes"},
        ],
    },
]

HOTSPOTS = [
    {
        "id": "tiger-spot",
        "name": "Tiger Territory",
        "category": "big-cats",
        "content_id": "tiger",
        "geometry": {"type": "circle", "center": [-37.7845, 144.9515], "radius_m": 25.0},
    },
    {
        "id": "lion-spot",
        "name": "Lion Gorge",
        "category": "big-cats",
        "content_id": "lion",
        "geometry": {"type": "circle", "center": [-37.7835, 144.9525], "radius_m": 25.0},
    },
    {
        "id": "jaguar-spot",
        "name": "Jaguar Grove",
        "category": "big-cats",
        "content_id": "jaguar",
        "geometry": {"type": "circle", "center": [-37.7845, 144.9535], "radius_m": 25.0},
    },
    {
        "id": "leopard-spot",
        "name": "Leopard Lookout",
        "category": "big-cats",
        "content_id": "leopard",
        "geometry": {
            "type": "polygon",
            "vertices": [
                [-37.785725, 144.952215],
                [-37.785725, 144.952785],
                [-37.785275, 144.952785],
                [-37.785275, 144.952215],
            ],
        },
    },
]

EVENTS = [
    {
        "id": "morning-welcome",
        "title": "Morning Welcome Walk",
        "hotspot_id": None,
        "start": "09:30",
        "end": "10:00",
    },
    {
        "id": "big-cats-keeper-talk",
        "title": "Big Cats Keeper Talk",
        "hotspot_id": "lion-spot",
        "start": "11:00",
        "end": "11:30",
    },
    {
        "id": "tiger-feeding",
        "title": "Tiger Feeding",
        "hotspot_id": "tiger-spot",
        "start": "14:00",
        "end": "14:20",
    },
]

PALETTE = {
    "tiger": (214, 126, 44),
    "lion": (197, 161, 88),
    "jaguar": (158, 129, 61),
    "leopard": (186, 168, 121),
}


def write_jsonl(path: Path, records: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(", ", ": ")) + "\n")


def build_map_image(path: Path) -> None:
    img = Image.new("RGB", (2000, 1500), (201, 222, 182))  # lawn green
    draw = ImageDraw.Draw(img)
    # lake in the north-west
    draw.ellipse((120, 120, 620, 420), fill=(150, 190, 220), outline=(110, 150, 185), width=4)
    # main loop path through the precinct (matches the walkable corridor)
    path_points = [(1000, 400), (1100, 950), (1300, 750), (1500, 950), (1300, 1150)]
    draw.line(path_points, fill=(236, 226, 198), width=36, joint="curve")
    draw.line([(300, 1300), (1000, 400)], fill=(236, 226, 198), width=36)
    # exhibit blocks
    for box, color in [
        ((850, 800, 1150, 1100), (173, 154, 112)),  # tiger
        ((1250, 600, 1550, 900), (167, 171, 120)),  # lion
        ((1650, 800, 1950, 1100), (152, 140, 96)),  # jaguar
        ((1250, 1000, 1550, 1300), (140, 158, 122)),  # leopard
    ]:
        draw.rectangle(box, fill=color, outline=(90, 90, 80), width=3)
    # border
    draw.rectangle((0, 0, 1999, 1499), outline=(70, 90, 70), width=8)
    img.save(path, optimize=True)


def build_animal_image(path: Path, color: tuple[int, int, int]) -> None:
    img = Image.new("RGB", (96, 72), color)
    draw = ImageDraw.Draw(img)
    draw.ellipse((28, 16, 68, 56), fill=(245, 240, 225))
    img.save(path, optimize=True)


def build_audio(path: Path) -> None:
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(8000)
        fh.writeframes(struct.pack("<800h", *([0] * 800)))  # 0.1 s of silence


def main() -> None:
    media = PACK / "media"
    walks = PACK / "walks"
    media.mkdir(parents=True, exist_ok=True)
    walks.mkdir(parents=True, exist_ok=True)

    with (PACK / "calibration.csv").open("w", encoding="utf-8") as fh:
        fh.write("lat,lon,x_px,y_px\n")
        for lat, lon, x, y in CONTROL_POINTS:
            fh.write(f"{lat},{lon},{x},{y}\n")

    cal = fit_affine(load_control_points(PACK / "calibration.csv"))
    manifest = {
        "format_version": 1,
        "name": "big-cats",
        "version": "1.0.0",
        "map_image": "map.png",
        "map_extent": [2000, 1500],
        "bounds": {
            "min_lat": -37.7875,
            "max_lat": -37.78,
            "min_lon": 144.946,
            "max_lon": 144.956,
            "margin_m": 25.0,
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
    (PACK / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    write_jsonl(PACK / "animals.jsonl", ANIMALS)
    write_jsonl(PACK / "hotspots.jsonl", HOTSPOTS)
    write_jsonl(PACK / "events.jsonl", EVENTS)

    build_map_image(PACK / "map.png")
    for animal in ANIMALS:
        build_animal_image(media / f"{animal['id']}.png", PALETTE[animal["id"]])
        (media / f"{animal['id']}.txt").write_text(
            f"{animal['name']} ({animal['species']}).\n{animal['description']}\n",
            encoding="utf-8",
        )
    build_audio(media / "tiger.wav")

    write_jsonl(
        walks / "grand-tour.jsonl",
        [
            {"type": "walk", "speed_mps": 1.4, "sample_rate_hz": 1.0, "noise_sigma_m": 0.0, "seed": 20070501},
            {"type": "waypoint", "lat": -37.7830, "lon": 144.9500},
            {"type": "waypoint", "lat": -37.7845, "lon": 144.9515},
            {"type": "waypoint", "lat": -37.7835, "lon": 144.9525},
            {"type": "waypoint", "lat": -37.7845, "lon": 144.9535},
            {"type": "waypoint", "lat": -37.7855, "lon": 144.9525},
        ],
    )
    write_jsonl(
        walks / "lost-signal.jsonl",
        [
            {"type": "walk", "speed_mps": 0.7, "sample_rate_hz": 1.0, "noise_sigma_m": 0.0, "seed": 7},
            {"type": "waypoint", "lat": -37.7830, "lon": 144.9500},
            {"type": "waypoint", "lat": -37.7835, "lon": 144.9505},
            {"type": "fault", "kind": "silence", "start_s": 20, "end_s": 1000},
        ],
    )
    print(f"fixture pack written to {PACK}")
    print(f"calibration rms residual: {cal.rms_residual:.3e} px")


if __name__ == "__main__":
    main()
