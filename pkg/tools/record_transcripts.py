#!/usr/bin/env python3
"""Record wire transcripts of scripted tours for the frontend's replay tests.

Connects a recording client to the serve app (fast pace) and writes every
server message, one JSON object per line. Run from the repository root:

    python3 tools/record_transcripts.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from zoooz.content import load_pack  # noqa: E402
from zoooz.service import create_app  # noqa: E402
from zoooz.simulator import load_walk  # noqa: E402

PACK = ROOT / "packs" / "big-cats"
OUT_DIR = ROOT / "frontend" / "test" / "transcripts"


def record(walk_name: str, out_name: str) -> None:
    pack = load_pack(PACK)
    walk = load_walk(PACK / "walks" / walk_name)
    client = TestClient(create_app(pack, walk=walk, pace="fast"))
    messages = []
    with client.websocket_connect("/ws/session") as ws:
        while True:
            msg = ws.receive_json()
            messages.append(msg)
            if msg["type"] == "tour_complete":
                break
    out = OUT_DIR / out_name
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for msg in messages:
            fh.write(json.dumps(msg, separators=(",", ":")) + "\n")
    print(f"{out_name}: {len(messages)} messages")


def main() -> None:
    record("grand-tour.jsonl", "golden_tour.transcript.jsonl")
    record("lost-signal.jsonl", "lost_signal.transcript.jsonl")


if __name__ == "__main__":
    main()
