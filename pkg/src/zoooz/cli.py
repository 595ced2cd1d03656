"""Command-line front door: validate, calibrate, tour, serve.

Exit codes: 0 success, 1 validation or data errors, 2 I/O failures such as
missing files. Set ZOOOZ_LOG to a level name (debug, info, warning) for
diagnostics on stderr.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import click

from . import engine
from .content import load_control_points, load_pack, validate_pack
from .errors import (
    DegenerateGeometry,
    InsufficientPoints,
    MissingFile,
    PackError,
    SchemaViolation,
    ScriptInvalid,
)
from .geo import fit_affine
from .simulator import WalkScript, build_walk, load_walk


def _setup_logging() -> None:
    level_name = os.environ.get("ZOOOZ_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@click.group()
def main() -> None:
    """GPS-driven interactive zoo tour guide."""
    _setup_logging()


@main.command()
@click.argument("pack_dir", type=click.Path(path_type=Path))
def validate(pack_dir: Path) -> None:
    """Check a content pack, reporting every violation."""
    if not pack_dir.is_dir():
        click.echo(f"error: pack directory {pack_dir} not found", err=True)
        sys.exit(2)
    pack, issues = validate_pack(pack_dir)
    for issue in issues:
        click.echo(f"{type(issue).__name__}: {issue}")
    click.echo(f"{len(issues)} errors")
    if issues:
        sys.exit(1)
    assert pack is not None
    click.echo(
        f"pack {pack.name!r} ok: {len(pack.animals)} animals, "
        f"{len(pack.hotspots)} hotspots, {len(pack.events)} events"
    )


@main.command()
@click.argument("points_file", type=click.Path(path_type=Path))
def calibrate(points_file: Path) -> None:
    """Fit the degree-to-pixel affine from a control point CSV."""
    if not points_file.is_file():
        click.echo(f"error: control point file {points_file} not found", err=True)
        sys.exit(2)
    try:
        pairs = load_control_points(points_file)
        cal = fit_affine(pairs)
    except InsufficientPoints as exc:
        click.echo(f"error: insufficient control points ({exc})", err=True)
        sys.exit(1)
    except DegenerateGeometry as exc:
        click.echo(f"error: degenerate control points ({exc})", err=True)
        sys.exit(1)
    except SchemaViolation as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for key in ("a", "b", "c", "d", "e", "f"):
        click.echo(f"{key} = {getattr(cal, key):.9g}")
    click.echo(f"rms_residual = {cal.rms_residual:.6g} px over {len(pairs)} points")
    block = {key: getattr(cal, key) for key in ("a", "b", "c", "d", "e", "f")}
    block["rms_residual"] = cal.rms_residual
    click.echo("manifest calibration block:")
    click.echo(json.dumps({"calibration": block}, indent=2))


@main.command()
@click.argument("pack_dir", type=click.Path(path_type=Path))
@click.option("--walk", "walk_file", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_file", required=True, type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None, help="Override the walk script's noise seed.")
@click.option("--plot", "plot_file", type=click.Path(path_type=Path), default=None,
              help="Also render the tour onto the map as a figure.")
def tour(pack_dir: Path, walk_file: Path, out_file: Path, seed: int | None, plot_file: Path | None) -> None:
    """Replay a scripted walk headlessly and write the event log."""
    if not pack_dir.is_dir():
        click.echo(f"error: pack directory {pack_dir} not found", err=True)
        sys.exit(2)
    if not walk_file.is_file():
        click.echo(f"error: walk script {walk_file} not found", err=True)
        sys.exit(2)
    try:
        pack = load_pack(pack_dir)
    except PackError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2 if isinstance(exc, MissingFile) else 1)
    try:
        script = load_walk(walk_file)
        if seed is not None:
            script = dataclasses.replace(script, seed=seed)
        stream = build_walk(script)
    except ScriptInvalid as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    session = engine.run_tour(pack, stream)
    text = engine.export_log(session)
    out_file.write_text(text, encoding="utf-8")
    records = [engine.record_to_dict(r) for r in session.log]
    entered = sum(1 for r in records if r["event"] == "hotspot_entered")
    click.echo(f"wrote {len(records)} events to {out_file} ({entered} hotspot visits)")
    if plot_file is not None:
        from .report import render_tour_figure

        render_tour_figure(pack, records, plot_file)
        click.echo(f"wrote tour figure to {plot_file}")


@main.command()
@click.argument("pack_dir", type=click.Path(path_type=Path))
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--walk", "walk_file", type=click.Path(path_type=Path), default=None,
              help="Replay this walk to every stream client instead of interactive steering.")
@click.option("--pace", type=click.Choice(["real", "fast"]), default="real", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(path_type=Path), default=None,
              help="Static UI bundle to serve at / (defaults to ./frontend/dist when present).")
def serve(pack_dir: Path, port: int, host: str, walk_file: Path | None,
          pace: str, ui_dir: Path | None) -> None:
    """Host the pack API, media, and the live session stream."""
    import uvicorn

    from .service import create_app

    if not pack_dir.is_dir():
        click.echo(f"error: pack directory {pack_dir} not found", err=True)
        sys.exit(2)
    try:
        pack = load_pack(pack_dir)
    except PackError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2 if isinstance(exc, MissingFile) else 1)
    walk: WalkScript | None = None
    if walk_file is not None:
        if not walk_file.is_file():
            click.echo(f"error: walk script {walk_file} not found", err=True)
            sys.exit(2)
        try:
            walk = load_walk(walk_file)
        except ScriptInvalid as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = Path("frontend/dist")
    app = create_app(pack, walk=walk, pace=pace, ui_dir=ui_dir)
    click.echo(f"serving pack {pack.name!r} on http://{host}:{port}/ (stream at /ws/session)")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
