"""Tour report figures: the walked track over the map with geofences and events.

Rendered with the Agg backend straight to a file, next to the delimited
event log the tour writes. Intended for eyeballing a tour before trusting
its log: the track should thread the hotspot circles it claims to enter.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle as CirclePatch
from matplotlib.patches import Polygon as PolygonPatch

from .content import ContentPack
from .geo import M_PER_DEG, geo_to_pixel
from .geofence import Circle, Polygon, anchor_point


def _pixels_per_meter(pack: ContentPack) -> float:
    """Mean raster scale, from the latitude row of the affine."""
    cal = pack.calibration
    mid_lat = pack.bounds.mid_latitude
    per_deg_x = math.hypot(cal.a, cal.d)  # px per degree of longitude
    per_deg_y = math.hypot(cal.b, cal.e)  # px per degree of latitude
    sx = per_deg_x / (M_PER_DEG * math.cos(math.radians(mid_lat)))
    sy = per_deg_y / M_PER_DEG
    return (sx + sy) / 2.0


def render_tour_figure(pack: ContentPack, records: list[dict], out_path: str | Path) -> Path:
    """Draw the tour onto the map raster and save the figure.

    ``records`` are parsed event-log dicts (the tour's jsonl lines).
    """
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(10, 7.5))

    map_file = pack.root / pack.map_image
    width, height = pack.map_extent
    if map_file.is_file():
        try:
            image = plt.imread(map_file)
            ax.imshow(image, extent=(0, width, height, 0), interpolation="bilinear")
        except (OSError, ValueError):
            pass
    ax.set_xlim(0, width)
    ax.set_ylim(height, 0)  # raster frame: y grows downward
    ax.set_aspect("equal")
    ax.set_xlabel("map x (px)")
    ax.set_ylabel("map y (px)")

    ppm = _pixels_per_meter(pack)
    for hotspot in pack.hotspots.values():
        anchor_px = geo_to_pixel(pack.calibration, anchor_point(hotspot))
        if isinstance(hotspot.geometry, Circle):
            ax.add_patch(
                CirclePatch(
                    (anchor_px.x, anchor_px.y),
                    hotspot.geometry.radius_m * ppm,
                    fill=False,
                    edgecolor="forestgreen",
                    linewidth=1.2,
                )
            )
        elif isinstance(hotspot.geometry, Polygon):
            pts = [
                (p.x, p.y)
                for p in (geo_to_pixel(pack.calibration, v) for v in hotspot.geometry.vertices)
            ]
            ax.add_patch(
                PolygonPatch(pts, closed=True, fill=False, edgecolor="forestgreen", linewidth=1.2)
            )
        ax.annotate(
            "P",
            (anchor_px.x, anchor_px.y),
            color="darkgreen",
            fontsize=11,
            fontweight="bold",
            ha="center",
            va="center",
        )
        ax.annotate(
            hotspot.name,
            (anchor_px.x, anchor_px.y),
            xytext=(0, 14),
            textcoords="offset points",
            fontsize=7,
            ha="center",
            color="darkgreen",
        )

    xs = [r["x"] for r in records if r.get("event") == "fix_accepted"]
    ys = [r["y"] for r in records if r.get("event") == "fix_accepted"]
    if xs:
        ax.plot(xs, ys, color="crimson", linewidth=1.0, label="track")
        ax.plot(xs[0], ys[0], marker="o", color="crimson", markersize=5)
        ax.plot(xs[-1], ys[-1], marker="s", color="crimson", markersize=5)

    entered = [r for r in records if r.get("event") == "hotspot_entered"]
    for rec in entered:
        hotspot = pack.hotspots.get(rec["hotspot"])
        if hotspot is None:
            continue
        anchor_px = geo_to_pixel(pack.calibration, anchor_point(hotspot))
        ax.plot(anchor_px.x, anchor_px.y, marker="*", color="gold", markersize=12, zorder=5)

    ax.set_title(f"{pack.name}: {len(xs)} fixes, {len(entered)} hotspot visits")
    if xs:
        ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
