// Builds the draw-op list for the three-layer map frame:
// background raster, "P" hotspot markers, and the cursor, which sits at the
// exact canvas midpoint no matter how the map pans or zooms underneath it.

import { UiSessionView, connectionBanner } from "./state.js"

export type DrawOp =
  | { kind: "clear"; width: number; height: number }
  | { kind: "map"; x: number; y: number; scale: number }
  | { kind: "marker"; id: string; name: string; x: number; y: number }
  | { kind: "cursor"; x: number; y: number }
  | { kind: "banner"; text: string; tone: "info" | "warn" | "error" }

export function renderFrame(view: UiSessionView): DrawOp[] {
  const banner = connectionBanner(view)
  const snapshot = view.snapshot
  if (snapshot === null) {
    // placeholder frame while the stream is down or still handshaking
    return [
      { kind: "clear", width: 480, height: 640 },
      { kind: "banner", text: banner.text, tone: banner.tone },
    ]
  }
  const [width, height] = snapshot.screen
  const [cx, cy] = snapshot.center
  const zoom = snapshot.zoom
  const ops: DrawOp[] = [{ kind: "clear", width, height }]
  // screen position of the map raster's origin under the current pan/zoom
  ops.push({
    kind: "map",
    x: (0 - cx) * zoom + width / 2,
    y: (0 - cy) * zoom + height / 2,
    scale: zoom,
  })
  for (const spot of snapshot.visible_hotspots) {
    ops.push({ kind: "marker", id: spot.id, name: spot.name, x: spot.x, y: spot.y })
  }
  ops.push({ kind: "cursor", x: width / 2, y: height / 2 })
  ops.push({ kind: "banner", text: banner.text, tone: banner.tone })
  return ops
}
