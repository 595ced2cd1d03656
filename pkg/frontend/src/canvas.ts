// Executes draw ops on a 2D canvas context. Kept dumb on purpose: all
// layout decisions live in render.ts where tests can see them.

import { DrawOp } from "./render.js"

const TONE_COLORS = { info: "#2c6e49", warn: "#b07d12", error: "#a4243b" }

export interface DrawAssets {
  map: HTMLImageElement | null
  mapExtent: [number, number]
}

export function execute(ops: DrawOp[], ctx: CanvasRenderingContext2D, assets: DrawAssets): void {
  for (const op of ops) {
    switch (op.kind) {
      case "clear":
        ctx.canvas.width = op.width
        ctx.canvas.height = op.height
        ctx.fillStyle = "#dce8d4"
        ctx.fillRect(0, 0, op.width, op.height)
        break
      case "map":
        if (assets.map !== null) {
          ctx.drawImage(
            assets.map,
            op.x,
            op.y,
            assets.mapExtent[0] * op.scale,
            assets.mapExtent[1] * op.scale,
          )
        }
        break
      case "marker":
        ctx.strokeStyle = "#1c7c2e"
        ctx.lineWidth = 2
        ctx.beginPath()
        ctx.moveTo(op.x - 7, op.y)
        ctx.lineTo(op.x + 7, op.y)
        ctx.moveTo(op.x, op.y - 7)
        ctx.lineTo(op.x, op.y + 7)
        ctx.stroke()
        ctx.fillStyle = "#1c7c2e"
        ctx.font = "bold 12px sans-serif"
        ctx.fillText("P", op.x + 5, op.y - 5)
        break
      case "cursor": {
        // the panda stand-in: a ringed dot pinned to the screen center
        ctx.beginPath()
        ctx.arc(op.x, op.y, 9, 0, Math.PI * 2)
        ctx.fillStyle = "#ffffff"
        ctx.fill()
        ctx.lineWidth = 3
        ctx.strokeStyle = "#222222"
        ctx.stroke()
        ctx.beginPath()
        ctx.arc(op.x, op.y, 3.5, 0, Math.PI * 2)
        ctx.fillStyle = "#222222"
        ctx.fill()
        break
      }
      case "banner":
        ctx.fillStyle = TONE_COLORS[op.tone]
        ctx.globalAlpha = 0.85
        ctx.fillRect(0, 0, ctx.canvas.width, 22)
        ctx.globalAlpha = 1.0
        ctx.fillStyle = "#ffffff"
        ctx.font = "12px sans-serif"
        ctx.fillText(op.text, 8, 15)
        break
    }
  }
}
