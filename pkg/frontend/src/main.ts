// Browser shell: wires the stream to the pure view state, paints the
// three-layer map, and turns DOM interactions into wire messages. The
// server is authoritative; nothing here recomputes pan, zoom, or geofences.

import { execute, DrawAssets } from "./canvas.js"
import { MENU_ACTIONS, MenuActionTag, ServerMessage } from "./protocol.js"
import { renderFrame } from "./render.js"
import { SessionStream, streamUrl } from "./net.js"
import {
  UiSessionView,
  acknowledgePopup,
  applyMessage,
  connectionBanner,
  initialView,
  menuEnabled,
  showRestartControl,
} from "./state.js"

const MENU_LABELS: Record<MenuActionTag, string> = {
  check_connection: "Check Connection",
  show_coordinates: "Show Coordinates",
  tour_guide: "Tour Guide",
  search: "Search",
  events: "Events",
  close: "Close",
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (node === null) throw new Error(`missing element #${id}`)
  return node as T
}

class App {
  private view: UiSessionView = initialView()
  private stream: SessionStream | null = null
  private assets: DrawAssets = { map: null, mapExtent: [2000, 1500] }
  private canvas = el<HTMLCanvasElement>("map")
  private ctx = this.canvas.getContext("2d")!
  private painting = false
  private streamDown = false

  async start(): Promise<void> {
    await this.loadManifest()
    this.buildMenu()
    this.bindControls()
    this.connect()
    this.paint()
  }

  private async loadManifest(): Promise<void> {
    const res = await fetch("/api/manifest")
    const manifest = await res.json()
    el("pack-name").textContent = manifest.name
    this.assets.mapExtent = manifest.map_extent
    const image = new Image()
    image.src = manifest.map_image_url
    image.onload = () => {
      this.assets.map = image
      this.schedulePaint()
    }
  }

  private connect(): void {
    this.streamDown = false
    this.view = initialView()
    this.stream = new SessionStream(
      streamUrl(),
      (msg) => this.onMessage(msg),
      () => this.onDown(),
    )
  }

  private onMessage(msg: ServerMessage): void {
    this.view = applyMessage(this.view, msg)
    this.schedulePaint()
  }

  private onDown(): void {
    this.streamDown = true
    this.schedulePaint()
    if (!this.view.closed) {
      // a dropped stream means the session died with it; start fresh
      setTimeout(() => this.connect(), 2000)
    }
  }

  private send(payload: Parameters<SessionStream["send"]>[0]): void {
    if (this.view.closed || this.stream === null) return
    this.stream.send(payload)
  }

  private buildMenu(): void {
    const panel = el("menu-buttons")
    for (const action of MENU_ACTIONS) {
      const button = document.createElement("button")
      button.textContent = MENU_LABELS[action]
      button.dataset.action = action
      button.onclick = () => this.menuAction(action)
      panel.appendChild(button)
    }
  }

  private menuAction(action: MenuActionTag): void {
    const params: Record<string, string> = {}
    if (action === "search") {
      params["query"] = el<HTMLInputElement>("search-box").value
    } else if (action === "events") {
      params["from"] = el<HTMLInputElement>("events-from").value || "00:00"
      params["to"] = el<HTMLInputElement>("events-to").value || "23:59"
    }
    this.send({ type: "menu", action, params })
  }

  private bindControls(): void {
    el("zoom-in").onclick = () => this.send({ type: "zoom", direction: 1 })
    el("zoom-out").onclick = () => this.send({ type: "zoom", direction: -1 })
    el("restart").onclick = () => this.send({ type: "restart" })
    el("popup-close").onclick = () => {
      this.view = acknowledgePopup(this.view)
      this.schedulePaint()
    }
    this.canvas.onclick = (ev: MouseEvent) => {
      if (this.view.mode !== "interactive") return
      const rect = this.canvas.getBoundingClientRect()
      this.send({
        type: "steer",
        x: ev.clientX - rect.left,
        y: ev.clientY - rect.top,
      })
    }
  }

  private schedulePaint(): void {
    if (this.painting) return
    this.painting = true
    requestAnimationFrame(() => {
      this.painting = false
      this.paint()
    })
  }

  private paint(): void {
    execute(renderFrame(this.view), this.ctx, this.assets)
    this.paintChrome()
  }

  private paintChrome(): void {
    const view = this.view
    const banner = this.streamDown
      ? { text: "Stream down, reconnecting...", tone: "error" as const }
      : connectionBanner(view)
    const bar = el("banner")
    bar.textContent = banner.text
    bar.className = `banner ${banner.tone}`

    el("restart").hidden = !showRestartControl(view)
    const enabled = menuEnabled(view)
    for (const button of el("menu-buttons").querySelectorAll("button")) {
      const tag = (button as HTMLButtonElement).dataset.action as MenuActionTag
      const alwaysOn = tag === "check_connection" || tag === "close"
      ;(button as HTMLButtonElement).disabled = view.closed || (!enabled && !alwaysOn)
    }

    this.paintPopup()
    this.paintMenuResult()
    this.paintTicker()
    el("terminal").hidden = !view.closed
  }

  private paintPopup(): void {
    const popup = el("popup")
    const detail = this.view.popup
    if (detail === null) {
      popup.hidden = true
      return
    }
    popup.hidden = false
    const animal = detail.animal
    el("popup-title").textContent = animal ? animal.name : detail.hotspotId
    el("popup-species").textContent = animal ? animal.species : ""
    el("popup-description").textContent = animal ? animal.description : ""
    const mediaList = el("popup-media")
    mediaList.innerHTML = ""
    for (const ref of animal?.media ?? []) {
      const item = document.createElement("li")
      if (ref.kind === "image") {
        const img = document.createElement("img")
        img.src = `/media/${ref.path}`
        img.alt = ref.caption
        item.appendChild(img)
      } else {
        const link = document.createElement("a")
        link.href = `/media/${ref.path}`
        link.textContent = `${ref.kind}: ${ref.caption || ref.path}`
        link.target = "_blank"
        item.appendChild(link)
      }
      mediaList.appendChild(item)
    }
  }

  private paintMenuResult(): void {
    const target = el("menu-result")
    const last = this.view.lastMenu
    if (last === null) {
      target.textContent = ""
      return
    }
    const result = last.result
    switch (last.action) {
      case "check_connection":
        target.textContent =
          `state: ${result["state"]}, attempt ${result["attempt"]}` +
          (result["seconds_since_fix"] != null
            ? `, last fix ${(result["seconds_since_fix"] as number).toFixed(1)}s ago`
            : "")
        break
      case "show_coordinates":
        target.textContent = String(result["text"])
        break
      case "tour_guide": {
        const entries = result["entries"] as { name: string; distance_m: number }[]
        target.textContent = entries
          .map((e) => `${e.name} (${Math.round(e.distance_m)} m)`)
          .join("\n")
        break
      }
      case "search": {
        const animals = result["animals"] as { name: string; species: string }[]
        target.textContent = animals.length
          ? animals.map((a) => `${a.name} - ${a.species}`).join("\n")
          : "no matches"
        break
      }
      case "events": {
        const events = result["events"] as { title: string; start: string; end: string }[]
        target.textContent = events.length
          ? events.map((e) => `${e.start}-${e.end} ${e.title}`).join("\n")
          : "nothing scheduled in that window"
        break
      }
      case "close":
        target.textContent = "session closed"
        break
    }
  }

  private paintTicker(): void {
    const list = el("ticker")
    list.innerHTML = ""
    for (const record of [...this.view.ticker].reverse()) {
      const item = document.createElement("li")
      const what =
        record.event === "hotspot_entered"
          ? `entered ${record.hotspot}`
          : record.event === "hotspot_exited"
            ? `left ${record.hotspot}`
            : record.event === "connection_changed"
              ? `connection: ${record.phase}`
              : record.event === "out_of_range"
                ? "fix outside the zoo"
                : `fix (${record.lat?.toFixed(5)}, ${record.lon?.toFixed(5)})`
      item.textContent = `t=${record.t.toFixed(0)}s ${what}`
      list.appendChild(item)
    }
  }
}

new App().start().catch((err) => {
  console.error("startup failed", err)
  el("banner").textContent = `startup failed: ${err}`
})
