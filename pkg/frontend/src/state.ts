// Pure session-view state driven entirely by server messages.
// The UI never recomputes guide logic: replaying a recorded transcript
// through applyMessage reproduces the exact same view.

import {
  AnimalDetail,
  EventRecord,
  ServerMessage,
  ViewportSnapshot,
} from "./protocol.js"

export const TICKER_LIMIT = 8

export interface ContentPopup {
  hotspotId: string
  seq: number
  animal: AnimalDetail | null
}

export interface UiSessionView {
  sessionId: string | null
  mode: "scripted" | "interactive" | null
  pack: string | null
  connection: string // mirrors the last connection_changed event
  attempt: number
  snapshot: ViewportSnapshot | null
  popup: ContentPopup | null // open iff an unacknowledged hotspot entry exists
  ticker: EventRecord[] // most recent guide events, newest last
  lastMenu: { action: string; result: Record<string, unknown> } | null
  lastError: string | null
  tourComplete: boolean
  closed: boolean
}

export function initialView(): UiSessionView {
  return {
    sessionId: null,
    mode: null,
    pack: null,
    connection: "splash",
    attempt: 1,
    snapshot: null,
    popup: null,
    ticker: [],
    lastMenu: null,
    lastError: null,
    tourComplete: false,
    closed: false,
  }
}

function pushTicker(ticker: EventRecord[], record: EventRecord): EventRecord[] {
  const next = [...ticker, record]
  return next.length > TICKER_LIMIT ? next.slice(next.length - TICKER_LIMIT) : next
}

export function applyMessage(view: UiSessionView, msg: ServerMessage): UiSessionView {
  switch (msg.type) {
    case "hello":
      return { ...view, sessionId: msg.session, mode: msg.mode, pack: msg.pack }
    case "snapshot":
      return { ...view, snapshot: msg.viewport }
    case "event": {
      const record = msg.record
      let next: UiSessionView = { ...view, ticker: pushTicker(view.ticker, record) }
      if (record.event === "connection_changed") {
        next = {
          ...next,
          connection: record.phase ?? next.connection,
          attempt: record.attempt ?? next.attempt,
          closed: next.closed || record.phase === "exited",
        }
      } else if (record.event === "hotspot_entered") {
        next = {
          ...next,
          popup: {
            hotspotId: record.hotspot ?? "",
            seq: record.seq,
            animal: msg.content_detail ?? null,
          },
        }
      }
      return next
    }
    case "menu_result": {
      const closed = view.closed || msg.result["closed"] === true
      return { ...view, lastMenu: { action: msg.action, result: msg.result }, closed }
    }
    case "error":
      return { ...view, lastError: msg.error }
    case "steer_accepted":
      return view
    case "tour_complete":
      return { ...view, tourComplete: true }
    default:
      return view
  }
}

export function acknowledgePopup(view: UiSessionView): UiSessionView {
  return view.popup === null ? view : { ...view, popup: null }
}

// Control affordances the DOM shell derives from the view.

export function showRestartControl(view: UiSessionView): boolean {
  return view.connection === "failed" && !view.closed
}

export function menuEnabled(view: UiSessionView): boolean {
  return view.connection === "connected" && !view.closed
}

export function connectionBanner(view: UiSessionView): { text: string; tone: "info" | "warn" | "error" } {
  if (view.closed) return { text: "Session ended", tone: "error" }
  switch (view.connection) {
    case "splash":
      return { text: "Starting up...", tone: "info" }
    case "connecting":
      return { text: `Connecting to GPS (attempt ${view.attempt})...`, tone: "info" }
    case "connected":
      if (view.snapshot && view.snapshot.in_range === false) {
        return { text: "Outside the zoo - map paused", tone: "warn" }
      }
      return { text: "Connected", tone: "info" }
    case "lost":
      return { text: "GPS signal lost, reacquiring...", tone: "warn" }
    case "failed":
      return { text: "GPS connection failed", tone: "error" }
    case "exited":
      return { text: "Session ended", tone: "error" }
    default:
      return { text: view.connection, tone: "warn" }
  }
}
