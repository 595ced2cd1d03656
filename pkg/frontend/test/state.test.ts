import { describe, expect, it } from "vitest"

import {
  TICKER_LIMIT,
  UiSessionView,
  acknowledgePopup,
  applyMessage,
  connectionBanner,
  initialView,
  menuEnabled,
  showRestartControl,
} from "../src/state.js"
import { EventMsg, MenuResultMsg, ServerMessage } from "../src/protocol.js"
import { FAULTED, GOLDEN, loadTranscript } from "./helpers.js"

function replay(messages: ServerMessage[]): UiSessionView {
  return messages.reduce(applyMessage, initialView())
}

describe("golden tour transcript replay", () => {
  const transcript = loadTranscript(GOLDEN)

  it("reproduces the same final view on every replay", () => {
    const first = replay(transcript)
    const second = replay(transcript)
    expect(second).toEqual(first)
  })

  it("final view matches the stored snapshot", () => {
    expect(replay(transcript)).toMatchSnapshot()
  })

  it("ends connected with the tour complete and the leopard popup pending", () => {
    const view = replay(transcript)
    expect(view.connection).toBe("connected")
    expect(view.tourComplete).toBe(true)
    expect(view.closed).toBe(false)
    // the last scripted hotspot entry is still unacknowledged
    expect(view.popup?.animal?.name).toBe("Leopard")
  })

  it("opens the tiger content popup when its hotspot entry arrives", () => {
    let view = initialView()
    let sawTiger = false
    for (const msg of transcript) {
      view = applyMessage(view, msg)
      if (
        msg.type === "event" &&
        (msg as EventMsg).record.event === "hotspot_entered" &&
        (msg as EventMsg).record.hotspot === "tiger-spot"
      ) {
        sawTiger = true
        expect(view.popup).not.toBeNull()
        expect(view.popup?.hotspotId).toBe("tiger-spot")
        expect(view.popup?.animal?.name).toBe("Sumatran Tiger")
        expect(view.popup?.animal?.media.length).toBeGreaterThan(0)
        break
      }
    }
    expect(sawTiger).toBe(true)
  })

  it("popup stays open until acknowledged, then closes", () => {
    let view = initialView()
    for (const msg of transcript) {
      view = applyMessage(view, msg)
      if (view.popup?.hotspotId === "tiger-spot") break
    }
    expect(view.popup).not.toBeNull()
    const acknowledged = acknowledgePopup(view)
    expect(acknowledged.popup).toBeNull()
    expect(acknowledgePopup(acknowledged).popup).toBeNull()
  })

  it("caps the event ticker", () => {
    const view = replay(transcript)
    expect(view.ticker.length).toBeLessThanOrEqual(TICKER_LIMIT)
    const seqs = view.ticker.map((r) => r.seq)
    expect([...seqs].sort((a, b) => a - b)).toEqual(seqs)
  })

  it("banner mirrors the last connection change", () => {
    let view = initialView()
    for (const msg of transcript) {
      view = applyMessage(view, msg)
      if (msg.type === "event" && (msg as EventMsg).record.event === "connection_changed") {
        expect(view.connection).toBe((msg as EventMsg).record.phase)
      }
    }
  })

  it("does not mutate the previous view", () => {
    let view = initialView()
    for (const msg of transcript.slice(0, 50)) {
      const before = JSON.stringify(view)
      applyMessage(view, msg)
      expect(JSON.stringify(view)).toBe(before)
      view = applyMessage(view, msg)
    }
  })
})

describe("fault-injected transcript replay", () => {
  const transcript = loadTranscript(FAULTED)

  it("ends in failed with the restart control showing", () => {
    const view = replay(transcript)
    expect(view.connection).toBe("failed")
    expect(showRestartControl(view)).toBe(true)
    expect(connectionBanner(view)).toEqual({ text: "GPS connection failed", tone: "error" })
    expect(menuEnabled(view)).toBe(false)
  })

  it("walked through the documented connection phases", () => {
    const phases: string[] = []
    let view = initialView()
    for (const msg of transcript) {
      view = applyMessage(view, msg)
      if (msg.type === "event" && (msg as EventMsg).record.event === "connection_changed") {
        phases.push(view.connection)
      }
    }
    expect(phases).toEqual(["splash", "connecting", "connected", "lost", "failed"])
  })

  it("final view matches the stored snapshot", () => {
    expect(replay(transcript)).toMatchSnapshot()
  })
})

describe("menu and lifecycle edges", () => {
  it("close menu result ends the session", () => {
    const closeResult: MenuResultMsg = {
      protocol_version: 1,
      session: "s",
      type: "menu_result",
      action: "close",
      result: { closed: true },
    }
    const view = applyMessage(initialView(), closeResult)
    expect(view.closed).toBe(true)
    expect(menuEnabled(view)).toBe(false)
    expect(showRestartControl(view)).toBe(false)
    expect(connectionBanner(view).text).toBe("Session ended")
  })

  it("errors are surfaced without disturbing the rest of the view", () => {
    const base = replay(loadTranscript(FAULTED))
    const after = applyMessage(base, {
      protocol_version: 1,
      session: base.sessionId ?? "s",
      type: "error",
      error: "invalid_state",
    })
    expect(after.lastError).toBe("invalid_state")
    expect(after.connection).toBe(base.connection)
    expect(after.snapshot).toEqual(base.snapshot)
  })
})
