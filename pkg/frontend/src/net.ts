// The single stream connection. Outbound messages are the only way the UI
// influences the tour; every one carries the protocol version and session id.

import { ClientMessage, PROTOCOL_VERSION, ServerMessage } from "./protocol.js"

export class SessionStream {
  private socket: WebSocket
  private sessionId: string | null = null

  constructor(
    url: string,
    private onMessage: (msg: ServerMessage) => void,
    private onDown: () => void,
  ) {
    this.socket = new WebSocket(url)
    this.socket.onmessage = (ev: MessageEvent) => {
      const msg = JSON.parse(ev.data as string) as ServerMessage
      if (msg.type === "hello") {
        this.sessionId = msg.session
      }
      this.onMessage(msg)
    }
    this.socket.onclose = () => this.onDown()
    this.socket.onerror = () => this.onDown()
  }

  send(payload: Omit<ClientMessage, "protocol_version" | "session">): boolean {
    if (this.sessionId === null || this.socket.readyState !== WebSocket.OPEN) {
      return false
    }
    const message: ClientMessage = {
      protocol_version: PROTOCOL_VERSION,
      session: this.sessionId,
      ...payload,
    }
    this.socket.send(JSON.stringify(message))
    return true
  }

  close(): void {
    this.socket.close()
  }
}

export function streamUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws"
  return `${scheme}://${location.host}/ws/session`
}
