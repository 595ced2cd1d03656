// Wire protocol spoken with the tour service over /ws/session.
// Every message in both directions carries protocol_version and the
// session id handed out by the server's hello.

export const PROTOCOL_VERSION = 1

export interface Envelope {
  protocol_version: number
  session: string
}

export interface MediaRef {
  kind: string
  path: string
  caption: string
}

export interface AnimalDetail {
  id: string
  name: string
  species: string
  description: string
  media: MediaRef[]
}

export interface EventRecord {
  seq: number
  t: number
  event: string
  phase?: string
  attempt?: number
  lat?: number
  lon?: number
  x?: number
  y?: number
  in_range?: boolean
  hotspot?: string
  content?: string
  animal?: string
}

export interface VisibleHotspot {
  id: string
  x: number
  y: number
  name: string
}

export interface ViewportSnapshot {
  t: number
  connection: string
  attempt: number
  center: [number, number]
  zoom: number
  screen: [number, number]
  map_extent: [number, number]
  in_range: boolean | null
  visible_hotspots: VisibleHotspot[]
}

export interface HelloMsg extends Envelope {
  type: "hello"
  pack: string
  mode: "scripted" | "interactive"
}

export interface EventMsg extends Envelope {
  type: "event"
  record: EventRecord
  content_detail?: AnimalDetail
}

export interface SnapshotMsg extends Envelope {
  type: "snapshot"
  viewport: ViewportSnapshot
}

export interface MenuResultMsg extends Envelope {
  type: "menu_result"
  action: string
  result: Record<string, unknown>
}

export interface SteerAcceptedMsg extends Envelope {
  type: "steer_accepted"
  lat: number
  lon: number
}

export interface ErrorMsg extends Envelope {
  type: "error"
  error: string
  detail?: string
}

export interface TourCompleteMsg extends Envelope {
  type: "tour_complete"
}

export type ServerMessage =
  | HelloMsg
  | EventMsg
  | SnapshotMsg
  | MenuResultMsg
  | SteerAcceptedMsg
  | ErrorMsg
  | TourCompleteMsg

export type MenuActionTag =
  | "check_connection"
  | "show_coordinates"
  | "tour_guide"
  | "search"
  | "events"
  | "close"

export const MENU_ACTIONS: MenuActionTag[] = [
  "check_connection",
  "show_coordinates",
  "tour_guide",
  "search",
  "events",
  "close",
]

export interface ClientMessage extends Envelope {
  type: "steer" | "zoom" | "menu" | "restart"
  x?: number
  y?: number
  direction?: 1 | -1
  action?: MenuActionTag
  params?: Record<string, string>
}
