import { readFileSync } from "node:fs"
import { dirname, join } from "node:path"
import { fileURLToPath } from "node:url"

import { ServerMessage } from "../src/protocol.js"

const here = dirname(fileURLToPath(import.meta.url))

export function loadTranscript(name: string): ServerMessage[] {
  const text = readFileSync(join(here, "transcripts", name), "utf-8")
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as ServerMessage)
}

export const GOLDEN = "golden_tour.transcript.jsonl"
export const FAULTED = "lost_signal.transcript.jsonl"
