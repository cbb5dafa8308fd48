/** NDJSON message protocol spoken with the service. */

export const PROTOCOL_VERSION = 1;

export interface TrackPoint {
  id: string;
  xy: [number, number];
  emotion: string;
  color: string;
}

export interface StateSnapshot {
  type: "state-snapshot";
  protocol: number;
  mode: string;
  frames_per_window: number;
  tracks: TrackPoint[];
  centers: Record<string, [number, number]>;
  calibration: number[][] | null;
}

export interface InteractionEvent {
  type: string;
  t: number;
  [key: string]: unknown;
}

export interface EventMessage {
  type: "event";
  event: InteractionEvent;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage = StateSnapshot | EventMessage | ErrorMessage;

export interface FrameMessage {
  type: "frame";
  t: number;
  hand: number[][];
  source: string;
}

/** Splits a byte stream into complete JSON lines, buffering partials. */
export class LineDecoder {
  private buffer = "";

  push(chunk: string): ServerMessage[] {
    this.buffer += chunk;
    const parts = this.buffer.split("\n");
    this.buffer = parts.pop() ?? "";
    return parts
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as ServerMessage);
  }
}

export function encodeMessage(msg: object): string {
  return JSON.stringify(msg) + "\n";
}
