/** Rendering as data: the view model is flattened into draw commands.
 *
 * A real canvas backend executes the commands; tests record them. Keeping
 * the projection pure makes the render contract checkable headlessly.
 */

import type { ViewModel } from "./viewModel.js";

export type DrawCommand =
  | { kind: "clear" }
  | { kind: "track"; id: string; xy: [number, number]; color: string }
  | { kind: "center"; emotion: string; xy: [number, number]; highlighted: boolean }
  | { kind: "trail"; points: Array<[number, number]> }
  | { kind: "cursor"; xy: [number, number] }
  | { kind: "star"; trackId: string; xy: [number, number] }
  | { kind: "target"; xy: [number, number]; distance: number | null; arrived: boolean }
  | { kind: "flash"; gesture: string; confidence: number }
  | { kind: "status"; mode: string }
  | { kind: "banner"; text: string };

export interface Renderer {
  draw(commands: DrawCommand[]): void;
}

export function render(view: ViewModel, now: number): DrawCommand[] {
  const commands: DrawCommand[] = [{ kind: "clear" }];
  if (!view.connected) {
    commands.push({ kind: "banner", text: "connection lost — reconnecting…" });
  }
  for (const track of view.tracks) {
    commands.push({ kind: "track", id: track.id, xy: track.xy, color: track.color });
  }
  for (const [emotion, xy] of Object.entries(view.centers)) {
    commands.push({
      kind: "center",
      emotion,
      xy,
      highlighted: emotion === view.highlightedEmotion,
    });
  }
  if (view.trail.length > 0) {
    commands.push({ kind: "trail", points: view.trail });
  }
  if (view.cursor !== null) {
    commands.push({ kind: "cursor", xy: view.cursor.musicXy });
  }
  const selected = view.selectedTrack();
  if (selected !== null) {
    commands.push({ kind: "star", trackId: selected.id, xy: selected.xy });
  }
  const readout = view.targetReadout();
  if (readout !== null) {
    commands.push({
      kind: "target",
      xy: readout.xy,
      distance: readout.distance,
      arrived: readout.arrived,
    });
  }
  const flash = view.activeGestureFlash(now);
  if (flash !== null) {
    commands.push({ kind: "flash", gesture: flash.cls, confidence: flash.confidence });
  }
  commands.push({ kind: "status", mode: view.mode });
  return commands;
}

/** Test double that keeps every frame of draw commands. */
export class RecordingRenderer implements Renderer {
  frames: DrawCommand[][] = [];

  draw(commands: DrawCommand[]): void {
    this.frames.push(commands);
  }

  last(): DrawCommand[] {
    return this.frames[this.frames.length - 1] ?? [];
  }
}
