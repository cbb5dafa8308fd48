/** Client-side view state, driven verbatim by server messages.
 *
 * The view model performs no inference or mapping math: every coordinate it
 * holds was received from the service, so logging its state against the
 * server's messages verifies the thin-client property.
 */

import type {
  InteractionEvent,
  ServerMessage,
  StateSnapshot,
  TrackPoint,
} from "./protocol.js";

export const TRAIL_LENGTH = 150;
export const ARRIVAL_THRESHOLD = 0.02;
export const GESTURE_FLASH_S = 0.6;

export interface Cursor {
  poseXy: [number, number];
  musicXy: [number, number];
  t: number;
}

export interface GestureFlash {
  cls: string;
  confidence: number;
  t: number;
}

export interface TargetReadout {
  xy: [number, number];
  distance: number | null;
  arrived: boolean;
}

export class ViewModel {
  tracks: TrackPoint[] = [];
  centers: Record<string, [number, number]> = {};
  mode = "IDLE";
  framesPerWindow = 0;
  cursor: Cursor | null = null;
  trail: Array<[number, number]> = [];
  lastGesture: GestureFlash | null = null;
  highlightedEmotion: string | null = null;
  selectedTrackId: string | null = null;
  target: [number, number] | null = null;
  connected = false;
  lastError: string | null = null;

  apply(msg: ServerMessage): void {
    if (msg.type === "state-snapshot") {
      this.applySnapshot(msg);
    } else if (msg.type === "event") {
      this.applyEvent(msg.event);
    } else {
      this.lastError = `${msg.code}: ${msg.message}`;
    }
  }

  private applySnapshot(snap: StateSnapshot): void {
    this.tracks = snap.tracks;
    this.centers = snap.centers;
    this.mode = snap.mode;
    this.framesPerWindow = snap.frames_per_window;
    this.connected = true;
  }

  private applyEvent(event: InteractionEvent): void {
    switch (event.type) {
      case "cursor-moved": {
        const poseXy = event.pose_xy as [number, number];
        const musicXy = event.music_xy as [number, number];
        this.cursor = { poseXy, musicXy, t: event.t };
        this.trail.push(musicXy);
        if (this.trail.length > TRAIL_LENGTH) {
          this.trail.splice(0, this.trail.length - TRAIL_LENGTH);
        }
        break;
      }
      case "mode-changed": {
        this.mode = event.mode as string;
        if (this.mode === "IDLE") {
          this.cursor = null;
          this.trail = [];
          this.highlightedEmotion = null;
        }
        break;
      }
      case "gesture-detected":
        this.lastGesture = {
          cls: event.class as string,
          confidence: event.confidence as number,
          t: event.t,
        };
        break;
      case "emotion-highlighted":
        this.highlightedEmotion = event.emotion as string;
        break;
      case "track-selected":
        this.selectedTrackId = event.track_id as string;
        break;
    }
  }

  /** Reach-the-target exercise: mark a unit-square position to steer toward. */
  placeTarget(xy: [number, number]): void {
    this.target = xy;
  }

  targetReadout(): TargetReadout | null {
    if (this.target === null) return null;
    if (this.cursor === null) {
      return { xy: this.target, distance: null, arrived: false };
    }
    const dx = this.cursor.musicXy[0] - this.target[0];
    const dy = this.cursor.musicXy[1] - this.target[1];
    const distance = Math.hypot(dx, dy);
    return { xy: this.target, distance, arrived: distance <= ARRIVAL_THRESHOLD };
  }

  selectedTrack(): TrackPoint | null {
    if (this.selectedTrackId === null) return null;
    return this.tracks.find((t) => t.id === this.selectedTrackId) ?? null;
  }

  /** Gesture flash still visible at stream time `now`. */
  activeGestureFlash(now: number): GestureFlash | null {
    if (this.lastGesture === null) return null;
    return now - this.lastGesture.t <= GESTURE_FLASH_S ? this.lastGesture : null;
  }

  disconnected(): void {
    this.connected = false;
  }
}
