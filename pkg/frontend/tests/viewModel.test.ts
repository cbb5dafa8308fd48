import { describe, expect, it } from "vitest";

import type { StateSnapshot } from "../src/protocol.js";
import { ARRIVAL_THRESHOLD, TRAIL_LENGTH, ViewModel } from "../src/viewModel.js";

function snapshot(nTracks = 3): StateSnapshot {
  return {
    type: "state-snapshot",
    protocol: 1,
    mode: "IDLE",
    frames_per_window: 2,
    tracks: Array.from({ length: nTracks }, (_, i) => ({
      id: `t-${i}`,
      xy: [i / nTracks, 0.5] as [number, number],
      emotion: "joy",
      color: "#e0c142",
    })),
    centers: { joy: [0.5, 0.5] },
    calibration: null,
  };
}

function cursorMoved(t: number, xy: [number, number]) {
  return {
    type: "event" as const,
    event: { type: "cursor-moved", t, pose_xy: [0, 0], music_xy: xy },
  };
}

function modeChanged(t: number, mode: string) {
  return { type: "event" as const, event: { type: "mode-changed", t, mode } };
}

describe("ViewModel", () => {
  it("adopts snapshot state", () => {
    const vm = new ViewModel();
    vm.apply(snapshot(5));
    expect(vm.tracks).toHaveLength(5);
    expect(vm.mode).toBe("IDLE");
    expect(vm.connected).toBe(true);
  });

  it("cursor always equals the latest cursor-moved payload", () => {
    const vm = new ViewModel();
    vm.apply(snapshot());
    for (let i = 0; i < 20; i++) {
      const xy: [number, number] = [i / 20, 1 - i / 20];
      vm.apply(cursorMoved(i / 30, xy));
      expect(vm.cursor?.musicXy).toEqual(xy);
    }
  });

  it("caps the trail at the fixed length", () => {
    const vm = new ViewModel();
    for (let i = 0; i < TRAIL_LENGTH + 40; i++) {
      vm.apply(cursorMoved(i / 30, [i, i]));
    }
    expect(vm.trail).toHaveLength(TRAIL_LENGTH);
    expect(vm.trail[TRAIL_LENGTH - 1]).toEqual([TRAIL_LENGTH + 39, TRAIL_LENGTH + 39]);
  });

  it("mode-changed to IDLE hides the cursor and clears the trail", () => {
    const vm = new ViewModel();
    vm.apply(modeChanged(0, "EXPLORING"));
    vm.apply(cursorMoved(0.1, [0.2, 0.3]));
    vm.apply(modeChanged(0.2, "IDLE"));
    expect(vm.cursor).toBeNull();
    expect(vm.trail).toHaveLength(0);
    expect(vm.highlightedEmotion).toBeNull();
  });

  it("tracks gesture flashes with a fade window", () => {
    const vm = new ViewModel();
    vm.apply({
      type: "event",
      event: { type: "gesture-detected", t: 1.0, class: "pinch", confidence: 0.97 },
    });
    expect(vm.activeGestureFlash(1.3)?.cls).toBe("pinch");
    expect(vm.activeGestureFlash(5.0)).toBeNull();
  });

  it("records highlighted emotion and selected track", () => {
    const vm = new ViewModel();
    vm.apply(snapshot());
    vm.apply({ type: "event", event: { type: "emotion-highlighted", t: 0, emotion: "joy" } });
    vm.apply({ type: "event", event: { type: "track-selected", t: 0, track_id: "t-1", distance: 0.1 } });
    expect(vm.highlightedEmotion).toBe("joy");
    expect(vm.selectedTrack()?.xy).toEqual([1 / 3, 0.5]);
  });

  it("stores protocol errors for display", () => {
    const vm = new ViewModel();
    vm.apply({ type: "error", code: "bad-message", message: "nope" });
    expect(vm.lastError).toContain("bad-message");
  });

  describe("target marker", () => {
    it("placing and replacing", () => {
      const vm = new ViewModel();
      vm.placeTarget([0.1, 0.2]);
      expect(vm.targetReadout()?.xy).toEqual([0.1, 0.2]);
      vm.placeTarget([0.8, 0.9]);
      expect(vm.targetReadout()?.xy).toEqual([0.8, 0.9]);
    });

    it("distance readout follows the cursor", () => {
      const vm = new ViewModel();
      vm.placeTarget([0.5, 0.5]);
      expect(vm.targetReadout()?.distance).toBeNull();
      vm.apply(cursorMoved(0, [0.5, 0.9]));
      expect(vm.targetReadout()?.distance).toBeCloseTo(0.4, 12);
      expect(vm.targetReadout()?.arrived).toBe(false);
    });

    it("flags arrival within the threshold", () => {
      const vm = new ViewModel();
      vm.placeTarget([0.5, 0.5]);
      vm.apply(cursorMoved(0, [0.5 + ARRIVAL_THRESHOLD / 2, 0.5]));
      expect(vm.targetReadout()?.arrived).toBe(true);
    });
  });
});
