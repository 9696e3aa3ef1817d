import { describe, expect, it } from "vitest";

import { ClientClock } from "../src/clock";
import type { TransportState } from "../src/types";

function state(partial: Partial<TransportState>): TransportState {
  return {
    type: "state",
    revision: 1,
    position_s: 0,
    rate: 1,
    playing: false,
    loop: null,
    audible: null,
    server_time_ms: 0,
    ...partial,
  };
}

describe("ClientClock", () => {
  it("extrapolates position while playing", () => {
    const now = { ms: 1000 };
    const clock = new ClientClock(60, () => now.ms);
    clock.accept(state({ position_s: 2, playing: true, rate: 1 }));
    now.ms = 1250;
    expect(clock.displayedTime()).toBeCloseTo(2.25, 9);
  });

  it("holds position while paused", () => {
    const now = { ms: 0 };
    const clock = new ClientClock(60, () => now.ms);
    clock.accept(state({ position_s: 5, playing: false }));
    now.ms = 5000;
    expect(clock.displayedTime()).toBe(5);
  });

  it("applies the rate to extrapolation", () => {
    const now = { ms: 0 };
    const clock = new ClientClock(60, () => now.ms);
    clock.accept(state({ position_s: 1, playing: true, rate: 0.25 }));
    now.ms = 4000;
    expect(clock.displayedTime()).toBeCloseTo(2.0, 9);
  });

  it("clamps to the playable window", () => {
    const now = { ms: 0 };
    const clock = new ClientClock(10, () => now.ms);
    clock.accept(state({ position_s: 9.5, playing: true }));
    now.ms = 60_000;
    expect(clock.displayedTime()).toBe(10);
  });

  it("wraps inside an active loop like the server", () => {
    const now = { ms: 0 };
    const clock = new ClientClock(60, () => now.ms);
    clock.accept(
      state({ position_s: 3.9, playing: true, loop: [2, 4], rate: 1 }),
    );
    now.ms = 200;
    expect(clock.displayedTime()).toBeCloseTo(2.1, 9);
    now.ms = 4100; // many loops later, still inside [2, 4)
    const t = clock.displayedTime();
    expect(t).toBeGreaterThanOrEqual(2);
    expect(t).toBeLessThan(4);
  });

  it("ignores stale revisions", () => {
    const clock = new ClientClock(60, () => 0);
    expect(clock.accept(state({ revision: 5, position_s: 5 }))).toBe(true);
    expect(clock.accept(state({ revision: 4, position_s: 1 }))).toBe(false);
    expect(clock.displayedTime()).toBe(5);
    expect(clock.revision).toBe(5);
  });
});
