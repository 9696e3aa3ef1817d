// Pane synchronization contract: at rate 1.0 the piano-roll and line-plot
// playheads stay within 50 ms of the transport's display time, the video
// element stays within 80 ms of its mapped local time, and an active loop
// keeps the scrubber inside [a, b).

import { beforeEach, describe, expect, it } from "vitest";

import { LayoutPage } from "../src/pages/layout";
import { playbackToLocal } from "../src/types";
import { flush } from "./fakes";
import { TestWorld, makeWorld, readySessions } from "./harness";

let world: TestWorld;
let page: LayoutPage;
let playbackId: string;

async function openLayout2(): Promise<void> {
  world = makeWorld();
  const session = readySessions(world)[0];
  const created = await LayoutPage.create(world.ctx, session.id, 2);
  expect(created).not.toBeNull();
  page = created as LayoutPage;
  await flush(); // socket open + initial state + first pane fetches
  playbackId = [...world.backend.playbacks.keys()][0];
}

/** Advance fake wall time; the server broadcasts only on its own ticks. */
function elapse(seconds: number, serverTick = false): void {
  world.now.ms += seconds * 1000;
  if (serverTick) world.backend.tick(playbackId, seconds);
}

describe("layout 2 pane synchronization", () => {
  beforeEach(openLayout2);

  it("playheads agree with the transport within 50 ms at rate 1.0", async () => {
    page.channel.play();
    await flush();
    expect(page.clock.playing).toBe(true);

    // between broadcasts: client extrapolates
    for (const step of [0.047, 0.1, 0.033, 0.1, 0.08]) {
      elapse(step, step === 0.1);
      await flush();
      page.renderFrame();
      const shown = page.transport.displayTime;
      expect(Math.abs((page.pianoRoll?.playheadTime ?? -1) - shown))
        .toBeLessThanOrEqual(0.05);
      expect(Math.abs((page.linePlot?.playheadTime ?? -1) - shown))
        .toBeLessThanOrEqual(0.05);
      expect(shown).toBeGreaterThan(0);
    }
  });

  it("video media time stays within 80 ms of the mapped local time", async () => {
    page.channel.play();
    await flush();
    const media = world.media[0];
    for (let i = 0; i < 12; i++) {
      elapse(0.05, i % 2 === 1);
      await flush();
      page.renderFrame();
      const local = playbackToLocal(page.detail, "video", page.transport.displayTime);
      expect(Math.abs(media.currentTime - local)).toBeLessThanOrEqual(0.08 + 1e-9);
    }
  });

  it("loop keeps the scrubber within [a, b)", async () => {
    const duration = page.clock.durationS;
    const a = Math.min(2, duration / 3);
    const b = Math.min(4, (2 * duration) / 3);
    page.channel.setLoop(a, b);
    await flush();
    page.channel.play();
    await flush();

    for (let i = 0; i < 40; i++) {
      elapse(0.07, i % 3 === 0);
      await flush();
      page.renderFrame();
      const shown = page.transport.scrubberValue;
      expect(shown).toBeGreaterThanOrEqual(a);
      expect(shown).toBeLessThan(b);
    }
  });

  it("seeking moves every pane together", async () => {
    const target = page.clock.durationS / 2;
    page.channel.seek(target);
    await flush();
    page.renderFrame();
    expect(page.transport.displayTime).toBeCloseTo(target, 6);
    expect(page.pianoRoll?.playheadTime).toBeCloseTo(target, 6);
    expect(page.linePlot?.playheadTime).toBeCloseTo(target, 6);
  });

  it("freezes panes and refuses commands while the channel is down", async () => {
    page.channel.play();
    await flush();
    elapse(0.2, true);
    await flush();
    page.renderFrame();
    const before = page.transport.displayTime;

    // simulate a drop: the page freezes at the last display time
    (page.channel as unknown as { status: string }).status = "dropped";
    elapse(5.0);
    page.renderFrame();
    expect(page.transport.displayTime).toBe(before);
    expect(page.channel.seek(0)).toBe(false);
  });
});
