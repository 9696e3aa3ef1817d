import type { TransportState } from "./types";

export type NowMs = () => number;

/**
 * Client-side view of the server-owned transport.
 *
 * The server broadcasts authoritative states on every change and at 10 Hz
 * while playing; between broadcasts the clock extrapolates
 * position + rate * elapsed, wraps inside an active loop exactly like the
 * server does, and clamps to [0, duration]. Every pane on a page reads the
 * same clock, so their playheads agree by construction.
 */
export class ClientClock {
  private state: TransportState | null = null;
  private receivedAtMs = 0;

  constructor(
    public readonly durationS: number,
    private now: NowMs = () => performance.now(),
  ) {}

  /** Adopt a server state; stale revisions are ignored. */
  accept(state: TransportState): boolean {
    if (this.state && state.revision <= this.state.revision) {
      return false;
    }
    this.state = state;
    this.receivedAtMs = this.now();
    return true;
  }

  get revision(): number {
    return this.state?.revision ?? -1;
  }

  get playing(): boolean {
    return this.state?.playing ?? false;
  }

  get rate(): number {
    return this.state?.rate ?? 1.0;
  }

  get loop(): [number, number] | null {
    return this.state?.loop ?? null;
  }

  get audible(): "A" | "B" | null {
    return this.state?.audible ?? null;
  }

  displayedTime(): number {
    if (!this.state) return 0;
    let t = this.state.position_s;
    if (this.state.playing) {
      const elapsedS = (this.now() - this.receivedAtMs) / 1000;
      t += this.state.rate * Math.max(elapsedS, 0);
    }
    const loop = this.state.loop;
    if (loop && t >= loop[1]) {
      const [a, b] = loop;
      t = a + ((t - a) % (b - a));
      if (t >= b) t = a; // float edge at the wrap boundary
    }
    return Math.min(Math.max(t, 0), this.durationS);
  }
}
