import { Api } from "../api";
import { el } from "../dom";
import type { WireNote } from "../types";

const HALF_WINDOW_S = 5.0;
const PITCH_MIN = 21;
const PITCH_MAX = 108;

/**
 * Scrolling piano roll. Notes around the playhead are fetched from the
 * window endpoint and drawn time-vs-pitch; the playhead bar sits at the
 * fixed center while the roll scrolls underneath it.
 */
export class PianoRollPane {
  readonly el: HTMLElement;
  playheadTime = 0;

  private canvas: HTMLCanvasElement;
  private notes: WireNote[] = [];
  private fetchedSpan: [number, number] | null = null;
  private fetching: Promise<void> | null = null;

  constructor(
    private api: Api,
    private sessionId: string,
    private durationS: number,
  ) {
    this.el = el("div", "pane pane-pianoroll");
    this.el.appendChild(el("h3", "pane-title", "Piano roll"));
    this.canvas = el("canvas", "pianoroll-canvas");
    this.canvas.width = 640;
    this.canvas.height = 160;
    this.el.appendChild(this.canvas);
  }

  /** Ensure notes covering [t - w, t + w] are cached; refetch ahead. */
  ensureWindow(t: number): Promise<void> {
    const lo = t - HALF_WINDOW_S;
    const hi = t + HALF_WINDOW_S;
    const span = this.fetchedSpan;
    if (span && span[0] <= lo && hi <= span[1]) {
      return Promise.resolve();
    }
    if (this.fetching) return this.fetching;
    const f0 = Math.max(t - 3 * HALF_WINDOW_S, -HALF_WINDOW_S);
    const f1 = Math.min(t + 3 * HALF_WINDOW_S, this.durationS + HALF_WINDOW_S);
    this.fetching = this.api
      .pianoroll(this.sessionId, f0, f1)
      .then((notes) => {
        this.notes = notes;
        this.fetchedSpan = [f0, f1];
      })
      .finally(() => {
        this.fetching = null;
      });
    return this.fetching;
  }

  render(displayTime: number): void {
    this.playheadTime = displayTime;
    void this.ensureWindow(displayTime);
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless test environment; state above still updates
    const { width, height } = this.canvas;
    const t0 = displayTime - HALF_WINDOW_S;
    const t1 = displayTime + HALF_WINDOW_S;
    ctx.fillStyle = "#14161d";
    ctx.fillRect(0, 0, width, height);
    const xOf = (t: number) => ((t - t0) / (t1 - t0)) * width;
    const yOf = (pitch: number) =>
      height - ((pitch - PITCH_MIN) / (PITCH_MAX - PITCH_MIN + 1)) * height;
    const rowH = Math.max(height / (PITCH_MAX - PITCH_MIN + 1), 2);
    for (const note of this.notes) {
      if (note.onset_s >= t1 || note.offset_s <= t0) continue;
      const sounding =
        note.onset_s <= displayTime && displayTime < note.offset_s;
      ctx.fillStyle = sounding ? "#ffd76b" : "#4e9dd4";
      const x = xOf(note.onset_s);
      ctx.fillRect(x, yOf(note.pitch) - rowH, xOf(note.offset_s) - x, rowH);
    }
    // playhead bar at the current playback position
    ctx.strokeStyle = "#ff5b5b";
    ctx.beginPath();
    ctx.moveTo(width / 2, 0);
    ctx.lineTo(width / 2, height);
    ctx.stroke();
  }
}
