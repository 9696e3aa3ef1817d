import { Api } from "../api";
import { el } from "../dom";

const AXES = ["x", "y", "z"] as const;
const AXIS_COLORS = { x: "#ff7d7d", y: "#7dff91", z: "#7dacff" };
const MAX_POINTS = 300;

/**
 * Joint-wise x/y/z line plots with a synchronized playhead bar. One joint at
 * a time (selectable); all three axes share the time axis.
 */
export class LinePlotPane {
  readonly el: HTMLElement;
  playheadTime = 0;
  joint: string;

  private canvas: HTMLCanvasElement;
  private series = new Map<string, [number, number][]>();
  private fetching: Promise<void> | null = null;
  private fetchedJoint: string | null = null;

  constructor(
    private api: Api,
    private sessionId: string,
    private durationS: number,
    joints: string[],
  ) {
    this.joint = joints.includes("right_wrist") ? "right_wrist" : joints[0];
    this.el = el("div", "pane pane-lineplot");
    const head = el("div", "pane-head");
    head.appendChild(el("h3", "pane-title", "Joint trajectories"));
    const select = el("select", "joint-select") as HTMLSelectElement;
    for (const name of joints) {
      const option = el("option", "", name) as HTMLOptionElement;
      option.value = name;
      if (name === this.joint) option.selected = true;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      this.joint = select.value;
      void this.refetch();
    });
    head.appendChild(select);
    this.el.appendChild(head);
    this.canvas = el("canvas", "lineplot-canvas");
    this.canvas.width = 640;
    this.canvas.height = 140;
    this.el.appendChild(this.canvas);
  }

  refetch(): Promise<void> {
    if (this.fetching) return this.fetching;
    const joint = this.joint;
    this.fetching = Promise.all(
      AXES.map((axis) =>
        this.api.series(this.sessionId, joint, axis, 0, this.durationS, MAX_POINTS),
      ),
    )
      .then((results) => {
        AXES.forEach((axis, i) => this.series.set(axis, results[i]));
        this.fetchedJoint = joint;
      })
      .finally(() => {
        this.fetching = null;
      });
    return this.fetching;
  }

  render(displayTime: number): void {
    this.playheadTime = displayTime;
    if (this.fetchedJoint !== this.joint) void this.refetch();
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.fillStyle = "#14161d";
    ctx.fillRect(0, 0, width, height);
    let lo = Infinity;
    let hi = -Infinity;
    for (const axis of AXES) {
      for (const [, v] of this.series.get(axis) ?? []) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
    if (lo > hi) return;
    if (hi - lo < 1e-9) hi = lo + 1e-9;
    const xOf = (t: number) => (t / this.durationS) * width;
    const yOf = (v: number) => height - ((v - lo) / (hi - lo)) * (height - 8) - 4;
    for (const axis of AXES) {
      const points = this.series.get(axis) ?? [];
      if (!points.length) continue;
      ctx.strokeStyle = AXIS_COLORS[axis];
      ctx.beginPath();
      points.forEach(([t, v], i) => {
        if (i === 0) ctx.moveTo(xOf(t), yOf(v));
        else ctx.lineTo(xOf(t), yOf(v));
      });
      ctx.stroke();
    }
    ctx.strokeStyle = "#ff5b5b";
    ctx.beginPath();
    ctx.moveTo(xOf(displayTime), 0);
    ctx.lineTo(xOf(displayTime), height);
    ctx.stroke();
  }
}
