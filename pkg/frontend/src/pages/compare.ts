import { PlaybackChannel } from "../channel";
import { ClientClock } from "../clock";
import { button, el } from "../dom";
import { MotionPane } from "../panes/motion";
import { TransportBar } from "../panes/transport";
import { VideoPane } from "../panes/video";
import type { SessionDetail } from "../types";
import type { PageContext, Renderable } from "./context";
import { renderGateMessage, wsUrl } from "./layout";

type PaneMode = "video" | "hands";

class CompareSide {
  readonly el: HTMLElement;
  mode: PaneMode = "video";
  video: VideoPane;
  hands: MotionPane;
  private body: HTMLElement;

  constructor(
    ctx: PageContext,
    clock: ClientClock,
    readonly which: "A" | "B",
    readonly detail: SessionDetail,
  ) {
    this.el = el("div", `compare-side side-${which.toLowerCase()}`);
    const head = el("div", "side-head");
    head.appendChild(
      el(
        "h2",
        "side-title",
        `${which}: ${detail.performer_name} (${detail.skill ?? "?"})`,
      ),
    );
    head.appendChild(
      button("video / hands", "side-toggle", () => {
        this.setMode(this.mode === "video" ? "hands" : "video");
      }),
    );
    this.el.appendChild(head);
    this.body = el("div", "side-body");
    this.el.appendChild(this.body);

    this.video = new VideoPane(
      clock,
      detail,
      ctx.mediaFactory(detail.assets["video"]),
      "Video",
    );
    this.hands = new MotionPane(ctx.api, detail.id, detail.skeleton?.joints ?? [], {
      title: "Hand motion",
      regions: ["left_hand", "right_hand"],
      rendererFactory: ctx.rendererFactory,
      width: 340,
      height: 260,
    });
    this.setMode("video");
  }

  setMode(mode: PaneMode): void {
    this.mode = mode;
    this.body.replaceChildren(mode === "video" ? this.video.el : this.hands.el);
  }

  render(displayTime: number): void {
    // both panes keep tracking time even when hidden so a mode switch is
    // seamless mid-playback
    this.video.render(displayTime);
    this.hands.render(displayTime);
  }
}

/**
 * Layout 3: amateur vs professional side by side on one shared transport.
 * Exactly one side is audible; the toggle issues select_audio on the server
 * (so every observer agrees) and mutes the other side's element locally.
 */
export class ComparePage {
  readonly el: HTMLElement;
  readonly clock: ClientClock;
  readonly channel: PlaybackChannel;
  readonly transport: TransportBar;
  readonly left: CompareSide;
  readonly right: CompareSide;
  readonly panes: Renderable[] = [];
  lastDisplayTime = 0;

  private audioToggle: HTMLButtonElement;
  private reconnectBadge: HTMLElement;

  constructor(
    ctx: PageContext,
    detailA: SessionDetail,
    detailB: SessionDetail,
    channelUrl: string,
    durationS: number,
  ) {
    this.el = el("div", "page page-compare");
    this.clock = new ClientClock(durationS, ctx.nowMs);
    this.channel = new PlaybackChannel(channelUrl, this.clock, {
      socketFactory: ctx.socketFactory,
      onStatus: (status) => {
        this.reconnectBadge.hidden = status === "open";
      },
    });

    const head = el("div", "layout-head");
    head.appendChild(el("h1", "title", "Comparison"));
    this.audioToggle = button("audio: A", "audio-toggle", () => {
      this.channel.selectAudio(this.clock.audible === "A" ? "B" : "A");
    });
    head.appendChild(this.audioToggle);
    this.reconnectBadge = el("span", "reconnect-badge", "reconnecting...");
    this.reconnectBadge.hidden = true;
    head.appendChild(this.reconnectBadge);
    this.el.appendChild(head);

    const row = el("div", "compare-row");
    this.left = new CompareSide(ctx, this.clock, "A", detailA);
    this.right = new CompareSide(ctx, this.clock, "B", detailB);
    row.appendChild(this.left.el);
    row.appendChild(this.right.el);
    this.el.appendChild(row);

    this.transport = new TransportBar(this.clock, this.channel);
    this.el.appendChild(this.transport.el);
  }

  renderFrame(): void {
    const t =
      this.channel.status === "open"
        ? this.clock.displayedTime()
        : this.lastDisplayTime;
    this.lastDisplayTime = t;
    this.transport.render(t);
    this.left.render(t);
    this.right.render(t);
    const audible = this.clock.audible ?? "A";
    this.left.video.setMuted(audible !== "A");
    this.right.video.setMuted(audible !== "B");
    this.audioToggle.textContent = `audio: ${audible}`;
  }

  destroy(): void {
    this.channel.close();
    this.left.hands.dispose();
    this.right.hands.dispose();
  }

  static async create(
    ctx: PageContext,
    a: string,
    b: string,
  ): Promise<ComparePage | null> {
    let detailA: SessionDetail;
    let detailB: SessionDetail;
    let playback;
    try {
      [detailA, detailB] = await Promise.all([
        ctx.api.session(a),
        ctx.api.session(b),
      ]);
      playback = await ctx.api.createPlayback([a, b]);
    } catch (err) {
      renderGateMessage(ctx, err);
      return null;
    }
    const page = new ComparePage(
      ctx,
      detailA,
      detailB,
      wsUrl(ctx.api.base, playback.channel),
      playback.duration_s,
    );
    page.clock.accept(playback.state);
    ctx.container.replaceChildren(page.el);
    page.renderFrame();
    return page;
  }
}
