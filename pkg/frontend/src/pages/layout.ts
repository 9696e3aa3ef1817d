import { ApiError } from "../api";
import { PlaybackChannel } from "../channel";
import { ClientClock } from "../clock";
import { el } from "../dom";
import { LinePlotPane } from "../panes/lineplot";
import { MotionPane } from "../panes/motion";
import { PianoRollPane } from "../panes/pianoroll";
import { ScorePane } from "../panes/score";
import { TransportBar } from "../panes/transport";
import { VideoPane } from "../panes/video";
import type { SessionDetail } from "../types";
import type { PageContext, Renderable } from "./context";

/**
 * Layout 1: video | 3D motion | score. Layout 2 adds hand-region motion,
 * joint line plots and the piano roll. All panes render from one clock
 * sample per frame, so their playheads cannot disagree.
 */
export class LayoutPage {
  readonly el: HTMLElement;
  readonly clock: ClientClock;
  readonly channel: PlaybackChannel;
  readonly transport: TransportBar;
  readonly panes: Renderable[] = [];
  readonly motionPanes: MotionPane[] = [];
  pianoRoll: PianoRollPane | null = null;
  linePlot: LinePlotPane | null = null;
  video: VideoPane | null = null;
  lastDisplayTime = 0;

  private reconnectBadge: HTMLElement;

  constructor(
    ctx: PageContext,
    readonly detail: SessionDetail,
    readonly variant: 1 | 2,
    playbackChannelUrl: string,
    durationS: number,
  ) {
    this.el = el("div", `page page-layout${variant}`);
    this.clock = new ClientClock(durationS, ctx.nowMs);
    this.channel = new PlaybackChannel(playbackChannelUrl, this.clock, {
      socketFactory: ctx.socketFactory,
      onStatus: (status) => {
        this.reconnectBadge.hidden = status === "open";
      },
    });

    const header = el("div", "layout-head");
    header.appendChild(
      el("h1", "title", `${detail.performer_name} - ${detail.piece}`),
    );
    this.reconnectBadge = el("span", "reconnect-badge", "reconnecting...");
    this.reconnectBadge.hidden = true;
    header.appendChild(this.reconnectBadge);
    this.el.appendChild(header);

    const grid = el("div", "layout-grid");
    this.el.appendChild(grid);

    const media = ctx.mediaFactory(detail.assets["video"]);
    this.video = new VideoPane(this.clock, detail, media);
    grid.appendChild(this.video.el);
    this.panes.push(this.video);

    const joints = detail.skeleton?.joints ?? [];
    const fullBody = new MotionPane(ctx.api, detail.id, joints, {
      title: "3D motion",
      rendererFactory: ctx.rendererFactory,
    });
    grid.appendChild(fullBody.el);
    this.panes.push(fullBody);
    this.motionPanes.push(fullBody);

    if (variant === 2) {
      const hands = new MotionPane(ctx.api, detail.id, joints, {
        title: "Hand motion",
        regions: ["left_hand", "right_hand"],
        rendererFactory: ctx.rendererFactory,
      });
      grid.appendChild(hands.el);
      this.panes.push(hands);
      this.motionPanes.push(hands);

      this.linePlot = new LinePlotPane(
        ctx.api,
        detail.id,
        durationS,
        detail.motion?.joints ?? [],
      );
      grid.appendChild(this.linePlot.el);
      this.panes.push(this.linePlot);

      this.pianoRoll = new PianoRollPane(ctx.api, detail.id, durationS);
      grid.appendChild(this.pianoRoll.el);
      this.panes.push(this.pianoRoll);
    }

    const score = new ScorePane(detail, this.channel);
    grid.appendChild(score.el);
    this.panes.push(score);

    this.transport = new TransportBar(this.clock, this.channel);
    this.el.appendChild(this.transport.el);
  }

  /** One frame: sample the clock once, hand the same instant to every pane.
   * While the channel is down the page freezes at the last known time. */
  renderFrame(): void {
    const t =
      this.channel.status === "open"
        ? this.clock.displayedTime()
        : this.lastDisplayTime;
    this.lastDisplayTime = t;
    this.transport.render(t);
    for (const pane of this.panes) {
      pane.render(t);
    }
  }

  destroy(): void {
    this.channel.close();
    for (const pane of this.motionPanes) pane.dispose();
  }

  static async create(
    ctx: PageContext,
    sessionId: string,
    variant: 1 | 2,
  ): Promise<LayoutPage | null> {
    let detail: SessionDetail;
    let playback;
    try {
      detail = await ctx.api.session(sessionId);
      playback = await ctx.api.createPlayback([sessionId]);
    } catch (err) {
      renderGateMessage(ctx, err);
      return null;
    }
    const page = new LayoutPage(
      ctx,
      detail,
      variant,
      wsUrl(ctx.api.base, playback.channel),
      playback.duration_s,
    );
    page.clock.accept(playback.state);
    ctx.container.replaceChildren(page.el);
    page.renderFrame();
    return page;
  }
}

export function wsUrl(base: string, channelPath: string): string {
  if (base.startsWith("http")) {
    return base.replace(/^http/, "ws") + channelPath;
  }
  if (typeof window !== "undefined" && window.location?.host) {
    const scheme = window.location.protocol === "https:" ? "wss" : "ws";
    return `${scheme}://${window.location.host}${channelPath}`;
  }
  return channelPath;
}

export function renderGateMessage(ctx: PageContext, err: unknown): void {
  const panel = el("div", "gate-message");
  const reason =
    err instanceof ApiError && err.status === 409
      ? `This session is not viewable yet: ${err.message}`
      : `Could not open the session: ${err}`;
  panel.appendChild(el("p", "gate-text", reason));
  const back = el("a", "gate-back", "Back to library");
  back.setAttribute("href", "#/");
  panel.appendChild(back);
  ctx.container.replaceChildren(panel);
}
