import { ClientClock } from "../clock";
import { el } from "../dom";
import { playbackToLocal, type SessionDetail } from "../types";

// What the pane needs from a <video>/<audio> element; tests inject a plain
// object, pages hand over a real media element.
export interface MediaLike {
  currentTime: number;
  muted: boolean;
  playbackRate: number;
  paused: boolean;
  play(): unknown;
  pause(): void;
}

export const DRIFT_THRESHOLD_S = 0.08;

export function videoElement(src: string): HTMLVideoElement & MediaLike {
  const video = el("video", "video-element") as HTMLVideoElement;
  video.src = src;
  video.preload = "auto";
  video.playsInline = true;
  return video;
}

/**
 * Keeps a media element on the shared timeline: the element's media time is
 * the playback time mapped through the session's video clock, and is nudged
 * whenever it drifts more than 80 ms from the displayed time. The media
 * element never owns the clock; the server does.
 */
export class VideoPane {
  readonly el: HTMLElement;

  constructor(
    private clock: ClientClock,
    private detail: SessionDetail,
    public readonly media: MediaLike,
    title = "Video",
  ) {
    this.el = el("div", "pane pane-video");
    this.el.appendChild(el("h3", "pane-title", title));
    const node = this.media as unknown as Node;
    if (node instanceof Node) {
      this.el.appendChild(node);
    }
  }

  mappedLocalTime(displayTime: number): number {
    return playbackToLocal(this.detail, "video", displayTime);
  }

  render(displayTime: number): void {
    const local = this.mappedLocalTime(displayTime);
    if (this.clock.playing) {
      this.media.playbackRate = this.clock.rate;
      if (this.media.paused) {
        try {
          const result = this.media.play() as Promise<void> | undefined;
          result?.catch?.(() => undefined); // autoplay may be blocked
        } catch {
          // media element without playback support; time is still synced
        }
      }
    } else if (!this.media.paused) {
      this.media.pause();
    }
    if (Math.abs(this.media.currentTime - local) > DRIFT_THRESHOLD_S) {
      this.media.currentTime = local;
    }
  }

  setMuted(muted: boolean): void {
    this.media.muted = muted;
  }
}
