import { Api } from "../api";
import type { SocketFactory } from "../channel";
import type { NowMs } from "../clock";
import type { RendererFactory } from "../panes/motion";
import type { MediaLike } from "../panes/video";
import { videoElement } from "../panes/video";

/**
 * Everything a page needs from its host. Production supplies browser
 * implementations; tests swap in fakes (sockets, renderers, media elements,
 * clocks) without touching page logic.
 */
export interface PageContext {
  api: Api;
  container: HTMLElement;
  navigate: (hash: string) => void;
  socketFactory?: SocketFactory;
  rendererFactory?: RendererFactory;
  mediaFactory: (src: string) => MediaLike;
  nowMs: NowMs;
}

export function browserContext(container: HTMLElement): PageContext {
  return {
    api: new Api(),
    container,
    navigate: (hash) => {
      window.location.hash = hash;
    },
    mediaFactory: (src) => videoElement(src),
    nowMs: () => performance.now(),
  };
}

export interface Renderable {
  render(displayTime: number): void;
}
