import { ClientClock } from "./clock";
import type { TransportState } from "./types";

// Narrow view of a WebSocket so tests can substitute a fake.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type ChannelStatus = "connecting" | "open" | "dropped";

export interface ChannelOptions {
  socketFactory?: SocketFactory;
  onState?: (state: TransportState) => void;
  onStatus?: (status: ChannelStatus) => void;
  reconnectDelayMs?: number;
}

/**
 * The shared playback channel. Commands go up as
 * {"type":"command","cmd":...,"value":...}; authoritative states come back
 * down and feed the page's single ClientClock. While the socket is down the
 * panes freeze (clock stops receiving) and commands are refused.
 */
export class PlaybackChannel {
  status: ChannelStatus = "connecting";
  private socket: SocketLike | null = null;
  private closed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    public readonly clock: ClientClock,
    private options: ChannelOptions = {},
  ) {
    this.connect();
  }

  private connect(): void {
    const factory =
      this.options.socketFactory ?? ((url: string) => new WebSocket(url) as SocketLike);
    this.setStatus("connecting");
    const socket = factory(this.url);
    this.socket = socket;
    socket.onopen = () => this.setStatus("open");
    socket.onmessage = (ev) => {
      let payload: TransportState | { type: string };
      try {
        payload = JSON.parse(ev.data);
      } catch {
        return;
      }
      if (payload.type === "state") {
        const state = payload as TransportState;
        if (this.clock.accept(state)) {
          this.options.onState?.(state);
        }
      }
    };
    socket.onerror = () => undefined; // close handler deals with recovery
    socket.onclose = () => {
      if (this.closed) return;
      this.setStatus("dropped");
      const delay = this.options.reconnectDelayMs ?? 1000;
      this.reconnectTimer = setTimeout(() => this.connect(), delay);
    };
  }

  private setStatus(status: ChannelStatus): void {
    if (this.status !== status) {
      this.status = status;
      this.options.onStatus?.(status);
    }
  }

  /** Send one transport command; refused (returns false) unless open. */
  command(cmd: string, value?: unknown): boolean {
    if (this.status !== "open" || !this.socket) {
      return false;
    }
    this.socket.send(JSON.stringify({ type: "command", cmd, value }));
    return true;
  }

  play(): boolean {
    return this.command("play");
  }

  pause(): boolean {
    return this.command("pause");
  }

  seek(t: number): boolean {
    return this.command("seek", t);
  }

  setRate(rate: number): boolean {
    return this.command("rate", rate);
  }

  setLoop(a: number, b: number): boolean {
    return this.command("loop", [a, b]);
  }

  clearLoop(): boolean {
    return this.command("clear_loop");
  }

  selectAudio(which: "A" | "B"): boolean {
    return this.command("select_audio", which);
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.socket?.close();
  }
}
