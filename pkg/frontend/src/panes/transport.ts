import { PlaybackChannel } from "../channel";
import { ClientClock } from "../clock";
import { button, el, formatTime } from "../dom";

export const RATE_PRESETS = [0.25, 0.5, 1.0, 2.0];

/**
 * Transport bar: play/pause, rate presets, loop in/out markers for section
 * repetition, and a scrubber. `displayTime` is the clock sample used for the
 * last render; every other pane on the page renders from the same sample.
 */
export class TransportBar {
  readonly el: HTMLElement;
  displayTime = 0;

  private playButton: HTMLButtonElement;
  private scrubber: HTMLInputElement;
  private timeLabel: HTMLElement;
  private loopLabel: HTMLElement;
  private rateButtons = new Map<number, HTMLButtonElement>();
  private loopInMark: number | null = null;
  private scrubbing = false;

  constructor(
    private clock: ClientClock,
    private channel: PlaybackChannel,
  ) {
    this.el = el("div", "transport");

    this.playButton = button("play", "transport-play", () => {
      if (this.clock.playing) this.channel.pause();
      else this.channel.play();
    });
    this.el.appendChild(this.playButton);

    this.scrubber = el("input", "transport-scrubber") as HTMLInputElement;
    this.scrubber.type = "range";
    this.scrubber.min = "0";
    this.scrubber.max = String(this.clock.durationS);
    this.scrubber.step = "0.01";
    this.scrubber.addEventListener("input", () => {
      this.scrubbing = true;
      this.channel.seek(Number(this.scrubber.value));
    });
    this.scrubber.addEventListener("change", () => {
      this.scrubbing = false;
    });
    this.el.appendChild(this.scrubber);

    this.timeLabel = el("span", "transport-time", "0:00.0");
    this.el.appendChild(this.timeLabel);

    const rates = el("span", "transport-rates");
    for (const rate of RATE_PRESETS) {
      const b = button(`${rate}x`, "transport-rate", () => this.channel.setRate(rate));
      this.rateButtons.set(rate, b);
      rates.appendChild(b);
    }
    this.el.appendChild(rates);

    const loop = el("span", "transport-loop");
    loop.appendChild(
      button("loop in", "loop-in", () => {
        this.loopInMark = this.displayTime;
        this.loopLabel.textContent = `in ${formatTime(this.loopInMark)}`;
      }),
    );
    loop.appendChild(
      button("loop out", "loop-out", () => {
        if (this.loopInMark === null) return;
        const a = this.loopInMark;
        const b = this.displayTime;
        if (b > a) this.channel.setLoop(a, b);
      }),
    );
    loop.appendChild(
      button("clear", "loop-clear", () => {
        this.loopInMark = null;
        this.loopLabel.textContent = "";
        this.channel.clearLoop();
      }),
    );
    this.loopLabel = el("span", "loop-label");
    loop.appendChild(this.loopLabel);
    this.el.appendChild(loop);
  }

  render(displayTime: number): void {
    this.displayTime = displayTime;
    this.playButton.textContent = this.clock.playing ? "pause" : "play";
    if (!this.scrubbing) {
      this.scrubber.value = String(displayTime);
    }
    this.timeLabel.textContent =
      `${formatTime(displayTime)} / ${formatTime(this.clock.durationS)}`;
    for (const [rate, b] of this.rateButtons) {
      b.classList.toggle("active", Math.abs(this.clock.rate - rate) < 1e-9);
    }
    const loop = this.clock.loop;
    if (loop) {
      this.loopLabel.textContent =
        `loop ${formatTime(loop[0])} - ${formatTime(loop[1])}`;
    } else if (this.loopInMark === null) {
      this.loopLabel.textContent = "";
    }
  }

  get scrubberValue(): number {
    return Number(this.scrubber.value);
  }
}
