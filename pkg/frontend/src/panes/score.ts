import { PlaybackChannel } from "../channel";
import { button, el } from "../dom";
import type { SessionDetail } from "../types";

/**
 * Score pane: page images with the current measure highlighted and a
 * measure strip for one-click navigation to any measure's start.
 */
export class ScorePane {
  readonly el: HTMLElement;
  currentMeasure: number | null = null;
  currentPage: number | null = null;

  private pageImage: HTMLImageElement;
  private measureButtons = new Map<number, HTMLButtonElement>();

  constructor(
    private detail: SessionDetail,
    private channel: PlaybackChannel,
  ) {
    this.el = el("div", "pane pane-score");
    this.el.appendChild(el("h3", "pane-title", "Score"));
    this.pageImage = el("img", "score-page") as HTMLImageElement;
    this.pageImage.alt = "score page";
    this.el.appendChild(this.pageImage);

    const strip = el("div", "measure-strip");
    for (const m of detail.measures) {
      const b = button(String(m.measure), "measure", () => {
        this.channel.seek(m.start_s);
      });
      b.title = `measure ${m.measure}`;
      this.measureButtons.set(m.measure, b);
      strip.appendChild(b);
    }
    this.el.appendChild(strip);
    if (!detail.measures.length) {
      this.el.appendChild(el("p", "score-empty", "No measure map provided."));
    }
  }

  render(displayTime: number): void {
    let active: number | null = null;
    let page: number | null = null;
    for (const m of this.detail.measures) {
      if (m.start_s <= displayTime && displayTime < m.end_s) {
        active = m.measure;
        page = m.page;
        break;
      }
    }
    if (active !== this.currentMeasure) {
      for (const [measure, b] of this.measureButtons) {
        b.classList.toggle("active", measure === active);
      }
      this.currentMeasure = active;
    }
    if (page !== null && page !== this.currentPage) {
      const src = this.detail.score_pages[page - 1];
      if (src) this.pageImage.src = src;
      this.currentPage = page;
    }
  }
}
