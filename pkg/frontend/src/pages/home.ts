import { button, el } from "../dom";
import type { SessionFilters, SessionSummary } from "../types";
import type { PageContext } from "./context";

const GATING = ["audio", "midi", "video", "motion"];

function gateTooltip(session: SessionSummary): string {
  if (session.status === "unaligned") {
    return "Not viewable: modality clocks do not overlap";
  }
  const missing = GATING.filter((kind) => !session.modalities.includes(kind));
  const reason = missing.length
    ? `missing ${missing.join(", ")}`
    : "assets failed preprocessing";
  return `Not viewable: ${reason}`;
}

/**
 * Home gallery: thumbnail cards for every session, filters for skill, date
 * range and performer, a preprocessing status banner, and a tray for
 * picking two sessions to compare. Only ready sessions navigate anywhere.
 */
export class HomePage {
  readonly el: HTMLElement;
  sessions: SessionSummary[] = [];
  comparePick: string[] = [];

  private grid: HTMLElement;
  private banner: HTMLElement;
  private errorPanel: HTMLElement;
  private tray: HTMLElement;
  private filters: SessionFilters = {};

  constructor(private ctx: PageContext) {
    this.el = el("div", "page page-home");
    this.el.appendChild(el("h1", "title", "Performance library"));

    const bar = el("div", "filter-bar");
    const skill = el("select", "filter-skill") as HTMLSelectElement;
    for (const [value, label] of [
      ["", "all skill levels"],
      ["amateur", "amateur"],
      ["professional", "professional"],
    ]) {
      const option = el("option", "", label) as HTMLOptionElement;
      option.value = value;
      skill.appendChild(option);
    }
    skill.addEventListener("change", () => {
      this.filters.skill = skill.value || undefined;
      void this.load();
    });
    bar.appendChild(skill);

    const dateFrom = el("input", "filter-date-from") as HTMLInputElement;
    dateFrom.type = "date";
    dateFrom.addEventListener("change", () => {
      this.filters.date_from = dateFrom.value || undefined;
      void this.load();
    });
    bar.appendChild(dateFrom);

    const dateTo = el("input", "filter-date-to") as HTMLInputElement;
    dateTo.type = "date";
    dateTo.addEventListener("change", () => {
      this.filters.date_to = dateTo.value || undefined;
      void this.load();
    });
    bar.appendChild(dateTo);

    const performer = el("input", "filter-performer") as HTMLInputElement;
    performer.type = "search";
    performer.placeholder = "performer name";
    performer.addEventListener("change", () => {
      this.filters.performer = performer.value || undefined;
      void this.load();
    });
    bar.appendChild(performer);
    this.el.appendChild(bar);

    this.banner = el("div", "status-banner");
    this.el.appendChild(this.banner);
    this.errorPanel = el("div", "error-panel");
    this.errorPanel.hidden = true;
    this.el.appendChild(this.errorPanel);
    this.grid = el("div", "card-grid");
    this.el.appendChild(this.grid);
    this.tray = el("div", "compare-tray");
    this.el.appendChild(this.tray);
  }

  async load(): Promise<void> {
    this.errorPanel.hidden = true;
    try {
      this.sessions = await this.ctx.api.listSessions(this.filters);
    } catch (err) {
      this.errorPanel.hidden = false;
      this.errorPanel.replaceChildren(
        el("p", "error-text", `Could not reach the data service: ${err}`),
        button("Retry", "retry", () => void this.load()),
      );
      return;
    }
    this.renderCards();
  }

  private renderCards(): void {
    this.grid.replaceChildren();
    const counts: Record<string, number> = {};
    for (const session of this.sessions) {
      counts[session.status] = (counts[session.status] ?? 0) + 1;
    }
    this.banner.textContent = this.sessions.length
      ? "Preprocessing: " +
        Object.entries(counts)
          .map(([status, n]) => `${n} ${status}`)
          .join(", ")
      : "No sessions match the current filters.";

    for (const session of this.sessions) {
      this.grid.appendChild(this.card(session));
    }
    this.renderTray();
  }

  private card(session: SessionSummary): HTMLElement {
    const ready = session.status === "ready";
    const card = el("div", `card status-${session.status}${ready ? "" : " disabled"}`);
    card.dataset.sessionId = session.id;

    if (session.thumbnail_url) {
      const img = el("img", "card-thumb") as HTMLImageElement;
      img.src = session.thumbnail_url;
      img.alt = `${session.performer_name} thumbnail`;
      card.appendChild(img);
    }
    card.appendChild(el("div", "card-performer", session.performer_name));
    card.appendChild(el("div", "card-piece", session.piece));
    const meta = el("div", "card-meta");
    meta.appendChild(el("span", `badge badge-${session.skill}`, session.skill ?? "?"));
    meta.appendChild(el("span", "card-date", session.recorded_date ?? ""));
    meta.appendChild(el("span", `chip chip-${session.status}`, session.status));
    card.appendChild(meta);

    if (ready) {
      card.addEventListener("click", () =>
        this.ctx.navigate(`/session/${session.id}/layout1`),
      );
      const pick = button("compare", "pick-compare", () => {
        this.pickForCompare(session.id);
      });
      pick.addEventListener("click", (ev) => ev.stopPropagation());
      card.appendChild(pick);
    } else {
      card.title = gateTooltip(session);
    }
    return card;
  }

  pickForCompare(sessionId: string): void {
    if (this.comparePick.includes(sessionId)) return;
    this.comparePick = [...this.comparePick.slice(-1), sessionId];
    this.renderTray();
  }

  private renderTray(): void {
    this.tray.replaceChildren();
    if (!this.comparePick.length) return;
    this.tray.appendChild(
      el("span", "tray-label", `Compare: ${this.comparePick.join(" vs ")}`),
    );
    if (this.comparePick.length === 2) {
      const [a, b] = this.comparePick;
      this.tray.appendChild(
        button("Open comparison", "open-compare", () =>
          this.ctx.navigate(`/compare?a=${a}&b=${b}`),
        ),
      );
    }
  }

  static async create(ctx: PageContext): Promise<HomePage> {
    const page = new HomePage(ctx);
    ctx.container.replaceChildren(page.el);
    await page.load();
    return page;
  }
}
