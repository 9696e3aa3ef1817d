import type {
  PlaybackInfo,
  SessionDetail,
  SessionFilters,
  SessionSummary,
  WireNote,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class Api {
  constructor(
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
    public base = "",
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as T;
  }

  async listSessions(filters: SessionFilters = {}): Promise<SessionSummary[]> {
    const params = new URLSearchParams();
    if (filters.skill) params.set("skill", filters.skill);
    if (filters.date_from) params.set("date_from", filters.date_from);
    if (filters.date_to) params.set("date_to", filters.date_to);
    if (filters.performer) params.set("performer", filters.performer);
    if (filters.ready_only) params.set("ready_only", "true");
    const query = params.toString();
    const body = await this.get<{ sessions: SessionSummary[] }>(
      `/api/sessions${query ? "?" + query : ""}`,
    );
    return body.sessions;
  }

  session(id: string): Promise<SessionDetail> {
    return this.get<SessionDetail>(`/api/sessions/${encodeURIComponent(id)}`);
  }

  async pianoroll(id: string, t0: number, t1: number): Promise<WireNote[]> {
    const body = await this.get<{ notes: WireNote[] }>(
      `/api/sessions/${encodeURIComponent(id)}/pianoroll?t0=${t0}&t1=${t1}`,
    );
    return body.notes;
  }

  async pose(id: string, t: number): Promise<number[][]> {
    const body = await this.get<{ pose: number[][] }>(
      `/api/sessions/${encodeURIComponent(id)}/pose?t=${t}`,
    );
    return body.pose;
  }

  async series(
    id: string,
    joint: string,
    axis: string,
    t0: number,
    t1: number,
    maxPoints: number,
  ): Promise<[number, number][]> {
    const body = await this.get<{ points: [number, number][] }>(
      `/api/sessions/${encodeURIComponent(id)}/series?joint=${encodeURIComponent(joint)}` +
        `&axis=${axis}&t0=${t0}&t1=${t1}&max_points=${maxPoints}`,
    );
    return body.points;
  }

  async createPlayback(sources: string[]): Promise<PlaybackInfo> {
    const response = await this.fetchFn(this.base + "/api/playbacks", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ sources }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as PlaybackInfo;
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}
