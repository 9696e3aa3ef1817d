// Wire types for the pianoviewer REST + WebSocket API. All times are
// "playback seconds": seconds from the start of the session's
// four-modality overlap window.

export interface SessionSummary {
  id: string;
  performer_name: string;
  skill: string | null;
  recorded_date: string | null;
  piece: string;
  status: string;
  duration_s: number | null;
  warning_count: number;
  thumbnail_url: string | null;
  modalities: string[];
}

export interface TrackInfo {
  offset_s: number;
  scale: number;
  local_start_s: number;
  local_end_s: number;
}

export interface MeasureInfo {
  measure: number;
  start_s: number;
  end_s: number;
  page: number;
}

export interface JointDef {
  name: string;
  region: string; // body | left_hand | right_hand
  parent: number | null;
}

export interface SessionDetail extends SessionSummary {
  warnings: string[];
  assets: Record<string, string>;
  score_pages: string[];
  skeleton?: { name: string; joints: JointDef[] };
  motion?: { rate_hz: number; frames: number; joints: string[] };
  note_count: number;
  measures: MeasureInfo[];
  tracks: Record<string, TrackInfo>;
  overlap: { start_master_s: number; end_master_s: number } | null;
}

export interface WireNote {
  pitch: number;
  velocity: number;
  channel: number;
  onset_s: number;
  offset_s: number;
}

export interface TransportState {
  type: "state";
  revision: number;
  position_s: number;
  rate: number;
  playing: boolean;
  loop: [number, number] | null;
  audible: "A" | "B" | null;
  server_time_ms: number;
}

export interface PlaybackInfo {
  playback_id: string;
  sources: string[];
  duration_s: number;
  channel: string;
  state: TransportState;
}

export interface SessionFilters {
  skill?: string;
  date_from?: string;
  date_to?: string;
  performer?: string;
  ready_only?: boolean;
}

/** Map a playback-time instant to a modality's local media time. */
export function playbackToLocal(
  detail: SessionDetail,
  kind: string,
  t: number,
): number {
  const track = detail.tracks[kind];
  const overlap = detail.overlap;
  if (!track || !overlap) {
    throw new Error(`session ${detail.id} has no playable ${kind} track`);
  }
  return (overlap.start_master_s + t - track.offset_s) / track.scale;
}
