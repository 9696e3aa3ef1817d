"""Master timeline and per-modality clock mapping.

Every recording modality (audio, MIDI, video, motion, score) carries its own
local clock. A linear clock map relates local seconds to the shared master
timeline: ``master = offset_s + scale * local``. A session is playable only
over the master-time window where all four gating modalities overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional


class ClockMapError(ValueError):
    """Raised for clock maps or tracks that violate their constraints."""


class ModalityKind(Enum):
    AUDIO = "audio"
    MIDI = "midi"
    VIDEO = "video"
    MOTION = "motion"
    SCORE = "score"


# Score is descriptive metadata; playback readiness is gated on these four.
GATING_MODALITIES = frozenset(
    {ModalityKind.AUDIO, ModalityKind.MIDI, ModalityKind.VIDEO, ModalityKind.MOTION}
)

#: Equality tolerance for master-time arithmetic, in seconds.
TIME_EPS = 1e-9


@dataclass(frozen=True)
class ClockMap:
    """Linear map from a modality's local seconds to master seconds."""

    offset_s: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.offset_s):
            raise ClockMapError(f"offset_s must be finite, got {self.offset_s}")
        if not math.isfinite(self.scale) or self.scale <= 0.0:
            raise ClockMapError(f"scale must be finite and > 0, got {self.scale}")


def to_master(clock: ClockMap, local_t: float) -> float:
    """Map local seconds to master seconds. Strictly increasing in local_t."""
    if not math.isfinite(local_t):
        raise ClockMapError(f"local time must be finite, got {local_t}")
    return clock.offset_s + clock.scale * local_t


def to_local(clock: ClockMap, master_t: float) -> float:
    """Exact inverse of :func:`to_master`."""
    if not math.isfinite(master_t):
        raise ClockMapError(f"master time must be finite, got {master_t}")
    return (master_t - clock.offset_s) / clock.scale


@dataclass(frozen=True)
class ModalityTrack:
    kind: ModalityKind
    clock: ClockMap
    local_start_s: float
    local_end_s: float

    def __post_init__(self):
        if not (math.isfinite(self.local_start_s) and math.isfinite(self.local_end_s)):
            raise ClockMapError(f"{self.kind.value}: local span must be finite")
        if self.local_start_s < 0 or self.local_end_s < self.local_start_s:
            raise ClockMapError(
                f"{self.kind.value}: bad local span "
                f"[{self.local_start_s}, {self.local_end_s}]"
            )

    def master_span(self) -> tuple[float, float]:
        """Track extent on the master timeline. Ordered because scale > 0."""
        return (
            to_master(self.clock, self.local_start_s),
            to_master(self.clock, self.local_end_s),
        )


@dataclass(frozen=True)
class SyncManifest:
    """Per-session collection of modality tracks, at most one per kind."""

    tracks: Mapping[ModalityKind, ModalityTrack] = field(default_factory=dict)

    @classmethod
    def from_tracks(cls, tracks: Iterable[ModalityTrack]) -> "SyncManifest":
        by_kind: dict[ModalityKind, ModalityTrack] = {}
        for track in tracks:
            if track.kind in by_kind:
                raise ClockMapError(f"duplicate modality: {track.kind.value}")
            by_kind[track.kind] = track
        return cls(tracks=by_kind)

    def track(self, kind: ModalityKind) -> Optional[ModalityTrack]:
        return self.tracks.get(kind)

    @property
    def kinds(self) -> frozenset[ModalityKind]:
        return frozenset(self.tracks)


def overlap_window(
    manifest: SyncManifest, required: Iterable[ModalityKind]
) -> Optional[tuple[float, float]]:
    """Master-time window covered by every required track.

    Returns None if a required track is missing or the intersection is empty;
    a zero-length intersection counts as empty (nothing playable).
    """
    required = set(required)
    if not required:
        raise ClockMapError("required modality set must be non-empty")
    start = -math.inf
    end = math.inf
    for kind in required:
        track = manifest.track(kind)
        if track is None:
            return None
        t0, t1 = track.master_span()
        start = max(start, t0)
        end = min(end, t1)
    if end - start <= 0.0:
        return None
    return (start, end)
