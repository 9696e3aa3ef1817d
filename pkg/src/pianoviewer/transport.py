"""Shared playback transport state machine.

The server owns one PlaybackSession per viewer (or viewer pair, in
comparison mode); commands and timer-driven advances produce new immutable
states with a strictly increasing revision, which the service fans out to
every observer. All functions here are pure: time is passed in, never read.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Optional, Union

from .errors import InvalidRangeError, InvalidStateError

RATE_MIN = 0.1
RATE_MAX = 2.0

#: Broadcast period while playing (10 Hz state push).
TICK_INTERVAL_S = 0.1

COMMAND_KINDS = ("play", "pause", "seek", "rate", "loop", "clear_loop", "select_audio")


@dataclass(frozen=True)
class TransportCommand:
    kind: str
    value: Union[None, float, str, tuple[float, float]] = None


@dataclass(frozen=True)
class PlaybackSession:
    playback_id: str
    sources: tuple[str, ...]  # one or two session ids; two = comparison mode
    duration_s: float
    position_s: float = 0.0
    rate: float = 1.0
    playing: bool = False
    loop: Optional[tuple[float, float]] = None  # [a, b) in master seconds
    audible: Optional[str] = None  # "A" | "B", comparison mode only
    revision: int = 0
    last_update_s: float = 0.0

    @property
    def comparison(self) -> bool:
        return len(self.sources) == 2


def initial_state(
    playback_id: str,
    sources: tuple[str, ...],
    durations: tuple[float, ...],
    now_s: Optional[float] = None,
) -> PlaybackSession:
    """Fresh paused session at position 0, rate 1. With two sources the
    playable duration is the shorter overlap; audio defaults to source A."""
    if not 1 <= len(sources) <= 2 or len(durations) != len(sources):
        raise ValueError(f"need one or two sources, got {len(sources)}")
    duration = min(durations)
    if duration <= 0 or not math.isfinite(duration):
        raise ValueError(f"bad playback duration {duration}")
    return PlaybackSession(
        playback_id=playback_id,
        sources=tuple(sources),
        duration_s=duration,
        audible="A" if len(sources) == 2 else None,
        last_update_s=time.time() if now_s is None else now_s,
    )


def _clamp_into_loop(position: float, loop: tuple[float, float]) -> float:
    """Bring a position into [a, b); anything outside snaps to loop start."""
    a, b = loop
    if a <= position < b:
        return position
    return a


def apply_command(
    s: PlaybackSession, c: TransportCommand, now_s: Optional[float] = None
) -> PlaybackSession:
    """Apply one transport command, returning the next state.

    Every accepted command increments the revision, even when the visible
    state is unchanged (e.g. pausing a paused session), so observers can
    order acknowledgements.
    """
    now = time.time() if now_s is None else now_s
    changes: dict = {}
    if c.kind == "play":
        changes["playing"] = True
    elif c.kind == "pause":
        changes["playing"] = False
    elif c.kind == "seek":
        target = _finite(c.value, "seek")
        target = min(max(target, 0.0), s.duration_s)
        if s.loop is not None:
            target = _clamp_into_loop(target, s.loop)
        elif target >= s.duration_s:
            changes["playing"] = False  # hold the final frame
        changes["position_s"] = target
    elif c.kind == "rate":
        target = _finite(c.value, "rate")
        changes["rate"] = min(max(target, RATE_MIN), RATE_MAX)
    elif c.kind == "loop":
        try:
            a, b = c.value  # type: ignore[misc]
        except (TypeError, ValueError):
            raise InvalidRangeError(f"loop payload must be [a, b], got {c.value!r}")
        a, b = _finite(a, "loop start"), _finite(b, "loop end")
        if not 0.0 <= a < b <= s.duration_s:
            raise InvalidRangeError(
                f"loop [{a}, {b}) outside [0, {s.duration_s}] or empty"
            )
        changes["loop"] = (a, b)
        changes["position_s"] = _clamp_into_loop(s.position_s, (a, b))
    elif c.kind == "clear_loop":
        changes["loop"] = None
    elif c.kind == "select_audio":
        if not s.comparison:
            raise InvalidStateError("select_audio requires a comparison session")
        if c.value not in ("A", "B"):
            raise ValueError(f"audible source must be 'A' or 'B', got {c.value!r}")
        changes["audible"] = c.value
    else:
        raise ValueError(f"unknown command {c.kind!r}")
    return replace(s, revision=s.revision + 1, last_update_s=now, **changes)


def advance(
    s: PlaybackSession, wall_dt: float, now_s: Optional[float] = None
) -> PlaybackSession:
    """Move playback forward by rate * wall_dt seconds of master time.

    Inside a loop [a, b) the position wraps modulo the loop length; hitting
    the end of the playable window pauses and holds the final position.
    Paused sessions are returned unchanged.
    """
    if not wall_dt >= 0.0:  # also rejects NaN
        raise ValueError(f"wall_dt must be >= 0, got {wall_dt}")
    if not s.playing or wall_dt == 0.0:
        return s
    now = time.time() if now_s is None else now_s
    candidate = s.position_s + s.rate * wall_dt
    playing = s.playing
    if s.loop is not None and candidate >= s.loop[1]:
        a, b = s.loop
        candidate = a + math.fmod(candidate - a, b - a)
        if candidate >= b:  # float rounding at the wrap boundary
            candidate = a
    elif candidate >= s.duration_s:
        candidate = s.duration_s
        playing = False
    return replace(
        s,
        position_s=candidate,
        playing=playing,
        revision=s.revision + 1,
        last_update_s=now,
    )


def _finite(value, label: str) -> float:
    try:
        out = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise ValueError(f"{label} payload must be a number, got {value!r}")
    if not math.isfinite(out):
        raise ValueError(f"{label} payload must be finite, got {out}")
    return out
