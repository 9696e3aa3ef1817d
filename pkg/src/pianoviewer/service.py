"""Playback orchestration on top of the catalog and transport modules.

Each live playback gets one coordinator owning its immutable transport
state. Commands and the 10 Hz play ticker run on the server event loop, so
state changes are serialized; observers receive state snapshots through
per-subscriber queues in revision order. The catalog index is swapped
atomically on rescan and never blocks playback.
"""

from __future__ import annotations

import asyncio
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import transport
from .catalog import CatalogIndex, SessionRecord, SessionStatus, scan_dataset
from .errors import InvalidStateError
from .midi import NoteEvent, piano_roll_window
from .motion import pose_at
from .timeline import ModalityKind, to_local, to_master
from .transport import PlaybackSession, TransportCommand

PIANO_ROLL_HALF_WINDOW_S = 5.0


class CatalogState:
    """Holds the current index; rescans build a new one and swap it in."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._index: Optional[CatalogIndex] = None

    @property
    def index(self) -> CatalogIndex:
        if self._index is None:
            self.rescan()
        return self._index  # type: ignore[return-value]

    def rescan(self) -> CatalogIndex:
        index = scan_dataset(self.root)
        self._index = index  # single reference assignment: readers see old or new
        return index

    def require(self, session_id: str) -> SessionRecord:
        record = self.index.get(session_id)
        if record is None:
            raise KeyError(session_id)
        return record

    def require_ready(self, session_id: str) -> SessionRecord:
        record = self.require(session_id)
        if record.status is not SessionStatus.READY:
            raise InvalidStateError(
                f"session {session_id!r} is {record.status.value}, not ready"
            )
        return record


def state_message(s: PlaybackSession) -> dict:
    """The server-to-client wire form of a transport state."""
    return {
        "type": "state",
        "revision": s.revision,
        "position_s": s.position_s,
        "rate": s.rate,
        "playing": s.playing,
        "loop": list(s.loop) if s.loop is not None else None,
        "audible": s.audible,
        "server_time_ms": int(time.time() * 1000),
    }


def parse_wire_command(payload: dict) -> TransportCommand:
    """Decode a client `{"type":"command","cmd":...,"value":...}` message."""
    if not isinstance(payload, dict) or payload.get("type") != "command":
        raise ValueError(f"expected a command message, got {payload!r}")
    kind = payload.get("cmd")
    if kind not in transport.COMMAND_KINDS:
        raise ValueError(f"unknown command {kind!r}")
    value = payload.get("value")
    if kind == "loop":
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ValueError(f"loop value must be [a, b], got {value!r}")
        value = (value[0], value[1])
    return TransportCommand(kind=kind, value=value)


class PlaybackCoordinator:
    """Serializes all mutations of one playback session.

    Must only be touched from the server event loop; `apply` has no awaits,
    so each command is atomic with respect to the ticker.
    """

    def __init__(self, state: PlaybackSession):
        self.state = state
        self._queues: set[asyncio.Queue] = set()
        self._ticker: Optional[asyncio.Task] = None
        self._mark = time.monotonic()

    def subscribe(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue()
        self._queues.add(q)
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        self._queues.discard(q)

    def apply(self, command: TransportCommand) -> PlaybackSession:
        now = time.monotonic()
        if self.state.playing:  # account for wall time since the last tick
            self.state = transport.advance(self.state, now - self._mark)
        self._mark = now
        self.state = transport.apply_command(self.state, command)
        self._broadcast()
        self._ensure_ticker()
        return self.state

    def _broadcast(self) -> None:
        message = state_message(self.state)
        for q in list(self._queues):
            q.put_nowait(message)

    def _ensure_ticker(self) -> None:
        if self.state.playing and (self._ticker is None or self._ticker.done()):
            self._ticker = asyncio.get_running_loop().create_task(self._tick())

    async def _tick(self) -> None:
        while self.state.playing:
            await asyncio.sleep(transport.TICK_INTERVAL_S)
            if not self.state.playing:
                break
            now = time.monotonic()
            self.state = transport.advance(self.state, now - self._mark)
            self._mark = now
            self._broadcast()


class PlaybackRegistry:
    def __init__(self):
        self._coordinators: dict[str, PlaybackCoordinator] = {}

    def create(self, catalog: CatalogState, sources: list[str]) -> PlaybackCoordinator:
        """Create a playback over one or two Ready sessions.

        Raises KeyError for unknown ids and InvalidStateError when a source
        fails the readiness gate (only aligned sessions are explorable).
        """
        if not 1 <= len(sources) <= 2:
            raise ValueError(f"playback takes one or two sources, got {len(sources)}")
        records = [catalog.require_ready(sid) for sid in sources]
        playback_id = uuid.uuid4().hex[:12]
        state = transport.initial_state(
            playback_id,
            tuple(sources),
            tuple(r.duration_s or 0.0 for r in records),
        )
        coordinator = PlaybackCoordinator(state)
        self._coordinators[playback_id] = coordinator
        return coordinator

    def get(self, playback_id: str) -> Optional[PlaybackCoordinator]:
        return self._coordinators.get(playback_id)


@dataclass(frozen=True)
class FrameBundle:
    """Everything a pane needs to render one playback instant."""

    master_t: float  # absolute master seconds
    position_s: float  # seconds from the overlap start (wire time basis)
    local_times: dict[ModalityKind, float]
    pose: Optional[np.ndarray]  # (J, 3) interpolated positions
    notes: list[NoteEvent]  # piano-roll window, local MIDI seconds
    measure: Optional[int]


def frame_bundle(
    index: CatalogIndex,
    s: PlaybackSession,
    source: str = "A",
    window_s: float = PIANO_ROLL_HALF_WINDOW_S,
) -> FrameBundle:
    """Resolve one source's per-modality view of the current position.

    Every local time comes from the same master instant through the
    session's clock maps, so panes rendered from one bundle agree.
    """
    try:
        session_id = s.sources[{"A": 0, "B": 1}[source]]
    except (KeyError, IndexError):
        raise ValueError(f"no source {source!r} in playback {s.playback_id}")
    record = index.get(session_id)
    if record is None or record.overlap is None:
        raise InvalidStateError(f"session {session_id!r} is not playable")

    base = record.overlap[0]
    master_t = base + s.position_s
    local_times = {
        kind: to_local(track.clock, master_t)
        for kind, track in record.manifest.tracks.items()
    }

    pose = None
    if record.motion_clip is not None and ModalityKind.MOTION in local_times:
        pose = pose_at(record.motion_clip, local_times[ModalityKind.MOTION])

    notes: list[NoteEvent] = []
    midi_track = record.manifest.track(ModalityKind.MIDI)
    if record.notes and midi_track is not None:
        lo = to_local(midi_track.clock, master_t - window_s)
        hi = to_local(midi_track.clock, master_t + window_s)
        notes = piano_roll_window(record.notes, lo, hi)

    measure = None
    for span in record.measures:
        if span.start_master_s <= master_t < span.end_master_s:
            measure = span.measure
            break

    return FrameBundle(
        master_t=master_t,
        position_s=s.position_s,
        local_times=local_times,
        pose=pose,
        notes=notes,
        measure=measure,
    )


def playback_times_to_local(record: SessionRecord, kind: ModalityKind, t: float) -> float:
    """Map a wire-time instant (seconds from overlap start) to a modality's
    local seconds."""
    if record.overlap is None:
        raise InvalidStateError(f"session {record.id!r} has no playable window")
    track = record.manifest.track(kind)
    if track is None:
        raise InvalidStateError(f"session {record.id!r} has no {kind.value} track")
    return to_local(track.clock, record.overlap[0] + t)


def local_to_playback_time(record: SessionRecord, kind: ModalityKind, local_t: float) -> float:
    if record.overlap is None:
        raise InvalidStateError(f"session {record.id!r} has no playable window")
    track = record.manifest.track(kind)
    if track is None:
        raise InvalidStateError(f"session {record.id!r} has no {kind.value} track")
    return to_master(track.clock, local_t) - record.overlap[0]
