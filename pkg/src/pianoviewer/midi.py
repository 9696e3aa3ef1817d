"""Standard MIDI File ingestion.

Parses SMF format 0/1 byte streams, builds a tempo map, converts ticks to
local MIDI seconds and pairs note on/off events into renderable notes for
the piano-roll pane. Parsing is pure; parsed structures are immutable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidRangeError

DEFAULT_TEMPO_MPQ = 500000  # SMF default: 120 BPM

_META_STATUS = 0xFF
_META_TEMPO = 0x51
_META_END_OF_TRACK = 0x2F

# Channel-event payload sizes by high status nibble.
_CHANNEL_DATA_LEN = {0x80: 2, 0x90: 2, 0xA0: 2, 0xB0: 2, 0xC0: 1, 0xD0: 1, 0xE0: 2}


class MalformedMidiError(ValueError):
    """Unparseable SMF input. ``offset`` is the offending byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class TrackEvent:
    """One event on a track, at an absolute tick."""

    tick: int
    status: int  # 0x8n-0xEn channel, 0xF0/0xF7 sysex, 0xFF meta
    data: bytes
    meta_type: Optional[int] = None


@dataclass(frozen=True)
class MidiFile:
    format: int  # 0 or 1
    division: int  # ticks per quarter note
    tracks: tuple[tuple[TrackEvent, ...], ...]


@dataclass(frozen=True)
class TempoMap:
    """Set-tempo changes (tick, microseconds per quarter), strictly
    increasing in tick, always starting with an entry at tick 0."""

    changes: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class NoteEvent:
    pitch: int
    velocity: int
    channel: int
    onset_s: float
    offset_s: float

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch out of range: {self.pitch}")
        if not 1 <= self.velocity <= 127:
            raise ValueError(f"velocity out of range: {self.velocity}")
        if not 0 <= self.channel <= 15:
            raise ValueError(f"channel out of range: {self.channel}")
        if not self.onset_s < self.offset_s:
            raise ValueError(
                f"zero or negative note length: {self.onset_s}..{self.offset_s}"
            )


def decode_vlq(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode a variable-length quantity starting at ``offset``.

    Returns (value, bytes consumed). Up to 4 bytes, 7 data bits each, so the
    value is always < 2**28.
    """
    value = 0
    for i in range(4):
        pos = offset + i
        if pos >= len(data):
            raise MalformedMidiError("truncated variable-length quantity", pos)
        byte = data[pos]
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, i + 1
    raise MalformedMidiError("variable-length quantity longer than 4 bytes", offset)


def encode_vlq(value: int) -> bytes:
    """Encode a non-negative integer < 2**28 as a variable-length quantity."""
    if value < 0 or value >= 1 << 28:
        raise ValueError(f"VLQ value out of range: {value}")
    out = bytearray([value & 0x7F])
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.reverse()
    return bytes(out)


def parse_smf(data: bytes) -> MidiFile:
    """Parse an SMF format 0/1 byte string.

    Rejects format 2 and SMPTE time division; running status is resolved and
    every event carries its absolute tick. The input is never modified.
    """
    if len(data) < 14:
        raise MalformedMidiError("file shorter than an SMF header", len(data))
    if data[0:4] != b"MThd":
        raise MalformedMidiError(f"bad header magic {data[0:4]!r}", 0)
    header_len = int.from_bytes(data[4:8], "big")
    if header_len < 6:
        raise MalformedMidiError(f"header chunk too short ({header_len})", 4)
    if 8 + header_len > len(data):
        raise MalformedMidiError("truncated header chunk", 8)
    fmt = int.from_bytes(data[8:10], "big")
    if fmt not in (0, 1):
        raise MalformedMidiError(f"unsupported SMF format {fmt}", 8)
    ntrks = int.from_bytes(data[10:12], "big")
    division_raw = int.from_bytes(data[12:14], "big")
    if division_raw & 0x8000:
        raise MalformedMidiError("SMPTE time division is not supported", 12)
    division = division_raw & 0x7FFF
    if division < 1:
        raise MalformedMidiError("time division must be >= 1 tick/quarter", 12)

    pos = 8 + header_len
    tracks: list[tuple[TrackEvent, ...]] = []
    while len(tracks) < ntrks:
        if pos + 8 > len(data):
            raise MalformedMidiError(
                f"expected {ntrks} track chunks, found {len(tracks)}", pos
            )
        chunk_id = data[pos : pos + 4]
        chunk_len = int.from_bytes(data[pos + 4 : pos + 8], "big")
        chunk_start = pos + 8
        chunk_end = chunk_start + chunk_len
        if chunk_end > len(data):
            raise MalformedMidiError(f"truncated {chunk_id!r} chunk", pos + 4)
        if chunk_id != b"MTrk":
            pos = chunk_end  # skip alien chunks, per the SMF spec
            continue
        tracks.append(_parse_track(data, chunk_start, chunk_end))
        pos = chunk_end
    return MidiFile(format=fmt, division=division, tracks=tuple(tracks))


def _parse_track(data: bytes, start: int, end: int) -> tuple[TrackEvent, ...]:
    events: list[TrackEvent] = []
    pos = start
    tick = 0
    running_status: Optional[int] = None
    while pos < end:
        delta, used = decode_vlq(data, pos)
        pos += used
        tick += delta
        if pos >= end:
            raise MalformedMidiError("track ends after a delta time", pos)
        first = data[pos]
        if first == _META_STATUS:
            if pos + 2 > end:
                raise MalformedMidiError("truncated meta event", pos)
            meta_type = data[pos + 1]
            length, used = decode_vlq(data, pos + 2)
            body_start = pos + 2 + used
            if body_start + length > end:
                raise MalformedMidiError("meta event payload overruns track", pos)
            events.append(
                TrackEvent(
                    tick=tick,
                    status=_META_STATUS,
                    meta_type=meta_type,
                    data=bytes(data[body_start : body_start + length]),
                )
            )
            pos = body_start + length
            running_status = None
            if meta_type == _META_END_OF_TRACK:
                return tuple(events)  # EOT terminates the track
        elif first in (0xF0, 0xF7):
            length, used = decode_vlq(data, pos + 1)
            body_start = pos + 1 + used
            if body_start + length > end:
                raise MalformedMidiError("sysex payload overruns track", pos)
            events.append(
                TrackEvent(
                    tick=tick,
                    status=first,
                    data=bytes(data[body_start : body_start + length]),
                )
            )
            pos = body_start + length
            running_status = None
        else:
            if first & 0x80:
                status = first
                pos += 1
                running_status = status
            elif running_status is not None:
                status = running_status
            else:
                raise MalformedMidiError(
                    f"data byte 0x{first:02X} without a running status", pos
                )
            kind = status & 0xF0
            if kind not in _CHANNEL_DATA_LEN:
                raise MalformedMidiError(f"illegal status byte 0x{status:02X}", pos)
            n = _CHANNEL_DATA_LEN[kind]
            if pos + n > end:
                raise MalformedMidiError("truncated channel event", pos)
            events.append(
                TrackEvent(tick=tick, status=status, data=bytes(data[pos : pos + n]))
            )
            pos += n
    raise MalformedMidiError("track chunk ends without an end-of-track event", end)


def build_tempo_map(midifile: MidiFile) -> TempoMap:
    """Collect set-tempo events from all tracks into one sorted map.

    A default of 500000 us/quarter is inserted at tick 0 when absent; if
    several events share a tick the last writer (track order, then stream
    order) wins.
    """
    by_tick: dict[int, int] = {}
    for track in midifile.tracks:
        for ev in track:
            if ev.status == _META_STATUS and ev.meta_type == _META_TEMPO:
                if len(ev.data) != 3:
                    continue  # malformed payload; ignore rather than fail the file
                mpq = int.from_bytes(ev.data, "big")
                if mpq >= 1:
                    by_tick[ev.tick] = mpq
    if 0 not in by_tick:
        by_tick[0] = DEFAULT_TEMPO_MPQ
    return TempoMap(changes=tuple(sorted(by_tick.items())))


def ticks_to_seconds(tempo_map: TempoMap, division: int, tick: int) -> float:
    """Convert an absolute tick to local MIDI seconds.

    Piecewise-linear accumulation over tempo segments:
    sum of (delta ticks / division) * (us per quarter / 1e6).
    """
    if tick < 0:
        raise ValueError(f"tick must be >= 0, got {tick}")
    seconds = 0.0
    changes = tempo_map.changes
    for i, (seg_tick, mpq) in enumerate(changes):
        if seg_tick >= tick:
            break
        seg_end = changes[i + 1][0] if i + 1 < len(changes) else tick
        span = min(tick, seg_end) - seg_tick
        seconds += (span / division) * (mpq / 1e6)
    return seconds


def extract_notes(
    midifile: MidiFile, warnings: Optional[list[str]] = None
) -> list[NoteEvent]:
    """Pair note on/off events into notes, in local MIDI seconds.

    A note-on (velocity > 0) is closed by the earliest subsequent note-off or
    velocity-0 note-on of equal pitch and channel; tracks of a format 1 file
    share one tick axis. Zero-length pairs are dropped and unmatched note-ons
    are closed at end-of-track time; both are reported via ``warnings``.
    Output is sorted by onset, ties by pitch.
    """
    if warnings is None:
        warnings = []
    tempo_map = build_tempo_map(midifile)
    division = midifile.division

    # Merge channel events across tracks, stable on (tick, track, stream order).
    merged: list[tuple[int, int, int, TrackEvent]] = []
    end_tick = 0
    for t_idx, track in enumerate(midifile.tracks):
        for e_idx, ev in enumerate(track):
            end_tick = max(end_tick, ev.tick)
            if ev.status & 0xF0 in (0x80, 0x90):
                merged.append((ev.tick, t_idx, e_idx, ev))
    merged.sort(key=lambda item: item[:3])

    open_notes: dict[tuple[int, int], deque] = {}
    notes: list[NoteEvent] = []

    def close(key, on_tick, velocity, off_tick):
        channel, pitch = key
        if off_tick == on_tick:
            warnings.append(
                f"dropped zero-length note pitch={pitch} channel={channel} "
                f"tick={on_tick}"
            )
            return
        notes.append(
            NoteEvent(
                pitch=pitch,
                velocity=velocity,
                channel=channel,
                onset_s=ticks_to_seconds(tempo_map, division, on_tick),
                offset_s=ticks_to_seconds(tempo_map, division, off_tick),
            )
        )

    for tick, _t, _e, ev in merged:
        status = ev.status & 0xF0
        channel = ev.status & 0x0F
        pitch, velocity = ev.data[0], ev.data[1]
        key = (channel, pitch)
        is_on = status == 0x90 and velocity > 0
        if is_on:
            open_notes.setdefault(key, deque()).append((tick, velocity))
        else:  # note-off, or note-on with velocity 0
            pending = open_notes.get(key)
            if not pending:
                warnings.append(
                    f"ignored unmatched note-off pitch={pitch} "
                    f"channel={channel} tick={tick}"
                )
                continue
            on_tick, on_velocity = pending.popleft()
            close(key, on_tick, on_velocity, tick)

    for key, pending in open_notes.items():
        channel, pitch = key
        for on_tick, on_velocity in pending:
            warnings.append(
                f"note-on without note-off pitch={pitch} channel={channel} "
                f"tick={on_tick}; closed at end of track"
            )
            close(key, on_tick, on_velocity, end_tick)

    notes.sort(key=lambda n: (n.onset_s, n.pitch))
    return notes


def piano_roll_window(notes: list[NoteEvent], t0: float, t1: float) -> list[NoteEvent]:
    """Notes overlapping [t0, t1): onset before t1 and offset after t0.

    ``notes`` must be sorted by onset; order is preserved.
    """
    if t0 >= t1:
        raise InvalidRangeError(f"empty window: t0={t0} >= t1={t1}")
    return [n for n in notes if n.onset_s < t1 and n.offset_s > t0]
