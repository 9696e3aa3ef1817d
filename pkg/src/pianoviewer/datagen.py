"""Synthetic dataset generation.

Writes Standard MIDI Files, motion CSVs, skeleton definitions and whole
session directories from scratch, byte by byte, without going through the
parsers in this package. Tests lean on that independence: what the
generators ledger is what the ingestion modules must reproduce. The
``scripts/make_dataset.py`` entry point uses the same code to build the
demo catalog.
"""

from __future__ import annotations

import json
import math
import random
import wave
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from PIL import Image, ImageDraw

DEFAULT_TEMPO_MPQ = 500000


# ---------------------------------------------------------------------------
# Standard MIDI File writing


@dataclass(frozen=True)
class NoteSpec:
    """One intended note: the generator's ledger entry."""

    pitch: int
    velocity: int
    channel: int
    on_tick: int
    off_tick: int


@dataclass
class GeneratedMidi:
    data: bytes
    notes: list[NoteSpec]
    tempo_changes: list[tuple[int, int]]  # as written; tick 0 may be absent
    division: int
    format: int


def _vlq(value: int) -> bytes:
    out = bytearray([value & 0x7F])
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.reverse()
    return bytes(out)


def _encode_track(events: list[tuple[int, int, int, bytes]], running: bool) -> bytes:
    """events: (tick, rank, status, data); status 0x100+n encodes meta n."""
    body = bytearray()
    prev_tick = 0
    prev_status: Optional[int] = None
    for tick, _rank, status, data in sorted(events, key=lambda e: (e[0], e[1])):
        body += _vlq(tick - prev_tick)
        prev_tick = tick
        if status >= 0x100:  # meta event
            body += bytes([0xFF, status - 0x100]) + _vlq(len(data)) + data
            prev_status = None
        else:
            if not (running and status == prev_status):
                body.append(status)
            body += data
            prev_status = status
    body += _vlq(0) + bytes([0xFF, 0x2F, 0x00])
    return b"MTrk" + len(body).to_bytes(4, "big") + bytes(body)


def write_smf(
    notes: Sequence[NoteSpec],
    tempo_changes: Sequence[tuple[int, int]],
    division: int,
    fmt: int = 0,
    *,
    vel0_offs: bool = False,
    running_status: bool = False,
    note_tracks: int = 1,
) -> bytes:
    """Assemble an SMF byte string for the given notes and tempo changes.

    ``vel0_offs`` emits note-offs as velocity-0 note-ons; ``running_status``
    omits repeated status bytes. Format 1 puts tempo changes on track 0 and
    splits notes round-robin over ``note_tracks`` further tracks.
    """
    tempo_events = [
        (tick, 0, 0x100 + 0x51, mpq.to_bytes(3, "big")) for tick, mpq in tempo_changes
    ]

    def note_events(specs: Sequence[NoteSpec]) -> list[tuple[int, int, int, bytes]]:
        evs = []
        for n in specs:
            evs.append((n.on_tick, 2, 0x90 | n.channel, bytes([n.pitch, n.velocity])))
            if vel0_offs:
                evs.append((n.off_tick, 1, 0x90 | n.channel, bytes([n.pitch, 0])))
            else:
                evs.append((n.off_tick, 1, 0x80 | n.channel, bytes([n.pitch, 64])))
        return evs

    if fmt == 0:
        chunks = [_encode_track(tempo_events + note_events(notes), running_status)]
    elif fmt == 1:
        groups: list[list[NoteSpec]] = [[] for _ in range(max(1, note_tracks))]
        for i, n in enumerate(notes):
            groups[i % len(groups)].append(n)
        chunks = [_encode_track(tempo_events, running_status)]
        chunks += [_encode_track(note_events(g), running_status) for g in groups]
    else:
        raise ValueError(f"unsupported format {fmt}")

    header = (
        b"MThd"
        + (6).to_bytes(4, "big")
        + fmt.to_bytes(2, "big")
        + len(chunks).to_bytes(2, "big")
        + division.to_bytes(2, "big")
    )
    return header + b"".join(chunks)


def random_smf(
    rng: random.Random,
    *,
    max_notes: int = 500,
    min_notes: int = 1,
    max_tempo_changes: int = 16,
) -> GeneratedMidi:
    """A random but well-formed SMF plus the ledger it was written from."""
    division = rng.choice([96, 120, 240, 480, 960])
    fmt = rng.choice([0, 1])
    channels = [0] if rng.random() < 0.7 else [0, rng.randint(1, 15)]

    n_notes = rng.randint(min_notes, max_notes)
    cursors: dict[tuple[int, int], int] = defaultdict(int)
    used_onsets: set[tuple[int, int]] = set()
    notes: list[NoteSpec] = []
    now = 0  # global melodic cursor; chords share it, retriggers abut it
    while len(notes) < n_notes:
        channel = rng.choice(channels)
        pitch = rng.randint(21, 108)
        key = (channel, pitch)
        if notes and rng.random() < 0.2:
            on = now  # chord tone
        else:
            now += rng.randint(division // 8, division)
            on = now
        on = max(on, cursors[key])  # per-pitch streams never overlap
        while (on, pitch) in used_onsets:  # keep (onset, pitch) sort keys unique
            on += 1
        dur = rng.randint(max(1, division // 8), division * 2)
        cursors[key] = on + dur
        used_onsets.add((on, pitch))
        notes.append(NoteSpec(pitch, rng.randint(1, 127), channel, on, on + dur))
        if len(notes) < n_notes and rng.random() < 0.08:
            # immediate retrigger: note-off and next note-on on the same tick
            re_dur = rng.randint(max(1, division // 8), division)
            re_on = on + dur
            if (re_on, pitch) not in used_onsets:
                cursors[key] = re_on + re_dur
                used_onsets.add((re_on, pitch))
                notes.append(
                    NoteSpec(pitch, rng.randint(1, 127), channel, re_on, re_on + re_dur)
                )

    max_tick = max((n.off_tick for n in notes), default=4 * division)
    n_tempo = rng.randint(0, max_tempo_changes)
    ticks = sorted(rng.sample(range(0, max_tick + 1), min(n_tempo, max_tick + 1)))
    tempo_changes = [(t, rng.randint(150000, 1200000)) for t in ticks]

    data = write_smf(
        notes,
        tempo_changes,
        division,
        fmt,
        vel0_offs=rng.random() < 0.5,
        running_status=rng.random() < 0.5,
        note_tracks=rng.choice([1, 1, 2]),
    )
    return GeneratedMidi(
        data=data,
        notes=notes,
        tempo_changes=tempo_changes,
        division=division,
        format=fmt,
    )


def exact_seconds_at(
    tempo_changes: Sequence[tuple[int, int]], division: int, tick: int
) -> Fraction:
    """Exact tick-to-seconds conversion over the written tempo changes.

    Applies the SMF conventions the viewer relies on (default 500000 us per
    quarter at tick 0, last writer wins per tick) with Fraction arithmetic,
    so it can serve as a reference value for float implementations.
    """
    effective: dict[int, int] = {}
    for t, mpq in tempo_changes:
        effective[t] = mpq
    if 0 not in effective:
        effective[0] = DEFAULT_TEMPO_MPQ
    changes = sorted(effective.items())
    total = Fraction(0)
    for i, (seg_tick, mpq) in enumerate(changes):
        if seg_tick >= tick:
            break
        seg_end = changes[i + 1][0] if i + 1 < len(changes) else tick
        span = min(tick, seg_end) - seg_tick
        total += Fraction(span, division) * Fraction(mpq, 10**6)
    return total


# ---------------------------------------------------------------------------
# Skeleton and motion writing

_FINGERS = ("thumb", "index", "middle", "ring", "pinky")


def piano_skeleton_spec(name: str = "piano-23") -> dict:
    """A 23-joint upper-body skeleton with tagged hand regions, in the
    skeleton.json schema (parents referenced by name)."""
    joints = [
        ("hips", "body", None),
        ("spine", "body", "hips"),
        ("chest", "body", "spine"),
        ("neck", "body", "chest"),
        ("head", "body", "neck"),
    ]
    for side in ("left", "right"):
        joints += [
            (f"{side}_shoulder", "body", "chest"),
            (f"{side}_elbow", "body", f"{side}_shoulder"),
            (f"{side}_wrist", "body", f"{side}_elbow"),
            (f"{side}_palm", f"{side}_hand", f"{side}_wrist"),
        ]
        joints += [
            (f"{side}_{finger}", f"{side}_hand", f"{side}_palm")
            for finger in _FINGERS
        ]
    return {
        "name": name,
        "joints": [
            {"name": n, "region": r, "parent": p} for n, r, p in joints
        ],
    }


def random_motion_frames(
    rng: random.Random, n_joints: int, n_frames: int
) -> list[list[float]]:
    """Smooth per-joint sinusoidal trajectories, flattened per row."""
    bases = [[rng.uniform(-0.8, 0.8) for _ in range(3)] for _ in range(n_joints)]
    freqs = [rng.uniform(0.2, 2.0) for _ in range(n_joints)]
    phases = [rng.uniform(0, 2 * math.pi) for _ in range(n_joints)]
    rows = []
    for f in range(n_frames):
        row = []
        for j in range(n_joints):
            wiggle = 0.05 * math.sin(2 * math.pi * freqs[j] * f / n_frames + phases[j])
            row.extend(b + wiggle for b in bases[j])
        rows.append(row)
    return rows


def write_motion_csv(rows: Sequence[Sequence[float]], joint_names: Sequence[str]) -> str:
    """Render frames as the `frame,<joint>_x,...` CSV. Full-precision repr
    so parsed values equal the source matrix exactly."""
    header = ["frame"]
    for name in joint_names:
        header += [f"{name}_x", f"{name}_y", f"{name}_z"]
    lines = [",".join(header)]
    for i, row in enumerate(rows):
        lines.append(",".join([str(i)] + [repr(v) for v in row]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Whole sessions and datasets

PERFORMERS = [
    ("Kim Jiyoung", "professional"),
    ("Minseo Kim", "amateur"),
    ("Daniel Park", "amateur"),
    ("Sofia Petrova", "professional"),
    ("Haruka Tanaka", "amateur"),
    ("Emma Keller", "professional"),
    ("Lucas Moreau", "amateur"),
    ("Amara Diallo", "amateur"),
]

PIECES = [
    "Fur Elise",
    "Nocturne Op. 9 No. 2",
    "Clair de Lune",
    "Gymnopedie No. 1",
    "Invention No. 1",
    "Arabesque No. 1",
    "Prelude in C",
    "Traumerei",
]


@dataclass
class SessionPlan:
    session_id: str
    performer: str
    skill: str
    piece: str
    recorded_date: str
    target: str = "ready"  # ready | unaligned | incomplete
    n_notes: int = 80
    motion_rate_hz: float = 30.0
    warnings_expected: bool = field(default=False)


def _write_wav(path: Path, duration_s: float = 0.25, rate: int = 8000) -> None:
    n = int(duration_s * rate)
    samples = bytearray()
    for i in range(n):
        value = int(12000 * math.sin(2 * math.pi * 440 * i / rate))
        samples += value.to_bytes(2, "little", signed=True)
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(rate)
        f.writeframes(bytes(samples))


def _write_thumbnail(path: Path, seed: int) -> None:
    rng = random.Random(seed)
    img = Image.new("RGB", (160, 90), tuple(rng.randint(40, 215) for _ in range(3)))
    draw = ImageDraw.Draw(img)
    for x in range(12, 148, 12):  # stylized keyboard strip
        draw.rectangle([x, 62, x + 8, 86], fill=(250, 250, 245))
    img.save(path, "JPEG", quality=70)


def _write_score_page(path: Path, page: int) -> None:
    img = Image.new("RGB", (220, 300), (252, 250, 244))
    draw = ImageDraw.Draw(img)
    for system in range(4):
        top = 30 + system * 66
        for line in range(5):
            y = top + line * 7
            draw.line([(16, y), (204, y)], fill=(60, 60, 70))
    draw.text((100, 6), str(page), fill=(60, 60, 70))
    img.save(path, "PNG")


def make_session(sessions_dir: Path, plan: SessionPlan, rng: random.Random) -> Path:
    """Write one complete session directory per the plan's target status."""
    sdir = sessions_dir / plan.session_id
    (sdir / "score").mkdir(parents=True, exist_ok=True)

    gen = random_smf(rng, max_notes=plan.n_notes, min_notes=max(1, plan.n_notes // 2))
    midi_end = max((n.off_tick for n in gen.notes), default=4 * gen.division)
    midi_dur = float(exact_seconds_at(gen.tempo_changes, gen.division, midi_end))
    midi_path = sdir / "performance.mid"
    midi_path.write_bytes(gen.data)

    skeleton_spec = piano_skeleton_spec()
    (sdir / "skeleton.json").write_text(json.dumps(skeleton_spec, indent=1))
    n_joints = len(skeleton_spec["joints"])
    n_frames = max(2, min(int(midi_dur * plan.motion_rate_hz) + 1, 300))
    joint_names = [j["name"] for j in skeleton_spec["joints"]]
    rows = random_motion_frames(rng, n_joints, n_frames)
    (sdir / "motion.csv").write_text(write_motion_csv(rows, joint_names))
    motion_dur = (n_frames - 1) / plan.motion_rate_hz

    _write_wav(sdir / "audio.wav")
    (sdir / "video.mp4").write_bytes(rng.randbytes(rng.randint(4096, 16384)))
    _write_thumbnail(sdir / "thumbnail.jpg", rng.randint(0, 1 << 30))
    _write_score_page(sdir / "score" / "page1.png", 1)
    _write_score_page(sdir / "score" / "page2.png", 2)

    av_dur = max(midi_dur, motion_dur) + 0.5

    def clock(max_offset: float, drift: float = 0.0) -> dict:
        return {
            "offset_s": round(rng.uniform(0.0, max_offset), 3),
            "scale": round(1.0 + rng.uniform(-drift, drift), 6),
        }

    modalities = {
        "audio": {"file": "audio.wav", **clock(0.25), "local_start_s": 0.0,
                  "local_end_s": round(av_dur, 3)},
        "midi": {"file": "performance.mid", **clock(0.3, 0.001),
                 "local_start_s": 0.0, "local_end_s": round(midi_dur, 3)},
        "video": {"file": "video.mp4", **clock(0.25), "fps": 30,
                  "local_start_s": 0.0, "local_end_s": round(av_dur, 3)},
        "motion": {"file": "motion.csv", **clock(0.2, 0.0005),
                   "rate_hz": plan.motion_rate_hz, "skeleton": "skeleton.json",
                   "local_start_s": 0.0, "local_end_s": round(motion_dur, 3)},
    }

    if plan.target == "unaligned":
        modalities["video"]["offset_s"] += 500.0
    elif plan.target == "incomplete":
        flavor = rng.choice(["missing_file", "bad_midi", "missing_modality"])
        if flavor == "missing_file":
            (sdir / "motion.csv").unlink()
        elif flavor == "bad_midi":
            midi_path.write_bytes(b"MThe" + gen.data[4:])
        else:
            del modalities["audio"]

    spans = []
    for entry in modalities.values():
        offset, scale = entry["offset_s"], entry["scale"]
        spans.append(
            (offset + scale * entry["local_start_s"],
             offset + scale * entry["local_end_s"])
        )
    start = max(s for s, _ in spans)
    end = min(e for _, e in spans)

    measures = []
    if end > start:
        count = max(1, int((end - start) / 2.0))
        width = (end - start) / count
        for m in range(count):
            measures.append(
                {
                    "measure": m + 1,
                    "start_master_s": round(start + m * width, 6),
                    "end_master_s": round(start + (m + 1) * width, 6),
                    "page": 1 + m * 2 // count,
                }
            )
    (sdir / "score" / "measure_map.json").write_text(json.dumps(measures))

    session = {
        "id": plan.session_id,
        "performer": {"name": plan.performer, "skill": plan.skill},
        "recorded_date": plan.recorded_date,
        "piece": plan.piece,
        "modalities": modalities,
        "score": {
            "pages": ["score/page1.png", "score/page2.png"],
            "measure_map": "score/measure_map.json",
        },
    }
    (sdir / "session.json").write_text(json.dumps(session, indent=1))
    return sdir


def make_dataset(
    root: Path,
    n_sessions: int = 109,
    seed: int = 20250109,
    *,
    n_unaligned: Optional[int] = None,
    n_incomplete: Optional[int] = None,
    n_notes: int = 80,
) -> list[SessionPlan]:
    """Generate a full synthetic dataset under ``root/sessions/``."""
    rng = random.Random(seed)
    if n_unaligned is None:
        n_unaligned = n_sessions // 8
    if n_incomplete is None:
        n_incomplete = n_sessions // 8
    targets = (
        ["unaligned"] * n_unaligned
        + ["incomplete"] * n_incomplete
        + ["ready"] * (n_sessions - n_unaligned - n_incomplete)
    )
    rng.shuffle(targets)

    sessions_dir = Path(root) / "sessions"
    sessions_dir.mkdir(parents=True, exist_ok=True)
    plans = []
    for i, target in enumerate(targets):
        performer, skill = PERFORMERS[rng.randrange(len(PERFORMERS))]
        date = (
            f"{rng.randint(2021, 2024)}-{rng.randint(1, 12):02d}-"
            f"{rng.randint(1, 28):02d}"
        )
        plan = SessionPlan(
            session_id=f"session-{i:03d}",
            performer=performer,
            skill=skill,
            piece=PIECES[rng.randrange(len(PIECES))],
            recorded_date=date,
            target=target,
            n_notes=n_notes,
        )
        make_session(sessions_dir, plan, rng)
        plans.append(plan)
    return plans
