"""Dataset catalog: session scanning, readiness gating and filtering.

A dataset root holds one directory per recorded performance under
``sessions/``, each described by a ``session.json`` manifest. Scanning parses
MIDI and motion assets eagerly, validates clocks and spans, and computes a
readiness status per session: a performance is explorable only when audio,
MIDI, video and motion are all present and share a nonempty master-time
overlap. A scan never aborts on a bad session; failures degrade that
session's status and are surfaced as warnings.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from . import midi, motion
from .errors import InvalidRangeError
from .timeline import (
    GATING_MODALITIES,
    ClockMap,
    ClockMapError,
    ModalityKind,
    ModalityTrack,
    SyncManifest,
    overlap_window,
)


class CatalogError(RuntimeError):
    """Fatal catalog failure (unreadable dataset root)."""


class Skill(Enum):
    AMATEUR = "amateur"
    PROFESSIONAL = "professional"


class SessionStatus(Enum):
    INCOMPLETE = "incomplete"
    UNALIGNED = "unaligned"
    READY = "ready"


@dataclass(frozen=True)
class MeasureSpan:
    """One score measure's extent on the master timeline."""

    measure: int
    start_master_s: float
    end_master_s: float
    page: int


@dataclass
class SessionRecord:
    id: str
    path: Path
    performer_name: str = ""
    skill: Optional[Skill] = None
    recorded_date: Optional[dt.date] = None
    piece: str = ""
    manifest: SyncManifest = field(default_factory=SyncManifest)
    asset_files: dict[ModalityKind, str] = field(default_factory=dict)
    thumbnail: Optional[str] = None
    score_pages: tuple[str, ...] = ()
    status: SessionStatus = SessionStatus.INCOMPLETE
    warnings: list[str] = field(default_factory=list)
    overlap: Optional[tuple[float, float]] = None
    duration_s: Optional[float] = None
    # Derived data cached at scan time, used by the playback service.
    notes: list[midi.NoteEvent] = field(default_factory=list)
    motion_clip: Optional[motion.MotionClip] = None
    skeleton: Optional[motion.Skeleton] = None
    measures: tuple[MeasureSpan, ...] = ()


@dataclass(frozen=True)
class CatalogQuery:
    skill: Optional[Skill] = None
    date_from: Optional[dt.date] = None
    date_to: Optional[dt.date] = None
    performer_substring: Optional[str] = None

    def __post_init__(self):
        if (
            self.date_from is not None
            and self.date_to is not None
            and self.date_from > self.date_to
        ):
            raise InvalidRangeError(
                f"date_from {self.date_from} after date_to {self.date_to}"
            )


@dataclass(frozen=True)
class CatalogIndex:
    records: tuple[SessionRecord, ...]
    scanned_at: dt.datetime

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise CatalogError("duplicate session ids in index")

    def get(self, session_id: str) -> Optional[SessionRecord]:
        for record in self.records:
            if record.id == session_id:
                return record
        return None


def readiness(
    parsed_ok: Iterable[ModalityKind], manifest: SyncManifest
) -> SessionStatus:
    """Status from which gating modalities parsed and whether they overlap."""
    parsed_ok = set(parsed_ok)
    if not GATING_MODALITIES <= parsed_ok:
        return SessionStatus.INCOMPLETE
    if overlap_window(manifest, GATING_MODALITIES) is None:
        return SessionStatus.UNALIGNED
    return SessionStatus.READY


def scan_dataset(root: Path) -> CatalogIndex:
    """Build a catalog index from ``root/sessions/*/session.json``.

    Per-session failures mark that session incomplete and continue; only an
    unreadable root is fatal. Records are sorted newest first, ties by id.
    """
    root = Path(root)
    sessions_dir = root / "sessions"
    if not sessions_dir.is_dir():
        raise CatalogError(f"dataset root has no sessions/ directory: {root}")
    try:
        entries = sorted(p for p in sessions_dir.iterdir() if p.is_dir())
    except OSError as exc:
        raise CatalogError(f"cannot read {sessions_dir}: {exc}") from exc

    records = [_load_session(p) for p in entries]
    records.sort(key=lambda r: (-(r.recorded_date or dt.date.min).toordinal(), r.id))
    return CatalogIndex(records=tuple(records), scanned_at=dt.datetime.now())


def filter_sessions(
    index: CatalogIndex, q: CatalogQuery, ready_only: bool = False
) -> list[SessionRecord]:
    """Conjunction of the query's predicates, preserving index order.

    Records missing a filtered field (possible only for sessions whose
    session.json failed to parse) never match that filter.
    """
    out = []
    for record in index.records:
        if ready_only and record.status is not SessionStatus.READY:
            continue
        if q.skill is not None and record.skill is not q.skill:
            continue
        if q.date_from is not None and (
            record.recorded_date is None or record.recorded_date < q.date_from
        ):
            continue
        if q.date_to is not None and (
            record.recorded_date is None or record.recorded_date > q.date_to
        ):
            continue
        if q.performer_substring is not None:
            if q.performer_substring.lower() not in record.performer_name.lower():
                continue
        out.append(record)
    return out


_KIND_NAMES = {kind.value: kind for kind in ModalityKind}


def _load_session(session_dir: Path) -> SessionRecord:
    record = SessionRecord(id=session_dir.name, path=session_dir)
    manifest_path = session_dir / "session.json"
    try:
        spec = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        record.warnings.append(f"session.json unreadable: {exc}")
        return record

    if not isinstance(spec, dict):
        record.warnings.append("session.json is not an object")
        return record

    declared_id = spec.get("id")
    if declared_id is not None and declared_id != record.id:
        record.warnings.append(
            f"session.json id {declared_id!r} does not match directory name"
        )

    performer = spec.get("performer") or {}
    record.performer_name = str(performer.get("name", ""))
    try:
        record.skill = Skill(performer.get("skill"))
    except ValueError:
        record.warnings.append(f"unknown skill {performer.get('skill')!r}")
    record.piece = str(spec.get("piece", ""))
    try:
        record.recorded_date = dt.date.fromisoformat(spec.get("recorded_date", ""))
    except (TypeError, ValueError):
        record.warnings.append(f"bad recorded_date {spec.get('recorded_date')!r}")

    tracks: list[ModalityTrack] = []
    parsed_ok: set[ModalityKind] = set()
    modalities = spec.get("modalities") or {}
    for kind_name, entry in modalities.items():
        kind = _KIND_NAMES.get(kind_name)
        if kind is None:
            record.warnings.append(f"unknown modality {kind_name!r}")
            continue
        try:
            track = ModalityTrack(
                kind=kind,
                clock=ClockMap(
                    offset_s=float(entry["offset_s"]), scale=float(entry["scale"])
                ),
                local_start_s=float(entry["local_start_s"]),
                local_end_s=float(entry["local_end_s"]),
            )
        except (KeyError, TypeError, ValueError, ClockMapError) as exc:
            record.warnings.append(f"{kind_name}: bad clock/span: {exc}")
            continue
        tracks.append(track)
        filename = entry.get("file")
        if not filename:
            record.warnings.append(f"{kind_name}: no file declared")
            continue
        record.asset_files[kind] = filename
        if _ingest_asset(record, kind, entry, session_dir / filename):
            parsed_ok.add(kind)

    try:
        record.manifest = SyncManifest.from_tracks(tracks)
    except ClockMapError as exc:
        record.warnings.append(str(exc))
        record.manifest = SyncManifest()

    thumbnail = spec.get("thumbnail", "thumbnail.jpg")
    if (session_dir / thumbnail).is_file():
        record.thumbnail = thumbnail

    _load_score(record, spec.get("score"), session_dir)

    record.status = readiness(parsed_ok, record.manifest)
    if record.status is SessionStatus.READY:
        window = overlap_window(record.manifest, GATING_MODALITIES)
        record.overlap = window
        record.duration_s = window[1] - window[0]
    return record


def _ingest_asset(
    record: SessionRecord, kind: ModalityKind, entry: dict, path: Path
) -> bool:
    """Validate one modality's asset file. MIDI and motion are parsed and
    cached; audio/video stay opaque (the browser decodes them)."""
    if not path.is_file():
        record.warnings.append(f"{kind.value}: file missing: {path.name}")
        return False
    if kind is ModalityKind.MIDI:
        try:
            parsed = midi.parse_smf(path.read_bytes())
            record.notes = midi.extract_notes(parsed, warnings=record.warnings)
        except (OSError, midi.MalformedMidiError) as exc:
            record.warnings.append(f"midi: {exc}")
            return False
    elif kind is ModalityKind.MOTION:
        try:
            skeleton_file = entry.get("skeleton", "skeleton.json")
            skeleton = motion.load_skeleton(
                (record.path / skeleton_file).read_text(encoding="utf-8")
            )
            rate_hz = float(entry["rate_hz"])
            clip = motion.parse_motion_csv(
                path.read_text(encoding="utf-8"), skeleton, rate_hz
            )
        except (OSError, KeyError, TypeError, ValueError) as exc:
            record.warnings.append(f"motion: {exc}")
            return False
        record.skeleton = skeleton
        record.motion_clip = clip
    return True


def _load_score(record: SessionRecord, score_spec, session_dir: Path) -> None:
    if not isinstance(score_spec, dict):
        return
    pages = score_spec.get("pages") or []
    record.score_pages = tuple(str(p) for p in pages)
    map_file = score_spec.get("measure_map")
    if not map_file:
        return
    try:
        raw = json.loads((session_dir / map_file).read_text(encoding="utf-8"))
        measures = tuple(
            MeasureSpan(
                measure=int(m["measure"]),
                start_master_s=float(m["start_master_s"]),
                end_master_s=float(m["end_master_s"]),
                page=int(m["page"]),
            )
            for m in raw
        )
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        record.warnings.append(f"measure map: {exc}")
        return
    record.measures = measures
