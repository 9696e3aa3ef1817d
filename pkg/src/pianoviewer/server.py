"""REST + WebSocket service surface.

Endpoints:
  GET  /api/sessions                       catalog summaries with filters
  GET  /api/sessions/{id}                  full record (skeleton, measures)
  GET  /api/sessions/{id}/pianoroll        notes overlapping [t0, t1)
  GET  /api/sessions/{id}/pose             interpolated pose at t
  GET  /api/sessions/{id}/series           downsampled joint-axis series
  POST /api/playbacks                      create a (comparison) playback
  POST /api/rescan                         rebuild the catalog index
  GET  /assets/{id}/{file}                 raw asset bytes, Range honored
  WS   /ws/playbacks/{playback_id}         shared transport channel

All times on the wire are "playback seconds": seconds from the start of the
session's four-modality overlap window, so position 0 is the first playable
instant. The server maps these through each modality's clock internally.
"""

from __future__ import annotations

import asyncio
import datetime as dt
import mimetypes
import re
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, WebSocket
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.websockets import WebSocketDisconnect

from .catalog import CatalogQuery, SessionRecord, SessionStatus, Skill, filter_sessions
from .errors import InvalidRangeError, InvalidStateError
from .midi import piano_roll_window
from .motion import joint_series, pose_at
from .service import (
    CatalogState,
    PlaybackRegistry,
    local_to_playback_time,
    parse_wire_command,
    playback_times_to_local,
    state_message,
)
from .timeline import ModalityKind


class CreatePlaybackRequest(BaseModel):
    sources: list[str]


def session_summary(record: SessionRecord) -> dict:
    return {
        "id": record.id,
        "performer_name": record.performer_name,
        "skill": record.skill.value if record.skill else None,
        "recorded_date": record.recorded_date.isoformat()
        if record.recorded_date
        else None,
        "piece": record.piece,
        "status": record.status.value,
        "duration_s": record.duration_s,
        "warning_count": len(record.warnings),
        "thumbnail_url": f"/assets/{record.id}/{record.thumbnail}"
        if record.thumbnail
        else None,
        "modalities": sorted(kind.value for kind in record.asset_files),
    }


def session_detail(record: SessionRecord) -> dict:
    detail = session_summary(record)
    detail["warnings"] = list(record.warnings)
    detail["assets"] = {
        kind.value: f"/assets/{record.id}/{name}"
        for kind, name in record.asset_files.items()
    }
    detail["score_pages"] = [f"/assets/{record.id}/{p}" for p in record.score_pages]
    if record.skeleton is not None:
        detail["skeleton"] = {
            "name": record.skeleton.name,
            "joints": [
                {"name": j.name, "region": j.region.value, "parent": j.parent}
                for j in record.skeleton.joints
            ],
        }
    if record.motion_clip is not None:
        detail["motion"] = {
            "rate_hz": record.motion_clip.rate_hz,
            "frames": record.motion_clip.frame_count,
            "joints": list(record.motion_clip.joint_names),
        }
    detail["note_count"] = len(record.notes)
    # clients need the clocks to map playback time onto media-local time
    detail["tracks"] = {
        kind.value: {
            "offset_s": track.clock.offset_s,
            "scale": track.clock.scale,
            "local_start_s": track.local_start_s,
            "local_end_s": track.local_end_s,
        }
        for kind, track in record.manifest.tracks.items()
    }
    detail["overlap"] = (
        {"start_master_s": record.overlap[0], "end_master_s": record.overlap[1]}
        if record.overlap is not None
        else None
    )
    if record.overlap is not None:
        base = record.overlap[0]
        detail["measures"] = [
            {
                "measure": m.measure,
                "start_s": m.start_master_s - base,
                "end_s": m.end_master_s - base,
                "page": m.page,
            }
            for m in record.measures
        ]
    else:
        detail["measures"] = []
    return detail


_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)$")


def asset_response(path: Path, range_header: Optional[str]) -> Response:
    """Serve file bytes; a valid single Range yields 206 partial content."""
    size = path.stat().st_size
    media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
    match = _RANGE_RE.match(range_header.strip()) if range_header else None
    if match is None:
        return FileResponse(
            path, media_type=media_type, headers={"Accept-Ranges": "bytes"}
        )
    first_raw, last_raw = match.groups()
    if first_raw == "" and last_raw == "":
        raise HTTPException(416, "unsatisfiable range")
    if first_raw == "":  # suffix form bytes=-N: the final N bytes
        length = int(last_raw)
        if length == 0:
            raise HTTPException(416, "unsatisfiable range")
        first = max(size - length, 0)
        last = size - 1
    else:
        first = int(first_raw)
        last = int(last_raw) if last_raw else size - 1
        last = min(last, size - 1)
    if first >= size or first > last:
        raise HTTPException(
            416, "unsatisfiable range", headers={"Content-Range": f"bytes */{size}"}
        )
    with path.open("rb") as f:
        f.seek(first)
        data = f.read(last - first + 1)
    return Response(
        content=data,
        status_code=206,
        media_type=media_type,
        headers={
            "Content-Range": f"bytes {first}-{last}/{size}",
            "Accept-Ranges": "bytes",
        },
    )


def _parse_date(value: Optional[str], label: str) -> Optional[dt.date]:
    if value is None or value == "":
        return None
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise HTTPException(400, f"{label} must be YYYY-MM-DD, got {value!r}")


def create_app(root: Path, frontend_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="pianoviewer", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    catalog = CatalogState(Path(root))
    catalog.rescan()
    playbacks = PlaybackRegistry()
    app.state.catalog = catalog
    app.state.playbacks = playbacks

    def _session_or_404(session_id: str) -> SessionRecord:
        record = catalog.index.get(session_id)
        if record is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return record

    def _ready_or_409(session_id: str) -> SessionRecord:
        record = _session_or_404(session_id)
        if record.status is not SessionStatus.READY:
            raise HTTPException(
                409, f"session {session_id!r} is {record.status.value}; "
                "viewing requires all four modalities aligned"
            )
        return record

    @app.get("/api/sessions")
    def list_sessions(
        skill: Optional[str] = None,
        date_from: Optional[str] = None,
        date_to: Optional[str] = None,
        performer: Optional[str] = None,
        ready_only: bool = False,
    ):
        skill_value = None
        if skill:
            try:
                skill_value = Skill(skill.lower())
            except ValueError:
                raise HTTPException(400, f"unknown skill {skill!r}")
        try:
            query = CatalogQuery(
                skill=skill_value,
                date_from=_parse_date(date_from, "date_from"),
                date_to=_parse_date(date_to, "date_to"),
                performer_substring=performer or None,
            )
        except InvalidRangeError as exc:
            raise HTTPException(400, str(exc))
        records = filter_sessions(catalog.index, query, ready_only=ready_only)
        return {
            "sessions": [session_summary(r) for r in records],
            "scanned_at": catalog.index.scanned_at.isoformat(),
        }

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return session_detail(_session_or_404(session_id))

    @app.get("/api/sessions/{session_id}/pianoroll")
    def get_pianoroll(session_id: str, t0: float, t1: float):
        record = _ready_or_409(session_id)
        track = record.manifest.track(ModalityKind.MIDI)
        try:
            lo = playback_times_to_local(record, ModalityKind.MIDI, t0)
            hi = playback_times_to_local(record, ModalityKind.MIDI, t1)
            notes = piano_roll_window(record.notes, lo, hi)
        except (InvalidRangeError, InvalidStateError) as exc:
            raise HTTPException(400, str(exc))
        base = record.overlap[0]
        return {
            "t0": t0,
            "t1": t1,
            "notes": [
                {
                    "pitch": n.pitch,
                    "velocity": n.velocity,
                    "channel": n.channel,
                    "onset_s": track.clock.offset_s
                    + track.clock.scale * n.onset_s
                    - base,
                    "offset_s": track.clock.offset_s
                    + track.clock.scale * n.offset_s
                    - base,
                }
                for n in notes
            ],
        }

    @app.get("/api/sessions/{session_id}/pose")
    def get_pose(session_id: str, t: float):
        record = _ready_or_409(session_id)
        if record.motion_clip is None:
            raise HTTPException(409, f"session {session_id!r} has no motion clip")
        try:
            local_t = playback_times_to_local(record, ModalityKind.MOTION, t)
            pose = pose_at(record.motion_clip, local_t)
        except (ValueError, InvalidStateError) as exc:
            raise HTTPException(400, str(exc))
        return {"t": t, "pose": pose.tolist()}

    @app.get("/api/sessions/{session_id}/series")
    def get_series(
        session_id: str,
        joint: str,
        axis: str,
        t0: float,
        t1: float,
        max_points: int = Query(default=500, ge=2),
    ):
        record = _ready_or_409(session_id)
        if record.motion_clip is None:
            raise HTTPException(409, f"session {session_id!r} has no motion clip")
        try:
            lo = playback_times_to_local(record, ModalityKind.MOTION, t0)
            hi = playback_times_to_local(record, ModalityKind.MOTION, t1)
            points = joint_series(record.motion_clip, joint, axis, lo, hi, max_points)
        except (InvalidRangeError, InvalidStateError) as exc:
            raise HTTPException(400, str(exc))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return {
            "joint": joint,
            "axis": axis,
            "points": [
                [local_to_playback_time(record, ModalityKind.MOTION, p.t), p.v]
                for p in points
            ],
        }

    @app.post("/api/playbacks", status_code=201)
    def create_playback(body: CreatePlaybackRequest):
        try:
            coordinator = playbacks.create(catalog, body.sources)
        except KeyError as exc:
            raise HTTPException(404, f"unknown session {exc.args[0]!r}")
        except InvalidStateError as exc:
            raise HTTPException(409, str(exc))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        state = coordinator.state
        return {
            "playback_id": state.playback_id,
            "sources": list(state.sources),
            "duration_s": state.duration_s,
            "channel": f"/ws/playbacks/{state.playback_id}",
            "state": state_message(state),
        }

    @app.post("/api/rescan")
    def rescan():
        index = catalog.rescan()
        counts: dict[str, int] = {status.value: 0 for status in SessionStatus}
        for record in index.records:
            counts[record.status.value] += 1
        return {"sessions": len(index.records), "by_status": counts}

    @app.get("/assets/{session_id}/{file_path:path}")
    def get_asset(session_id: str, file_path: str, request: Request):
        record = _session_or_404(session_id)
        base = record.path.resolve()
        target = (record.path / file_path).resolve()
        if base != target and base not in target.parents:
            raise HTTPException(404, "no such asset")
        if not target.is_file():
            raise HTTPException(404, f"no such asset {file_path!r}")
        return asset_response(target, request.headers.get("range"))

    @app.websocket("/ws/playbacks/{playback_id}")
    async def playback_channel(ws: WebSocket, playback_id: str):
        coordinator = playbacks.get(playback_id)
        await ws.accept()
        if coordinator is None:
            await ws.close(code=4404, reason=f"unknown playback {playback_id!r}")
            return
        queue = coordinator.subscribe()

        async def pump():
            while True:
                await ws.send_json(await queue.get())

        sender = asyncio.create_task(pump())
        try:
            await ws.send_json(state_message(coordinator.state))
            while True:
                try:
                    payload = await ws.receive_json()
                except ValueError:
                    await ws.send_json(
                        {"type": "error", "message": "messages must be JSON"}
                    )
                    continue
                try:
                    coordinator.apply(parse_wire_command(payload))
                except (InvalidRangeError, InvalidStateError, ValueError) as exc:
                    await ws.send_json({"type": "error", "message": str(exc)})
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            coordinator.unsubscribe(queue)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="app")

    return app
