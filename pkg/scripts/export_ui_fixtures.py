#!/usr/bin/env python3
"""Export dashboard test fixtures from the synthetic 109-session dataset.

The UI tests run headless against these fixtures: the full catalog listing,
plus per-session details, wire-time notes, joint series and coarse pose
samples for the sessions the workflow test actually opens.
"""

import argparse
import json
import tempfile
from pathlib import Path

from pianoviewer import datagen
from pianoviewer.catalog import SessionStatus, Skill, scan_dataset
from pianoviewer.motion import joint_series, pose_at
from pianoviewer.server import session_detail, session_summary
from pianoviewer.service import local_to_playback_time, playback_times_to_local
from pianoviewer.timeline import ModalityKind, to_master

SERIES_JOINTS = ("right_wrist", "left_wrist")
POSE_RATE_HZ = 10.0


def wire_notes(record):
    clock = record.manifest.track(ModalityKind.MIDI).clock
    base = record.overlap[0]
    return [
        {
            "pitch": n.pitch,
            "velocity": n.velocity,
            "channel": n.channel,
            "onset_s": to_master(clock, n.onset_s) - base,
            "offset_s": to_master(clock, n.offset_s) - base,
        }
        for n in record.notes
    ]


def wire_series(record):
    out = {}
    for joint in SERIES_JOINTS:
        axes = {}
        for axis in ("x", "y", "z"):
            lo = playback_times_to_local(record, ModalityKind.MOTION, 0.0)
            hi = playback_times_to_local(
                record, ModalityKind.MOTION, record.duration_s
            )
            points = joint_series(record.motion_clip, joint, axis, lo, hi, 300)
            axes[axis] = [
                [local_to_playback_time(record, ModalityKind.MOTION, p.t), p.v]
                for p in points
            ]
        out[joint] = axes
    return out


def wire_poses(record):
    times = []
    frames = []
    t = 0.0
    while t <= record.duration_s:
        local = playback_times_to_local(record, ModalityKind.MOTION, t)
        frames.append([[round(v, 5) for v in row] for row in
                       pose_at(record.motion_clip, local).tolist()])
        times.append(round(t, 3))
        t += 1.0 / POSE_RATE_HZ
    return {"times": times, "frames": frames}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1]
        / "frontend" / "tests" / "fixtures" / "dataset.json",
    )
    parser.add_argument("--sessions", type=int, default=109)
    parser.add_argument("--seed", type=int, default=20250109)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as td:
        root = Path(td)
        datagen.make_dataset(root, n_sessions=args.sessions, seed=args.seed)
        index = scan_dataset(root)

        chosen = []
        for skill in (Skill.PROFESSIONAL, Skill.AMATEUR):
            picked = [
                r for r in index.records
                if r.status is SessionStatus.READY and r.skill is skill
            ][:2]
            chosen.extend(picked)

        fixture = {
            "sessions": [session_summary(r) for r in index.records],
            "details": {r.id: session_detail(r) for r in chosen},
            "notes": {r.id: wire_notes(r) for r in chosen},
            "series": {r.id: wire_series(r) for r in chosen},
            "poses": {r.id: wire_poses(r) for r in chosen},
        }
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(fixture))
        size_kb = args.out.stat().st_size / 1024
        print(
            f"wrote {args.out} ({size_kb:.0f} KiB, {len(index.records)} sessions, "
            f"{len(chosen)} detailed)"
        )


if __name__ == "__main__":
    main()
