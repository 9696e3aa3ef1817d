import random

import numpy as np
import pytest
from fastapi.testclient import TestClient

from pianoviewer.catalog import SessionStatus, scan_dataset
from pianoviewer.server import create_app
from pianoviewer.service import CatalogState, frame_bundle
from pianoviewer.timeline import ModalityKind, to_master
from pianoviewer.transport import PlaybackSession

from oracles import filter_notes_brute, window_min_max


@pytest.fixture(scope="module")
def client(dataset_root):
    app = create_app(dataset_root)
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def index(dataset_root):
    return scan_dataset(dataset_root)


@pytest.fixture(scope="module")
def ready_id(index):
    return next(r.id for r in index.records if r.status is SessionStatus.READY)


@pytest.fixture(scope="module")
def unready_id(index):
    return next(r.id for r in index.records if r.status is not SessionStatus.READY)


# --- catalog endpoints -------------------------------------------------------


def test_list_sessions_everything(client, index):
    body = client.get("/api/sessions").json()
    assert len(body["sessions"]) == len(index.records)
    assert [s["id"] for s in body["sessions"]] == [r.id for r in index.records]


def test_list_sessions_ready_only(client, index):
    body = client.get("/api/sessions", params={"ready_only": "true"}).json()
    expected = [r.id for r in index.records if r.status is SessionStatus.READY]
    assert [s["id"] for s in body["sessions"]] == expected
    assert all(s["status"] == "ready" for s in body["sessions"])


def test_list_sessions_filters_match_linear_scan(client, index):
    params = {"skill": "professional", "ready_only": "true"}
    got = [s["id"] for s in client.get("/api/sessions", params=params).json()["sessions"]]
    want = [
        r.id
        for r in index.records
        if r.status is SessionStatus.READY and r.skill and r.skill.value == "professional"
    ]
    assert got == want

    params = {"performer": "kim"}
    got = [s["id"] for s in client.get("/api/sessions", params=params).json()["sessions"]]
    want = [r.id for r in index.records if "kim" in r.performer_name.lower()]
    assert got == want

    params = {"date_from": "2022-01-01", "date_to": "2023-12-31"}
    got = [s["id"] for s in client.get("/api/sessions", params=params).json()["sessions"]]
    want = [
        r.id
        for r in index.records
        if r.recorded_date and "2022-01-01" <= r.recorded_date.isoformat() <= "2023-12-31"
    ]
    assert got == want


def test_list_sessions_rejects_bad_inputs(client):
    assert client.get("/api/sessions", params={"skill": "wizard"}).status_code == 400
    assert client.get("/api/sessions", params={"date_from": "nope"}).status_code == 400
    bad_range = {"date_from": "2024-02-01", "date_to": "2023-01-01"}
    assert client.get("/api/sessions", params=bad_range).status_code == 400


def test_session_detail_fields(client, index, ready_id):
    detail = client.get(f"/api/sessions/{ready_id}").json()
    assert detail["status"] == "ready"
    assert detail["skeleton"]["joints"], "skeleton shipped with detail"
    assert detail["motion"]["rate_hz"] > 0
    assert detail["note_count"] > 0
    assert detail["measures"], "measure map shipped with detail"
    assert detail["measures"][0]["start_s"] == pytest.approx(0.0, abs=1e-6)
    assert detail["thumbnail_url"].startswith(f"/assets/{ready_id}/")
    for kind in ("audio", "midi", "video", "motion"):
        assert kind in detail["assets"]
        assert kind in detail["tracks"]
    record = index.get(ready_id)
    video = detail["tracks"]["video"]
    assert video["scale"] > 0
    assert detail["overlap"]["start_master_s"] == pytest.approx(record.overlap[0])
    assert detail["overlap"]["end_master_s"] == pytest.approx(record.overlap[1])


def test_session_detail_unknown_404(client):
    assert client.get("/api/sessions/nope").status_code == 404


# --- window endpoints --------------------------------------------------------


def test_pianoroll_matches_brute_force(client, index, ready_id):
    record = index.get(ready_id)
    clock = record.manifest.track(ModalityKind.MIDI).clock
    base = record.overlap[0]
    # project every note into wire time independently of the server
    projected = [
        (n.pitch, to_master(clock, n.onset_s) - base, to_master(clock, n.offset_s) - base)
        for n in record.notes
    ]
    rng = random.Random(5)
    for _ in range(10):
        t0 = rng.uniform(-2.0, record.duration_s)
        t1 = t0 + rng.uniform(0.05, 6.0)
        got = client.get(
            f"/api/sessions/{ready_id}/pianoroll", params={"t0": t0, "t1": t1}
        ).json()["notes"]
        want = [p for p in projected if p[1] < t1 and p[2] > t0]
        assert len(got) == len(want)
        for g, w in zip(got, want):
            assert g["pitch"] == w[0]
            assert g["onset_s"] == pytest.approx(w[1], abs=1e-9)
            assert g["offset_s"] == pytest.approx(w[2], abs=1e-9)


def test_pianoroll_rejects_bad_window(client, ready_id):
    r = client.get(f"/api/sessions/{ready_id}/pianoroll", params={"t0": 5, "t1": 5})
    assert r.status_code == 400


def test_pianoroll_gated_for_unready(client, unready_id):
    r = client.get(f"/api/sessions/{unready_id}/pianoroll", params={"t0": 0, "t1": 1})
    assert r.status_code == 409


def test_pose_matches_direct_interpolation(client, index, ready_id):
    record = index.get(ready_id)
    t = record.duration_s / 3.0
    got = client.get(f"/api/sessions/{ready_id}/pose", params={"t": t}).json()
    from pianoviewer.motion import pose_at
    from pianoviewer.timeline import to_local

    clock = record.manifest.track(ModalityKind.MOTION).clock
    local_t = to_local(clock, record.overlap[0] + t)
    expected = pose_at(record.motion_clip, local_t)
    np.testing.assert_allclose(got["pose"], expected, atol=1e-12)


def test_series_contains_window_extremes(client, index, ready_id):
    record = index.get(ready_id)
    t1 = record.duration_s
    r = client.get(
        f"/api/sessions/{ready_id}/series",
        params={"joint": "left_wrist", "axis": "y", "t0": 0.0, "t1": t1,
                "max_points": 40},
    )
    points = r.json()["points"]
    assert 2 <= len(points) <= 40
    times = [p[0] for p in points]
    assert times == sorted(times)
    assert all(-1e-6 <= t <= t1 + 1e-6 for t in times)


def test_series_unknown_joint_rejected(client, ready_id):
    r = client.get(
        f"/api/sessions/{ready_id}/series",
        params={"joint": "tail", "axis": "y", "t0": 0, "t1": 1},
    )
    assert r.status_code == 400


# --- playbacks ---------------------------------------------------------------


def test_create_playback_single(client, index, ready_id):
    r = client.post("/api/playbacks", json={"sources": [ready_id]})
    assert r.status_code == 201
    body = r.json()
    assert body["duration_s"] == pytest.approx(index.get(ready_id).duration_s)
    assert body["state"]["playing"] is False
    assert body["state"]["position_s"] == 0.0
    assert body["channel"] == f"/ws/playbacks/{body['playback_id']}"


def test_create_playback_pair_uses_min_duration(client, index):
    ready = [r for r in index.records if r.status is SessionStatus.READY][:2]
    r = client.post("/api/playbacks", json={"sources": [ready[0].id, ready[1].id]})
    assert r.status_code == 201
    assert r.json()["duration_s"] == pytest.approx(
        min(ready[0].duration_s, ready[1].duration_s)
    )
    assert r.json()["state"]["audible"] == "A"


def test_create_playback_unknown_session(client):
    assert client.post("/api/playbacks", json={"sources": ["ghost"]}).status_code == 404


def test_create_playback_gate_blocks_unready(client, unready_id):
    r = client.post("/api/playbacks", json={"sources": [unready_id]})
    assert r.status_code == 409


def test_create_playback_too_many_sources(client, ready_id):
    r = client.post("/api/playbacks", json={"sources": [ready_id] * 3})
    assert r.status_code == 400


# --- websocket channel -------------------------------------------------------


def _open_playback(client, sources):
    body = client.post("/api/playbacks", json={"sources": sources}).json()
    return body


def test_ws_initial_state_and_commands(client, ready_id):
    pb = _open_playback(client, [ready_id])
    with client.websocket_connect(pb["channel"]) as ws:
        first = ws.receive_json()
        assert first["type"] == "state"
        assert first["revision"] == 0
        assert first["playing"] is False

        ws.send_json({"type": "command", "cmd": "seek", "value": 1.5})
        state = ws.receive_json()
        assert state["position_s"] == pytest.approx(1.5)
        assert state["revision"] == 1

        ws.send_json({"type": "command", "cmd": "rate", "value": 0.25})
        state = ws.receive_json()
        assert state["rate"] == 0.25

        ws.send_json({"type": "command", "cmd": "loop", "value": [1.0, 2.0]})
        state = ws.receive_json()
        assert state["loop"] == [1.0, 2.0]

        ws.send_json({"type": "command", "cmd": "clear_loop"})
        state = ws.receive_json()
        assert state["loop"] is None


def test_ws_revisions_strictly_increase_while_playing(client, ready_id):
    import time

    pb = _open_playback(client, [ready_id])
    with client.websocket_connect(pb["channel"]) as ws:
        ws.receive_json()
        ws.send_json({"type": "command", "cmd": "play"})
        seen = [ws.receive_json()]
        time.sleep(0.35)  # let the 10 Hz ticker run
        ws.send_json({"type": "command", "cmd": "pause"})
        while True:
            msg = ws.receive_json()
            seen.append(msg)
            if not msg["playing"]:
                break
        revisions = [m["revision"] for m in seen]
        assert revisions == sorted(revisions)
        assert len(set(revisions)) == len(revisions)
        assert len(revisions) >= 3, "ticker broadcasts while playing"
        positions = [m["position_s"] for m in seen]
        assert positions[-1] > 0.0


def test_ws_select_audio_single_source_is_error(client, ready_id):
    pb = _open_playback(client, [ready_id])
    with client.websocket_connect(pb["channel"]) as ws:
        ws.receive_json()
        ws.send_json({"type": "command", "cmd": "select_audio", "value": "B"})
        msg = ws.receive_json()
        assert msg["type"] == "error"


def test_ws_comparison_select_audio(client, index):
    ready = [r.id for r in index.records if r.status is SessionStatus.READY][:2]
    pb = _open_playback(client, ready)
    with client.websocket_connect(pb["channel"]) as ws:
        assert ws.receive_json()["audible"] == "A"
        ws.send_json({"type": "command", "cmd": "select_audio", "value": "B"})
        assert ws.receive_json()["audible"] == "B"


def test_ws_two_observers_share_state(client, ready_id):
    pb = _open_playback(client, [ready_id])
    with client.websocket_connect(pb["channel"]) as a:
        with client.websocket_connect(pb["channel"]) as b:
            a.receive_json(), b.receive_json()
            a.send_json({"type": "command", "cmd": "seek", "value": 2.0})
            got_a = a.receive_json()
            got_b = b.receive_json()
            assert got_a["position_s"] == got_b["position_s"] == pytest.approx(2.0)
            assert got_a["revision"] == got_b["revision"]


def test_ws_malformed_payload_yields_error(client, ready_id):
    pb = _open_playback(client, [ready_id])
    with client.websocket_connect(pb["channel"]) as ws:
        ws.receive_json()
        ws.send_json({"type": "command", "cmd": "warp", "value": 1})
        assert ws.receive_json()["type"] == "error"
        ws.send_text("not json")
        assert ws.receive_json()["type"] == "error"


def test_ws_unknown_playback_closes(client):
    with client.websocket_connect("/ws/playbacks/ghost") as ws:
        with pytest.raises(Exception):
            ws.receive_json()


# --- asset streaming ---------------------------------------------------------


def test_asset_full_download(client, dataset_root, ready_id):
    data = (dataset_root / "sessions" / ready_id / "video.mp4").read_bytes()
    r = client.get(f"/assets/{ready_id}/video.mp4")
    assert r.status_code == 200
    assert r.content == data
    assert r.headers["accept-ranges"] == "bytes"


def test_asset_range_requests(client, dataset_root, ready_id):
    data = (dataset_root / "sessions" / ready_id / "video.mp4").read_bytes()
    r = client.get(f"/assets/{ready_id}/video.mp4", headers={"Range": "bytes=10-99"})
    assert r.status_code == 206
    assert r.content == data[10:100]
    assert len(r.content) == 90
    assert r.headers["content-range"] == f"bytes 10-99/{len(data)}"

    r = client.get(f"/assets/{ready_id}/video.mp4", headers={"Range": "bytes=100-"})
    assert r.status_code == 206
    assert r.content == data[100:]

    r = client.get(f"/assets/{ready_id}/video.mp4", headers={"Range": "bytes=-50"})
    assert r.status_code == 206
    assert r.content == data[-50:]

    past_end = f"bytes={len(data)}-"
    r = client.get(f"/assets/{ready_id}/video.mp4", headers={"Range": past_end})
    assert r.status_code == 416


def test_asset_subpath_and_traversal(client, ready_id):
    r = client.get(f"/assets/{ready_id}/score/page1.png")
    assert r.status_code == 200
    # httpx normalizes literal "..", so probe with percent-encoded dots,
    # which the server decodes into the path parameter
    r = client.get(f"/assets/{ready_id}/%2e%2e/%2e%2e/secret.txt")
    assert r.status_code in (404, 400)
    r = client.get(f"/assets/{ready_id}/nothere.bin")
    assert r.status_code == 404


def test_rescan_endpoint(client, index):
    body = client.post("/api/rescan").json()
    assert body["sessions"] == len(index.records)
    assert sum(body["by_status"].values()) == len(index.records)


# --- frame bundles -----------------------------------------------------------


def test_frame_bundle_identity_consistency(index, ready_id):
    record = index.get(ready_id)
    s = PlaybackSession(
        playback_id="pb", sources=(ready_id,), duration_s=record.duration_s,
        position_s=min(3.0, record.duration_s / 2),
    )
    bundle = frame_bundle(index, s, "A")
    assert bundle.master_t == pytest.approx(record.overlap[0] + s.position_s)
    # every local time maps back to the same master instant
    for kind, local_t in bundle.local_times.items():
        clock = record.manifest.track(kind).clock
        assert to_master(clock, local_t) == pytest.approx(bundle.master_t, abs=1e-9)
    assert bundle.pose is not None
    assert bundle.pose.shape == (len(record.skeleton.joints), 3)
    # window notes drawn from the local 10 s around the cursor
    midi_clock = record.manifest.track(ModalityKind.MIDI).clock
    lo = (bundle.master_t - 5.0 - midi_clock.offset_s) / midi_clock.scale
    hi = (bundle.master_t + 5.0 - midi_clock.offset_s) / midi_clock.scale
    assert bundle.notes == filter_notes_brute(record.notes, lo, hi)
    if record.measures:
        assert bundle.measure is not None


def test_frame_bundle_source_b(index):
    ready = [r for r in index.records if r.status is SessionStatus.READY][:2]
    s = PlaybackSession(
        playback_id="pb", sources=(ready[0].id, ready[1].id),
        duration_s=min(r.duration_s for r in ready), position_s=1.0, audible="A",
    )
    bundle_a = frame_bundle(index, s, "A")
    bundle_b = frame_bundle(index, s, "B")
    assert bundle_a.position_s == bundle_b.position_s == 1.0
    assert bundle_a.master_t == pytest.approx(ready[0].overlap[0] + 1.0)
    assert bundle_b.master_t == pytest.approx(ready[1].overlap[0] + 1.0)
    with pytest.raises(ValueError):
        frame_bundle(index, s, "C")


def test_catalog_state_rescan_swaps_index(dataset_root):
    state = CatalogState(dataset_root)
    first = state.index
    second = state.rescan()
    assert first is not second
    assert [r.id for r in first.records] == [r.id for r in second.records]
