import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pianoviewer import datagen
from pianoviewer.errors import InvalidRangeError
from pianoviewer.motion import (
    MotionClip,
    MotionFormatError,
    Region,
    Skeleton,
    extract_region,
    joint_series,
    load_skeleton,
    parse_motion_csv,
    pose_at,
    resample,
)

from oracles import window_min_max

TINY = load_skeleton(
    {
        "name": "tiny",
        "joints": [
            {"name": "root", "region": "body", "parent": None},
            {"name": "wrist", "region": "body", "parent": "root"},
            {"name": "thumb", "region": "left_hand", "parent": "wrist"},
            {"name": "index", "region": "left_hand", "parent": "wrist"},
            {"name": "pinky", "region": "right_hand", "parent": "wrist"},
        ],
    }
)

ONE_JOINT = load_skeleton(
    {"name": "dot", "joints": [{"name": "p", "region": "body", "parent": None}]}
)


def _clip(frames, names=("p",), rate=100.0):
    return MotionClip(
        rate_hz=rate,
        frames=np.asarray(frames, dtype=np.float64),
        joint_names=tuple(names),
        skeleton_ref="test",
    )


def _line_clip(n_frames=11, rate=100.0, v=(1.0, -2.0, 0.5)):
    """Positions exactly linear in time: p(t) = v * t."""
    t = np.arange(n_frames) / rate
    frames = np.stack([np.outer(t, np.asarray(v))], axis=1).reshape(n_frames, 1, 3)
    return _clip(frames, rate=rate)


# --- skeleton definitions ---------------------------------------------------


def test_skeleton_json_round_trip():
    spec = datagen.piano_skeleton_spec()
    skeleton = load_skeleton(json.dumps(spec))
    assert skeleton.name == spec["name"]
    assert len(skeleton.joints) == len(spec["joints"])
    assert skeleton.joints[0].parent is None
    assert {j.region for j in skeleton.joints} == set(Region)


def test_skeleton_rejects_duplicate_names():
    with pytest.raises(MotionFormatError, match="unique"):
        load_skeleton(
            {
                "name": "bad",
                "joints": [
                    {"name": "a", "region": "body", "parent": None},
                    {"name": "a", "region": "body", "parent": "a"},
                ],
            }
        )


def test_skeleton_rejects_forward_parent():
    with pytest.raises(MotionFormatError, match="not defined earlier"):
        load_skeleton(
            {
                "name": "bad",
                "joints": [
                    {"name": "a", "region": "body", "parent": "b"},
                    {"name": "b", "region": "body", "parent": None},
                ],
            }
        )


def test_skeleton_requires_single_root():
    with pytest.raises(MotionFormatError, match="root"):
        load_skeleton(
            {
                "name": "bad",
                "joints": [
                    {"name": "a", "region": "body", "parent": None},
                    {"name": "b", "region": "body", "parent": None},
                ],
            }
        )


def test_skeleton_rejects_unknown_region():
    with pytest.raises(MotionFormatError):
        load_skeleton(
            {"name": "bad", "joints": [{"name": "a", "region": "tail", "parent": None}]}
        )


# --- CSV parsing ------------------------------------------------------------


def test_parse_minimal_two_frames():
    text = "frame,p_x,p_y,p_z\n0,0,0,0\n1,1,0,0\n"
    clip = parse_motion_csv(text, ONE_JOINT, rate_hz=100.0)
    assert clip.frame_count == 2
    assert clip.duration_s == pytest.approx(0.01)
    assert clip.frames[1, 0, 0] == 1.0


def test_parse_missing_column():
    text = "frame,p_x,p_y\n0,0,0\n1,1,0\n"
    with pytest.raises(MotionFormatError, match="p_z"):
        parse_motion_csv(text, ONE_JOINT, rate_hz=100.0)


def test_parse_unexpected_column():
    text = "frame,p_x,p_y,p_z,q_x\n0,0,0,0,0\n1,1,0,0,0\n"
    with pytest.raises(MotionFormatError, match="q_x"):
        parse_motion_csv(text, ONE_JOINT, rate_hz=100.0)


def test_parse_non_numeric_cell_names_row_and_column():
    text = "frame,p_x,p_y,p_z\n0,0,0,0\n1,oops,0,0\n"
    with pytest.raises(MotionFormatError, match=r"row 1.*p_x.*oops"):
        parse_motion_csv(text, ONE_JOINT, rate_hz=100.0)


def test_parse_frame_index_gap():
    text = "frame,p_x,p_y,p_z\n0,0,0,0\n2,1,0,0\n"
    with pytest.raises(MotionFormatError, match="out of sequence"):
        parse_motion_csv(text, ONE_JOINT, rate_hz=100.0)


def test_parse_requires_two_frames():
    text = "frame,p_x,p_y,p_z\n0,0,0,0\n"
    with pytest.raises(MotionFormatError, match="at least 2"):
        parse_motion_csv(text, ONE_JOINT, rate_hz=100.0)


def test_parse_crlf_and_column_order():
    text = "frame,p_y,p_x,p_z\r\n0,1,2,3\r\n1,4,5,6\r\n"
    clip = parse_motion_csv(text, ONE_JOINT, rate_hz=50.0)
    assert clip.frames[0].tolist() == [[2.0, 1.0, 3.0]]
    assert clip.frames[1].tolist() == [[5.0, 4.0, 6.0]]


def test_parse_round_trip_large(rng):
    names = TINY.joint_names
    rows = datagen.random_motion_frames(rng, len(names), 1000)
    text = datagen.write_motion_csv(rows, names)
    clip = parse_motion_csv(text, TINY, rate_hz=120.0)
    assert clip.frame_count == 1000
    expected = np.asarray(rows, dtype=np.float64).reshape(1000, len(names), 3)
    np.testing.assert_array_equal(clip.frames, expected)


# --- pose interpolation -----------------------------------------------------


def test_pose_at_knot_point():
    clip = _clip([[[0, 0, 0]], [[1, 0, 0]], [[3, 0, 0]]])
    np.testing.assert_allclose(pose_at(clip, 0.01), [[1, 0, 0]])


def test_pose_at_midpoint():
    clip = _clip([[[0, 0, 0]], [[1, 0, 0]]])
    np.testing.assert_allclose(pose_at(clip, 0.005), [[0.5, 0, 0]])


def test_pose_at_clamps_before_and_after():
    clip = _clip([[[0, 0, 0]], [[1, 0, 0]]])
    np.testing.assert_allclose(pose_at(clip, -1.0), [[0, 0, 0]])
    np.testing.assert_allclose(pose_at(clip, 99.0), [[1, 0, 0]])


def test_pose_at_rejects_non_finite():
    clip = _clip([[[0, 0, 0]], [[1, 0, 0]]])
    with pytest.raises(ValueError):
        pose_at(clip, math.nan)


@given(st.floats(0.0, 0.1), st.floats(1e-9, 1e-6))
def test_pose_at_continuity(t, eps):
    clip = _clip(np.arange(12 * 3, dtype=float).reshape(12, 1, 3) ** 1.5, rate=100.0)
    max_slope = np.abs(np.diff(clip.frames, axis=0)).max() * clip.rate_hz
    delta = np.abs(pose_at(clip, t + eps) - pose_at(clip, t)).max()
    assert delta <= max_slope * eps + 1e-12


# --- resampling -------------------------------------------------------------


def test_resample_identity(rng):
    rows = datagen.random_motion_frames(rng, 2, 50)
    clip = _clip(np.asarray(rows).reshape(50, 2, 3), names=("a", "b"), rate=60.0)
    again = resample(clip, 60.0)
    assert again.frame_count == clip.frame_count
    assert np.abs(again.frames - clip.frames).max() <= 1e-6


def test_resample_halving_picks_every_other_frame(rng):
    rows = datagen.random_motion_frames(rng, 1, 40)
    clip = _clip(np.asarray(rows).reshape(40, 1, 3), rate=100.0)
    half = resample(clip, 50.0)
    assert half.frame_count == 20
    for k in range(half.frame_count):
        np.testing.assert_allclose(half.frames[k], clip.frames[2 * k], atol=1e-9)


def test_resample_upsampling_linear_trajectory_exact():
    clip = _line_clip(n_frames=11, rate=100.0, v=(1.0, -2.0, 0.5))
    up = resample(clip, 200.0)
    assert up.frame_count == 21
    for k in range(up.frame_count):
        t = k / 200.0
        np.testing.assert_allclose(
            up.frames[k], [[1.0 * t, -2.0 * t, 0.5 * t]], atol=1e-9
        )


def test_resample_preserves_duration_within_one_period():
    clip = _line_clip(n_frames=31, rate=100.0)  # 0.30 s
    down = resample(clip, 7.0)
    assert abs(down.duration_s - clip.duration_s) <= 1.0 / 7.0


def test_resample_rejects_rates_that_leave_one_frame():
    clip = _line_clip(n_frames=2, rate=100.0)  # 0.01 s
    with pytest.raises(ValueError):
        resample(clip, 10.0)


# --- region extraction ------------------------------------------------------


def _tiny_clip(rng, n_frames=20):
    rows = datagen.random_motion_frames(rng, len(TINY.joint_names), n_frames)
    return parse_motion_csv(
        datagen.write_motion_csv(rows, TINY.joint_names), TINY, rate_hz=30.0
    )


def test_extract_region_selects_columns(rng):
    clip = _tiny_clip(rng)
    left = extract_region(clip, TINY, Region.LEFT_HAND)
    assert left.joint_names == ("thumb", "index")
    np.testing.assert_array_equal(left.frames, clip.frames[:, 2:4, :])
    assert left.rate_hz == clip.rate_hz
    assert left.frame_count == clip.frame_count


def test_extract_region_whole_skeleton_single_region(rng):
    clip = _line_clip(n_frames=5)
    whole = extract_region(clip, ONE_JOINT, Region.BODY)
    np.testing.assert_array_equal(whole.frames, clip.frames)


def test_extract_region_empty_region_errors():
    clip = _line_clip(n_frames=5)
    with pytest.raises(ValueError, match="no joints"):
        extract_region(clip, ONE_JOINT, Region.LEFT_HAND)


def test_extract_region_commutes_with_pose(rng):
    clip = _tiny_clip(rng)
    right = extract_region(clip, TINY, Region.RIGHT_HAND)
    for t in (0.0, 0.123, 0.31, 5.0):
        via_region = pose_at(right, t)
        via_rows = pose_at(clip, t)[[4], :]
        np.testing.assert_array_equal(via_region, via_rows)


# --- joint series -----------------------------------------------------------


def test_series_under_budget_returns_raw(rng):
    clip = _tiny_clip(rng)  # 20 frames at 30 Hz
    points = joint_series(clip, "wrist", "x", 0.0, 10.0, max_points=100)
    assert len(points) == 20
    assert [p.v for p in points] == clip.frames[:, 1, 0].tolist()


def test_series_downsampled_keeps_window_extremes(rng):
    rows = datagen.random_motion_frames(rng, 1, 1000)
    clip = _clip(np.asarray(rows).reshape(1000, 1, 3), rate=100.0)
    points = joint_series(clip, "p", "y", 0.0, 10.0, max_points=100)
    assert 2 <= len(points) <= 100
    values = clip.frames[:, 0, 1]
    lo, hi = window_min_max(values.tolist())
    got_values = [p.v for p in points]
    assert lo in got_values and hi in got_values


def test_series_constant_signal():
    frames = np.ones((500, 1, 3))
    clip = _clip(frames, rate=100.0)
    points = joint_series(clip, "p", "z", 0.0, 5.0, max_points=10)
    assert len(points) <= 10
    assert all(p.v == 1.0 for p in points)


def test_series_unknown_joint_or_axis():
    clip = _line_clip()
    with pytest.raises(ValueError, match="unknown joint"):
        joint_series(clip, "nope", "x", 0.0, 1.0, 10)
    with pytest.raises(ValueError, match="axis"):
        joint_series(clip, "p", "w", 0.0, 1.0, 10)


def test_series_invalid_range():
    clip = _line_clip()
    with pytest.raises(InvalidRangeError):
        joint_series(clip, "p", "x", 1.0, 1.0, 10)


def test_series_outside_span_is_empty():
    clip = _line_clip(n_frames=11, rate=100.0)  # spans [0, 0.1]
    assert joint_series(clip, "p", "x", 5.0, 6.0, 10) == []


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_series_properties(data):
    n = data.draw(st.integers(5, 400))
    seed = data.draw(st.integers(0, 2**16))
    rows = datagen.random_motion_frames(random.Random(seed), 1, n)
    clip = _clip(np.asarray(rows).reshape(n, 1, 3), rate=50.0)
    t0 = data.draw(st.floats(-1.0, clip.duration_s))
    t1 = t0 + data.draw(st.floats(0.05, 4.0))
    max_points = data.draw(st.integers(2, 60))
    points = joint_series(clip, "p", "x", t0, t1, max_points)
    assert len(points) <= max_points
    times = [p.t for p in points]
    assert times == sorted(times)
    assert all(t0 - 1e-9 <= t <= t1 + 1e-9 for t in times)
    # window extremes survive downsampling
    first = max(0, math.ceil(t0 * 50.0 - 1e-9))
    last = min(n - 1, math.floor(t1 * 50.0 + 1e-9))
    if first <= last:
        raw = clip.frames[first : last + 1, 0, 0].tolist()
        lo, hi = window_min_max(raw)
        got = [p.v for p in points]
        assert lo in got and hi in got
    else:
        assert points == []
