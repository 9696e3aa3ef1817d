"""Motion-capture ingestion and pose queries.

Clips are fixed-rate joint position arrays (frames x joints x 3, meters, in a
right-handed world frame). Poses at arbitrary times come from linear
interpolation; hand-region subsets and min-max downsampled joint series feed
the hand panes and x/y/z line plots. Clips are immutable after parsing.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import InvalidRangeError


class MotionFormatError(ValueError):
    """Motion CSV or skeleton definition violates the expected schema."""


class Region(Enum):
    BODY = "body"
    LEFT_HAND = "left_hand"
    RIGHT_HAND = "right_hand"


@dataclass(frozen=True)
class Joint:
    name: str
    region: Region
    parent: Optional[int]  # index into the skeleton's joint list


@dataclass(frozen=True)
class Skeleton:
    name: str
    joints: tuple[Joint, ...]

    def __post_init__(self):
        names = [j.name for j in self.joints]
        if len(set(names)) != len(names):
            raise MotionFormatError("skeleton joint names must be unique")
        roots = 0
        for i, joint in enumerate(self.joints):
            if joint.parent is None:
                roots += 1
            elif not 0 <= joint.parent < i:
                raise MotionFormatError(
                    f"joint {joint.name!r}: parent index must precede the joint"
                )
        if roots != 1:
            raise MotionFormatError(f"skeleton must have exactly one root, got {roots}")

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    def region_indices(self, region: Region) -> list[int]:
        return [i for i, j in enumerate(self.joints) if j.region == region]


def load_skeleton(source: Union[str, dict]) -> Skeleton:
    """Build a Skeleton from skeleton.json content (text or parsed dict).

    Joints reference their parent by name; the parent must appear earlier in
    the list, and exactly one joint has parent null.
    """
    spec = json.loads(source) if isinstance(source, str) else source
    try:
        name = spec["name"]
        raw_joints = spec["joints"]
    except (KeyError, TypeError) as exc:
        raise MotionFormatError(f"skeleton definition missing field: {exc}") from exc
    index_of: dict[str, int] = {}
    joints: list[Joint] = []
    for i, entry in enumerate(raw_joints):
        try:
            jname = entry["name"]
            region = Region(entry["region"])
            parent_name = entry["parent"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MotionFormatError(f"bad joint entry {i}: {exc}") from exc
        parent = None
        if parent_name is not None:
            if parent_name not in index_of:
                raise MotionFormatError(
                    f"joint {jname!r}: parent {parent_name!r} not defined earlier"
                )
            parent = index_of[parent_name]
        index_of[jname] = i
        joints.append(Joint(name=jname, region=region, parent=parent))
    return Skeleton(name=name, joints=tuple(joints))


@dataclass(frozen=True)
class MotionClip:
    rate_hz: float
    frames: np.ndarray  # (F, J, 3) float64, read-only
    joint_names: tuple[str, ...]
    skeleton_ref: str = ""

    def __post_init__(self):
        if self.rate_hz <= 0 or not math.isfinite(self.rate_hz):
            raise MotionFormatError(f"rate_hz must be finite and > 0: {self.rate_hz}")
        if self.frames.ndim != 3 or self.frames.shape[2] != 3:
            raise MotionFormatError(f"frames must be (F, J, 3): {self.frames.shape}")
        if self.frames.shape[0] < 2:
            raise MotionFormatError("a clip needs at least 2 frames")
        if self.frames.shape[1] != len(self.joint_names):
            raise MotionFormatError("joint count does not match frame width")
        if not np.isfinite(self.frames).all():
            raise MotionFormatError("frames contain non-finite values")
        self.frames.setflags(write=False)

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def joint_count(self) -> int:
        return self.frames.shape[1]

    @property
    def duration_s(self) -> float:
        return (self.frame_count - 1) / self.rate_hz

    def joint_index(self, name: str) -> int:
        try:
            return self.joint_names.index(name)
        except ValueError:
            raise ValueError(f"unknown joint {name!r}") from None


@dataclass(frozen=True)
class SeriesPoint:
    t: float  # local clip seconds
    v: float  # meters


def parse_motion_csv(text: str, skeleton: Skeleton, rate_hz: float) -> MotionClip:
    """Parse `frame,<joint>_x,<joint>_y,<joint>_z,...` rows into a clip.

    The header must cover every skeleton joint exactly once (any column
    order); frame indices must run 0..F-1 with no gaps. Errors name the
    offending row or column.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MotionFormatError("empty motion file") from None
    header = [h.strip() for h in header]
    if not header or header[0] != "frame":
        raise MotionFormatError("first column must be 'frame'")

    expected = {}
    for j, jname in enumerate(skeleton.joint_names):
        for a, axis in enumerate(("x", "y", "z")):
            expected[f"{jname}_{axis}"] = (j, a)
    seen: dict[str, int] = {}
    for col, label in enumerate(header[1:], start=1):
        if label not in expected:
            raise MotionFormatError(f"unexpected column {label!r}")
        if label in seen:
            raise MotionFormatError(f"duplicate column {label!r}")
        seen[label] = col
    missing = sorted(set(expected) - set(seen))
    if missing:
        raise MotionFormatError(f"missing column {missing[0]!r}")

    width = len(header)
    body_start = text.index("\n") + 1
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # loadtxt warns on empty input
            table = np.loadtxt(
                io.StringIO(text[body_start:]), delimiter=",", dtype=np.float64, ndmin=2
            )
        if table.size == 0:
            raise MotionFormatError("need at least 2 frames, got 0")
        if table.shape[1] != width:
            raise ValueError("column count mismatch")
    except ValueError:
        _locate_bad_cell(reader_rows=list(reader), width=width, seen=seen)
        raise MotionFormatError("malformed motion rows")  # pragma: no cover

    if table.shape[0] < 2:
        raise MotionFormatError(f"need at least 2 frames, got {table.shape[0]}")
    indices = table[:, 0]
    if not np.array_equal(indices, np.arange(table.shape[0], dtype=np.float64)):
        bad = int(np.argmax(indices != np.arange(table.shape[0])))
        raise MotionFormatError(f"row {bad}: frame index {indices[bad]} out of sequence")

    # reorder columns into skeleton joint order, (F, J, 3)
    order = [
        seen[f"{name}_{axis}"]
        for name in skeleton.joint_names
        for axis in ("x", "y", "z")
    ]
    frames = table[:, order].reshape(table.shape[0], len(skeleton.joint_names), 3)
    return MotionClip(  # the clip constructor validates finiteness and shape
        rate_hz=rate_hz,
        frames=np.ascontiguousarray(frames),
        joint_names=skeleton.joint_names,
        skeleton_ref=skeleton.name,
    )


def _locate_bad_cell(reader_rows: list, width: int, seen: dict) -> None:
    """Slow path after a bulk parse failure: name the offending row/column."""
    labels = {col: label for label, col in seen.items()}
    rows = [r for r in reader_rows if r]
    if not rows:
        raise MotionFormatError("need at least 2 frames, got 0")
    for r, row in enumerate(rows):
        if len(row) != width:
            raise MotionFormatError(f"row {r}: expected {width} cells, got {len(row)}")
        for col, cell in enumerate(row):
            try:
                float(cell)
            except ValueError:
                label = labels.get(col, "frame")
                raise MotionFormatError(
                    f"row {r}, column {label!r}: non-numeric cell {cell!r}"
                ) from None
    raise MotionFormatError("malformed motion rows")


def pose_at(clip: MotionClip, local_t: float) -> np.ndarray:
    """Interpolated (J, 3) pose at a local time; clamps outside the clip."""
    if not math.isfinite(local_t):
        raise ValueError(f"time must be finite, got {local_t}")
    x = local_t * clip.rate_hz
    if x <= 0.0:
        return clip.frames[0].copy()
    last = clip.frame_count - 1
    if x >= last:
        return clip.frames[last].copy()
    k = int(math.floor(x))
    frac = x - k
    if frac == 0.0:
        return clip.frames[k].copy()
    return (1.0 - frac) * clip.frames[k] + frac * clip.frames[k + 1]


def resample(clip: MotionClip, new_rate_hz: float) -> MotionClip:
    """Clip sampled at k / new_rate_hz for k = 0..floor(duration * new_rate).

    Duration is preserved to within one output frame period.
    """
    if new_rate_hz <= 0 or not math.isfinite(new_rate_hz):
        raise ValueError(f"new_rate_hz must be finite and > 0: {new_rate_hz}")
    count = int(math.floor(clip.duration_s * new_rate_hz)) + 1
    if count < 2:
        raise ValueError(
            f"rate {new_rate_hz} Hz yields {count} frame(s) over "
            f"{clip.duration_s} s; a clip needs at least 2"
        )
    frames = np.stack([pose_at(clip, k / new_rate_hz) for k in range(count)])
    return MotionClip(
        rate_hz=new_rate_hz,
        frames=frames,
        joint_names=clip.joint_names,
        skeleton_ref=clip.skeleton_ref,
    )


def extract_region(clip: MotionClip, skeleton: Skeleton, region: Region) -> MotionClip:
    """Sub-clip containing only the region's joints, order preserved."""
    indices = skeleton.region_indices(region)
    if not indices:
        raise ValueError(f"region {region.value!r} has no joints")
    names = tuple(skeleton.joint_names[i] for i in indices)
    return MotionClip(
        rate_hz=clip.rate_hz,
        frames=clip.frames[:, indices, :].copy(),
        joint_names=names,
        skeleton_ref=clip.skeleton_ref,
    )


_AXIS = {"x": 0, "y": 1, "z": 2}


def joint_series(
    clip: MotionClip,
    joint: str,
    axis: str,
    t0: float,
    t1: float,
    max_points: int,
) -> list[SeriesPoint]:
    """One joint axis over [t0, t1], capped at max_points samples.

    Raw samples are returned when they fit the budget. Otherwise the window
    is split into ceil(max_points / 2) time buckets and each bucket emits its
    min and max in time order, so the plotted line keeps every visual
    extreme; the window's global min and max always survive.
    """
    if t0 >= t1:
        raise InvalidRangeError(f"empty window: t0={t0} >= t1={t1}")
    if max_points < 2:
        raise ValueError(f"max_points must be >= 2, got {max_points}")
    if axis not in _AXIS:
        raise ValueError(f"unknown axis {axis!r}")
    j = clip.joint_index(joint)

    first = max(0, int(math.ceil(t0 * clip.rate_hz - 1e-9)))
    last = min(clip.frame_count - 1, int(math.floor(t1 * clip.rate_hz + 1e-9)))
    if first > last:
        return []
    ticks = np.arange(first, last + 1)
    times = ticks / clip.rate_hz
    values = clip.frames[first : last + 1, j, _AXIS[axis]]

    if len(ticks) <= max_points:
        return [SeriesPoint(t=float(t), v=float(v)) for t, v in zip(times, values)]

    n_buckets = (max_points + 1) // 2
    width = (t1 - t0) / n_buckets
    bucket = np.minimum(((times - t0) / width).astype(int), n_buckets - 1)
    picked: list[int] = []
    for b in range(n_buckets):
        member = np.nonzero(bucket == b)[0]
        if member.size == 0:
            continue
        lo = member[np.argmin(values[member])]
        hi = member[np.argmax(values[member])]
        pair = sorted({int(lo), int(hi)})
        picked.extend(pair)

    if len(picked) > max_points:  # odd budget can overshoot by one point
        vmin_i = min(picked, key=lambda i: values[i])
        vmax_i = max(picked, key=lambda i: values[i])
        for i in reversed(range(len(picked))):
            if picked[i] not in (vmin_i, vmax_i):
                del picked[i]
                break
    return [SeriesPoint(t=float(times[i]), v=float(values[i])) for i in picked]
