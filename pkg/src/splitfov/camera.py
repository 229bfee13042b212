"""Camera pose, stereo rig, and scripted camera paths.

Poses are stored in float32 so that a pose survives the wire format
(3x f32 position, 4x f32 quaternion) bit-exactly: the pixels the server
shades from a received pose match the pixels the client would shade from
its own copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

# Unit-quaternion tolerance: a float64-normalized quaternion rounded to
# float32 stays well inside this, so re-normalization is never triggered
# for well-formed poses and their bits are preserved.
QUAT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class Pose:
    """Camera position (meters) and orientation (unit quaternion x, y, z, w)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float32).reshape(3))
        object.__setattr__(self, "orientation", np.asarray(self.orientation, dtype=np.float32).reshape(4))
        n = float(np.linalg.norm(self.orientation.astype(np.float64)))
        if abs(n - 1.0) > QUAT_NORM_TOL:
            raise ValueError(f"quaternion norm {n!r} deviates from 1 by more than {QUAT_NORM_TOL}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pose):
            return NotImplemented
        return (
            self.position.tobytes() == other.position.tobytes()
            and self.orientation.tobytes() == other.orientation.tobytes()
        )

    def __hash__(self):
        return hash((self.position.tobytes(), self.orientation.tobytes()))


def normalize_quat(q) -> np.ndarray:
    """Returns `q` scaled to unit length (float64 math, float32 result).

    Leaves already-unit float32 quaternions bit-identical: within
    QUAT_NORM_TOL the input is returned unchanged.
    """
    q32 = np.asarray(q, dtype=np.float32).reshape(4)
    n = float(np.linalg.norm(q32.astype(np.float64)))
    if n == 0.0 or not math.isfinite(n):
        raise ValueError("cannot normalize zero or non-finite quaternion")
    if abs(n - 1.0) <= QUAT_NORM_TOL:
        return q32
    return (q32.astype(np.float64) / n).astype(np.float32)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix (3x3 float32) from a unit quaternion (x, y, z, w)."""
    x, y, z, w = (float(v) for v in q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ],
        dtype=np.float32,
    )


def quat_from_matrix(m: np.ndarray) -> np.ndarray:
    """Unit quaternion (x, y, z, w) from a rotation matrix, float64 math."""
    m = np.asarray(m, dtype=np.float64)
    t = m[0, 0] + m[1, 1] + m[2, 2]
    if t > 0:
        s = math.sqrt(t + 1.0) * 2
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    q = np.array([x, y, z, w], dtype=np.float64)
    return (q / np.linalg.norm(q)).astype(np.float32)


def look_at_quat(position, target, up=(0.0, 1.0, 0.0)) -> np.ndarray:
    """Orientation quaternion for a camera at `position` facing `target`.

    Camera space follows the usual convention: looks along -z, +x right,
    +y up. Falls back to the world x axis as "right" when the view
    direction is (anti)parallel to `up`.
    """
    position = np.asarray(position, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    up = np.asarray(up, dtype=np.float64)
    fwd = target - position
    n = np.linalg.norm(fwd)
    if n == 0.0:
        raise ValueError("camera position coincides with look-at target")
    fwd = fwd / n
    right = np.cross(fwd, up)
    rn = np.linalg.norm(right)
    if rn < 1e-12:
        right = np.array([1.0, 0.0, 0.0])
        rn = 1.0
    right = right / rn
    cam_up = np.cross(right, fwd)
    # Columns map camera axes to world: x->right, y->cam_up, z->-fwd.
    m = np.column_stack([right, cam_up, -fwd])
    return quat_from_matrix(m)


@dataclass(frozen=True)
class CameraRig:
    """Stereo eye geometry: eyes sit at +-ipd/2 along the camera's right axis."""

    ipd: float = 0.064
    horizontal_fov: float = 90.0
    near: float = 0.1

    def __post_init__(self):
        if self.ipd < 0:
            raise ValueError(f"ipd must be non-negative, got {self.ipd}")
        if not 0 < self.horizontal_fov < 180:
            raise ValueError(f"horizontal_fov must be in (0, 180), got {self.horizontal_fov}")
        if self.near <= 0:
            raise ValueError(f"near must be positive, got {self.near}")


class PathId(IntEnum):
    """Built-in scripted camera trajectories (wire-stable values)."""

    ORBIT = 0


@dataclass(frozen=True)
class CameraPath:
    """A scripted trajectory; frame k of `frame_count` maps to one Pose."""

    path_id: PathId = PathId.ORBIT
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 3.0
    height: float = 1.2
    frame_count: int = 1000

    def __post_init__(self):
        if self.frame_count < 1:
            raise ValueError(f"frame_count must be at least 1, got {self.frame_count}")
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")


def pose_at(path: CameraPath, frame_id: int) -> Pose:
    """Pose for `frame_id` on `path`; pure and deterministic.

    The orbit path circles the look-at center once over the whole path:
    position = center + (radius*cos t, height, radius*sin t) with
    t = 2*pi*frame_id/frame_count, camera facing the center.
    """
    if not 0 <= frame_id < path.frame_count:
        raise ValueError(f"frame_id {frame_id} out of range for path of {path.frame_count} frames")
    if path.path_id != PathId.ORBIT:
        raise ValueError(f"unknown path_id {path.path_id!r}")
    theta = 2.0 * math.pi * frame_id / path.frame_count
    cx, cy, cz = path.center
    position = np.array(
        [cx + path.radius * math.cos(theta), cy + path.height, cz + path.radius * math.sin(theta)],
        dtype=np.float64,
    )
    orientation = look_at_quat(position, np.array(path.center, dtype=np.float64))
    return Pose(position.astype(np.float32), orientation)


def eye_origin(pose: Pose, rig: CameraRig, eye: int) -> np.ndarray:
    """World-space ray origin for one eye (0 = left, 1 = right), float32."""
    rot = quat_to_matrix(pose.orientation)
    right = rot[:, 0]
    offset = np.float32(rig.ipd) * np.float32(0.5)
    sign = np.float32(-1.0) if eye == 0 else np.float32(1.0)
    return (pose.position + sign * offset * right).astype(np.float32)
