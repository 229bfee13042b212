"""Image-space split geometry: centered foveal rect, reduced peripheral dims.

The stereo frame is two side-by-side eye viewports. Each eye gets a
centered foveal rectangle rendered at full sampling rate; everything else
is peripheral and rendered into a buffer scaled down by `periph_scale`.
Odd centering remainders floor toward the top-left.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .image import Rect


class Eye(IntEnum):
    """Wire-stable eye indices."""

    LEFT = 0
    RIGHT = 1


class PartitionError(ValueError):
    """A PartitionSpec violates its invariants."""


@dataclass(frozen=True)
class PartitionSpec:
    """Dimensions of the foveal/peripheral split.

    full_w, full_h: the stereo frame; eye_w, eye_h: one eye's viewport
    (eye_w = full_w / 2); fov_w, fov_h: the foveal rectangle per eye;
    periph_scale: sampling-rate fraction for the peripheral buffer.
    """

    full_w: int
    full_h: int
    eye_w: int
    eye_h: int
    fov_w: int
    fov_h: int
    periph_scale: float

    @classmethod
    def from_full(cls, full_w: int, full_h: int, fov_w: int, fov_h: int, periph_scale: float) -> "PartitionSpec":
        return cls(full_w, full_h, full_w // 2, full_h, fov_w, fov_h, periph_scale)


# The dimensions the system defaults to: 2400x1080 stereo (1200x1080 per
# eye), 512x360 fovea per eye, periphery sampled at 0.6 into 1440x648.
DEFAULT_SPEC = PartitionSpec(2400, 1080, 1200, 1080, 512, 360, 0.6)


def validate(spec: PartitionSpec) -> list[str]:
    """Returns every violated invariant (empty list means the spec is valid)."""
    violations = []
    for name in ("full_w", "full_h", "eye_w", "eye_h", "fov_w", "fov_h"):
        if getattr(spec, name) < 1:
            violations.append(f"{name} must be at least 1")
    if spec.full_w != 2 * spec.eye_w:
        violations.append("full width must be twice the eye width")
    if spec.eye_h != spec.full_h:
        violations.append("eye height must equal full height for side-by-side stereo")
    if spec.fov_w > spec.eye_w:
        violations.append("foveal width exceeds eye width")
    if spec.fov_h > spec.eye_h:
        violations.append("foveal height exceeds eye height")
    if not 0.0 < spec.periph_scale <= 1.0:
        violations.append("peripheral scale must be in (0, 1]")
    return violations


def require_valid(spec: PartitionSpec) -> PartitionSpec:
    """Raises PartitionError listing all violations; returns the spec if valid."""
    violations = validate(spec)
    if violations:
        raise PartitionError("; ".join(violations))
    return spec


def foveal_rect(spec: PartitionSpec, eye: Eye) -> Rect:
    """The eye's centered foveal rectangle in per-eye coordinates."""
    require_valid(spec)
    Eye(eye)
    return Rect(
        (spec.eye_w - spec.fov_w) // 2,
        (spec.eye_h - spec.fov_h) // 2,
        spec.fov_w,
        spec.fov_h,
    )


def foveal_rect_stereo(spec: PartitionSpec, eye: Eye) -> Rect:
    """Same rectangle in stereo-frame coordinates (right eye shifted by eye_w)."""
    r = foveal_rect(spec, eye)
    if Eye(eye) == Eye.RIGHT:
        return Rect(r.x + spec.eye_w, r.y, r.w, r.h)
    return r


def reduced_dims(spec: PartitionSpec) -> tuple[int, int]:
    """Peripheral buffer dimensions: round(full * scale), clamped to >= 1.

    Rounding is Python's round (ties to even), matching the renderer's
    reduced-buffer sizing.
    """
    require_valid(spec)
    return (
        max(1, round(spec.full_w * spec.periph_scale)),
        max(1, round(spec.full_h * spec.periph_scale)),
    )
