import numpy as np
import pytest
from hypothesis import given, strategies as st

from splitfov.image import Rect
from splitfov.partition import (
    DEFAULT_SPEC,
    Eye,
    PartitionError,
    PartitionSpec,
    foveal_rect,
    foveal_rect_stereo,
    reduced_dims,
    require_valid,
    validate,
)


def spec_strategy():
    """Valid specs: even stereo width, fovea fits inside one eye."""

    @st.composite
    def build(draw):
        eye_w = draw(st.integers(2, 600))
        full_h = draw(st.integers(2, 600))
        fov_w = draw(st.integers(1, eye_w))
        fov_h = draw(st.integers(1, full_h))
        scale = draw(st.floats(min_value=0.05, max_value=1.0,
                               allow_nan=False, allow_infinity=False))
        return PartitionSpec.from_full(2 * eye_w, full_h, fov_w, fov_h, scale)

    return build()


class TestDefaults:
    def test_default_dimensions(self):
        s = DEFAULT_SPEC
        assert (s.full_w, s.full_h) == (2400, 1080)
        assert (s.eye_w, s.eye_h) == (1200, 1080)
        assert (s.fov_w, s.fov_h) == (512, 360)
        assert s.periph_scale == 0.6

    def test_default_reduced_buffer(self):
        assert reduced_dims(DEFAULT_SPEC) == (1440, 648)

    def test_default_is_valid(self):
        assert validate(DEFAULT_SPEC) == []

    def test_default_foveal_rects(self):
        assert foveal_rect(DEFAULT_SPEC, Eye.LEFT) == Rect(344, 360, 512, 360)
        assert foveal_rect_stereo(DEFAULT_SPEC, Eye.RIGHT) == Rect(1544, 360, 512, 360)


class TestValidate:
    def test_oversized_fovea_message(self):
        s = PartitionSpec.from_full(2400, 1080, 1300, 360, 0.6)
        msgs = validate(s)
        assert any("foveal width exceeds eye width" in m for m in msgs)
        with pytest.raises(PartitionError):
            require_valid(s)

    def test_all_violations_reported(self):
        s = PartitionSpec.from_full(2400, 1080, 1300, 1200, 1.5)
        msgs = validate(s)
        assert len(msgs) >= 3

    def test_odd_stereo_width(self):
        s = PartitionSpec(2401, 1080, 1200, 1080, 512, 360, 0.6)
        assert validate(s)

    def test_scale_bounds(self):
        assert validate(PartitionSpec.from_full(100, 100, 10, 10, 0.0))
        assert validate(PartitionSpec.from_full(100, 100, 10, 10, 1.0)) == []
        assert validate(PartitionSpec.from_full(100, 100, 10, 10, -0.5))


class TestFovealRect:
    @given(spec_strategy())
    def test_centered_within_eye(self, spec):
        for eye in (Eye.LEFT, Eye.RIGHT):
            r = foveal_rect(spec, eye)
            assert r.w == spec.fov_w and r.h == spec.fov_h
            assert 0 <= r.x and r.x + r.w <= spec.eye_w
            assert 0 <= r.y and r.y + r.h <= spec.eye_h
            # floor-centered: left margin never exceeds right margin
            assert r.x == (spec.eye_w - spec.fov_w) // 2
            assert r.y == (spec.eye_h - spec.fov_h) // 2

    @given(spec_strategy())
    def test_stereo_right_is_shifted_left_rect(self, spec):
        left = foveal_rect_stereo(spec, Eye.LEFT)
        right = foveal_rect_stereo(spec, Eye.RIGHT)
        assert left == foveal_rect(spec, Eye.LEFT)
        assert right == Rect(left.x + spec.eye_w, left.y, left.w, left.h)
        assert right.x + right.w <= spec.full_w

    def test_exact_fit_fovea(self):
        s = PartitionSpec.from_full(64, 32, 32, 32, 0.5)
        assert foveal_rect(s, Eye.LEFT) == Rect(0, 0, 32, 32)


class TestReducedDims:
    @given(spec_strategy())
    def test_bounds_and_rounding(self, spec):
        rw, rh = reduced_dims(spec)
        assert 1 <= rw <= spec.full_w
        assert 1 <= rh <= spec.full_h
        assert rw == max(1, round(spec.full_w * spec.periph_scale))
        assert rh == max(1, round(spec.full_h * spec.periph_scale))

    def test_unit_scale_identity(self):
        s = PartitionSpec.from_full(600, 270, 64, 64, 1.0)
        assert reduced_dims(s) == (600, 270)

    def test_clamps_to_one(self):
        s = PartitionSpec.from_full(4, 4, 1, 1, 0.05)
        assert reduced_dims(s) == (1, 1)

    def test_desk_scale(self, desk_spec):
        assert reduced_dims(desk_spec) == (360, 162)
