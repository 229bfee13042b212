import pytest

from splitfov.camera import CameraPath, CameraRig
from splitfov.partition import PartitionSpec
from splitfov.render import SceneConfig


@pytest.fixture(scope="session")
def desk_spec() -> PartitionSpec:
    """Small enough to render hundreds of frames in seconds, same 0.6 scale
    and aspect structure as the full-size defaults."""
    return PartitionSpec.from_full(600, 270, 128, 90, 0.6)


@pytest.fixture(scope="session")
def tiny_spec() -> PartitionSpec:
    return PartitionSpec.from_full(160, 80, 32, 24, 0.5)


@pytest.fixture(scope="session")
def scene() -> SceneConfig:
    return SceneConfig()


@pytest.fixture(scope="session")
def rig() -> CameraRig:
    return CameraRig()


def short_path(n: int) -> CameraPath:
    return CameraPath(frame_count=n)
