"""splitfov: split rendering with losslessly streamed foveal regions.

A server renders the center of each eye's view at full sampling and
streams it losslessly; the client renders the periphery at reduced
resolution, composites both in lockstep, and profiles every stage of
every frame. A single-process simulator reproduces the whole pipeline
on a virtual or wall clock with a pluggable network model.
"""

from .camera import (
    CameraPath,
    CameraRig,
    PathId,
    Pose,
    eye_origin,
    look_at_quat,
    normalize_quat,
    pose_at,
    quat_from_matrix,
    quat_to_matrix,
)
from .client import (
    ClientFrameRecord,
    ClientSession,
    CollectSink,
    PpmSink,
    ffr_frame,
    merge,
    null_sink,
    run_client,
    run_native,
    upsample_nearest,
)
from .codec import CodecError, CodecId, decode, encode
from .harness import (
    DEFAULT_HOST,
    DEFAULT_PORT,
    CompareReport,
    RunConfig,
    run,
    run_compare,
    run_report,
    run_sim,
)
from .image import GeometryError, Rect, crop, images_equal, read_ppm, write_ppm
from .metrics import (
    Summary,
    fps_display,
    improvement_pct,
    iqr,
    mbps,
    median,
    read_csv,
    render_table,
    summarize,
    write_csv,
)
from .partition import (
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
from .render import (
    SceneConfig,
    SceneId,
    render_region,
    render_scaled,
    render_stereo,
)
from .server import ServerFrameTiming, ServerSession, run_server
from .sim import (
    FixedCostModel,
    NetModel,
    PerRayCostModel,
    SimResult,
    ZERO_NET,
    check_lockstep,
    run_native_virtual,
    run_sim_virtual,
    run_sim_wall,
)
from .trace import Event, Trace
from .wire import (
    ConnectionClosedError,
    EndMsg,
    HelloMsg,
    PoseUpdateMsg,
    ProtocolError,
    SubframeMsg,
    read_msg,
    write_msg,
)

__version__ = "0.1.0"

__all__ = [
    "CameraPath", "CameraRig", "PathId", "Pose", "eye_origin", "look_at_quat",
    "normalize_quat", "pose_at", "quat_from_matrix", "quat_to_matrix",
    "ClientFrameRecord", "ClientSession", "CollectSink", "PpmSink", "ffr_frame",
    "merge", "null_sink", "run_client", "run_native", "upsample_nearest",
    "CodecError", "CodecId", "decode", "encode",
    "DEFAULT_HOST", "DEFAULT_PORT", "CompareReport", "RunConfig", "run",
    "run_compare", "run_report", "run_sim",
    "GeometryError", "Rect", "crop", "images_equal", "read_ppm", "write_ppm",
    "Summary", "fps_display", "improvement_pct", "iqr", "mbps", "median",
    "read_csv", "render_table", "summarize", "write_csv",
    "DEFAULT_SPEC", "Eye", "PartitionError", "PartitionSpec", "foveal_rect",
    "foveal_rect_stereo", "reduced_dims", "require_valid", "validate",
    "SceneConfig", "SceneId", "render_region", "render_scaled", "render_stereo",
    "ServerFrameTiming", "ServerSession", "run_server",
    "FixedCostModel", "NetModel", "PerRayCostModel", "SimResult", "ZERO_NET",
    "check_lockstep", "run_native_virtual", "run_sim_virtual", "run_sim_wall",
    "Event", "Trace",
    "ConnectionClosedError", "EndMsg", "HelloMsg", "PoseUpdateMsg",
    "ProtocolError", "SubframeMsg", "read_msg", "write_msg",
]
