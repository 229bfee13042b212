"""Client runtime: peripheral rendering, subframe receive/decode, merge.

Each frame the client sends the pose, then renders its reduced-rate
peripheral buffer while a second thread receives and decodes the two
encoded foveal subframes. Once both finish, the foveae are composited
over the nearest-upsampled periphery, the frame goes to the display
sink, and per-stage timings are recorded. Exactly one frame is in
flight (lockstep).
"""

from __future__ import annotations

import socket
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import codec as codec_mod
from .camera import CameraPath, CameraRig, Pose, pose_at
from .image import GeometryError, validate_image, write_ppm
from .partition import Eye, PartitionSpec, foveal_rect, foveal_rect_stereo, require_valid
from .render import SceneConfig, render_region, render_scaled
from .trace import BEGIN, END, RECV, SEND, Trace
from .wire import (
    ByteStream,
    ConnectionClosedError,
    EndMsg,
    HelloMsg,
    PoseUpdateMsg,
    ProtocolError,
    SubframeMsg,
    read_msg,
    write_msg,
    PROTOCOL_VERSION,
)

DisplaySink = Callable[[int, np.ndarray], None]


@dataclass(frozen=True)
class ClientFrameRecord:
    """Per-frame client timings in milliseconds plus received payload bytes.

    network_ms spans first byte received to last byte received across both
    subframes; merge_ms includes the peripheral upsample; total_ms runs
    from just before the pose send to just after display. Stages overlap,
    so total_ms is not the sum of the parts.
    """

    frame_id: int
    draw_ms: float
    network_ms: float
    decode_ms: float
    merge_ms: float
    pose_ms: float
    total_ms: float
    bytes_received: int


def null_sink(frame_id: int, frame: np.ndarray) -> None:
    pass


class CollectSink:
    """Keeps every displayed frame in memory (tests and oracles)."""

    def __init__(self):
        self.frames: list[np.ndarray] = []

    def __call__(self, frame_id: int, frame: np.ndarray) -> None:
        self.frames.append(frame)


class PpmSink:
    """Writes every k-th displayed frame as frame_NNNNNN.ppm under a directory."""

    def __init__(self, directory: str, every: int = 1):
        if every < 1:
            raise ValueError(f"every must be at least 1, got {every}")
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.every = every

    def __call__(self, frame_id: int, frame: np.ndarray) -> None:
        if frame_id % self.every == 0:
            write_ppm(str(self.directory / f"frame_{frame_id:06d}.ppm"), frame)


def upsample_nearest(reduced: np.ndarray, full_dims: tuple[int, int]) -> np.ndarray:
    """Nearest-neighbor upsample: full pixel (x, y) copies reduced pixel
    (floor(x * rw / W), floor(y * rh / H)). Pure integer index math."""
    validate_image(reduced)
    W, H = full_dims
    rh, rw = reduced.shape[:2]
    if rw > W or rh > H:
        raise GeometryError(f"reduced {rw}x{rh} larger than target {W}x{H}")
    xs = (np.arange(W) * rw) // W
    ys = (np.arange(H) * rh) // H
    return reduced[ys[:, None], xs[None, :], :].copy()


def merge(
    peripheral_full: np.ndarray,
    foveal: dict[Eye, np.ndarray],
    spec: PartitionSpec,
) -> np.ndarray:
    """Composites each eye's foveal image over the upsampled periphery.

    Every output pixel comes from exactly one source: the foveal rects
    (stereo-frame coordinates) from the decoded subframes, everything
    else from `peripheral_full`.
    """
    require_valid(spec)
    validate_image(peripheral_full)
    if peripheral_full.shape[:2] != (spec.full_h, spec.full_w):
        raise GeometryError(
            f"peripheral frame is {peripheral_full.shape[1]}x{peripheral_full.shape[0]}, "
            f"spec wants {spec.full_w}x{spec.full_h}"
        )
    out = peripheral_full.copy()
    for eye in (Eye.LEFT, Eye.RIGHT):
        img = foveal[eye]
        validate_image(img)
        if img.shape[:2] != (spec.fov_h, spec.fov_w):
            raise GeometryError(
                f"{eye.name.lower()} foveal image is {img.shape[1]}x{img.shape[0]}, "
                f"spec wants {spec.fov_w}x{spec.fov_h}"
            )
        r = foveal_rect_stereo(spec, eye)
        out[r.y : r.y + r.h, r.x : r.x + r.w] = img
    return out


def ffr_frame(scene: SceneConfig, rig: CameraRig, pose: Pose, spec: PartitionSpec) -> np.ndarray:
    """One fixed-foveation frame composed locally: full-rate foveae over
    nearest-upsampled reduced periphery. This is what both native mode and
    a lossless split session display."""
    foveae = {
        eye: render_region(scene, rig, pose, int(eye), (spec.eye_w, spec.eye_h), foveal_rect(spec, eye))
        for eye in (Eye.LEFT, Eye.RIGHT)
    }
    reduced = render_scaled(scene, rig, pose, (spec.full_w, spec.full_h), spec.periph_scale)
    up = upsample_nearest(reduced, (spec.full_w, spec.full_h))
    return merge(up, foveae, spec)


class _TimingReader:
    """ByteStream wrapper that timestamps the first and last byte seen
    since the last reset (the per-frame network window)."""

    def __init__(self, inner: ByteStream, clock: Callable[[], float]):
        self.inner = inner
        self.clock = clock
        self.first_byte_t: Optional[float] = None
        self.last_byte_t: Optional[float] = None

    def reset(self) -> None:
        self.first_byte_t = None
        self.last_byte_t = None

    def read(self, n: int) -> bytes:
        data = self.inner.read(n)
        if data:
            now = self.clock()
            if self.first_byte_t is None:
                self.first_byte_t = now
            self.last_byte_t = now
        return data


class ClientSession:
    """Drives the split-rendering client over an established byte stream."""

    def __init__(
        self,
        reader: ByteStream,
        writer: Callable[[bytes], None],
        spec: PartitionSpec,
        codec: codec_mod.CodecId,
        scene: SceneConfig,
        rig: CameraRig,
        path: CameraPath,
        display: DisplaySink = null_sink,
        trace: Optional[Trace] = None,
        clock: Callable[[], float] = time.perf_counter,
        epoch: Optional[float] = None,
    ):
        require_valid(spec)
        self.reader = _TimingReader(reader, clock)
        self.writer = writer
        self.spec = spec
        self.codec = codec_mod.CodecId(codec)
        self.scene = scene
        self.rig = rig
        self.path = path
        self.display = display
        self.trace = trace
        self.clock = clock
        # Shared epoch lines client and server trace timestamps up when both
        # run in one process; otherwise each side starts its own clock.
        self._t0 = epoch

    def _now_ms(self) -> float:
        if self._t0 is None:
            self._t0 = self.clock()
        return (self.clock() - self._t0) * 1000.0

    def _trace(self, actor: str, kind: str, name: str, frame_id: int) -> None:
        if self.trace is not None:
            self.trace.add(self._now_ms(), actor, kind, name, frame_id)

    def hello(self) -> HelloMsg:
        msg = HelloMsg(
            protocol_version=PROTOCOL_VERSION,
            full_w=self.spec.full_w,
            full_h=self.spec.full_h,
            fov_w=self.spec.fov_w,
            fov_h=self.spec.fov_h,
            periph_scale=self.spec.periph_scale,
            codec=int(self.codec),
            scene_id=int(self.scene.scene_id),
            path_id=int(self.path.path_id),
            frame_count=self.path.frame_count,
        )
        self._trace("client", SEND, "hello", 0)
        self.writer(write_msg(msg))
        return msg

    def _receive_and_decode(self, frame_id: int) -> tuple[dict[Eye, np.ndarray], float, float, int]:
        self.reader.reset()
        msgs: list[SubframeMsg] = []
        for _ in range(2):
            msg = read_msg(self.reader)
            if msg is None:
                raise ConnectionClosedError("server closed the session mid-frame")
            if not isinstance(msg, SubframeMsg):
                raise ProtocolError(f"expected a subframe, got {type(msg).__name__}")
            if msg.frame_id != frame_id:
                raise ProtocolError(
                    f"lockstep violated: subframe for frame {msg.frame_id}, expected {frame_id}"
                )
            self._trace("client", RECV, f"subframe{msg.eye}", frame_id)
            msgs.append(msg)
        if {m.eye for m in msgs} != {int(Eye.LEFT), int(Eye.RIGHT)}:
            raise ProtocolError(f"expected one subframe per eye, got eyes {[m.eye for m in msgs]}")
        assert self.reader.first_byte_t is not None and self.reader.last_byte_t is not None
        network_ms = (self.reader.last_byte_t - self.reader.first_byte_t) * 1000.0

        self._trace("client", BEGIN, "decode", frame_id)
        t_dec = self.clock()
        foveal: dict[Eye, np.ndarray] = {}
        for msg in msgs:
            eye = Eye(msg.eye)
            if msg.rect != foveal_rect(self.spec, eye):
                raise ProtocolError(
                    f"subframe rect {msg.rect} does not match the session's foveal rect "
                    f"{foveal_rect(self.spec, eye)}"
                )
            foveal[eye] = codec_mod.decode(
                codec_mod.CodecId(msg.codec), msg.payload, msg.rect.w, msg.rect.h
            )
        decode_ms = (self.clock() - t_dec) * 1000.0
        self._trace("client", END, "decode", frame_id)
        bytes_received = sum(len(m.payload) for m in msgs)
        return foveal, network_ms, decode_ms, bytes_received

    def run_frame(self, frame_id: int, pool: ThreadPoolExecutor) -> ClientFrameRecord:
        t0 = self.clock()
        pose = pose_at(self.path, frame_id)
        msg = PoseUpdateMsg(
            frame_id,
            tuple(float(v) for v in pose.position),
            tuple(float(v) for v in pose.orientation),
        )
        self._trace("client", SEND, "pose", frame_id)
        self.writer(write_msg(msg))
        pose_ms = (self.clock() - t0) * 1000.0

        future = pool.submit(self._receive_and_decode, frame_id)
        self._trace("client", BEGIN, "draw", frame_id)
        t_draw = self.clock()
        reduced = render_scaled(
            self.scene, self.rig, pose, (self.spec.full_w, self.spec.full_h), self.spec.periph_scale
        )
        draw_ms = (self.clock() - t_draw) * 1000.0
        self._trace("client", END, "draw", frame_id)
        foveal, network_ms, decode_ms, bytes_received = future.result()

        self._trace("client", BEGIN, "merge", frame_id)
        t_merge = self.clock()
        up = upsample_nearest(reduced, (self.spec.full_w, self.spec.full_h))
        merged = merge(up, foveal, self.spec)
        merge_ms = (self.clock() - t_merge) * 1000.0
        self._trace("client", END, "merge", frame_id)

        self._trace("client", BEGIN, "display", frame_id)
        self.display(frame_id, merged)
        self._trace("client", END, "display", frame_id)
        total_ms = (self.clock() - t0) * 1000.0
        return ClientFrameRecord(
            frame_id=frame_id,
            draw_ms=draw_ms,
            network_ms=network_ms,
            decode_ms=decode_ms,
            merge_ms=merge_ms,
            pose_ms=pose_ms,
            total_ms=total_ms,
            bytes_received=bytes_received,
        )

    def run(self) -> list[ClientFrameRecord]:
        self.hello()
        records: list[ClientFrameRecord] = []
        with ThreadPoolExecutor(max_workers=1) as pool:
            for frame_id in range(self.path.frame_count):
                records.append(self.run_frame(frame_id, pool))
        last = records[-1].frame_id if records else 0
        self._trace("client", SEND, "end", last)
        self.writer(write_msg(EndMsg(last)))
        return records


def run_client(
    host: str,
    port: int,
    spec: PartitionSpec,
    codec: codec_mod.CodecId,
    scene: SceneConfig,
    rig: CameraRig,
    path: CameraPath,
    display: DisplaySink = null_sink,
    trace: Optional[Trace] = None,
) -> list[ClientFrameRecord]:
    """Connects to a server and runs a full split-rendering session."""
    with socket.create_connection((host, port)) as sock:
        # Pose messages are on the frame critical path; never coalesce them.
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        reader = sock.makefile("rb")
        try:
            session = ClientSession(
                reader, sock.sendall, spec, codec, scene, rig, path, display, trace
            )
            return session.run()
        finally:
            reader.close()


def run_native(
    spec: PartitionSpec,
    scene: SceneConfig,
    rig: CameraRig,
    path: CameraPath,
    display: DisplaySink = null_sink,
    clock: Callable[[], float] = time.perf_counter,
) -> list[ClientFrameRecord]:
    """Baseline mode: the client renders everything itself.

    Uses the same fixed-foveation sampling as split mode (foveae at full
    rate, periphery reduced), so its displayed frames are byte-identical
    to a lossless split session's. network/decode stay zero and
    bytes_received is 0.
    """
    require_valid(spec)
    records = []
    for frame_id in range(path.frame_count):
        t0 = clock()
        pose = pose_at(path, frame_id)
        pose_ms = (clock() - t0) * 1000.0

        t_draw = clock()
        foveae = {
            eye: render_region(
                scene, rig, pose, int(eye), (spec.eye_w, spec.eye_h), foveal_rect(spec, eye)
            )
            for eye in (Eye.LEFT, Eye.RIGHT)
        }
        reduced = render_scaled(scene, rig, pose, (spec.full_w, spec.full_h), spec.periph_scale)
        draw_ms = (clock() - t_draw) * 1000.0

        t_merge = clock()
        up = upsample_nearest(reduced, (spec.full_w, spec.full_h))
        merged = merge(up, foveae, spec)
        merge_ms = (clock() - t_merge) * 1000.0

        display(frame_id, merged)
        total_ms = (clock() - t0) * 1000.0
        records.append(
            ClientFrameRecord(
                frame_id=frame_id,
                draw_ms=draw_ms,
                network_ms=0.0,
                decode_ms=0.0,
                merge_ms=merge_ms,
                pose_ms=pose_ms,
                total_ms=total_ms,
                bytes_received=0,
            )
        )
    return records
