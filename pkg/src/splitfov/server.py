"""Server runtime: render foveal rects on demand, encode, stream.

The server is pose-driven and strictly lockstep: it idles until the
client's PoseUpdateMsg for frame n arrives, renders both eyes' foveal
rectangles at full sampling rate, encodes each eye independently, and
sends one SubframeMsg per eye. It never renders ahead.
"""

from __future__ import annotations

import logging
import socket
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import codec as codec_mod
from .camera import CameraRig, Pose, normalize_quat
from .partition import Eye, PartitionSpec, foveal_rect, require_valid, validate
from .render import SceneConfig, SceneId, render_region
from .trace import BEGIN, END, RECV, SEND, Trace
from .wire import (
    ByteStream,
    ConnectionClosedError,
    EndMsg,
    HelloMsg,
    PoseUpdateMsg,
    ProtocolError,
    SubframeMsg,
    check_hello_version,
    read_msg,
    write_msg,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServerFrameTiming:
    """Per-frame server timings in milliseconds plus sent payload bytes."""

    frame_id: int
    draw_ms: float
    encode_ms: float
    send_ms: float
    bytes_sent: int


def pose_from_wire(msg: PoseUpdateMsg) -> Pose:
    """Builds a Pose from a pose update, re-normalizing the quaternion only
    when it is measurably off-unit (well-formed senders keep their bits)."""
    try:
        q = normalize_quat(msg.orientation)
    except ValueError as e:
        raise ProtocolError(f"unusable pose orientation {msg.orientation}: {e}") from None
    return Pose(np.array(msg.position, dtype=np.float32), q)


class ServerSession:
    """Serves one client over an established byte stream."""

    def __init__(
        self,
        reader: ByteStream,
        writer: Callable[[bytes], None],
        rig: CameraRig,
        spec_override: Optional[PartitionSpec] = None,
        codec_override: Optional[codec_mod.CodecId] = None,
        parallel_encode: bool = False,
        trace: Optional[Trace] = None,
        clock: Callable[[], float] = time.perf_counter,
        epoch: Optional[float] = None,
    ):
        self.reader = reader
        self.writer = writer
        self.rig = rig
        self.spec_override = spec_override
        self.codec_override = codec_override
        self.parallel_encode = parallel_encode
        self.trace = trace
        self.clock = clock
        self._t0 = epoch
        self.spec: Optional[PartitionSpec] = None
        self.codec: Optional[codec_mod.CodecId] = None
        self.scene: Optional[SceneConfig] = None
        self.frame_count = 0
        self.records: list[ServerFrameTiming] = []

    def _now_ms(self) -> float:
        if self._t0 is None:
            self._t0 = self.clock()
        return (self.clock() - self._t0) * 1000.0

    def _trace(self, kind: str, name: str, frame_id: int) -> None:
        if self.trace is not None:
            self.trace.add(self._now_ms(), "server", kind, name, frame_id)

    def handshake(self) -> HelloMsg:
        msg = read_msg(self.reader)
        if msg is None:
            raise ConnectionClosedError("client closed before the handshake")
        if not isinstance(msg, HelloMsg):
            raise ProtocolError(f"expected a hello, got {type(msg).__name__}")
        check_hello_version(msg)
        self._trace(RECV, "hello", 0)
        spec = self.spec_override or PartitionSpec.from_full(
            msg.full_w, msg.full_h, msg.fov_w, msg.fov_h, msg.periph_scale
        )
        violations = validate(spec)
        if violations:
            raise ProtocolError("hello carries an invalid partition: " + "; ".join(violations))
        self.spec = spec
        try:
            # RAW is id 0: an `or` chain would drop it, so test for None
            self.codec = (
                self.codec_override
                if self.codec_override is not None
                else codec_mod.CodecId(msg.codec)
            )
            self.scene = SceneConfig(SceneId(msg.scene_id))
        except ValueError as e:
            raise ProtocolError(f"hello carries an unknown enum value: {e}") from None
        self.frame_count = msg.frame_count
        return msg

    def serve_frame(self, pose: Pose, frame_id: int) -> ServerFrameTiming:
        """Renders, encodes, and sends both eyes' foveal subframes."""
        assert self.spec is not None and self.codec is not None and self.scene is not None
        spec, codec, scene = self.spec, self.codec, self.scene

        self._trace(BEGIN, "draw", frame_id)
        t_draw = self.clock()
        eyes = (Eye.LEFT, Eye.RIGHT)
        rects = {eye: foveal_rect(spec, eye) for eye in eyes}
        images = {
            eye: render_region(
                scene, self.rig, pose, int(eye), (spec.eye_w, spec.eye_h), rects[eye]
            )
            for eye in eyes
        }
        draw_ms = (self.clock() - t_draw) * 1000.0
        self._trace(END, "draw", frame_id)

        self._trace(BEGIN, "encode", frame_id)
        t_enc = self.clock()
        if self.parallel_encode:
            with ThreadPoolExecutor(max_workers=2) as pool:
                payloads = dict(
                    zip(eyes, pool.map(lambda e: codec_mod.encode(codec, images[e]), eyes))
                )
        else:
            payloads = {eye: codec_mod.encode(codec, images[eye]) for eye in eyes}
        encode_ms = (self.clock() - t_enc) * 1000.0
        self._trace(END, "encode", frame_id)

        t_send = self.clock()
        for eye in eyes:
            self._trace(SEND, f"subframe{int(eye)}", frame_id)
            self.writer(
                write_msg(
                    SubframeMsg(frame_id, int(eye), int(codec), rects[eye], payloads[eye])
                )
            )
        send_ms = (self.clock() - t_send) * 1000.0
        bytes_sent = sum(len(p) for p in payloads.values())
        return ServerFrameTiming(frame_id, draw_ms, encode_ms, send_ms, bytes_sent)

    def run(self) -> list[ServerFrameTiming]:
        """Handshake, then lockstep frame loop until EndMsg, EOF, or
        frame_count frames served. Partial records survive a disconnect."""
        self.handshake()
        for frame_id in range(self.frame_count):
            msg = read_msg(self.reader)
            if msg is None or isinstance(msg, EndMsg):
                logger.warning("session ended early at frame %d of %d", frame_id, self.frame_count)
                return self.records
            if not isinstance(msg, PoseUpdateMsg):
                raise ProtocolError(f"expected a pose update, got {type(msg).__name__}")
            if msg.frame_id != frame_id:
                raise ProtocolError(
                    f"lockstep violated: pose for frame {msg.frame_id}, expected {frame_id}"
                )
            self._trace(RECV, "pose", frame_id)
            self.records.append(self.serve_frame(pose_from_wire(msg), frame_id))
        tail = read_msg(self.reader)
        if tail is not None and not isinstance(tail, EndMsg):
            raise ProtocolError(f"expected end-of-session, got {type(tail).__name__}")
        if tail is not None:
            self._trace(RECV, "end", tail.frame_id)
        return self.records


def run_server(
    host: str,
    port: int,
    rig: CameraRig,
    spec_override: Optional[PartitionSpec] = None,
    codec_override: Optional[codec_mod.CodecId] = None,
    parallel_encode: bool = False,
    trace: Optional[Trace] = None,
    ready: Optional[Callable[[int], None]] = None,
) -> list[ServerFrameTiming]:
    """Listens for one client, serves the whole session, returns its timings.

    `ready` is called with the bound port once listening (useful with
    port 0). A client disconnect mid-session is reported and the partial
    records are returned.
    """
    if spec_override is not None:
        require_valid(spec_override)
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as listener:
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((host, port))
        listener.listen(1)
        if ready is not None:
            ready(listener.getsockname()[1])
        conn, peer = listener.accept()
        logger.info("client connected from %s:%d", *peer[:2])
        with conn:
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            reader = conn.makefile("rb")
            session = ServerSession(
                reader,
                conn.sendall,
                rig,
                spec_override=spec_override,
                codec_override=codec_override,
                parallel_encode=parallel_encode,
                trace=trace,
            )
            try:
                return session.run()
            except (ConnectionClosedError, ConnectionError) as e:
                logger.warning("client disconnected: %s", e)
                return session.records
            finally:
                reader.close()
