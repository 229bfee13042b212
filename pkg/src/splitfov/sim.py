"""Single-process simulation of a full split-rendering session.

Two clock modes share the real rendering/codec/merge pipeline:

* virtual: stage durations come from a pluggable cost model and message
  delivery from the network model, laid out analytically on a virtual
  timeline. Runs are bit-reproducible and the event trace carries exact
  timestamps for lockstep/overlap assertions.
* wall: the real client and server runtimes run concurrently over an
  in-memory duplex channel that delays delivery per the network model;
  timings are honest wall-clock measurements.

The network model charges each message latency plus transmission time at
the link rate; a direction's link is FIFO, so back-to-back messages
queue behind each other.
"""

from __future__ import annotations

import math
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import numpy as np

from . import codec as codec_mod
from .camera import CameraPath, CameraRig, pose_at
from .client import (
    ClientFrameRecord,
    ClientSession,
    DisplaySink,
    ffr_frame,
    merge,
    null_sink,
    upsample_nearest,
)
from .partition import Eye, PartitionSpec, foveal_rect, reduced_dims, require_valid
from .render import SceneConfig, render_region, render_scaled
from .server import ServerFrameTiming, ServerSession
from .trace import BEGIN, END, RECV, SEND, Trace
from .wire import EndMsg, HelloMsg, PoseUpdateMsg, SubframeMsg, write_msg, PROTOCOL_VERSION


@dataclass(frozen=True)
class NetModel:
    """One-way propagation latency plus a FIFO link at a fixed rate.

    A message handed to the link at t starts transmitting when the link
    is free, occupies it for bits/bandwidth, and its last byte arrives
    one latency after transmission ends. bandwidth may be math.inf.
    """

    latency_ms: float = 2.0
    bandwidth_mbps: float = 500.0

    def __post_init__(self):
        if self.latency_ms < 0:
            raise ValueError(f"latency_ms must be non-negative, got {self.latency_ms}")
        if not self.bandwidth_mbps > 0:
            raise ValueError(f"bandwidth_mbps must be positive, got {self.bandwidth_mbps}")

    def tx_ms(self, nbytes: int) -> float:
        if math.isinf(self.bandwidth_mbps):
            return 0.0
        return nbytes * 8.0 / (self.bandwidth_mbps * 1e6) * 1000.0


ZERO_NET = NetModel(latency_ms=0.0, bandwidth_mbps=math.inf)


class _Link:
    """FIFO transmission state for one direction of the virtual link."""

    def __init__(self, net: NetModel):
        self.net = net
        self.free_at_ms = 0.0

    def schedule(self, send_ms: float, nbytes: int) -> tuple[float, float]:
        """Returns (first_byte_arrival_ms, last_byte_arrival_ms)."""
        start = max(send_ms, self.free_at_ms)
        tx = self.net.tx_ms(nbytes)
        self.free_at_ms = start + tx
        return start + self.net.latency_ms, start + tx + self.net.latency_ms


class CostModel(Protocol):
    """Stage durations for the virtual clock, parameterized by workload."""

    def pose_ms(self) -> float: ...
    def server_draw_ms(self, rays: int) -> float: ...
    def encode_ms(self, pixels: int, payload_bytes: int) -> float: ...
    def client_draw_ms(self, rays: int) -> float: ...
    def decode_ms(self, pixels: int, payload_bytes: int) -> float: ...
    def merge_ms(self, pixels: int) -> float: ...
    def display_ms(self) -> float: ...


@dataclass(frozen=True)
class FixedCostModel:
    """Constant per-stage durations regardless of workload."""

    pose: float = 0.0
    server_draw: float = 5.0
    encode: float = 3.0
    client_draw: float = 6.0
    decode: float = 4.0
    merge: float = 1.0
    display: float = 0.0

    def pose_ms(self) -> float:
        return self.pose

    def server_draw_ms(self, rays: int) -> float:
        return self.server_draw

    def encode_ms(self, pixels: int, payload_bytes: int) -> float:
        return self.encode

    def client_draw_ms(self, rays: int) -> float:
        return self.client_draw

    def decode_ms(self, pixels: int, payload_bytes: int) -> float:
        return self.decode

    def merge_ms(self, pixels: int) -> float:
        return self.merge

    def display_ms(self) -> float:
        return self.display


@dataclass(frozen=True)
class PerRayCostModel:
    """Draw time proportional to rays shaded; codec/merge per pixel."""

    us_per_ray: float = 1.0
    us_per_encode_pixel: float = 0.0
    us_per_decode_pixel: float = 0.0
    us_per_merge_pixel: float = 0.0
    pose: float = 0.0
    display: float = 0.0

    def pose_ms(self) -> float:
        return self.pose

    def server_draw_ms(self, rays: int) -> float:
        return rays * self.us_per_ray / 1000.0

    def encode_ms(self, pixels: int, payload_bytes: int) -> float:
        return pixels * self.us_per_encode_pixel / 1000.0

    def client_draw_ms(self, rays: int) -> float:
        return rays * self.us_per_ray / 1000.0

    def decode_ms(self, pixels: int, payload_bytes: int) -> float:
        return pixels * self.us_per_decode_pixel / 1000.0

    def merge_ms(self, pixels: int) -> float:
        return pixels * self.us_per_merge_pixel / 1000.0

    def display_ms(self) -> float:
        return self.display


@dataclass
class SimResult:
    client_records: list[ClientFrameRecord]
    server_records: list[ServerFrameTiming]
    trace: Trace


def run_sim_virtual(
    spec: PartitionSpec,
    codec: codec_mod.CodecId,
    scene: SceneConfig,
    rig: CameraRig,
    path: CameraPath,
    net: NetModel = ZERO_NET,
    cost: CostModel = FixedCostModel(),
    display: DisplaySink = null_sink,
) -> SimResult:
    """Runs the split session on a deterministic virtual timeline.

    The real pixels flow through the real pipeline (render, encode, wire
    serialization, decode, merge, display sink); only the clock is
    modeled. Timestamps in the records and trace are virtual
    milliseconds from session start.
    """
    require_valid(spec)
    codec = codec_mod.CodecId(codec)
    trace = Trace()
    uplink = _Link(net)
    downlink = _Link(net)
    eyes = (Eye.LEFT, Eye.RIGHT)
    rects = {eye: foveal_rect(spec, eye) for eye in eyes}
    rw, rh = reduced_dims(spec)
    fov_px = spec.fov_w * spec.fov_h
    client_records: list[ClientFrameRecord] = []
    server_records: list[ServerFrameTiming] = []

    hello = HelloMsg(
        PROTOCOL_VERSION,
        spec.full_w,
        spec.full_h,
        spec.fov_w,
        spec.fov_h,
        spec.periph_scale,
        int(codec),
        int(scene.scene_id),
        int(path.path_id),
        path.frame_count,
    )
    trace.add(0.0, "client", SEND, "hello", 0)
    (_, hello_arrive) = uplink.schedule(0.0, len(write_msg(hello)))
    trace.add(hello_arrive, "server", RECV, "hello", 0)

    t = hello_arrive  # frames start once the session is established
    for frame_id in range(path.frame_count):
        pose = pose_at(path, frame_id)
        pose_msg = PoseUpdateMsg(
            frame_id,
            tuple(float(v) for v in pose.position),
            tuple(float(v) for v in pose.orientation),
        )
        trace.add(t, "client", SEND, "pose", frame_id)
        pose_send_end = t + cost.pose_ms()
        (_, pose_arrive) = uplink.schedule(pose_send_end, len(write_msg(pose_msg)))
        trace.add(pose_arrive, "server", RECV, "pose", frame_id)

        # Server pipeline: draw both foveae, encode, transmit.
        sdraw_end = pose_arrive + cost.server_draw_ms(2 * fov_px)
        trace.add(pose_arrive, "server", BEGIN, "draw", frame_id)
        trace.add(sdraw_end, "server", END, "draw", frame_id)
        images = {
            eye: render_region(scene, rig, pose, int(eye), (spec.eye_w, spec.eye_h), rects[eye])
            for eye in eyes
        }
        payloads = {eye: codec_mod.encode(codec, images[eye]) for eye in eyes}
        msg_sizes = {
            eye: len(write_msg(SubframeMsg(frame_id, int(eye), int(codec), rects[eye], payloads[eye])))
            for eye in eyes
        }
        enc_end = sdraw_end + cost.encode_ms(2 * fov_px, sum(map(len, payloads.values())))
        trace.add(sdraw_end, "server", BEGIN, "encode", frame_id)
        trace.add(enc_end, "server", END, "encode", frame_id)

        trace.add(enc_end, "server", BEGIN, "send", frame_id)
        trace.add(enc_end, "server", SEND, "subframe0", frame_id)
        first0, last0 = downlink.schedule(enc_end, msg_sizes[Eye.LEFT])
        trace.add(downlink.free_at_ms, "server", SEND, "subframe1", frame_id)
        first1, last1 = downlink.schedule(enc_end, msg_sizes[Eye.RIGHT])
        send_end = downlink.free_at_ms
        trace.add(send_end, "server", END, "send", frame_id)
        trace.add(last0, "client", RECV, "subframe0", frame_id)
        trace.add(last1, "client", RECV, "subframe1", frame_id)
        server_records.append(
            ServerFrameTiming(
                frame_id=frame_id,
                draw_ms=sdraw_end - pose_arrive,
                encode_ms=enc_end - sdraw_end,
                send_ms=send_end - enc_end,
                bytes_sent=sum(len(p) for p in payloads.values()),
            )
        )

        # Client pipeline: peripheral draw overlaps receive+decode.
        cdraw_begin = pose_send_end
        cdraw_end = cdraw_begin + cost.client_draw_ms(rw * rh)
        trace.add(cdraw_begin, "client", BEGIN, "draw", frame_id)
        trace.add(cdraw_end, "client", END, "draw", frame_id)
        reduced = render_scaled(scene, rig, pose, (spec.full_w, spec.full_h), spec.periph_scale)

        network_ms = last1 - first0
        decode_end = last1 + cost.decode_ms(2 * fov_px, sum(map(len, payloads.values())))
        trace.add(last1, "client", BEGIN, "decode", frame_id)
        trace.add(decode_end, "client", END, "decode", frame_id)
        foveal = {
            eye: codec_mod.decode(codec, payloads[eye], rects[eye].w, rects[eye].h)
            for eye in eyes
        }

        merge_begin = max(cdraw_end, decode_end)
        merge_end = merge_begin + cost.merge_ms(spec.full_w * spec.full_h)
        trace.add(merge_begin, "client", BEGIN, "merge", frame_id)
        trace.add(merge_end, "client", END, "merge", frame_id)
        up = upsample_nearest(reduced, (spec.full_w, spec.full_h))
        merged = merge(up, foveal, spec)

        display_end = merge_end + cost.display_ms()
        trace.add(merge_end, "client", BEGIN, "display", frame_id)
        trace.add(display_end, "client", END, "display", frame_id)
        display(frame_id, merged)

        client_records.append(
            ClientFrameRecord(
                frame_id=frame_id,
                draw_ms=cdraw_end - cdraw_begin,
                network_ms=network_ms,
                decode_ms=decode_end - last1,
                merge_ms=merge_end - merge_begin,
                pose_ms=pose_send_end - t,
                total_ms=display_end - t,
                bytes_received=sum(len(p) for p in payloads.values()),
            )
        )
        t = display_end

    last = path.frame_count - 1 if path.frame_count else 0
    trace.add(t, "client", SEND, "end", last)
    (_, end_arrive) = uplink.schedule(t, len(write_msg(EndMsg(last))))
    trace.add(end_arrive, "server", RECV, "end", last)
    return SimResult(client_records, server_records, trace)


def run_native_virtual(
    spec: PartitionSpec,
    scene: SceneConfig,
    rig: CameraRig,
    path: CameraPath,
    cost: CostModel = FixedCostModel(),
    display: DisplaySink = null_sink,
) -> list[ClientFrameRecord]:
    """Native baseline on the virtual clock: one device draws the foveae at
    full rate plus the reduced periphery, then merges and displays."""
    require_valid(spec)
    rw, rh = reduced_dims(spec)
    rays = 2 * spec.fov_w * spec.fov_h + rw * rh
    records = []
    t = 0.0
    for frame_id in range(path.frame_count):
        pose = pose_at(path, frame_id)
        pose_end = t + cost.pose_ms()
        draw_end = pose_end + cost.client_draw_ms(rays)
        merge_end = draw_end + cost.merge_ms(spec.full_w * spec.full_h)
        display_end = merge_end + cost.display_ms()
        display(frame_id, ffr_frame(scene, rig, pose, spec))
        records.append(
            ClientFrameRecord(
                frame_id=frame_id,
                draw_ms=draw_end - pose_end,
                network_ms=0.0,
                decode_ms=0.0,
                merge_ms=merge_end - draw_end,
                pose_ms=pose_end - t,
                total_ms=display_end - t,
                bytes_received=0,
            )
        )
        t = display_end
    return records


class SimplexPipe:
    """One direction of the in-memory channel for wall-clock simulation.

    write() schedules the data per the network model (latency plus FIFO
    transmission time); read() blocks until delivery, mimicking a socket
    with the modeled link in between. The first byte of each write is
    delivered at its own arrival time so receive-side first-byte
    timestamps are meaningful.
    """

    def __init__(self, net: NetModel, clock: Callable[[], float] = time.perf_counter):
        self.net = net
        self.clock = clock
        self._cv = threading.Condition()
        self._pending: deque[tuple[float, bytes]] = deque()
        self._buf = bytearray()
        self._closed = False
        self._link_free_s = 0.0

    def write(self, data: bytes) -> None:
        if not data:
            return
        now = self.clock()
        start = max(now, self._link_free_s)
        lat = self.net.latency_ms / 1000.0
        tx = self.net.tx_ms(len(data)) / 1000.0
        self._link_free_s = start + tx
        with self._cv:
            if self._closed:
                raise BrokenPipeError("pipe closed")
            self._pending.append((start + lat, data[:1]))
            if len(data) > 1:
                self._pending.append((start + tx + lat, data[1:]))
            self._cv.notify_all()

    def close(self) -> None:
        with self._cv:
            self._closed = True
            self._cv.notify_all()

    def read(self, n: int) -> bytes:
        if n <= 0:
            return b""
        with self._cv:
            while True:
                now = self.clock()
                while self._pending and self._pending[0][0] <= now:
                    self._buf.extend(self._pending.popleft()[1])
                if self._buf:
                    out = bytes(self._buf[:n])
                    del self._buf[:n]
                    return out
                if self._pending:
                    self._cv.wait(timeout=self._pending[0][0] - now)
                    continue
                if self._closed:
                    return b""
                self._cv.wait()


def run_sim_wall(
    spec: PartitionSpec,
    codec: codec_mod.CodecId,
    scene: SceneConfig,
    rig: CameraRig,
    path: CameraPath,
    net: NetModel = ZERO_NET,
    display: DisplaySink = null_sink,
    parallel_encode: bool = False,
) -> SimResult:
    """Runs the real client and server runtimes concurrently in one process,
    connected by the modeled in-memory channel; wall-clock timings."""
    require_valid(spec)
    trace = Trace()
    clock = time.perf_counter
    epoch = clock()
    c2s = SimplexPipe(net, clock)
    s2c = SimplexPipe(net, clock)

    server_session = ServerSession(
        reader=c2s, writer=s2c.write, rig=rig, parallel_encode=parallel_encode,
        trace=trace, clock=clock, epoch=epoch,
    )
    client_session = ClientSession(
        reader=s2c, writer=c2s.write, spec=spec, codec=codec, scene=scene, rig=rig,
        path=path, display=display, trace=trace, clock=clock, epoch=epoch,
    )

    with ThreadPoolExecutor(max_workers=1) as pool:
        server_future = pool.submit(server_session.run)
        try:
            client_records = client_session.run()
        finally:
            c2s.close()
        server_records = server_future.result(timeout=60.0)
        s2c.close()
    return SimResult(client_records, server_records, trace)


def check_lockstep(trace: Trace, frame_count: int) -> list[str]:
    """Mechanical lockstep/overlap verification over an event trace.

    Checks, for every frame n:
      * the server starts drawing frame n only at/after receiving pose n;
      * the client sends pose n only at/after finishing display of n-1;
      * the client starts merging only once both its peripheral draw and
        the subframe decode have finished.
    Returns a list of violations; an empty list means the trace is clean.
    """
    violations = []
    for n in range(frame_count):
        try:
            pose_recv = trace.find("server", RECV, "pose", n).t_ms
            draw_begin = trace.find("server", BEGIN, "draw", n).t_ms
            if draw_begin < pose_recv:
                violations.append(
                    f"frame {n}: server draw at {draw_begin:.3f} ms precedes pose receipt "
                    f"at {pose_recv:.3f} ms"
                )
            pose_send = trace.find("client", SEND, "pose", n).t_ms
            if n > 0:
                prev_display = trace.find("client", END, "display", n - 1).t_ms
                if pose_send < prev_display:
                    violations.append(
                        f"frame {n}: pose sent at {pose_send:.3f} ms before frame {n - 1} "
                        f"display ended at {prev_display:.3f} ms"
                    )
            merge_begin = trace.find("client", BEGIN, "merge", n).t_ms
            draw_end = trace.find("client", END, "draw", n).t_ms
            decode_end = trace.find("client", END, "decode", n).t_ms
            if merge_begin < draw_end or merge_begin < decode_end:
                violations.append(
                    f"frame {n}: merge at {merge_begin:.3f} ms before draw "
                    f"({draw_end:.3f} ms) and decode ({decode_end:.3f} ms) both finished"
                )
        except KeyError as e:
            violations.append(f"frame {n}: missing event {e}")
    return violations
