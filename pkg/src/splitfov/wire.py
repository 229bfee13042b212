"""Binary framing for the client/server TCP session.

Every message is one frame: a u32 length (bytes after the length field),
a u8 message type, then the body. All integers are little-endian and all
floats are IEEE-754 single precision little-endian:

    Hello    (1): u16 protocol_version | u16 full_w | u16 full_h |
                  u16 fov_w | u16 fov_h | f32 periph_scale | u8 codec |
                  u8 scene_id | u8 path_id | u32 frame_count
    Pose     (2): u64 frame_id | 3x f32 position | 4x f32 orientation (x,y,z,w)
    Subframe (3): u64 frame_id | u8 eye | u8 codec |
                  4x u16 rect (x,y,w,h, per-eye coords) | u32 payload_len |
                  payload bytes
    End      (4): u64 frame_id (last completed)

Serialization is deterministic and the reader tolerates arbitrary TCP
segmentation; a clean EOF on a frame boundary reads as end-of-session.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Protocol, Union

from .image import Rect

PROTOCOL_VERSION = 1

MSG_HELLO = 1
MSG_POSE = 2
MSG_SUBFRAME = 3
MSG_END = 4

DEFAULT_MAX_FRAME = 64 * 1024 * 1024
MAX_PAYLOAD = 2**32 - 16

_HELLO_FMT = struct.Struct("<HHHHHfBBBI")
_POSE_FMT = struct.Struct("<Qfffffff")
_SUBFRAME_FMT = struct.Struct("<QBBHHHHI")
_END_FMT = struct.Struct("<Q")
_LEN_FMT = struct.Struct("<I")


class ProtocolError(RuntimeError):
    """The byte stream violates the framing or message contract."""


class ConnectionClosedError(ProtocolError):
    """The stream ended in the middle of a frame."""


class ByteStream(Protocol):
    def read(self, n: int) -> bytes:  # may return fewer than n bytes; b"" at EOF
        ...


@dataclass(frozen=True)
class HelloMsg:
    protocol_version: int
    full_w: int
    full_h: int
    fov_w: int
    fov_h: int
    periph_scale: float
    codec: int
    scene_id: int
    path_id: int
    frame_count: int


@dataclass(frozen=True)
class PoseUpdateMsg:
    frame_id: int
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]


@dataclass(frozen=True)
class SubframeMsg:
    frame_id: int
    eye: int
    codec: int
    rect: Rect
    payload: bytes


@dataclass(frozen=True)
class EndMsg:
    frame_id: int


Message = Union[HelloMsg, PoseUpdateMsg, SubframeMsg, EndMsg]


def write_msg(msg: Message) -> bytes:
    """Serializes one message to its full frame (length prefix included)."""
    if isinstance(msg, HelloMsg):
        body = _HELLO_FMT.pack(
            msg.protocol_version,
            msg.full_w,
            msg.full_h,
            msg.fov_w,
            msg.fov_h,
            msg.periph_scale,
            msg.codec,
            msg.scene_id,
            msg.path_id,
            msg.frame_count,
        )
        msg_type = MSG_HELLO
    elif isinstance(msg, PoseUpdateMsg):
        body = _POSE_FMT.pack(msg.frame_id, *msg.position, *msg.orientation)
        msg_type = MSG_POSE
    elif isinstance(msg, SubframeMsg):
        if len(msg.payload) > MAX_PAYLOAD:
            raise ProtocolError(f"payload of {len(msg.payload)} bytes exceeds {MAX_PAYLOAD}")
        body = _SUBFRAME_FMT.pack(
            msg.frame_id, msg.eye, msg.codec, *msg.rect, len(msg.payload)
        ) + msg.payload
        msg_type = MSG_SUBFRAME
    elif isinstance(msg, EndMsg):
        body = _END_FMT.pack(msg.frame_id)
        msg_type = MSG_END
    else:
        raise TypeError(f"not a wire message: {type(msg).__name__}")
    return _LEN_FMT.pack(len(body) + 1) + bytes([msg_type]) + body


def _read_exact(stream: ByteStream, n: int, at_boundary: bool) -> Optional[bytes]:
    """Reads exactly n bytes; None on clean EOF at a frame boundary."""
    chunks = []
    got = 0
    while got < n:
        chunk = stream.read(n - got)
        if not chunk:
            if at_boundary and got == 0:
                return None
            raise ConnectionClosedError(f"stream closed after {got} of {n} bytes")
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def _unpack_body(msg_type: int, body: bytes) -> Message:
    try:
        if msg_type == MSG_HELLO:
            return HelloMsg(*_HELLO_FMT.unpack(body))
        if msg_type == MSG_POSE:
            fields = _POSE_FMT.unpack(body)
            return PoseUpdateMsg(fields[0], fields[1:4], fields[4:8])
        if msg_type == MSG_SUBFRAME:
            header = _SUBFRAME_FMT.unpack_from(body)
            payload = body[_SUBFRAME_FMT.size :]
            if header[7] != len(payload):
                raise ProtocolError(
                    f"payload_len {header[7]} does not match {len(payload)} payload bytes"
                )
            return SubframeMsg(header[0], header[1], header[2], Rect(*header[3:7]), payload)
        if msg_type == MSG_END:
            return EndMsg(*_END_FMT.unpack(body))
    except struct.error as e:
        raise ProtocolError(f"malformed body for message type {msg_type}: {e}") from None
    raise ProtocolError(f"unknown message type {msg_type:#04x}")


def read_msg(stream: ByteStream, max_frame: int = DEFAULT_MAX_FRAME) -> Optional[Message]:
    """Reads one message, blocking until a full frame is available.

    Returns None on a clean EOF at a frame boundary (end of session).
    Handles arbitrary segmentation of the underlying byte stream.
    """
    prefix = _read_exact(stream, _LEN_FMT.size, at_boundary=True)
    if prefix is None:
        return None
    (length,) = _LEN_FMT.unpack(prefix)
    if length < 1:
        raise ProtocolError("frame length must cover the message type byte")
    if length > max_frame:
        raise ProtocolError(f"frame of {length} bytes exceeds limit {max_frame}")
    frame = _read_exact(stream, length, at_boundary=False)
    assert frame is not None
    return _unpack_body(frame[0], frame[1:])


def check_hello_version(hello: HelloMsg) -> None:
    """Rejects sessions whose protocol version we do not speak."""
    if hello.protocol_version != PROTOCOL_VERSION:
        raise ProtocolError(
            f"peer speaks protocol version {hello.protocol_version}, "
            f"this build supports {PROTOCOL_VERSION}"
        )
