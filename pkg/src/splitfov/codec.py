"""Lossless intra-frame image codecs for streamed subframes.

Two codecs share a wire-stable id: RAW ships pixel bytes verbatim;
PRED_DEFLATE subtracts a left-neighbor prediction per channel (first
column predicted from the row above, the top-left pixel from zero) and
compresses the mod-256 residual stream with raw DEFLATE (RFC 1951).
Payloads are self-describing given (codec, width, height); both codecs
round-trip every image exactly.
"""

from __future__ import annotations

import zlib
from enum import IntEnum

import numpy as np

from .image import validate_image

# Fixed compression level keeps encode output byte-stable within a build.
_DEFLATE_LEVEL = 6


class CodecId(IntEnum):
    """Wire-stable codec identifiers."""

    RAW = 0
    PRED_DEFLATE = 1


class CodecError(RuntimeError):
    """Payload cannot be decoded: truncated, corrupt, or mis-sized."""


def _predict_residuals(img: np.ndarray) -> np.ndarray:
    res = img.copy()
    res[:, 1:, :] = img[:, 1:, :] - img[:, :-1, :]  # uint8 wraps mod 256
    res[1:, 0, :] = img[1:, 0, :] - img[:-1, 0, :]
    return res


def _unpredict_residuals(res: np.ndarray) -> np.ndarray:
    img = res.copy()
    img[:, 0, :] = np.add.accumulate(img[:, 0, :], axis=0, dtype=np.uint8)
    return np.add.accumulate(img, axis=1, dtype=np.uint8)


def encode(codec: CodecId, img: np.ndarray) -> bytes:
    """Encodes an RGB8 image; deterministic for equal inputs."""
    validate_image(img)
    try:
        codec = CodecId(codec)
    except ValueError:
        raise CodecError(f"unknown codec id {codec!r}") from None
    if codec == CodecId.RAW:
        return img.tobytes()
    compressor = zlib.compressobj(_DEFLATE_LEVEL, zlib.DEFLATED, -zlib.MAX_WBITS)
    body = compressor.compress(_predict_residuals(img).tobytes())
    return body + compressor.flush()


def decode(codec: CodecId, data: bytes, w: int, h: int) -> np.ndarray:
    """Decodes `data` into a w x h RGB8 image.

    Never returns a partial image: truncated, corrupt, oversized, or
    trailing-garbage payloads raise CodecError.
    """
    try:
        codec = CodecId(codec)
    except ValueError:
        raise CodecError(f"unknown codec id {codec!r}") from None
    if w < 1 or h < 1:
        raise CodecError(f"image dims must be at least 1x1, got {w}x{h}")
    expected = w * h * 3
    if codec == CodecId.RAW:
        if len(data) != expected:
            raise CodecError(f"RAW payload is {len(data)} bytes, expected {expected}")
        return np.frombuffer(data, dtype=np.uint8).reshape(h, w, 3).copy()

    decomp = zlib.decompressobj(-zlib.MAX_WBITS)
    try:
        # Cap output at expected+1 so corrupt streams cannot balloon.
        raw = decomp.decompress(data, expected + 1)
    except zlib.error as e:
        raise CodecError(f"DEFLATE stream corrupt: {e}") from None
    if len(raw) != expected:
        raise CodecError(f"decompressed to {len(raw)} bytes, expected {expected}")
    if not decomp.eof:
        raise CodecError("DEFLATE stream truncated or oversized")
    if decomp.unused_data:
        raise CodecError(f"{len(decomp.unused_data)} trailing bytes after DEFLATE stream")
    res = np.frombuffer(raw, dtype=np.uint8).reshape(h, w, 3)
    return _unpredict_residuals(res)
