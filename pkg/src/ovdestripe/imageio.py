"""Reading and writing single-band images.

Supported formats, picked by file extension:

``.png``
    8- or 16-bit grayscale.  Read as ``value / maxval``.
``.pgm``
    Binary PGM (P5), 8- or 16-bit (big-endian).  Read as ``value / maxval``.
``.obds``
    Lossless raw float32: 16-byte little-endian header (magic ``b"OBDS"``,
    u32 rows, u32 cols, u32 reserved = 0) followed by row-major float32
    pixels.
"""
from __future__ import annotations

import os
import re
import struct

import numpy as np
from PIL import Image as PILImage

from .image import InvalidImageError, as_image

RAW_MAGIC = b"OBDS"
_RAW_HEADER = struct.Struct("<4sIII")


class ImageFormatError(InvalidImageError):
    """Unreadable, corrupt or unsupported image file."""


def _ext(path) -> str:
    return os.path.splitext(os.fspath(path))[1].lower()


def read_raw(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(_RAW_HEADER.size)
        if len(header) != _RAW_HEADER.size:
            raise ImageFormatError(f"{path}: truncated header")
        magic, rows, cols, _ = _RAW_HEADER.unpack(header)
        if magic != RAW_MAGIC:
            raise ImageFormatError(f"{path}: bad magic {magic!r}")
        data = np.frombuffer(fh.read(), dtype="<f4")
    if rows == 0 or cols == 0 or data.size != rows * cols:
        raise ImageFormatError(f"{path}: expected {rows}x{cols} pixels, found {data.size}")
    return data.reshape(rows, cols).astype(np.float64)


def write_raw(path, img) -> None:
    img = as_image(img)
    rows, cols = img.shape
    with open(path, "wb") as fh:
        fh.write(_RAW_HEADER.pack(RAW_MAGIC, rows, cols, 0))
        fh.write(img.astype("<f4").tobytes())


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(buf, pos)
        if m is None:
            raise ImageFormatError(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise ImageFormatError(f"{path}: not a binary PGM (P5) file")
    try:
        cols, rows, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"{path}: malformed PGM header") from exc
    if not 0 < maxval < 65536:
        raise ImageFormatError(f"{path}: bad maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = rows * cols
    if count == 0 or len(buf) - pos < count * dtype.itemsize:
        raise ImageFormatError(f"{path}: truncated PGM pixel data")
    data = np.frombuffer(buf, dtype=dtype, count=count, offset=pos)
    return data.reshape(rows, cols).astype(np.float64) / maxval


def _quantize(img, bits: int) -> np.ndarray:
    maxval = (1 << bits) - 1
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    return q.astype(np.uint16 if bits == 16 else np.uint8)


def write_pgm(path, img, bits: int = 16) -> None:
    q = _quantize(as_image(img), bits)
    rows, cols = q.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n%d\n" % (cols, rows, (1 << bits) - 1))
        fh.write(q.astype(">u2" if bits == 16 else "u1").tobytes())


def read_png(path) -> np.ndarray:
    try:
        with PILImage.open(path) as im:
            mode = im.mode
            arr = np.asarray(im)
    except (OSError, SyntaxError) as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc
    if arr.ndim != 2:
        raise ImageFormatError(f"{path}: expected single-band image, got mode {mode}")
    maxval = 255.0 if arr.dtype == np.uint8 else 65535.0
    if mode == "1":
        maxval = 1.0
    return arr.astype(np.float64) / maxval


def write_png(path, img, bits: int = 16) -> None:
    q = _quantize(as_image(img), bits)
    # uint8 -> mode "L", uint16 -> mode "I;16"
    PILImage.fromarray(q).save(path, format="PNG")


def read_image(path) -> np.ndarray:
    """Read ``path`` into a float64 array; integer formats map to [0, 1]."""
    ext = _ext(path)
    if not os.path.exists(path):
        raise ImageFormatError(f"{path}: no such file")
    if ext == ".obds":
        img = read_raw(path)
    elif ext == ".pgm":
        img = read_pgm(path)
    elif ext == ".png":
        img = read_png(path)
    else:
        raise ImageFormatError(f"{path}: unsupported extension {ext!r}")
    try:
        return as_image(img)
    except InvalidImageError as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc


def write_image(path, img, bits: int = 16) -> None:
    """Write ``img``; integer formats clip to [0, 1] before quantizing."""
    ext = _ext(path)
    if ext == ".obds":
        write_raw(path, img)
    elif ext == ".pgm":
        write_pgm(path, img, bits)
    elif ext == ".png":
        write_png(path, img, bits)
    else:
        raise ImageFormatError(f"{path}: unsupported extension {ext!r}")
