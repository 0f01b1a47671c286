"""Dense image grids, periodic difference operators and rotation.

Images are plain 2-D ``float64`` numpy arrays; row index ``i`` grows
downward and column index ``j`` grows rightward.  Every difference operator
here wraps around the image borders, so it is circulant and diagonalized by
the 2-D DFT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

MIN_ROTATED_SIZE = 16


class InvalidImageError(ValueError):
    """Raised for non-finite, empty or mis-shaped image input."""


def as_image(img) -> np.ndarray:
    """Return ``img`` as a finite 2-D float64 array (copying only if needed)."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidImageError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidImageError("image contains NaN or Inf")
    return arr


def normalize(raw) -> np.ndarray:
    """Min-max rescale to [0, 1].

    A constant image maps to all zeros.
    """
    img = as_image(raw)
    lo, hi = img.min(), img.max()
    if hi == lo:
        return np.zeros_like(img)
    return (img - lo) / (hi - lo)


@dataclass(frozen=True)
class OffsetOperator:
    """Periodic difference ``out(i, j) = img(i, j) - img(i + a, j + b)``."""

    a: int
    b: int

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("offset (0, 0) is not a difference operator")


#: Horizontal and vertical differences used by the TV prior.
D_H = OffsetOperator(0, -1)
D_V = OffsetOperator(-1, 0)


def apply_offset_diff(img, op: OffsetOperator) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    return img - np.roll(img, (-op.a, -op.b), axis=(0, 1))


def apply_offset_diff_adjoint(img, op: OffsetOperator) -> np.ndarray:
    """Transpose of :func:`apply_offset_diff` under the Frobenius inner product."""
    img = np.asarray(img, dtype=np.float64)
    return img - np.roll(img, (op.a, op.b), axis=(0, 1))


def operator_spectrum(op: OffsetOperator, rows: int, cols: int) -> np.ndarray:
    """Transfer function of ``op`` on a ``rows x cols`` periodic grid.

    The returned complex array ``lam`` satisfies
    ``fft2(apply_offset_diff(g, op)) == lam * fft2(g)`` in numpy's
    unshifted frequency layout.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    u = np.arange(rows)[:, None]
    v = np.arange(cols)[None, :]
    # integer phase arithmetic keeps lam exactly 0 at DC
    phase = 2.0 * np.pi * (((op.a * u) % rows) / rows + ((op.b * v) % cols) / cols)
    return 1.0 - np.exp(1j * phase)


def _exact_sincos(angle_deg: float) -> tuple[float, float]:
    quarter = angle_deg / 90.0
    if quarter == int(quarter):
        return [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][int(quarter) % 4]
    rad = math.radians(angle_deg)
    return math.sin(rad), math.cos(rad)


def inscribed_extent(width: float, height: float, angle_deg: float) -> tuple[float, float]:
    """Largest axis-aligned rectangle inside a ``width x height`` rectangle
    rotated by ``angle_deg`` about its center.

    Returns ``(width, height)`` of that rectangle.
    """
    if width <= 0 or height <= 0:
        return 0.0, 0.0
    sin_a, cos_a = (abs(x) for x in _exact_sincos(angle_deg))
    wide = width >= height
    long_side, short_side = (width, height) if wide else (height, width)
    if short_side <= 2.0 * sin_a * cos_a * long_side or abs(sin_a - cos_a) < 1e-12:
        # half-constrained: two corners touch the longer sides
        x = 0.5 * short_side
        return (x / sin_a, x / cos_a) if wide else (x / cos_a, x / sin_a)
    cos_2a = cos_a * cos_a - sin_a * sin_a
    return ((width * cos_a - height * sin_a) / cos_2a,
            (height * cos_a - width * sin_a) / cos_2a)


def rotated_shape(shape: tuple[int, int], angle_deg: float) -> tuple[int, int]:
    """Output shape of :func:`rotate` for an input of ``shape``."""
    rows, cols = shape
    ext_w, ext_h = inscribed_extent(cols - 1, rows - 1, angle_deg)
    out_rows = int(math.floor(ext_h + 1e-9)) + 1
    out_cols = int(math.floor(ext_w + 1e-9)) + 1
    return out_rows - (out_rows - rows) % 2, out_cols - (out_cols - cols) % 2


def rotate(img, angle_deg: float, method: str = "bilinear") -> np.ndarray:
    """Rotate ``img`` counter-clockwise (as displayed) about its center.

    The output is cropped to the largest centered axis-aligned rectangle that
    is entirely covered by source pixels, so no padding value ever enters the
    result.  Output dimensions keep the parity of the input dimensions, which
    keeps output pixel centers on the input lattice at zero rotation.

    Parameters
    ----------
    img : array_like
        2-D image.
    angle_deg : float
        Rotation angle in degrees.
    method : {"bilinear", "nearest"}
        Resampling kernel.

    Returns
    -------
    ndarray
        Rotated and cropped image.
    """
    img = as_image(img)
    if method not in ("bilinear", "nearest"):
        raise ValueError(f"unknown interpolation method {method!r}")
    rows, cols = img.shape
    sin_a, cos_a = _exact_sincos(angle_deg)
    out_rows, out_cols = rotated_shape(img.shape, angle_deg)
    if out_rows < MIN_ROTATED_SIZE or out_cols < MIN_ROTATED_SIZE:
        raise InvalidImageError(
            f"rotation by {angle_deg} deg leaves only a {out_rows}x{out_cols} interior")

    ci, cj = (rows - 1) / 2.0, (cols - 1) / 2.0
    oi, oj = (out_rows - 1) / 2.0, (out_cols - 1) / 2.0
    ii, jj = np.mgrid[0:out_rows, 0:out_cols].astype(np.float64)
    # displayed coordinates: x rightward, y upward
    x = jj - oj
    y = oi - ii
    src_x = cos_a * x + sin_a * y
    src_y = -sin_a * x + cos_a * y
    src_i = np.clip(ci - src_y, 0.0, rows - 1)
    src_j = np.clip(cj + src_x, 0.0, cols - 1)
    if method == "nearest":
        return img[np.rint(src_i).astype(np.intp), np.rint(src_j).astype(np.intp)]
    return ndimage.map_coordinates(img, [src_i, src_j], order=1, mode="nearest")


def center_crop(img, shape: tuple[int, int]) -> np.ndarray:
    """Central ``shape`` window of ``img`` (top-left biased for odd margins)."""
    img = np.asarray(img)
    rows, cols = shape
    if rows > img.shape[0] or cols > img.shape[1]:
        raise InvalidImageError(f"cannot crop {img.shape} to {shape}")
    r0 = (img.shape[0] - rows) // 2
    c0 = (img.shape[1] - cols) // 2
    return img[r0:r0 + rows, c0:c0 + cols]
