"""Ground-truthed oblique stripe data.

Stripes are synthesized along image columns (``vertical``) or rows
(``horizontal``) on a clean base, then the degraded image and the clean base
are rotated together so that the pair stays pixel aligned.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .image import as_image, center_crop, normalize, rotate, rotated_shape

#: Builtin procedural bases: name -> (output size, seed, texture weight).
BUILTIN_BASES = {
    "smooth200": (200, 11, 0.0),
    "smooth256": (256, 5, 0.2),
    "smooth400": (400, 23, 0.1),
}


@dataclass(frozen=True)
class StripeSpec:
    kind: str = "random"
    orientation_axis: str = "vertical"
    amplitude: float = 0.1
    period: int = 6
    coverage: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("periodic", "random"):
            raise ValueError(f"kind must be 'periodic' or 'random', got {self.kind!r}")
        if self.orientation_axis not in ("vertical", "horizontal"):
            raise ValueError(f"orientation_axis must be 'vertical' or 'horizontal', "
                             f"got {self.orientation_axis!r}")
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError("coverage must lie in [0, 1]")
        if int(self.period) != self.period or self.period < 2:
            raise ValueError("period must be an integer >= 2")


def line_offsets(n_lines: int, spec: StripeSpec) -> np.ndarray:
    """Per-line additive offsets for ``n_lines`` detector lines."""
    if spec.kind == "periodic":
        k = np.arange(n_lines) % spec.period
        return spec.amplitude * np.cos(2.0 * np.pi * k / spec.period)
    rng = np.random.default_rng(spec.seed)
    selected = rng.random(n_lines) < spec.coverage
    values = rng.uniform(-spec.amplitude, spec.amplitude, n_lines)
    return np.where(selected, values, 0.0)


def add_stripes(clean, spec: StripeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(clean + field, field)`` with ``field`` constant along each line."""
    clean = as_image(clean)
    rows, cols = clean.shape
    if spec.orientation_axis == "vertical":
        field = np.broadcast_to(line_offsets(cols, spec)[None, :], clean.shape).copy()
    else:
        field = np.broadcast_to(line_offsets(rows, spec)[:, None], clean.shape).copy()
    return clean + field, field


def make_oblique(degraded, clean, angle_deg: float, size=None) -> tuple[np.ndarray, np.ndarray]:
    """Rotate a degraded/clean pair by the same angle (bilinear, same crop).

    ``size`` (int or ``(rows, cols)``) optionally center-crops both results.
    """
    degraded = as_image(degraded)
    clean = as_image(clean)
    if degraded.shape != clean.shape:
        raise ValueError(f"shape mismatch: {degraded.shape} vs {clean.shape}")
    y = rotate(degraded, angle_deg, "bilinear")
    x = rotate(clean, angle_deg, "bilinear")
    if size is not None:
        shape = (size, size) if np.isscalar(size) else tuple(size)
        y, x = center_crop(y, shape), center_crop(x, shape)
    return y.copy(), x.copy()


def add_gaussian_noise(img, sigma: float, seed: int = 0) -> np.ndarray:
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    img = as_image(img)
    if sigma == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return img + rng.normal(0.0, sigma, img.shape)


def synthetic_base(shape, seed: int = 0, texture: float = 0.2,
                   n_waves: int = 6, n_blobs: int = 6) -> np.ndarray:
    """Procedural clean image normalized to [0, 1].

    Low-frequency sinusoids plus flat elliptical regions, with an optional
    band of fine Gaussian-correlated texture.  Geometry is expressed in a
    resolution-independent unit square so that different ``shape`` values
    show the same scene.
    """
    rows, cols = (shape, shape) if np.isscalar(shape) else shape
    rng = np.random.default_rng(seed)
    scale = max(rows, cols)
    y, x = np.mgrid[0:rows, 0:cols] / scale
    img = np.zeros((rows, cols))
    for _ in range(n_waves):
        fx, fy = rng.uniform(0.3, 3.0, 2) * rng.choice([-1.0, 1.0], 2)
        img += rng.uniform(0.2, 1.0) * np.cos(
            2 * np.pi * (fx * x + fy * y) + rng.uniform(0, 2 * np.pi))
    cy, cx = rows / scale / 2, cols / scale / 2
    for _ in range(n_blobs):
        by, bx = cy + rng.uniform(-0.4, 0.4), cx + rng.uniform(-0.4, 0.4)
        ry, rx = rng.uniform(0.05, 0.18, 2)
        phi = rng.uniform(0, math.pi)
        u = (x - bx) * math.cos(phi) + (y - by) * math.sin(phi)
        v = -(x - bx) * math.sin(phi) + (y - by) * math.cos(phi)
        inside = (u / rx) ** 2 + (v / ry) ** 2 <= 1.0
        img[inside] = rng.uniform(-2.0, 2.0)
    if texture > 0:
        noise = ndimage.gaussian_filter(rng.standard_normal((rows, cols)), 1.5)
        img = normalize(img) + texture * noise / noise.std() * 0.1
    return normalize(img)


def builtin_base(name: str) -> tuple[np.ndarray, int]:
    """Procedural base large enough to survive any rotation plus the final
    crop size for builtin ``name``."""
    try:
        size, seed, texture = BUILTIN_BASES[name]
    except KeyError:
        raise ValueError(f"unknown builtin base {name!r}; "
                         f"choose from {sorted(BUILTIN_BASES)}") from None
    return synthetic_base(rotation_margin(size), seed=seed, texture=texture), size


def rotation_margin(size: int) -> int:
    """Base size whose rotated interior still holds a ``size`` square at any angle."""
    return int(math.ceil(size * math.sqrt(2.0))) + 4


@dataclass
class SimulatedCase:
    degraded: np.ndarray
    truth: np.ndarray
    angle_deg: float
    metadata: dict


def simulate_group(base, spec: StripeSpec, angles, size=None) -> list[SimulatedCase]:
    """Stripe ``base`` once, then produce one aligned pair per angle."""
    base = as_image(base)
    degraded, _ = add_stripes(base, spec)
    cases = []
    for angle in angles:
        y, x = make_oblique(degraded, base, angle, size)
        rot_rows, rot_cols = rotated_shape(base.shape, angle)
        meta = {"angle": float(angle), **asdict(spec),
                "base_rows": base.shape[0], "base_cols": base.shape[1],
                "rotated_rows": rot_rows, "rotated_cols": rot_cols,
                "crop_row0": (rot_rows - y.shape[0]) // 2,
                "crop_col0": (rot_cols - y.shape[1]) // 2,
                "rows": y.shape[0], "cols": y.shape[1]}
        cases.append(SimulatedCase(y, x, float(angle), meta))
    return cases


def random_angles(n: int, seed: int, low: float = 0.0, high: float = 45.0) -> np.ndarray:
    """``n`` seeded angles uniform in ``[low, high)``, rounded to 0.01 deg."""
    rng = np.random.default_rng(seed)
    return np.round(rng.uniform(low, high, n), 2)


def write_metadata(path, meta: dict) -> None:
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"{key}={value}\n")


def read_metadata(path) -> dict:
    meta = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                key, _, value = line.partition("=")
                meta[key.strip()] = value.strip()
    return meta
