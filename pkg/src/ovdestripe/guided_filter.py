"""Self-guided filtering and background elimination ahead of orientation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import InvalidImageError, as_image


@dataclass(frozen=True)
class GuidedFilterParams:
    radius: int = 1
    eps: float = 0.01
    t: float = 5.0

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ValueError(f"radius must be an integer >= 1, got {self.radius}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")


def box_mean(img: np.ndarray, radius: int) -> np.ndarray:
    """Mean over the ``(2r+1)^2`` window around each pixel, truncated at the
    borders (each border window averages only its in-image pixels)."""
    rows, cols = img.shape
    sat = np.zeros((rows + 1, cols + 1))
    sat[1:, 1:] = img.cumsum(0).cumsum(1)
    i = np.arange(rows)
    j = np.arange(cols)
    i0 = np.clip(i - radius, 0, rows)[:, None]
    i1 = np.clip(i + radius + 1, 0, rows)[:, None]
    j0 = np.clip(j - radius, 0, cols)[None, :]
    j1 = np.clip(j + radius + 1, 0, cols)[None, :]
    total = sat[i1, j1] - sat[i0, j1] - sat[i1, j0] + sat[i0, j0]
    return total / ((i1 - i0) * (j1 - j0))


def guided_self_filter(y, params: GuidedFilterParams = GuidedFilterParams()) -> np.ndarray:
    """Guided filter with the image as its own guide.

    Each window ``w`` fits ``q = a_w * y + b_w`` with
    ``a_w = var_w / (var_w + eps)`` and ``b_w = mean_w * (1 - a_w)``; the
    coefficients of all windows covering a pixel are averaged.
    """
    y = as_image(y)
    r = params.radius
    if min(y.shape) < 2 * r + 1:
        raise InvalidImageError(
            f"image {y.shape} smaller than the {2 * r + 1}x{2 * r + 1} filter window")
    mean = box_mean(y, r)
    var = np.maximum(box_mean(y * y, r) - mean * mean, 0.0)
    a = var / (var + params.eps)
    b = mean * (1.0 - a)
    return box_mean(a, r) * y + box_mean(b, r)


def background_eliminate(y, params: GuidedFilterParams = GuidedFilterParams()) -> np.ndarray:
    """``t * (y - G(y, y))``, unclipped."""
    y = as_image(y)
    return params.t * (y - guided_self_filter(y, params))
