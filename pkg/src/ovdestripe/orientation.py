"""Stripe orientation from the dominant Fourier frequency.

Angles are measured counter-clockwise from the upward vertical of the
displayed image and reduced to ``[0, 180)``: 0 deg is a vertical stripe,
90 deg a horizontal one.  A candidate direction is an integer offset
``(a, b)``; its angle is that of the displacement from ``(i, j)`` to
``(i + a, j + b)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .guided_filter import GuidedFilterParams, background_eliminate
from .image import OffsetOperator, as_image

DEFAULT_RADIUS = 9


class OrientationUndeterminable(ValueError):
    """The image has no non-DC spectral content to orient."""


@dataclass(frozen=True)
class CandidateDirection(OffsetOperator):
    theta_deg: float

    def __str__(self):
        return f"{self.theta_deg:.2f} deg (a={self.a}, b={self.b})"


@dataclass(frozen=True)
class OrientationResult:
    theta_stripe_deg: float
    chosen: CandidateDirection
    dominant_freq: tuple[int, int]


def offset_angle(a: float, b: float) -> float:
    """Angle of the image-space displacement ``(di, dj) = (a, b)`` in [0, 180)."""
    theta = math.degrees(math.atan2(-b, -a)) % 180.0
    # atan2 can land a hair below 180 after the modulo
    return 0.0 if theta >= 180.0 - 1e-12 else theta


def enumerate_candidates(r: int = DEFAULT_RADIUS) -> list[CandidateDirection]:
    """Canonical offsets inside a ``(2r+1) x (2r+1)`` template, sorted by angle.

    The set is ``(-1, 0)`` plus every ``(a, b)`` with ``-r <= a <= r``,
    ``-r <= b <= -1`` and ``gcd(|a|, |b|) == 1``.
    """
    if int(r) != r or r < 1:
        raise ValueError(f"template radius must be an integer >= 1, got {r}")
    offsets = [(-1, 0)]
    for b in range(-r, 0):
        for a in range(-r, r + 1):
            if math.gcd(abs(a), abs(b)) == 1:
                offsets.append((a, b))
    cands = [CandidateDirection(a, b, offset_angle(a, b)) for a, b in offsets]
    cands.sort(key=lambda c: c.theta_deg)
    return cands


def dominant_frequency(e) -> tuple[int, int]:
    """Offset ``(du, dv)`` from DC of the largest-magnitude Fourier coefficient.

    Only the canonical half-plane (``du < 0``, or ``du == 0`` and ``dv > 0``)
    is searched, which picks one member of every conjugate pair.  Ties go to
    the lexicographically smallest ``(du, dv)``.
    """
    e = as_image(e)
    rows, cols = e.shape
    mag = np.abs(np.fft.fft2(e))
    du = np.rint(np.fft.fftfreq(rows) * rows).astype(int)[:, None]
    dv = np.rint(np.fft.fftfreq(cols) * cols).astype(int)[None, :]
    canonical = (du < 0) | ((du == 0) & (dv > 0))
    mag = np.where(canonical, mag, -1.0)
    peak = mag.max()
    if peak <= 1e-12 * max(1.0, np.abs(e).sum()):
        raise OrientationUndeterminable("orientation undeterminable: no non-DC spectral energy")
    ties = np.argwhere(mag >= peak * (1.0 - 1e-12))
    pairs = sorted((int(du[k, 0]), int(dv[0, l])) for k, l in ties)
    return pairs[0]


def frequency_to_angle(du: int, dv: int, rows: int, cols: int) -> float:
    """Stripe angle perpendicular to the spatial frequency ``(du/rows, dv/cols)``."""
    if du == 0 and dv == 0:
        raise ValueError("DC has no orientation")
    fi, fj = du / rows, dv / cols
    # the stripe runs along (di, dj) = (-fj, fi)
    return offset_angle(-fj, fi)


def circular_distance(theta1: float, theta2: float) -> float:
    d = abs(theta1 - theta2) % 180.0
    return min(d, 180.0 - d)


def select_candidate(theta_stripe_deg: float, candidates) -> CandidateDirection:
    """Candidate closest to ``theta_stripe_deg`` modulo 180; ties go to the
    smaller angle."""
    if not candidates:
        raise ValueError("empty candidate list")
    return min(candidates,
               key=lambda c: (circular_distance(c.theta_deg, theta_stripe_deg), c.theta_deg))


def estimate_orientation(y, gf: GuidedFilterParams = GuidedFilterParams(),
                         r: int = DEFAULT_RADIUS) -> OrientationResult:
    """Full orientation pipeline: background elimination, dominant
    frequency, perpendicular angle, nearest candidate."""
    y = as_image(y)
    e = background_eliminate(y, gf)
    du, dv = dominant_frequency(e)
    theta = frequency_to_angle(du, dv, *y.shape)
    return OrientationResult(theta, select_candidate(theta, enumerate_candidates(r)), (du, dv))
