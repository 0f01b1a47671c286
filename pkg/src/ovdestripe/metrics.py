"""Full-reference (MAE, PSNR, SSIM) and non-reference (ICV, MRD) indices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

ICV_SENTINEL = 1e6
STRIPED = "striped-homogeneous"
NOISE_FREE = "noise-free"

_SSIM_K1, _SSIM_K2 = 0.01, 0.03
_SSIM_WIN, _SSIM_SIGMA = 11, 1.5


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def mae(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean(np.abs(a - b)))


def psnr(a, b, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    a, b = _pair(a, b)
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(peak ** 2 / mse))


def gaussian_window(size: int = _SSIM_WIN, sigma: float = _SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-x ** 2 / (2 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim_map(a, b, data_range: float = 1.0) -> np.ndarray:
    """Local SSIM for every fully contained 11x11 Gaussian window."""
    a, b = _pair(a, b)
    if min(a.shape) < _SSIM_WIN:
        raise ValueError(f"image {a.shape} smaller than the {_SSIM_WIN}x{_SSIM_WIN} SSIM window")
    w = gaussian_window()
    c1 = (_SSIM_K1 * data_range) ** 2
    c2 = (_SSIM_K2 * data_range) ** 2

    def filt(x):
        return signal.correlate(x, w, mode="valid", method="direct")

    mu_a, mu_b = filt(a), filt(b)
    var_a = filt(a * a) - mu_a ** 2
    var_b = filt(b * b) - mu_b ** 2
    cov = filt(a * b) - mu_a * mu_b
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)
            / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)))


def ssim(a, b, data_range: float = 1.0) -> float:
    """Mean SSIM (K1 = 0.01, K2 = 0.03, 11x11 Gaussian window, sigma 1.5)."""
    return float(ssim_map(a, b, data_range).mean())


@dataclass(frozen=True)
class Window:
    tag: str
    row0: int
    col0: int
    height: int = 10
    width: int = 10

    def __post_init__(self):
        if self.tag not in (STRIPED, NOISE_FREE):
            raise ValueError(f"unknown window tag {self.tag!r}")
        if self.height < 1 or self.width < 1 or self.row0 < 0 or self.col0 < 0:
            raise ValueError(f"bad window geometry {self}")

    def extract(self, img: np.ndarray) -> np.ndarray:
        if self.row0 + self.height > img.shape[0] or self.col0 + self.width > img.shape[1]:
            raise ValueError(f"window {self} outside image of shape {img.shape}")
        return img[self.row0:self.row0 + self.height, self.col0:self.col0 + self.width]


class SampleWindows(list):
    """List of :class:`Window` with tag filtering and a text loader."""

    def tagged(self, tag: str) -> "SampleWindows":
        return SampleWindows(w for w in self if w.tag == tag)

    @classmethod
    def load(cls, path) -> "SampleWindows":
        """Parse ``tag row0 col0 height width`` lines; ``#`` starts a comment."""
        windows = cls()
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 5:
                    raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
                try:
                    windows.append(Window(parts[0], *(int(p) for p in parts[1:])))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from exc
        return windows

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("# tag row0 col0 height width\n")
            for w in self:
                fh.write(f"{w.tag} {w.row0} {w.col0} {w.height} {w.width}\n")


@dataclass
class ICVResult:
    values: np.ndarray
    flagged: np.ndarray  # True where the window was constant


def icv(img, windows) -> ICVResult:
    """Inverse coefficient of variation (mean / population std) per window.

    Constant windows report :data:`ICV_SENTINEL` and are flagged.
    """
    img = np.asarray(img, dtype=np.float64)
    windows = list(windows)
    if not windows:
        raise ValueError("no ICV windows given")
    values, flagged = [], []
    for w in windows:
        patch = w.extract(img)
        sd = patch.std()
        if sd == 0:
            values.append(ICV_SENTINEL)
            flagged.append(True)
        else:
            values.append(patch.mean() / sd)
            flagged.append(False)
    return ICVResult(np.array(values), np.array(flagged))


@dataclass
class MRDResult:
    value: float
    excluded: int  # zero-valued noisy pixels skipped


def mrd(noisy, destriped, windows) -> MRDResult:
    """Mean relative deviation in percent over all window pixels.

    Pixels where ``noisy`` is zero are skipped and counted in ``excluded``.
    """
    noisy, destriped = _pair(noisy, destriped)
    windows = list(windows)
    if not windows:
        raise ValueError("no MRD windows given")
    ref = np.concatenate([w.extract(noisy).ravel() for w in windows])
    out = np.concatenate([w.extract(destriped).ravel() for w in windows])
    ok = ref != 0
    if not ok.any():
        return MRDResult(float("nan"), int(ref.size))
    rel = np.abs(out[ok] - ref[ok]) / np.abs(ref[ok])
    return MRDResult(float(100.0 * rel.mean()), int((~ok).sum()))


@dataclass
class MetricReport:
    mae: float | None = None
    psnr: float | None = None
    ssim: float | None = None
    icv: ICVResult | None = None
    mrd: MRDResult | None = None


def full_reference(result, truth) -> MetricReport:
    return MetricReport(mae=mae(result, truth), psnr=psnr(result, truth), ssim=ssim(result, truth))
