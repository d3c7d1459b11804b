"""Windowed structural similarity and keypoint-accuracy metrics.

SSIM uses the standard 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
K2 = 0.03 and dynamic range 1.0, computed per channel with symmetric
(reflect) border padding and averaged over channels; all accumulation is
in double precision. The keypoint metric is the mean of the
percentage-of-correct-keypoints curve over integer millimeter thresholds
0..150.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .skeleton import MM_SPACE, Pose
from .tensor import Image

__all__ = ["SsimParams", "PckCurve", "ssim", "ssim_fg", "pck_auc"]


@dataclass(frozen=True)
class SsimParams:
    """SSIM constants; defaults follow common practice for [0, 1] images."""

    window_size: int = 11
    window_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 1.0

    def __post_init__(self):
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValueError("window_size must be odd and >= 3")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("K1 and K2 must be > 0")
        if self.window_sigma <= 0 or self.data_range <= 0:
            raise ValueError("window_sigma and data_range must be > 0")

    @property
    def c1(self) -> float:
        return (self.k1 * self.data_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.data_range) ** 2

    def window1d(self) -> np.ndarray:
        half = self.window_size // 2
        offsets = np.arange(-half, half + 1, dtype=np.float64)
        g = np.exp(-(offsets**2) / (2.0 * self.window_sigma**2))
        return g / g.sum()

    def window(self) -> np.ndarray:
        """The normalized 2D window (sums to 1)."""
        g = self.window1d()
        return np.outer(g, g)


def _filtered(plane: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(plane, g, axis=0, mode="reflect")
    return ndimage.correlate1d(out, g, axis=1, mode="reflect")


def _check_image_pair(a: Image, b: Image, params: SsimParams):
    if a.data.shape != b.data.shape:
        raise ValueError(f"image shapes differ: {a.data.shape} vs {b.data.shape}")
    slack = 1e-6
    for name, img in (("first", a), ("second", b)):
        lo, hi = float(img.data.min()), float(img.data.max())
        if lo < -slack or hi > params.data_range + slack:
            raise ValueError(
                f"{name} image values [{lo}, {hi}] exceed [0, {params.data_range}]"
            )


def ssim_map(a: Image, b: Image, params: SsimParams | None = None) -> np.ndarray:
    """The per-pixel, per-channel SSIM map as float64 (H, W, C)."""
    params = params or SsimParams()
    _check_image_pair(a, b, params)
    g = params.window1d()
    c1, c2 = params.c1, params.c2
    h, w, c = a.data.shape
    out = np.empty((h, w, c), dtype=np.float64)
    for ch in range(c):
        x = a.data[:, :, ch].astype(np.float64)
        y = b.data[:, :, ch].astype(np.float64)
        mu_x = _filtered(x, g)
        mu_y = _filtered(y, g)
        var_x = _filtered(x * x, g) - mu_x * mu_x
        var_y = _filtered(y * y, g) - mu_y * mu_y
        cov = _filtered(x * y, g) - mu_x * mu_y
        out[:, :, ch] = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) / (
            (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
        )
    return out


def ssim(a: Image, b: Image, params: SsimParams | None = None) -> float:
    """Mean structural similarity over all pixels, averaged over channels."""
    smap = ssim_map(a, b, params)
    return float(smap.mean(axis=(0, 1)).mean())


def ssim_fg(
    a: Image, b: Image, fg_mask: Image, params: SsimParams | None = None
) -> float:
    """SSIM restricted to foreground pixels (mask value exactly 1)."""
    if fg_mask.data.shape[:2] != a.data.shape[:2] or fg_mask.channels != 1:
        raise ValueError("fg_mask must be a 1-channel image matching the pair")
    mask = fg_mask.data[:, :, 0]
    if not ((mask == 0.0) | (mask == 1.0)).all():
        raise ValueError("fg_mask must be binary")
    keep = mask == 1.0
    if not keep.any():
        raise ValueError("fg_mask selects no pixels")
    smap = ssim_map(a, b, params)
    return float(smap[keep].mean(axis=0).mean())


@dataclass(frozen=True, eq=False)
class PckCurve:
    """Fraction of joints within each integer millimeter threshold 0..150."""

    thresholds: np.ndarray
    pck: np.ndarray

    def __post_init__(self):
        thr = np.array(self.thresholds, dtype=np.float64)
        pck = np.array(self.pck, dtype=np.float64)
        if thr.shape != pck.shape or thr.ndim != 1:
            raise ValueError("thresholds and pck must be matching 1D arrays")
        if (np.diff(pck) < 0).any():
            raise ValueError("pck curve must be non-decreasing")
        if pck.min() < 0 or pck.max() > 1:
            raise ValueError("pck values must lie in [0, 1]")
        thr.setflags(write=False)
        pck.setflags(write=False)
        object.__setattr__(self, "thresholds", thr)
        object.__setattr__(self, "pck", pck)


def pck_auc(predicted: Pose, reference: Pose) -> tuple[PckCurve, float]:
    """PCK curve over 0..150 mm and its mean (the area under the curve).

    Joints are matched by name; both poses must be tagged millimeter
    space. The AUC is the arithmetic mean of the 151 threshold values.
    """
    for name, pose in (("predicted", predicted), ("reference", reference)):
        if pose.space != MM_SPACE:
            raise ValueError(f"{name} pose must be in millimeter space, got {pose.space!r}")
    if set(predicted.names) != set(reference.names):
        raise ValueError("poses must share the same joint names")
    ref = np.array([reference.position(n) for n in predicted.names])
    errors = np.linalg.norm(predicted.positions - ref, axis=1)
    thresholds = np.arange(151, dtype=np.float64)
    pck = (errors[None, :] <= thresholds[:, None]).mean(axis=1)
    curve = PckCurve(thresholds, pck)
    return curve, float(pck.mean())
