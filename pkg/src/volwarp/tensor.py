"""Dense float32 tensor containers plus resampling and reshape primitives.

Conventions used throughout the package:

* volumes are indexed ``(y, x, z, c)`` and images ``(y, x, c)``, row-major;
* voxel ``(y, x, z)`` has its center at continuous coordinates ``(y, x, z)``,
  so integer lattice points address voxel centers directly;
* sampling outside the grid reads zeros, so features that move off the
  grid vanish instead of smearing border values.

All containers are immutable once constructed and safe to share between
threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Volume", "Image", "trilinear_sample", "lift", "project"]


def _as_frozen_f32(data, ndim: int, what: str) -> np.ndarray:
    """Coerce to a read-only, C-contiguous float32 array of rank ``ndim``."""
    arr = np.asarray(data)
    if arr.ndim != ndim:
        raise ValueError(f"{what} must have {ndim} axes, got {arr.ndim}")
    if min(arr.shape) < 1:
        raise ValueError(f"{what} axes must all be >= 1, got shape {arr.shape}")
    if arr.dtype != np.float32 or not arr.flags.c_contiguous:
        arr = np.ascontiguousarray(arr, dtype=np.float32)
    elif arr.flags.writeable:
        # never freeze an array the caller may still hold mutably
        arr = arr.copy(order="C")
    if not np.isfinite(arr).all():
        raise ValueError(f"{what} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Volume:
    """A dense ``(H, W, D, C)`` float32 feature volume."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _as_frozen_f32(self.data, 4, "volume"))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def depth(self) -> int:
        return self.data.shape[2]

    @property
    def channels(self) -> int:
        return self.data.shape[3]

    @property
    def dims(self) -> tuple[int, int, int]:
        """Spatial extents (H, W, D)."""
        return self.data.shape[:3]


@dataclass(frozen=True, eq=False)
class Image:
    """A dense ``(H, W, C)`` float32 image or 2D feature map."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _as_frozen_f32(self.data, 3, "image"))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


def _sample_grid(data: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Trilinearly sample ``data`` (H, W, D, C) at ``points`` (N, 3) float64.

    Blends the 8 surrounding voxel centers; corners outside the grid
    contribute zeros. Accumulation runs in float64 and the corner weights
    collapse to exact 0/1 on lattice points, so integer-coordinate samples
    reproduce stored values bit-exactly. Returns (N, C) float32.
    """
    h, w, d, _ = data.shape
    base = np.floor(points)
    frac = points - base
    base = base.astype(np.int64)
    acc = None
    for cy in (0, 1):
        iy = base[:, 0] + cy
        wy = frac[:, 0] if cy else 1.0 - frac[:, 0]
        oky = (iy >= 0) & (iy < h)
        iyc = np.clip(iy, 0, h - 1)
        for cx in (0, 1):
            ix = base[:, 1] + cx
            wx = frac[:, 1] if cx else 1.0 - frac[:, 1]
            okx = oky & (ix >= 0) & (ix < w)
            ixc = np.clip(ix, 0, w - 1)
            for cz in (0, 1):
                iz = base[:, 2] + cz
                wz = frac[:, 2] if cz else 1.0 - frac[:, 2]
                ok = okx & (iz >= 0) & (iz < d)
                izc = np.clip(iz, 0, d - 1)
                weight = np.where(ok, wy * wx * wz, 0.0)
                term = weight[:, None] * data[iyc, ixc, izc, :]
                acc = term if acc is None else acc + term
    return acc.astype(np.float32)


def _sample_grid_2d(data: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Bilinear analogue of :func:`_sample_grid` for (H, W, K) maps at (N, 2)."""
    h, w, _ = data.shape
    base = np.floor(points)
    frac = points - base
    base = base.astype(np.int64)
    acc = None
    for cy in (0, 1):
        iy = base[:, 0] + cy
        wy = frac[:, 0] if cy else 1.0 - frac[:, 0]
        oky = (iy >= 0) & (iy < h)
        iyc = np.clip(iy, 0, h - 1)
        for cx in (0, 1):
            ix = base[:, 1] + cx
            wx = frac[:, 1] if cx else 1.0 - frac[:, 1]
            ok = oky & (ix >= 0) & (ix < w)
            ixc = np.clip(ix, 0, w - 1)
            weight = np.where(ok, wy * wx, 0.0)
            term = weight[:, None] * data[iyc, ixc, :]
            acc = term if acc is None else acc + term
    return acc.astype(np.float32)


def trilinear_sample(volume: Volume, point) -> np.ndarray:
    """Sample the feature vector at a continuous ``(y, x, z)`` location.

    Args:
        volume: the volume to sample.
        point: finite 3-vector in voxel coordinates; voxel ``(y, x, z)``
            has its center at ``(y, x, z)``.

    Returns:
        float32 array of length ``volume.channels``. Locations outside
        ``[0, H-1] x [0, W-1] x [0, D-1]`` blend in zeros.
    """
    p = np.asarray(point, dtype=np.float64)
    if p.shape != (3,):
        raise ValueError(f"sample point must be a 3-vector, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("sample point must be finite")
    return _sample_grid(volume.data, p[None, :])[0]


def lift(image: Image, depth: int, channels: int) -> Volume:
    """Reshape a ``(H, W, D*C)`` map into a ``(H, W, D, C)`` volume.

    Pure reindexing: 2D channel ``k`` maps to depth ``k // C`` and channel
    ``k % C`` (depth-major grouping), so each depth slice occupies a
    contiguous block of 2D channels. Exact inverse of :func:`project`.
    """
    if depth < 1 or channels < 1:
        raise ValueError("depth and channels must be >= 1")
    if image.channels != depth * channels:
        raise ValueError(
            f"cannot split {image.channels} channels into {depth} x {channels}"
        )
    h, w = image.height, image.width
    return Volume(image.data.reshape(h, w, depth, channels))


def project(volume: Volume) -> Image:
    """Flatten a ``(H, W, D, C)`` volume into a ``(H, W, D*C)`` map.

    Exact inverse of :func:`lift` under the same depth-major index map.
    """
    h, w, d, c = volume.data.shape
    return Image(volume.data.reshape(h, w, d * c))
