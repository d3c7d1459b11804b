"""Masked per-part warping with max composition, plus background handling.

The central operation: each part's mask is applied to the feature volume
by voxelwise multiplication, the masked copy is warped by the part's
transform, and the per-part results are combined with the elementwise
maximum. Warping is backward: every output voxel center is mapped through
the inverse transform and the masked source volume is interpolated there,
so the result has no holes and out-of-grid samples read zero.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .tensor import Image, Volume, _sample_grid, _sample_grid_2d
from .transform import Affine2, Helmert3
from .voxelize import PartMask

__all__ = [
    "masked_warp_3d",
    "masked_warp_2d",
    "inpaint_background",
    "composite",
]


def _check_parts(volume, masks, transforms, kind):
    if len(masks) == 0 or len(masks) != len(transforms):
        raise ValueError(
            f"need equally many masks and transforms, got {len(masks)} and {len(transforms)}"
        )
    for m in masks:
        if not isinstance(m, PartMask):
            raise TypeError("masks must be PartMask instances")
        if m.dims != volume.dims:
            raise ValueError(f"mask dims {m.dims} do not match volume {volume.dims}")
    for t in transforms:
        if not isinstance(t, kind):
            raise TypeError(f"transforms must be {kind.__name__} instances")


def _voxel_centers(h, w, d) -> np.ndarray:
    grid = np.indices((h, w, d), dtype=np.float64)
    return grid.reshape(3, -1).T


def _support_box(mask: np.ndarray):
    """Inclusive (lo, hi) bounds of the nonzero region, or None if empty."""
    nz = np.nonzero(mask)
    if nz[0].size == 0:
        return None
    return (
        np.array([idx.min() for idx in nz], dtype=np.float64),
        np.array([idx.max() for idx in nz], dtype=np.float64),
    )


def _warp_part_3d(volume_data, mask, transform, grid):
    """Backward-sample one masked part over every output voxel center.

    Only voxels whose inverse image lands within one voxel of the mask's
    support box are interpolated; everything else is exactly zero because
    all eight interpolation corners read zeros there.
    """
    h, w, d, c = volume_data.shape
    out = np.zeros((h * w * d, c), dtype=np.float32)
    box = _support_box(mask.data)
    if box is None:
        return out.reshape(h, w, d, c)
    masked = mask.data[:, :, :, None] * volume_data
    points = transform.invert().apply(grid)
    lo, hi = box
    near = np.ones(len(points), dtype=bool)
    for axis in range(3):
        near &= (points[:, axis] >= lo[axis] - 1.0) & (points[:, axis] <= hi[axis] + 1.0)
    if near.any():
        out[near] = _sample_grid(masked, points[near])
    return out.reshape(h, w, d, c)


def masked_warp_3d(
    volume: Volume,
    masks: list[PartMask],
    transforms: list[Helmert3],
    threads: int = 1,
) -> Volume:
    """Mask, warp, and max-compose the volume part by part.

    Output voxel ``x``, channel ``c`` is the maximum over parts ``i`` of the
    trilinear sample of ``mask_i * volume`` at ``invert(T_i)(x)``. The max
    runs per voxel per channel; part order does not change the result, and
    with any ``threads`` value the output is bit-identical to the
    sequential evaluation (parts are reduced in a fixed order).
    """
    _check_parts(volume, masks, transforms, Helmert3)
    h, w, d, _ = volume.data.shape
    grid = _voxel_centers(h, w, d)

    def sample(pair):
        mask, t = pair
        return _warp_part_3d(volume.data, mask, t, grid)

    pairs = list(zip(masks, transforms))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sampled = list(pool.map(sample, pairs))
    else:
        sampled = [sample(p) for p in pairs]
    out = sampled[0]
    for part in sampled[1:]:
        np.maximum(out, part, out=out)
    out.setflags(write=False)
    return Volume(out)


def _warp_part_2d(volume_data, mask, affine):
    """Slice-wise backward bilinear warp of one depth-replicated masked part."""
    h, w, d, c = volume_data.shape
    projected = mask.data.max(axis=2)
    out = np.zeros((h * w, d * c), dtype=np.float32)
    box = _support_box(projected)
    if box is None:
        return out.reshape(h, w, d, c)
    flat = (projected[:, :, None, None] * volume_data).reshape(h, w, d * c)
    grid = np.indices((h, w), dtype=np.float64).reshape(2, -1).T
    points = affine.invert().apply(grid)
    lo, hi = box
    near = (
        (points[:, 0] >= lo[0] - 1.0)
        & (points[:, 0] <= hi[0] + 1.0)
        & (points[:, 1] >= lo[1] - 1.0)
        & (points[:, 1] <= hi[1] + 1.0)
    )
    if near.any():
        out[near] = _sample_grid_2d(flat, points[near])
    return out.reshape(h, w, d, c)


def masked_warp_2d(
    volume: Volume,
    masks: list[PartMask],
    affines: list[Affine2],
    threads: int = 1,
) -> Volume:
    """Planar ablation of :func:`masked_warp_3d`.

    Each mask is replaced by its depth projection replicated to all
    layers, every depth slice of the masked volume is warped by the same
    2D affine (backward bilinear, no cross-depth mixing), and parts are
    composed by elementwise max.
    """
    _check_parts(volume, masks, affines, Affine2)

    def sample(pair):
        mask, a = pair
        return _warp_part_2d(volume.data, mask, a)

    pairs = list(zip(masks, affines))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sampled = list(pool.map(sample, pairs))
    else:
        sampled = [sample(p) for p in pairs]
    out = sampled[0]
    for part in sampled[1:]:
        np.maximum(out, part, out=out)
    out.setflags(write=False)
    return Volume(out)


def _neighbors(y, x, h, w):
    if y > 0:
        yield y - 1, x
    if y + 1 < h:
        yield y + 1, x
    if x > 0:
        yield y, x - 1
    if x + 1 < w:
        yield y, x + 1


def inpaint_background(image: Image, bg_mask: Image) -> Image:
    """Fill non-background pixels by iterative 4-neighbor averaging.

    Pixels where ``bg_mask`` is 1 are known and kept verbatim. Unknown
    pixels are repeatedly assigned the mean of their known or
    already-filled 4-neighbors, sweeping in row-major order and
    alternating forward/backward per sweep, until everything is filled;
    three extra averaging sweeps then smooth the filled region. Filled
    values are convex combinations of known values, so they stay within
    the known per-channel range.
    """
    h, w, _ = image.data.shape
    if bg_mask.data.shape[:2] != (h, w) or bg_mask.channels != 1:
        raise ValueError("bg_mask must be a 1-channel image matching the input size")
    mask = bg_mask.data[:, :, 0]
    if not ((mask == 0.0) | (mask == 1.0)).all():
        raise ValueError("bg_mask must be binary")
    known = mask == 1.0
    if not known.any():
        raise ValueError("background mask is empty: nothing to inpaint from")
    if known.all():
        return Image(image.data)

    values = image.data.astype(np.float64)
    values[~known] = 0.0
    filled = known.copy()
    unknown = [(y, x) for y in range(h) for x in range(w) if not known[y, x]]
    remaining = len(unknown)
    sweep = 0
    while remaining:
        progressed = False
        order = unknown if sweep % 2 == 0 else unknown[::-1]
        for y, x in order:
            if filled[y, x]:
                continue
            total = None
            count = 0
            for ny, nx in _neighbors(y, x, h, w):
                if filled[ny, nx]:
                    total = values[ny, nx] if total is None else total + values[ny, nx]
                    count += 1
            if count:
                values[y, x] = total / count
                filled[y, x] = True
                remaining -= 1
                progressed = True
        if not progressed:
            raise RuntimeError("inpainting stalled")  # unreachable on a grid
        sweep += 1
    for _ in range(3):
        order = unknown if sweep % 2 == 0 else unknown[::-1]
        for y, x in order:
            total = None
            count = 0
            for ny, nx in _neighbors(y, x, h, w):
                total = values[ny, nx] if total is None else total + values[ny, nx]
                count += 1
            values[y, x] = total / count
        sweep += 1
    return Image(values.astype(np.float32))


def composite(fg: Image, fg_mask: Image, bg: Image) -> Image:
    """Alpha-blend: ``mask * fg + (1 - mask) * bg`` per pixel per channel."""
    if fg.data.shape != bg.data.shape:
        raise ValueError(f"fg/bg shapes differ: {fg.data.shape} vs {bg.data.shape}")
    if fg_mask.data.shape[:2] != fg.data.shape[:2] or fg_mask.channels != 1:
        raise ValueError("fg_mask must be a 1-channel image matching fg/bg")
    alpha = fg_mask.data.astype(np.float64)
    if alpha.min() < 0.0 or alpha.max() > 1.0:
        raise ValueError("fg_mask values must lie in [0, 1]")
    blended = alpha * fg.data + (1.0 - alpha) * bg.data
    return Image(blended.astype(np.float32))
