"""Capsule rasterization, part masks, joint heatmaps, and background masks.

A capsule is the set of points within ``radius`` of the closed segment
between two endpoints; coincident endpoints degenerate to a sphere. A
voxel belongs to a capsule iff its center does, with rasterization
restricted to the capsule's bounding box (voxels outside it are provably
farther than the radius).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .skeleton import Pose, SkeletonConfig, PartDefinition, VOXEL_SPACE
from .tensor import Image, Volume, _as_frozen_f32

__all__ = [
    "PartMask",
    "HeatmapParams",
    "capsule_mask",
    "part_masks",
    "background_mask",
    "gaussian_heatmaps",
    "heatmaps_2d_mode",
]


@dataclass(frozen=True, eq=False)
class PartMask:
    """Binary ``(H, W, D)`` occupancy grid for one body part, stored as f32."""

    data: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = _as_frozen_f32(self.data, 3, "mask")
        if not ((arr == 0.0) | (arr == 1.0)).all():
            raise ValueError("mask values must be exactly 0.0 or 1.0")
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def count(self) -> int:
        """Number of set voxels."""
        return int(self.data.sum())


@dataclass(frozen=True)
class HeatmapParams:
    """Gaussian heatmap shape: per-joint sigma and the cutoff radius in sigmas."""

    sigma: float = 2.0
    truncation: float = 3.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if not self.truncation >= 1:
            raise ValueError("truncation must be >= 1")


def _check_dims(dims):
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise ValueError(f"dims must be three positive ints, got {dims}")
    return dims


def _check_point(p, what="point"):
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (3,) or not np.isfinite(p).all():
        raise ValueError(f"{what} must be a finite 3-vector")
    return p


def _capsule_field(dims, p0, p1, radius, falloff=False) -> np.ndarray:
    """Rasterize one capsule into a full f32 grid.

    Endpoints are put in a canonical order first so the result is exactly
    symmetric under endpoint swap. With ``falloff`` the interior carries
    ``1 - d / (2 r)`` (1 on the axis, 0.5 at the surface, strictly positive
    everywhere inside) instead of the constant 1.
    """
    a = _check_point(p0, "capsule endpoint")
    b = _check_point(p1, "capsule endpoint")
    if not np.isfinite(radius) or radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if tuple(b) < tuple(a):
        a, b = b, a
    field = np.zeros(dims, dtype=np.float32)
    lo = np.maximum(np.floor(np.minimum(a, b) - radius), 0).astype(int)
    hi = np.minimum(np.ceil(np.maximum(a, b) + radius), np.array(dims) - 1).astype(int)
    if (lo > hi).any():
        return field
    yy = np.arange(lo[0], hi[0] + 1, dtype=np.float64)[:, None, None]
    xx = np.arange(lo[1], hi[1] + 1, dtype=np.float64)[None, :, None]
    zz = np.arange(lo[2], hi[2] + 1, dtype=np.float64)[None, None, :]
    seg = b - a
    seg_sq = float(seg @ seg)
    if seg_sq < 1e-24:
        dist_sq = (yy - a[0]) ** 2 + (xx - a[1]) ** 2 + (zz - a[2]) ** 2
    else:
        t = (yy - a[0]) * seg[0] + (xx - a[1]) * seg[1] + (zz - a[2]) * seg[2]
        t = np.clip(t / seg_sq, 0.0, 1.0)
        dist_sq = (
            (yy - (a[0] + t * seg[0])) ** 2
            + (xx - (a[1] + t * seg[1])) ** 2
            + (zz - (a[2] + t * seg[2])) ** 2
        )
    inside = dist_sq <= radius * radius
    if falloff:
        values = np.where(inside, 1.0 - np.sqrt(dist_sq) / (2.0 * radius), 0.0)
    else:
        values = inside.astype(np.float64)
    field[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1, lo[2] : hi[2] + 1] = values
    return field


def capsule_mask(dims, p0, p1, radius: float, name: str = "") -> PartMask:
    """Voxels whose centers lie within ``radius`` of the segment [p0, p1].

    A capsule entirely outside the grid yields an all-zero mask and a
    warning rather than an error.
    """
    dims = _check_dims(dims)
    field = _capsule_field(dims, p0, p1, radius)
    if field.max() == 0.0:
        warnings.warn(
            f"capsule {name or '(anonymous)'} lies outside the {dims} grid",
            stacklevel=2,
        )
    return PartMask(field, name)


def _part_capsules(part: PartDefinition, pose: Pose, radius_scale: float):
    """The capsule segments and radius realizing one part.

    Two-joint parts are a single capsule with the radius rule applied to
    the bone length. Four-joint parts (the torso, joint order
    [l_shoulder, r_shoulder, l_hip, r_hip]) are a union of four capsules:
    both same-side shoulder-to-hip segments plus the shoulder-to-shoulder
    and hip-to-hip crossbars, all using the radius rule applied to the
    shoulder-midpoint-to-hip-midpoint distance.
    """
    pts = [pose.position(j) for j in part.defining_joints]
    if len(pts) == 2:
        length = float(np.linalg.norm(pts[1] - pts[0]))
        r = part.radius.resolve(length) * radius_scale
        return [(pts[0], pts[1], r)]
    ref = float(np.linalg.norm(0.5 * (pts[0] + pts[1]) - 0.5 * (pts[2] + pts[3])))
    r = part.radius.resolve(ref) * radius_scale
    return [
        (pts[0], pts[2], r),
        (pts[1], pts[3], r),
        (pts[0], pts[1], r),
        (pts[2], pts[3], r),
    ]


def part_masks(
    pose: Pose, cfg: SkeletonConfig, dims, radius_scale: float = 1.0
) -> list[PartMask]:
    """One capsule mask per configured part, in config order.

    Masks may overlap; a part that falls entirely off the grid produces an
    all-zero mask with a warning.
    """
    dims = _check_dims(dims)
    if pose.space != VOXEL_SPACE:
        raise ValueError(f"part masks need a voxel-space pose, got {pose.space!r}")
    if radius_scale <= 0:
        raise ValueError("radius_scale must be > 0")
    masks = []
    for part in cfg.parts:
        grid = None
        for p0, p1, r in _part_capsules(part, pose, radius_scale):
            cap = _capsule_field(dims, p0, p1, r)
            grid = cap if grid is None else np.maximum(grid, cap)
        if grid.max() == 0.0:
            warnings.warn(f"part {part.name!r} lies outside the {dims} grid")
        masks.append(PartMask(grid, part.name))
    return masks


def background_mask(masks: list[PartMask], dilate: int = 2) -> Image:
    """Pixels covered by no part at any depth, as a binary 1-channel image.

    The depth-projected foreground union is optionally dilated first
    (``dilate`` iterations of the 4-neighbor cross) so that pixels just
    outside the capsule silhouettes are not treated as known background;
    pass 0 to complement the raw projection.
    """
    if not masks:
        raise ValueError("need at least one mask")
    dims = masks[0].dims
    for m in masks:
        if m.dims != dims:
            raise ValueError(f"mask dims differ: {m.dims} vs {dims}")
    if dilate < 0:
        raise ValueError("dilate must be >= 0")
    fg = np.zeros(dims[:2], dtype=bool)
    for m in masks:
        fg |= m.data.max(axis=2) > 0
    if dilate and fg.any():
        fg = ndimage.binary_dilation(fg, iterations=dilate)
    return Image((~fg).astype(np.float32)[:, :, None])


def gaussian_heatmaps(pose: Pose, dims, params: HeatmapParams | None = None) -> Volume:
    """Per-joint volumetric Gaussian bumps, one channel per joint.

    Channel j at voxel center x is ``exp(-||x - p_j||^2 / (2 sigma^2))``
    wherever ``||x - p_j|| <= truncation * sigma`` and 0 beyond, so a joint
    sitting exactly on a voxel center peaks at 1.
    """
    dims = _check_dims(dims)
    params = params or HeatmapParams()
    sigma, reach = params.sigma, params.truncation * params.sigma
    out = np.zeros(dims + (len(pose.names),), dtype=np.float32)
    for j, p in enumerate(pose.positions):
        lo = np.maximum(np.floor(p - reach), 0).astype(int)
        hi = np.minimum(np.ceil(p + reach), np.array(dims) - 1).astype(int)
        if (lo > hi).any():
            continue
        yy = np.arange(lo[0], hi[0] + 1, dtype=np.float64)[:, None, None]
        xx = np.arange(lo[1], hi[1] + 1, dtype=np.float64)[None, :, None]
        zz = np.arange(lo[2], hi[2] + 1, dtype=np.float64)[None, None, :]
        dist_sq = ((yy - p[0]) ** 2 + (xx - p[1]) ** 2) + (zz - p[2]) ** 2
        bump = np.where(
            dist_sq <= reach * reach, np.exp(-dist_sq / (2.0 * sigma * sigma)), 0.0
        )
        out[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1, lo[2] : hi[2] + 1, j] = bump
    return Volume(out)


def heatmaps_2d_mode(pose: Pose, dims, params: HeatmapParams | None = None) -> Volume:
    """Depth-free variant: a 2D Gaussian around each joint's (y, x)
    projection, copied to every depth layer."""
    dims = _check_dims(dims)
    params = params or HeatmapParams()
    sigma, reach = params.sigma, params.truncation * params.sigma
    out = np.zeros(dims + (len(pose.names),), dtype=np.float32)
    for j, p in enumerate(pose.positions):
        lo = np.maximum(np.floor(p[:2] - reach), 0).astype(int)
        hi = np.minimum(np.ceil(p[:2] + reach), np.array(dims[:2]) - 1).astype(int)
        if (lo > hi).any():
            continue
        yy = np.arange(lo[0], hi[0] + 1, dtype=np.float64)[:, None]
        xx = np.arange(lo[1], hi[1] + 1, dtype=np.float64)[None, :]
        dist_sq = (yy - p[0]) ** 2 + (xx - p[1]) ** 2
        bump = np.where(
            dist_sq <= reach * reach, np.exp(-dist_sq / (2.0 * sigma * sigma)), 0.0
        )
        out[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1, :, j] = bump[:, :, None]
    return Volume(out)
