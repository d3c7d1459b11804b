"""End-to-end reposing: masks -> correspondences -> fits -> warp -> heatmaps.

Four modes mirror the 2x2 ablation grid over warp dimensionality and
target-pose dimensionality:

===========  ============  ==================
mode         warping       target-pose heatmaps
===========  ============  ==================
``3d``       3D similarity  3D Gaussians
``2d-warp``  2D affine      3D Gaussians
``2d-pose``  3D similarity  2D, depth-replicated
``2d-both``  2D affine      2D, depth-replicated
===========  ============  ==================
"""

from __future__ import annotations

import time

import numpy as np

from .skeleton import Pose, SkeletonConfig, correspondences, default_skeleton
from .tensor import Volume
from .transform import (
    affine_to_dict,
    fit_affine2,
    fit_helmert,
    helmert_to_dict,
)
from .voxelize import HeatmapParams, gaussian_heatmaps, heatmaps_2d_mode, part_masks
from .warp import masked_warp_2d, masked_warp_3d

__all__ = ["MODES", "pipeline_repose", "fit_part_transforms"]

MODES = ("3d", "2d-warp", "2d-pose", "2d-both")


def _mode_axes(mode: str) -> tuple[bool, bool]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    warp_3d = mode in ("3d", "2d-pose")
    pose_3d = mode in ("3d", "2d-warp")
    return warp_3d, pose_3d


def fit_part_transforms(pose_in: Pose, pose_tgt: Pose, cfg: SkeletonConfig, mode: str):
    """Per-part transforms for the given mode, keyed in config part order.

    3D-warp modes fit a similarity transform per part; 2D-warp modes fit a
    planar affine on the depth-projected (y, x) correspondences.
    """
    warp_3d, _ = _mode_axes(mode)
    fits = {}
    for part in cfg.parts:
        src, dst = correspondences(part, pose_in, pose_tgt)
        if warp_3d:
            fits[part.name] = fit_helmert(src, dst)
        else:
            fits[part.name] = fit_affine2(src[:, :2], dst[:, :2])
    return fits


def pipeline_repose(
    volume: Volume,
    pose_in: Pose,
    pose_tgt: Pose,
    cfg: SkeletonConfig | None = None,
    mode: str = "3d",
    *,
    heatmap: HeatmapParams | None = None,
    radius_scale: float = 1.0,
    threads: int = 1,
) -> tuple[Volume, Volume, dict]:
    """Repose a feature volume and render the target-pose heatmaps.

    Returns (warped volume, heatmap volume with one channel per joint,
    report). The report carries the per-part transforms with their
    degeneracy flags, mask statistics, and stage timings; apart from the
    timings it is deterministic for fixed inputs.
    """
    cfg = cfg or default_skeleton()
    warp_3d, pose_3d = _mode_axes(mode)
    timing = {}

    t0 = time.perf_counter()
    masks = part_masks(pose_in, cfg, volume.dims, radius_scale)
    timing["masks_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    fits = fit_part_transforms(pose_in, pose_tgt, cfg, mode)
    timing["fit_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ordered = [fits[p.name] for p in cfg.parts]
    if warp_3d:
        warped = masked_warp_3d(volume, masks, ordered, threads=threads)
    else:
        warped = masked_warp_2d(volume, masks, ordered, threads=threads)
    timing["warp_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if pose_3d:
        heatmaps = gaussian_heatmaps(pose_tgt, volume.dims, heatmap)
    else:
        heatmaps = heatmaps_2d_mode(pose_tgt, volume.dims, heatmap)
    timing["heatmaps_s"] = time.perf_counter() - t0
    timing["total_s"] = sum(timing.values())

    encode = helmert_to_dict if warp_3d else affine_to_dict
    report = {
        "mode": mode,
        "dims": list(volume.dims),
        "channels": volume.channels,
        "parts": [
            {
                "name": part.name,
                "mask_voxels": mask.count,
                "degenerate": fits[part.name].degenerate,
                "transform": encode(fits[part.name]),
            }
            for part, mask in zip(cfg.parts, masks)
        ],
        "empty_masks": int(sum(1 for m in masks if m.count == 0)),
        "timing": timing,
    }
    return warped, heatmaps, report
