"""volwarp: volumetric articulated feature warping.

Capsule body-part masks, per-part 7-parameter similarity transforms fitted
from joint correspondences, masked trilinear warping composed by
elementwise max, volumetric pose heatmaps, lift/project reshaping,
background masking and compositing, plus SSIM / foreground-SSIM / PCK-AUC
evaluation and a deterministic evaluation-pair sampler.
"""

__version__ = "0.1.0"

from .tensor import Image, Volume, lift, project, trilinear_sample
from .volt import read_volt, write_volt
from .skeleton import (
    MM_SPACE,
    VOXEL_SPACE,
    SHOULDER_MIDPOINT,
    PartDefinition,
    Pose,
    RadiusRule,
    SkeletonConfig,
    correspondences,
    default_skeleton,
    load_pose,
    load_skeleton,
    save_pose,
    save_skeleton,
)
from .transform import (
    Affine2,
    Helmert3,
    axis_angle_rotation,
    compose,
    fit_affine2,
    fit_helmert,
    helmert_from_dict,
    helmert_to_dict,
    affine_from_dict,
    affine_to_dict,
    load_transforms,
    save_transforms,
)
from .voxelize import (
    HeatmapParams,
    PartMask,
    background_mask,
    capsule_mask,
    gaussian_heatmaps,
    heatmaps_2d_mode,
    part_masks,
)
from .warp import composite, inpaint_background, masked_warp_2d, masked_warp_3d
from .metrics import PckCurve, SsimParams, pck_auc, ssim, ssim_fg
from .mannequin import MannequinSpec, make_mannequin, standing_pose
from .sampler import (
    EvalEntry,
    EvalManifest,
    SplitMix64,
    load_manifest,
    sample_eval_pairs,
    save_manifest,
)
from .pipeline import MODES, fit_part_transforms, pipeline_repose
from .png_io import read_png, write_png

__all__ = [
    "__version__",
    "Image",
    "Volume",
    "lift",
    "project",
    "trilinear_sample",
    "read_volt",
    "write_volt",
    "MM_SPACE",
    "VOXEL_SPACE",
    "SHOULDER_MIDPOINT",
    "PartDefinition",
    "Pose",
    "RadiusRule",
    "SkeletonConfig",
    "correspondences",
    "default_skeleton",
    "load_pose",
    "load_skeleton",
    "save_pose",
    "save_skeleton",
    "Affine2",
    "Helmert3",
    "axis_angle_rotation",
    "compose",
    "fit_affine2",
    "fit_helmert",
    "helmert_from_dict",
    "helmert_to_dict",
    "affine_from_dict",
    "affine_to_dict",
    "load_transforms",
    "save_transforms",
    "HeatmapParams",
    "PartMask",
    "background_mask",
    "capsule_mask",
    "gaussian_heatmaps",
    "heatmaps_2d_mode",
    "part_masks",
    "composite",
    "inpaint_background",
    "masked_warp_2d",
    "masked_warp_3d",
    "PckCurve",
    "SsimParams",
    "pck_auc",
    "ssim",
    "ssim_fg",
    "MannequinSpec",
    "make_mannequin",
    "standing_pose",
    "EvalEntry",
    "EvalManifest",
    "SplitMix64",
    "load_manifest",
    "sample_eval_pairs",
    "save_manifest",
    "MODES",
    "fit_part_transforms",
    "pipeline_repose",
    "read_png",
    "write_png",
]
