"""Synthetic part-coded feature volumes for exercising the warp pipeline.

A mannequin volume writes a distinct signature into one channel per body
part: channel ``i`` is nonzero exactly inside part ``i``'s capsule mask.
Because the masks are returned alongside the volume, reposing results can
be predicted exactly, which makes mannequins the ground truth generator
for end-to-end tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .skeleton import Pose, SkeletonConfig, VOXEL_SPACE, default_skeleton
from .tensor import Volume
from .voxelize import PartMask, _capsule_field, _part_capsules, part_masks

__all__ = ["MannequinSpec", "make_mannequin", "standing_pose"]


@dataclass(frozen=True)
class MannequinSpec:
    """Recipe for a deterministic synthetic feature volume.

    ``falloff`` switches channel values from constant 1 inside each part
    to a radial ramp (1 on the part axis down to 0.5 at the surface),
    which stays strictly positive inside the mask.
    """

    dims: tuple[int, int, int]
    channels: int
    pose: Pose
    skeleton: SkeletonConfig = field(default_factory=default_skeleton)
    falloff: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise ValueError(f"dims must be three positive ints, got {self.dims}")
        if self.channels < len(self.skeleton.parts):
            raise ValueError(
                f"need at least {len(self.skeleton.parts)} channels, got {self.channels}"
            )
        if self.pose.space != VOXEL_SPACE:
            raise ValueError("mannequin pose must be in voxel space")


def make_mannequin(spec: MannequinSpec) -> tuple[Volume, list[PartMask]]:
    """Build the part-coded volume and the masks it was built from.

    Deterministic: equal specs produce bit-identical volumes. Channel i is
    nonzero exactly on part i's mask; channels beyond the part count stay
    zero.
    """
    masks = part_masks(spec.pose, spec.skeleton, spec.dims)
    data = np.zeros(spec.dims + (spec.channels,), dtype=np.float32)
    for i, (part, mask) in enumerate(zip(spec.skeleton.parts, masks)):
        if spec.falloff:
            channel = None
            for p0, p1, r in _part_capsules(part, spec.pose, 1.0):
                cap = _capsule_field(spec.dims, p0, p1, r, falloff=True)
                channel = cap if channel is None else np.maximum(channel, cap)
            data[:, :, :, i] = channel
        else:
            data[:, :, :, i] = mask.data
    return Volume(data), masks


def standing_pose(dims, space: str = VOXEL_SPACE) -> Pose:
    """A canonical upright 14-joint pose scaled into a (H, W, D) grid.

    Arms and the head lean at slight depth offsets from the body plane so
    that no limb-plus-anchor correspondence triple is collinear.
    """
    h, w, d = (int(v) for v in dims)
    sy, sx = h - 1.0, w - 1.0
    cx = 0.5 * sx
    cz = 0.5 * (d - 1.0)
    dz = 0.08 * (d - 1.0)
    joints = {
        "head_top": (0.04 * sy, cx, cz - dz),
        "neck": (0.16 * sy, cx, cz),
        "l_shoulder": (0.20 * sy, cx - 0.16 * sx, cz),
        "r_shoulder": (0.20 * sy, cx + 0.16 * sx, cz),
        "l_elbow": (0.34 * sy, cx - 0.22 * sx, cz + dz),
        "r_elbow": (0.34 * sy, cx + 0.22 * sx, cz + dz),
        "l_wrist": (0.47 * sy, cx - 0.25 * sx, cz + 2.0 * dz),
        "r_wrist": (0.47 * sy, cx + 0.25 * sx, cz + 2.0 * dz),
        "l_hip": (0.52 * sy, cx - 0.09 * sx, cz),
        "r_hip": (0.52 * sy, cx + 0.09 * sx, cz),
        "l_knee": (0.72 * sy, cx - 0.11 * sx, cz - dz),
        "r_knee": (0.72 * sy, cx + 0.11 * sx, cz - dz),
        "l_ankle": (0.94 * sy, cx - 0.12 * sx, cz),
        "r_ankle": (0.94 * sy, cx + 0.12 * sx, cz),
    }
    names = tuple(joints)
    positions = np.array([joints[n] for n in names], dtype=np.float64)
    # snap to 1/64 voxel so integer translations of the pose stay exact
    positions = np.round(positions * 64.0) / 64.0
    return Pose(names, positions, space)
