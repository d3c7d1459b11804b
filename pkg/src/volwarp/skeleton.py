"""Joint naming, 3D poses, and the ten-part body decomposition.

In-memory 3D points follow the volume index order ``(y, x, z)``. Pose and
skeleton JSON files store point components as ``[x, y, z]`` (width, height,
depth); the loaders swap the first two components so that all in-memory
geometry shares a single convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "VOXEL_SPACE",
    "MM_SPACE",
    "SHOULDER_MIDPOINT",
    "Pose",
    "RadiusRule",
    "PartDefinition",
    "SkeletonConfig",
    "default_skeleton",
    "load_pose",
    "save_pose",
    "load_skeleton",
    "save_skeleton",
    "correspondences",
]

VOXEL_SPACE = "voxel"
MM_SPACE = "millimeter"
_SPACES = (VOXEL_SPACE, MM_SPACE)

#: Pseudo-anchor resolved as the mean of the two shoulder positions.
SHOULDER_MIDPOINT = "shoulder_midpoint"


@dataclass(frozen=True, eq=False)
class Pose:
    """Named 3D joint coordinates in either voxel or millimeter space."""

    names: tuple[str, ...]
    positions: np.ndarray  # (J, 3) float64 in (y, x, z)
    space: str = VOXEL_SPACE

    def __post_init__(self):
        names = tuple(self.names)
        if len(names) < 1:
            raise ValueError("pose needs at least one joint")
        if len(set(names)) != len(names):
            raise ValueError("duplicate joint names")
        if self.space not in _SPACES:
            raise ValueError(f"unknown coordinate space {self.space!r}")
        pos = np.array(self.positions, dtype=np.float64)
        if pos.shape != (len(names), 3):
            raise ValueError(
                f"positions must be ({len(names)}, 3), got {pos.shape}"
            )
        if not np.isfinite(pos).all():
            raise ValueError("joint positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def position(self, name: str) -> np.ndarray:
        """The (y, x, z) position of a joint, by name."""
        try:
            return self.positions[self._index[name]]
        except KeyError:
            raise KeyError(f"pose has no joint {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index


def _check_finite_triple(name, value):
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
        or any(not math.isfinite(v) for v in value)
    ):
        raise ValueError(f"joint {name!r} must be three finite numbers")


def _reject_duplicate_keys(pairs):
    keys = [k for k, _ in pairs]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate keys in JSON object")
    return dict(pairs)


def load_pose(blob) -> Pose:
    """Parse pose JSON ``{"space": ..., "joints": {name: [x, y, z]}}``.

    File components are [x, y, z]; in-memory positions are (y, x, z).
    """
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    obj = json.loads(blob, object_pairs_hook=_reject_duplicate_keys)
    if not isinstance(obj, dict) or "space" not in obj:
        raise ValueError('pose JSON must be an object with a "space" field')
    space = obj["space"]
    joints = obj.get("joints")
    if not isinstance(joints, dict) or not joints:
        raise ValueError('pose JSON needs a non-empty "joints" object')
    names = []
    rows = []
    for name, xyz in joints.items():
        _check_finite_triple(name, xyz)
        names.append(name)
        rows.append((float(xyz[1]), float(xyz[0]), float(xyz[2])))
    return Pose(tuple(names), np.array(rows, dtype=np.float64), space)


def save_pose(pose: Pose) -> bytes:
    """Serialize a pose; ``load_pose(save_pose(p))`` preserves every value."""
    joints = {
        name: [p[1], p[0], p[2]]
        for name, p in zip(pose.names, pose.positions.tolist())
    }
    return json.dumps({"space": pose.space, "joints": joints}).encode("utf-8")


@dataclass(frozen=True)
class RadiusRule:
    """Capsule radius policy: ``fixed`` voxels if set, else
    ``max(minimum, fraction * reference_length)``."""

    fixed: float | None = None
    fraction: float = 0.25
    minimum: float = 2.0

    def __post_init__(self):
        if self.fixed is not None and self.fixed <= 0:
            raise ValueError("fixed radius must be > 0")
        if self.fraction < 0 or self.minimum <= 0:
            raise ValueError("fraction must be >= 0 and minimum > 0")

    def resolve(self, reference_length: float) -> float:
        if self.fixed is not None:
            return float(self.fixed)
        return max(self.minimum, self.fraction * reference_length)


@dataclass(frozen=True)
class PartDefinition:
    """One body part: its defining joints, anchor rule, and radius rule.

    Two-joint parts (limb segments, head) carry an anchor joint that is
    appended as a third correspondence to pin rotation about the segment
    axis; the four-joint torso needs none.
    """

    name: str
    defining_joints: tuple[str, ...]
    anchor_joint: str | None = None
    radius: RadiusRule = field(default_factory=RadiusRule)

    def __post_init__(self):
        object.__setattr__(self, "defining_joints", tuple(self.defining_joints))
        n = len(self.defining_joints)
        if n not in (2, 4):
            raise ValueError(f"part {self.name!r} needs 2 or 4 joints, got {n}")
        if (self.anchor_joint is None) != (n == 4):
            raise ValueError(
                f"part {self.name!r}: anchor required exactly for 2-joint parts"
            )


@dataclass(frozen=True)
class SkeletonConfig:
    """An ordered joint list and exactly ten part definitions."""

    joint_names: tuple[str, ...]
    parts: tuple[PartDefinition, ...]

    def __post_init__(self):
        object.__setattr__(self, "joint_names", tuple(self.joint_names))
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) != 10:
            raise ValueError(f"skeleton needs exactly 10 parts, got {len(self.parts)}")
        known = set(self.joint_names)
        if len(known) != len(self.joint_names):
            raise ValueError("duplicate joint names in skeleton")
        for part in self.parts:
            for j in part.defining_joints:
                if j not in known:
                    raise ValueError(f"part {part.name!r} references unknown joint {j!r}")
            a = part.anchor_joint
            if a is None:
                continue
            if a == SHOULDER_MIDPOINT:
                if "l_shoulder" not in known or "r_shoulder" not in known:
                    raise ValueError(
                        "shoulder_midpoint anchor needs l_shoulder and r_shoulder"
                    )
            elif a not in known:
                raise ValueError(f"part {part.name!r} references unknown anchor {a!r}")

    def part(self, name: str) -> PartDefinition:
        for p in self.parts:
            if p.name == name:
                return p
        raise KeyError(f"no part named {name!r}")


#: 14 joints: enough to give each of the ten parts all its referenced joints.
DEFAULT_JOINTS = (
    "head_top",
    "neck",
    "l_shoulder",
    "r_shoulder",
    "l_elbow",
    "r_elbow",
    "l_wrist",
    "r_wrist",
    "l_hip",
    "r_hip",
    "l_knee",
    "r_knee",
    "l_ankle",
    "r_ankle",
)


def default_skeleton() -> SkeletonConfig:
    """The built-in 14-joint, 10-part skeleton.

    Lower limb segments anchor at the chain's proximal joint (the lower
    arm uses the same-side shoulder), upper segments at the distal joint
    (wrist or ankle), and the head at the shoulder midpoint, so every
    two-joint part gets a third, generically non-collinear point.
    """
    part = PartDefinition
    parts = (
        part("head", ("neck", "head_top"), SHOULDER_MIDPOINT),
        part("torso", ("l_shoulder", "r_shoulder", "l_hip", "r_hip"), None),
        part("l_upper_arm", ("l_shoulder", "l_elbow"), "l_wrist"),
        part("r_upper_arm", ("r_shoulder", "r_elbow"), "r_wrist"),
        part("l_lower_arm", ("l_elbow", "l_wrist"), "l_shoulder"),
        part("r_lower_arm", ("r_elbow", "r_wrist"), "r_shoulder"),
        part("l_upper_leg", ("l_hip", "l_knee"), "l_ankle"),
        part("r_upper_leg", ("r_hip", "r_knee"), "r_ankle"),
        part("l_lower_leg", ("l_knee", "l_ankle"), "l_hip"),
        part("r_lower_leg", ("r_knee", "r_ankle"), "r_hip"),
    )
    return SkeletonConfig(DEFAULT_JOINTS, parts)


def _radius_to_json(rule: RadiusRule):
    if rule.fixed is not None:
        return rule.fixed
    return {"fraction": rule.fraction, "min": rule.minimum}


def _radius_from_json(value) -> RadiusRule:
    if isinstance(value, bool):
        raise ValueError("radius must be a number or an object")
    if isinstance(value, (int, float)):
        return RadiusRule(fixed=float(value))
    if isinstance(value, dict):
        if "fixed" in value:
            return RadiusRule(fixed=float(value["fixed"]))
        return RadiusRule(
            fraction=float(value.get("fraction", 0.25)),
            minimum=float(value.get("min", 2.0)),
        )
    raise ValueError("radius must be a number or an object")


def load_skeleton(blob) -> SkeletonConfig:
    """Parse skeleton JSON ``{"joints": [...], "parts": [...]}``."""
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    obj = json.loads(blob)
    if not isinstance(obj, dict):
        raise ValueError("skeleton JSON must be an object")
    joints = obj.get("joints")
    raw_parts = obj.get("parts")
    if not isinstance(joints, list) or not isinstance(raw_parts, list):
        raise ValueError('skeleton JSON needs "joints" and "parts" lists')
    parts = []
    for entry in raw_parts:
        parts.append(
            PartDefinition(
                name=entry["name"],
                defining_joints=tuple(entry["joints"]),
                anchor_joint=entry.get("anchor"),
                radius=_radius_from_json(entry.get("radius", {})),
            )
        )
    return SkeletonConfig(tuple(joints), tuple(parts))


def save_skeleton(cfg: SkeletonConfig) -> bytes:
    parts = [
        {
            "name": p.name,
            "joints": list(p.defining_joints),
            "anchor": p.anchor_joint,
            "radius": _radius_to_json(p.radius),
        }
        for p in cfg.parts
    ]
    return json.dumps({"joints": list(cfg.joint_names), "parts": parts}).encode("utf-8")


def _anchor_point(pose: Pose, anchor: str) -> np.ndarray:
    if anchor == SHOULDER_MIDPOINT:
        return 0.5 * (pose.position("l_shoulder") + pose.position("r_shoulder"))
    return pose.position(anchor)


def correspondences(
    part: PartDefinition, pose_in: Pose, pose_tgt: Pose
) -> tuple[np.ndarray, np.ndarray]:
    """Matched (source, destination) points for fitting a part's transform.

    Defining joints come first, in part order; two-joint parts append the
    anchor point, giving 3 pairs (the torso gives 4). Lookup is by joint
    name only, so joint order in the poses is irrelevant. All points are
    weighted equally by the downstream fits.
    """
    if pose_in.space != pose_tgt.space:
        raise ValueError(
            f"pose spaces differ: {pose_in.space!r} vs {pose_tgt.space!r}"
        )
    src = [pose_in.position(j) for j in part.defining_joints]
    dst = [pose_tgt.position(j) for j in part.defining_joints]
    if part.anchor_joint is not None:
        src.append(_anchor_point(pose_in, part.anchor_joint))
        dst.append(_anchor_point(pose_tgt, part.anchor_joint))
    return np.array(src, dtype=np.float64), np.array(dst, dtype=np.float64)
