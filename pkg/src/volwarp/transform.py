"""Similarity and planar-affine transforms with closed-form least squares.

The 7-parameter similarity transform (one isotropic scale, a proper
rotation, a translation) maps points as ``s * R @ p + t``. Fitting is the
closed-form SVD solution of the orthogonal Procrustes problem with scale:
centroid subtraction, cross-covariance, SVD, and a reflection correction
that flips the smallest singular direction whenever the unconstrained
optimum would be a reflection.

Point components follow the in-memory ``(y, x, z)`` convention; the JSON
helpers at the bottom convert to the on-disk ``[x, y, z]`` component order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Helmert3",
    "Affine2",
    "fit_helmert",
    "fit_affine2",
    "compose",
    "axis_angle_rotation",
    "helmert_to_dict",
    "helmert_from_dict",
    "affine_to_dict",
    "affine_from_dict",
    "save_transforms",
    "load_transforms",
]

_ORTHO_TOL = 1e-6


def _frozen(arr, shape) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    if out.shape != shape:
        raise ValueError(f"expected shape {shape}, got {out.shape}")
    if not np.isfinite(out).all():
        raise ValueError("transform parameters must be finite")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Helmert3:
    """7-parameter 3D similarity transform ``p -> scale * R @ p + t``.

    ``degenerate`` marks transforms produced by the collinear-source
    fallback of :func:`fit_helmert`.
    """

    scale: float
    rotation: np.ndarray
    translation: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "rotation", _frozen(self.rotation, (3, 3)))
        object.__setattr__(self, "translation", _frozen(self.translation, (3,)))
        if not np.isfinite(self.scale) or self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        r = self.rotation
        if np.abs(r.T @ r - np.eye(3)).max() > _ORTHO_TOL:
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > _ORTHO_TOL:
            raise ValueError("rotation must have determinant +1")

    @classmethod
    def identity(cls) -> "Helmert3":
        return cls(1.0, np.eye(3), np.zeros(3))

    def apply(self, points) -> np.ndarray:
        """Transform a single (3,) point or an (N, 3) batch."""
        p = np.asarray(points, dtype=np.float64)
        return p @ self.rotation.T * self.scale + self.translation

    def invert(self) -> "Helmert3":
        """Exact inverse: scale 1/s, rotation R^T, translation -(1/s) R^T t."""
        inv_s = 1.0 / self.scale
        rt = self.rotation.T
        return Helmert3(inv_s, rt, -inv_s * (rt @ self.translation), self.degenerate)

    def matrix(self) -> np.ndarray:
        """The equivalent 4x4 homogeneous matrix."""
        m = np.eye(4)
        m[:3, :3] = self.scale * self.rotation
        m[:3, 3] = self.translation
        return m


@dataclass(frozen=True, eq=False)
class Affine2:
    """Planar affine map ``p -> L @ p + t`` used by the 2D ablation warp."""

    linear: np.ndarray
    translation: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "linear", _frozen(self.linear, (2, 2)))
        object.__setattr__(self, "translation", _frozen(self.translation, (2,)))

    @classmethod
    def identity(cls) -> "Affine2":
        return cls(np.eye(2), np.zeros(2))

    def apply(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        return p @ self.linear.T + self.translation

    def invert(self) -> "Affine2":
        if abs(np.linalg.det(self.linear)) < 1e-12:
            raise ValueError("affine transform is not invertible")
        inv = np.linalg.inv(self.linear)
        return Affine2(inv, -(inv @ self.translation), self.degenerate)


def compose(outer: Helmert3, inner: Helmert3) -> Helmert3:
    """The transform mapping ``p -> outer(inner(p))``."""
    return Helmert3(
        outer.scale * inner.scale,
        outer.rotation @ inner.rotation,
        outer.scale * (outer.rotation @ inner.translation) + outer.translation,
        outer.degenerate or inner.degenerate,
    )


def axis_angle_rotation(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about ``axis`` by ``angle`` radians."""
    a = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(a)
    if norm == 0:
        raise ValueError("rotation axis must be nonzero")
    ux, uy, uz = a / norm
    k = np.array([[0.0, -uz, uy], [uz, 0.0, -ux], [-uy, ux, 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def _rotation_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Minimal rotation taking unit vector ``u`` onto unit vector ``v``."""
    c = float(np.dot(u, v))
    if c >= 1.0 - 1e-12:
        return np.eye(3)
    if c <= -1.0 + 1e-12:
        # antiparallel: half turn about any axis perpendicular to u
        basis = np.eye(3)[np.argmin(np.abs(u))]
        perp = np.cross(u, basis)
        return axis_angle_rotation(perp, np.pi)
    axis = np.cross(u, v)
    return axis_angle_rotation(axis, np.arctan2(np.linalg.norm(axis), c))


def _check_point_sets(src, dst, dim, min_count):
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.ndim != 2 or src.shape[1] != dim or dst.shape != src.shape:
        raise ValueError(
            f"need matching (N, {dim}) point sets, got {src.shape} and {dst.shape}"
        )
    if src.shape[0] < min_count:
        raise ValueError(f"need at least {min_count} correspondences")
    if not (np.isfinite(src).all() and np.isfinite(dst).all()):
        raise ValueError("points must be finite")
    return src, dst


def _fit_collinear(src, dst, axis, mu_s, mu_d) -> Helmert3:
    """Fallback when the source points lie on a line.

    Takes the two source points that span the line, aligns that segment
    with its destination counterpart by the minimal rotation, reads the
    scale off the segment-length ratio, and places the centroids on top
    of each other. Rotation about the segment axis is unconstrained by
    the data, so the result is flagged degenerate.
    """
    proj = (src - mu_s) @ axis
    ia, ib = int(np.argmin(proj)), int(np.argmax(proj))
    ds = src[ib] - src[ia]
    dd = dst[ib] - dst[ia]
    ls = np.linalg.norm(ds)
    ld = np.linalg.norm(dd)
    if ld < 1e-12:
        raise ValueError("degenerate fit: destination segment collapses to a point")
    rotation = _rotation_between(ds / ls, dd / ld)
    scale = ld / ls
    translation = mu_d - scale * (rotation @ mu_s)
    return Helmert3(scale, rotation, translation, degenerate=True)


def fit_helmert(src, dst) -> Helmert3:
    """Least-squares similarity transform from ``src`` onto ``dst``.

    Minimizes ``sum ||s R src_k + t - dst_k||^2`` over s > 0, R in SO(3),
    t. Scale is the corrected singular-value trace over the source
    variance; translation comes from the centroids. Reflections are never
    emitted. Collinear sources fall back to segment alignment and flip the
    ``degenerate`` flag; fully coincident sources raise.
    """
    src, dst = _check_point_sets(src, dst, 3, 3)
    n = src.shape[0]
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    xs = src - mu_s
    xd = dst - mu_d
    var_s = float((xs * xs).sum()) / n
    if var_s < 1e-12:
        raise ValueError("degenerate fit: source points coincide")
    sv = np.linalg.svd(xs, compute_uv=False)
    if sv[1] <= 1e-9 * sv[0]:
        _, _, vt = np.linalg.svd(xs)
        return _fit_collinear(src, dst, vt[0], mu_s, mu_d)
    diffs = dst - src
    if np.array_equal(diffs, np.broadcast_to(diffs[0], diffs.shape)):
        # every point moved by the same vector: the unique zero-residual
        # optimum is that pure translation, returned exactly
        return Helmert3(1.0, np.eye(3), diffs[0])
    cov = xd.T @ xs / n
    u, d, vt = np.linalg.svd(cov)
    signs = np.ones(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        signs[2] = -1.0
    rotation = (u * signs) @ vt
    scale = float((d * signs).sum()) / var_s
    if scale <= 0:
        raise ValueError("degenerate fit: non-positive scale")
    translation = mu_d - scale * (rotation @ mu_s)
    return Helmert3(scale, rotation, translation)


def _fit_similarity2(src, dst) -> Affine2:
    """2D similarity (rotation + scale + translation) via complex regression."""
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    zs = (src[:, 0] - mu_s[0]) + 1j * (src[:, 1] - mu_s[1])
    zd = (dst[:, 0] - mu_d[0]) + 1j * (dst[:, 1] - mu_d[1])
    denom = float((zs * zs.conj()).real.sum())
    if denom < 1e-12:
        raise ValueError("degenerate fit: source points coincide")
    alpha = complex((zd * zs.conj()).sum()) / denom
    a, b = alpha.real, alpha.imag
    linear = np.array([[a, -b], [b, a]])
    translation = mu_d - linear @ mu_s
    return Affine2(linear, translation, degenerate=True)


def fit_affine2(src, dst) -> Affine2:
    """Least-squares 6-parameter 2D affine from ``src`` onto ``dst``.

    Normal equations with Tikhonov damping 1e-9 on the linear part, so
    three non-collinear points are interpolated (almost) exactly. A fully
    collinear source is rank-deficient beyond what the damping rescues
    and falls back to a 2D similarity fit, flagged degenerate.
    """
    src, dst = _check_point_sets(src, dst, 2, 3)
    centered = src - src.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[1] <= 1e-9 * sv[0]:
        return _fit_similarity2(src, dst)
    design = np.hstack([src, np.ones((src.shape[0], 1))])
    normal = design.T @ design
    normal[0, 0] += 1e-9
    normal[1, 1] += 1e-9
    coeff = np.linalg.solve(normal, design.T @ dst)
    return Affine2(coeff[:2].T, coeff[2])


# --- JSON interchange -------------------------------------------------------
#
# Files store vectors as [x, y, z] while memory uses (y, x, z); converting
# swaps the first two components and conjugates matrices by that swap.

_P3 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
_P2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def helmert_to_dict(t: Helmert3) -> dict:
    return {
        "scale": t.scale,
        "rotation": (_P3 @ t.rotation @ _P3).tolist(),
        "translation": t.translation[[1, 0, 2]].tolist(),
        "degenerate": t.degenerate,
    }


def helmert_from_dict(d: dict) -> Helmert3:
    rotation = _P3 @ np.asarray(d["rotation"], dtype=np.float64) @ _P3
    translation = np.asarray(d["translation"], dtype=np.float64)[[1, 0, 2]]
    return Helmert3(d["scale"], rotation, translation, bool(d.get("degenerate", False)))


def affine_to_dict(t: Affine2) -> dict:
    return {
        "linear": (_P2 @ t.linear @ _P2).tolist(),
        "translation": t.translation[[1, 0]].tolist(),
        "degenerate": t.degenerate,
    }


def affine_from_dict(d: dict) -> Affine2:
    linear = _P2 @ np.asarray(d["linear"], dtype=np.float64) @ _P2
    translation = np.asarray(d["translation"], dtype=np.float64)[[1, 0]]
    return Affine2(linear, translation, bool(d.get("degenerate", False)))


def save_transforms(parts: dict) -> bytes:
    """Serialize a part-name -> transform mapping (all of one type)."""
    if not parts:
        raise ValueError("no transforms to save")
    kinds = {type(t) for t in parts.values()}
    if kinds == {Helmert3}:
        kind, enc = "helmert3", helmert_to_dict
    elif kinds == {Affine2}:
        kind, enc = "affine2", affine_to_dict
    else:
        raise ValueError("transforms must all be Helmert3 or all Affine2")
    obj = {"transform_type": kind, "parts": {k: enc(v) for k, v in parts.items()}}
    return json.dumps(obj).encode("utf-8")


def load_transforms(blob) -> dict:
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    obj = json.loads(blob)
    kind = obj.get("transform_type")
    if kind == "helmert3":
        dec = helmert_from_dict
    elif kind == "affine2":
        dec = affine_from_dict
    else:
        raise ValueError(f"unknown transform_type {kind!r}")
    return {name: dec(entry) for name, entry in obj["parts"].items()}
