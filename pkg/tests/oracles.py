"""Independent brute-force reference implementations.

Everything here is deliberately written with different formulations and
code paths than the library kernels: homogeneous-matrix inversion instead
of the analytic transform inverse, scalar per-voxel loops instead of
vectorized gathers, explicit window extraction instead of separable
filtering. Tests compare the optimized implementations against these.
"""

import math

import numpy as np


def trilinear_ref(data, point):
    """Scalar 8-corner interpolation with zero padding, in Python floats."""
    h, w, d, c = data.shape
    fy, fx, fz = float(point[0]), float(point[1]), float(point[2])
    y0, x0, z0 = math.floor(fy), math.floor(fx), math.floor(fz)
    ry, rx, rz = fy - y0, fx - x0, fz - z0
    out = [0.0] * c
    for dy in (0, 1):
        for dx in (0, 1):
            for dz in (0, 1):
                iy, ix, iz = y0 + dy, x0 + dx, z0 + dz
                weight = (
                    (ry if dy else 1.0 - ry)
                    * (rx if dx else 1.0 - rx)
                    * (rz if dz else 1.0 - rz)
                )
                if 0 <= iy < h and 0 <= ix < w and 0 <= iz < d:
                    for ch in range(c):
                        out[ch] += weight * float(data[iy, ix, iz, ch])
    return np.array(out)


def _homogeneous_inverse_3d(transform):
    m = np.eye(4)
    m[:3, :3] = transform.scale * transform.rotation
    m[:3, 3] = transform.translation
    return np.linalg.inv(m)


def warp3d_ref(volume_data, masks, transforms):
    """Per-voxel, per-part backward warp with max composition."""
    h, w, d, c = volume_data.shape
    parts = []
    for mask, t in zip(masks, transforms):
        masked = mask.data[:, :, :, None].astype(np.float64) * volume_data
        parts.append((masked, _homogeneous_inverse_3d(t)))
    out = np.empty((h, w, d, c), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            for z in range(d):
                point = np.array([y, x, z, 1.0])
                best = None
                for masked, inv in parts:
                    src = inv @ point
                    val = trilinear_ref(masked, src[:3])
                    best = val if best is None else np.maximum(best, val)
                out[y, x, z] = best
    return out.astype(np.float32)


def bilinear_ref(plane, py, px):
    """Scalar 4-corner interpolation over an (H, W, K) map."""
    h, w, k = plane.shape
    y0, x0 = math.floor(py), math.floor(px)
    ry, rx = py - y0, px - x0
    out = np.zeros(k)
    for dy in (0, 1):
        for dx in (0, 1):
            iy, ix = y0 + dy, x0 + dx
            weight = (ry if dy else 1.0 - ry) * (rx if dx else 1.0 - rx)
            if 0 <= iy < h and 0 <= ix < w:
                out += weight * plane[iy, ix].astype(np.float64)
    return out


def warp2d_ref(volume_data, masks, affines):
    """Slice-wise backward affine warp of depth-replicated projected masks."""
    h, w, d, c = volume_data.shape
    parts = []
    for mask, a in zip(masks, affines):
        projected = mask.data.max(axis=2)
        masked = projected[:, :, None, None].astype(np.float64) * volume_data
        m = np.eye(3)
        m[:2, :2] = a.linear
        m[:2, 2] = a.translation
        parts.append((masked.reshape(h, w, d * c), np.linalg.inv(m)))
    out = np.empty((h, w, d * c), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            best = None
            for masked, inv in parts:
                src = inv @ np.array([y, x, 1.0])
                val = bilinear_ref(masked, src[0], src[1])
                best = val if best is None else np.maximum(best, val)
            out[y, x] = best
    return out.reshape(h, w, d, c).astype(np.float32)


def segment_distance_ref(point, a, b):
    """Point-segment distance via the projection-branch formulation."""
    ab = b - a
    length_sq = float(ab @ ab)
    if length_sq == 0.0:
        return float(np.linalg.norm(point - a))
    t = float((point - a) @ ab)
    if t <= 0.0:
        return float(np.linalg.norm(point - a))
    if t >= length_sq:
        return float(np.linalg.norm(point - b))
    # interior: perpendicular distance via the cross product
    return float(np.linalg.norm(np.cross(point - a, ab)) / math.sqrt(length_sq))


def capsule_ref_scalar(dims, p0, p1, radius):
    """Per-voxel scalar loop; use for small grids only."""
    a = np.asarray(p0, dtype=np.float64)
    b = np.asarray(p1, dtype=np.float64)
    out = np.zeros(dims, dtype=bool)
    for y in range(dims[0]):
        for x in range(dims[1]):
            for z in range(dims[2]):
                point = np.array([y, x, z], dtype=np.float64)
                out[y, x, z] = segment_distance_ref(point, a, b) <= radius
    return out


def capsule_ref(dims, p0, p1, radius):
    """Full-grid vectorized variant of the branchy segment distance."""
    a = np.asarray(p0, dtype=np.float64)
    b = np.asarray(p1, dtype=np.float64)
    grid = np.indices(dims, dtype=np.float64)
    points = np.moveaxis(grid, 0, -1)
    ab = b - a
    length_sq = float(ab @ ab)
    da = np.linalg.norm(points - a, axis=-1)
    if length_sq == 0.0:
        return da <= radius
    db = np.linalg.norm(points - b, axis=-1)
    t = (points - a) @ ab
    perp = np.linalg.norm(np.cross(points - a, ab), axis=-1) / math.sqrt(length_sq)
    dist = np.where(t <= 0.0, da, np.where(t >= length_sq, db, perp))
    return dist <= radius


def heatmap_ref(positions, dims, sigma, truncation):
    """Per-voxel loop over truncated Gaussian bumps."""
    j = len(positions)
    out = np.zeros(dims + (j,), dtype=np.float64)
    cutoff = truncation * sigma
    for y in range(dims[0]):
        for x in range(dims[1]):
            for z in range(dims[2]):
                for k, p in enumerate(positions):
                    dist = math.dist((y, x, z), tuple(p))
                    if dist <= cutoff:
                        out[y, x, z, k] = math.exp(-(dist**2) / (2.0 * sigma**2))
    return out


def ssim_map_ref(a, b, window, c1, c2):
    """SSIM map via explicit symmetric padding and window extraction."""
    half = window.shape[0] // 2
    h, w, c = a.shape
    out = np.empty((h, w, c), dtype=np.float64)
    for ch in range(c):
        x = np.pad(a[:, :, ch].astype(np.float64), half, mode="symmetric")
        y = np.pad(b[:, :, ch].astype(np.float64), half, mode="symmetric")
        for i in range(h):
            for j in range(w):
                wx = x[i : i + 2 * half + 1, j : j + 2 * half + 1]
                wy = y[i : i + 2 * half + 1, j : j + 2 * half + 1]
                mu_x = float((window * wx).sum())
                mu_y = float((window * wy).sum())
                var_x = float((window * wx * wx).sum()) - mu_x * mu_x
                var_y = float((window * wy * wy).sum()) - mu_y * mu_y
                cov = float((window * wx * wy).sum()) - mu_x * mu_y
                out[i, j, ch] = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / (
                    (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
                )
    return out


def random_rotation(rng):
    """Uniform-ish proper rotation from a random quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_geodesic(r1, r2):
    """Angle of the relative rotation, in radians."""
    cos = (np.trace(r1.T @ r2) - 1.0) / 2.0
    return math.acos(min(1.0, max(-1.0, cos)))


def noncollinear_points(rng, count, span=10.0, min_ratio=0.05):
    """Random points rejected until clearly non-collinear."""
    while True:
        pts = rng.uniform(-span, span, size=(count, 3))
        sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
        if sv[1] > min_ratio * sv[0]:
            return pts
