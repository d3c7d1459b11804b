import numpy as np
import pytest
from scipy import ndimage

from volwarp import (
    HeatmapParams,
    PartMask,
    background_mask,
    capsule_mask,
    default_skeleton,
    gaussian_heatmaps,
    heatmaps_2d_mode,
    part_masks,
    standing_pose,
    Pose,
)

from oracles import capsule_ref, capsule_ref_scalar, heatmap_ref


class TestPartMaskType:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError, match="0.0 or 1.0"):
            PartMask(np.full((2, 2, 2), 0.5, dtype=np.float32))

    def test_count(self):
        data = np.zeros((2, 2, 2), dtype=np.float32)
        data[0, 0, 0] = 1.0
        data[1, 1, 1] = 1.0
        assert PartMask(data).count == 2


class TestCapsuleMask:
    def test_19_voxel_sphere(self):
        mask = capsule_mask((9, 9, 9), (4, 4, 4), (4, 4, 4), 1.5)
        ref = capsule_ref_scalar((9, 9, 9), (4, 4, 4), (4, 4, 4), 1.5)
        assert np.array_equal(mask.data == 1.0, ref)
        assert mask.count == 19  # 1 center + 6 faces + 12 edges (dist sqrt(2))

    def test_axis_aligned_capsule_matches_oracle(self):
        mask = capsule_mask((9, 9, 9), (4, 1, 4), (4, 7, 4), 1.0)
        ref = capsule_ref_scalar((9, 9, 9), (4, 1, 4), (4, 7, 4), 1.0)
        assert np.array_equal(mask.data == 1.0, ref)
        assert mask.count == int(ref.sum())

    def test_random_capsules_match_oracle_exactly(self):
        rng = np.random.default_rng(61)
        dims = (16, 16, 16)
        for _ in range(25):
            p0 = rng.uniform(-2, 18, size=3)
            p1 = rng.uniform(-2, 18, size=3)
            radius = rng.uniform(0.5, 5.0)
            mask = capsule_mask(dims, p0, p1, radius)
            assert np.array_equal(mask.data == 1.0, capsule_ref(dims, p0, p1, radius))

    def test_beyond_radius_unset(self):
        mask = capsule_mask((9, 9, 9), (4, 4, 4), (4, 4, 4), 1.5)
        assert mask.data[4, 4, 7] == 0.0
        assert mask.data[0, 0, 0] == 0.0

    def test_endpoint_symmetry_exact(self):
        rng = np.random.default_rng(62)
        for _ in range(20):
            p0 = rng.uniform(0, 12, size=3)
            p1 = rng.uniform(0, 12, size=3)
            r = rng.uniform(0.5, 4.0)
            a = capsule_mask((12, 12, 12), p0, p1, r)
            b = capsule_mask((12, 12, 12), p1, p0, r)
            assert np.array_equal(a.data, b.data)

    def test_radius_monotonicity(self):
        rng = np.random.default_rng(63)
        for _ in range(20):
            p0 = rng.uniform(0, 12, size=3)
            p1 = rng.uniform(0, 12, size=3)
            r1 = rng.uniform(0.5, 3.0)
            r2 = r1 + rng.uniform(0.0, 3.0)
            small = capsule_mask((12, 12, 12), p0, p1, r1)
            large = capsule_mask((12, 12, 12), p0, p1, r2)
            assert (small.data <= large.data).all()

    def test_integer_translation_equivariance(self):
        rng = np.random.default_rng(64)
        dims = (20, 20, 20)
        for _ in range(10):
            # dyadic endpoints keep the shifted coordinates exact
            p0 = rng.integers(128, 512, size=3) / 64.0
            p1 = rng.integers(128, 512, size=3) / 64.0
            r = rng.uniform(0.5, 2.5)
            shift = rng.integers(1, 4, size=3)
            base = capsule_mask(dims, p0, p1, r).data
            moved = capsule_mask(dims, p0 + shift, p1 + shift, r).data
            sy, sx, sz = shift
            assert np.array_equal(moved[sy:, sx:, sz:], base[: 20 - sy, : 20 - sx, : 20 - sz])

    def test_outside_grid_warns_all_zero(self):
        with pytest.warns(UserWarning, match="outside"):
            mask = capsule_mask((8, 8, 8), (50, 50, 50), (60, 60, 60), 2.0)
        assert mask.count == 0

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            capsule_mask((8, 8, 8), (1, 1, 1), (2, 2, 2), 0.0)


class TestPartMasks:
    def test_ten_masks_in_config_order(self):
        cfg = default_skeleton()
        pose = standing_pose((48, 48, 12))
        masks = part_masks(pose, cfg, (48, 48, 12))
        assert [m.name for m in masks] == [p.name for p in cfg.parts]
        assert all(m.count > 0 for m in masks)

    def test_lower_left_leg_is_knee_ankle_capsule(self):
        cfg = default_skeleton()
        pose = standing_pose((48, 48, 12))
        masks = part_masks(pose, cfg, (48, 48, 12))
        mask = masks[[p.name for p in cfg.parts].index("l_lower_leg")]
        knee, ankle = pose.position("l_knee"), pose.position("l_ankle")
        rule = cfg.part("l_lower_leg").radius
        radius = rule.resolve(float(np.linalg.norm(ankle - knee)))
        expected = capsule_mask((48, 48, 12), knee, ankle, radius)
        assert np.array_equal(mask.data, expected.data)

    def test_pose_outside_grid_warns_ten_zero_masks(self):
        pose = standing_pose((48, 48, 12))
        far = Pose(pose.names, pose.positions + 1000.0, pose.space)
        with pytest.warns(UserWarning):
            masks = part_masks(far, default_skeleton(), (48, 48, 12))
        assert len(masks) == 10
        assert all(m.count == 0 for m in masks)

    def test_rejects_millimeter_pose(self):
        pose = standing_pose((32, 32, 8), space="millimeter")
        with pytest.raises(ValueError, match="voxel"):
            part_masks(pose, default_skeleton(), (32, 32, 8))


class TestBackgroundMask:
    def test_all_zero_masks_give_all_ones(self):
        masks = [PartMask(np.zeros((6, 7, 3), dtype=np.float32))] * 3
        bg = background_mask(masks, dilate=2)
        assert (bg.data == 1.0).all()

    def test_all_ones_masks_give_all_zeros(self):
        masks = [PartMask(np.ones((6, 7, 3), dtype=np.float32))]
        bg = background_mask(masks, dilate=0)
        assert (bg.data == 0.0).all()

    def test_sphere_projection_complement(self):
        sphere = capsule_mask((15, 15, 7), (7, 7, 3), (7, 7, 3), 3.0)
        bg = background_mask([sphere], dilate=0)
        for y in range(15):
            for x in range(15):
                covered = any(sphere.data[y, x, z] for z in range(7))
                assert bg.data[y, x, 0] == (0.0 if covered else 1.0)

    def test_partition_with_dilated_foreground(self):
        pose = standing_pose((32, 32, 8))
        masks = part_masks(pose, default_skeleton(), (32, 32, 8))
        for dilate in (0, 2, 4):
            bg = background_mask(masks, dilate=dilate)
            fg = np.zeros((32, 32), dtype=bool)
            for m in masks:
                fg |= m.data.max(axis=2) > 0
            if dilate:
                fg = ndimage.binary_dilation(fg, iterations=dilate)
            assert np.array_equal(bg.data[:, :, 0] + fg.astype(np.float32), np.ones((32, 32)))

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            background_mask([])


class TestGaussianHeatmaps:
    def test_peak_one_on_voxel_center(self):
        pose = Pose(("j",), np.array([[3.0, 4.0, 2.0]]))
        hm = gaussian_heatmaps(pose, (8, 8, 5))
        assert hm.data[3, 4, 2, 0] == 1.0

    def test_value_at_one_sigma(self):
        pose = Pose(("j",), np.array([[4.0, 4.0, 4.0]]))
        hm = gaussian_heatmaps(pose, (9, 9, 9), HeatmapParams(sigma=2.0))
        assert hm.data[6, 4, 4, 0] == pytest.approx(np.exp(-0.5), abs=1e-6)

    def test_matches_per_voxel_oracle(self):
        rng = np.random.default_rng(65)
        positions = rng.uniform(0, 9, size=(3, 3))
        pose = Pose(("a", "b", "c"), positions)
        params = HeatmapParams(sigma=1.5, truncation=3.0)
        hm = gaussian_heatmaps(pose, (10, 10, 6), params)
        ref = heatmap_ref(positions, (10, 10, 6), 1.5, 3.0)
        np.testing.assert_allclose(hm.data, ref, atol=1e-5)
        assert abs(hm.data.sum() - ref.sum()) < 1e-4

    def test_values_in_unit_interval_peak_nearest_joint(self):
        rng = np.random.default_rng(66)
        positions = rng.uniform(1, 8, size=(4, 3))
        pose = Pose(tuple("abcd"), positions)
        hm = gaussian_heatmaps(pose, (10, 10, 10))
        assert hm.data.min() >= 0.0 and hm.data.max() <= 1.0
        for j, p in enumerate(positions):
            nearest = tuple(np.round(p).astype(int))
            channel = hm.data[:, :, :, j]
            assert channel[nearest] == channel.max()


class TestHeatmaps2dMode:
    def test_depth_slices_identical(self):
        pose = standing_pose((16, 16, 6))
        hm = heatmaps_2d_mode(pose, (16, 16, 6))
        for z in range(1, 6):
            assert np.array_equal(hm.data[:, :, z, :], hm.data[:, :, 0, :])

    def test_peak_one_every_layer(self):
        pose = Pose(("j",), np.array([[5.0, 6.0, 17.0]]))  # depth irrelevant
        hm = heatmaps_2d_mode(pose, (12, 12, 4))
        for z in range(4):
            assert hm.data[5, 6, z, 0] == 1.0

    def test_single_layer_equals_3d_for_in_plane_joints(self):
        rng = np.random.default_rng(67)
        positions = rng.uniform(0, 11, size=(5, 3))
        positions[:, 2] = 0.0
        pose = Pose(tuple("abcde"), positions)
        flat = heatmaps_2d_mode(pose, (12, 12, 1))
        full = gaussian_heatmaps(pose, (12, 12, 1))
        assert np.array_equal(flat.data, full.data)


def test_heatmap_params_validation():
    with pytest.raises(ValueError):
        HeatmapParams(sigma=0.0)
    with pytest.raises(ValueError):
        HeatmapParams(truncation=0.5)
