import numpy as np
import pytest

from volwarp import (
    Affine2,
    Helmert3,
    affine_from_dict,
    affine_to_dict,
    axis_angle_rotation,
    compose,
    fit_affine2,
    fit_helmert,
    helmert_from_dict,
    helmert_to_dict,
    load_transforms,
    save_transforms,
)

from oracles import noncollinear_points, random_rotation, rotation_geodesic

TRI = np.array([[0.0, 0.0, 0.0], [4.0, 1.0, 0.0], [1.0, 3.0, 2.0]])


class TestHelmertType:
    def test_rejects_reflection(self):
        r = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError, match="determinant"):
            Helmert3(1.0, r, np.zeros(3))

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError, match="orthonormal"):
            Helmert3(1.0, np.eye(3) * 1.1, np.zeros(3))

    def test_rejects_non_positive_scale(self):
        with pytest.raises(ValueError, match="scale"):
            Helmert3(0.0, np.eye(3), np.zeros(3))

    def test_apply_identity(self):
        p = np.array([1.5, -2.0, 3.0])
        np.testing.assert_array_equal(Helmert3.identity().apply(p), p)

    def test_apply_scale(self):
        t = Helmert3(2.0, np.eye(3), np.zeros(3))
        np.testing.assert_array_equal(t.apply([1.0, 1.0, 1.0]), [2.0, 2.0, 2.0])

    def test_invert_identity(self):
        inv = Helmert3.identity().invert()
        assert inv.scale == 1.0
        np.testing.assert_array_equal(inv.translation, np.zeros(3))

    def test_invert_translation(self):
        t = Helmert3(1.0, np.eye(3), np.array([1.0, 2.0, 3.0]))
        np.testing.assert_array_equal(t.invert().translation, [-1.0, -2.0, -3.0])

    def test_invert_round_trips(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            t = Helmert3(
                rng.uniform(0.5, 2.0), random_rotation(rng), rng.uniform(-5, 5, 3)
            )
            p = rng.uniform(-10, 10, size=3)
            np.testing.assert_allclose(t.apply(t.invert().apply(p)), p, atol=1e-6)
            np.testing.assert_allclose(t.invert().apply(t.apply(p)), p, atol=1e-6)
            double = t.invert().invert()
            assert double.scale == pytest.approx(t.scale, abs=1e-9)
            np.testing.assert_allclose(double.rotation, t.rotation, atol=1e-9)
            np.testing.assert_allclose(double.translation, t.translation, atol=1e-9)


class TestFitHelmert:
    def test_identity_fit(self):
        t = fit_helmert(TRI, TRI)
        assert t.scale == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(t.rotation, np.eye(3), atol=1e-9)
        np.testing.assert_allclose(t.translation, np.zeros(3), atol=1e-9)
        assert not t.degenerate

    def test_pure_translation(self):
        t = fit_helmert(TRI, TRI + np.array([1.0, 2.0, 3.0]))
        assert t.scale == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(t.rotation, np.eye(3), atol=1e-9)
        np.testing.assert_allclose(t.translation, [1.0, 2.0, 3.0], atol=1e-9)

    def test_recovers_constructed_transform(self):
        rotation = axis_angle_rotation(
            np.array([1.0, 1.0, 0.0]) / np.sqrt(2), np.deg2rad(40.0)
        )
        true = Helmert3(1.3, rotation, np.array([5.0, -2.0, 7.0]))
        rng = np.random.default_rng(42)
        src = noncollinear_points(rng, 5)
        fitted = fit_helmert(src, true.apply(src))
        assert fitted.scale == pytest.approx(true.scale, rel=1e-6)
        assert rotation_geodesic(fitted.rotation, true.rotation) < 1e-6
        np.testing.assert_allclose(fitted.translation, true.translation, atol=1e-5)

    def test_scale_recovery(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            src = noncollinear_points(rng, 4)
            alpha = rng.uniform(0.2, 5.0)
            fitted = fit_helmert(src, alpha * src)
            assert fitted.scale == pytest.approx(alpha, rel=1e-6)

    def test_never_emits_reflection(self):
        # mirrored destinations: the unconstrained optimum is a reflection
        rng = np.random.default_rng(44)
        for _ in range(20):
            src = noncollinear_points(rng, 5)
            dst = src * np.array([1.0, 1.0, -1.0])
            fitted = fit_helmert(src, dst)
            assert np.linalg.det(fitted.rotation) == pytest.approx(1.0, abs=1e-9)

    def test_equivariance_under_rigid_motion(self):
        rng = np.random.default_rng(45)
        for _ in range(20):
            src = noncollinear_points(rng, 5)
            dst = Helmert3(
                rng.uniform(0.5, 2.0), random_rotation(rng), rng.uniform(-5, 5, 3)
            ).apply(src)
            q = Helmert3(1.0, random_rotation(rng), rng.uniform(-5, 5, 3))
            base = fit_helmert(src, dst)
            moved = fit_helmert(q.apply(src), q.apply(dst))
            expected = compose(q, compose(base, q.invert()))
            assert moved.scale == pytest.approx(expected.scale, rel=1e-5)
            np.testing.assert_allclose(moved.rotation, expected.rotation, atol=1e-5)
            np.testing.assert_allclose(moved.translation, expected.translation, atol=1e-5)

    def test_residual_is_local_minimum(self):
        rng = np.random.default_rng(46)

        def residual(scale, rotation, translation, src, dst):
            mapped = src @ rotation.T * scale + translation
            return float(((mapped - dst) ** 2).sum())

        for _ in range(10):
            src = noncollinear_points(rng, 6)
            dst = Helmert3(
                rng.uniform(0.5, 2.0), random_rotation(rng), rng.uniform(-5, 5, 3)
            ).apply(src)
            dst = dst + rng.normal(scale=0.05, size=dst.shape)  # off-manifold
            t = fit_helmert(src, dst)
            best = residual(t.scale, t.rotation, t.translation, src, dst)
            for eps in (1e-3, -1e-3):
                assert residual(t.scale + eps, t.rotation, t.translation, src, dst) >= best
                for axis in np.eye(3):
                    bumped = t.rotation @ axis_angle_rotation(axis, eps)
                    assert residual(t.scale, bumped, t.translation, src, dst) >= best
                    shifted = t.translation + eps * axis
                    assert residual(t.scale, t.rotation, shifted, src, dst) >= best

    def test_coincident_source_raises(self):
        src = np.zeros((3, 3))
        with pytest.raises(ValueError, match="coincide"):
            fit_helmert(src, TRI)

    def test_collinear_source_falls_back_flagged(self):
        src = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
        rotation = axis_angle_rotation([0.0, 0.0, 1.0], np.deg2rad(90.0))
        true = Helmert3(1.5, rotation, np.array([1.0, 2.0, 3.0]))
        fitted = fit_helmert(src, true.apply(src))
        assert fitted.degenerate
        assert fitted.scale == pytest.approx(1.5, rel=1e-9)
        np.testing.assert_allclose(fitted.apply(src), true.apply(src), atol=1e-9)

    def test_too_few_points_raises(self):
        with pytest.raises(ValueError):
            fit_helmert(TRI[:2], TRI[:2])


SQUARE = np.array([[0.0, 0.0], [3.0, 0.5], [0.5, 2.5], [2.0, 3.0]])


class TestFitAffine2:
    def test_identity(self):
        fitted = fit_affine2(SQUARE[:3], SQUARE[:3])
        np.testing.assert_allclose(fitted.linear, np.eye(2), atol=1e-9)
        np.testing.assert_allclose(fitted.translation, np.zeros(2), atol=1e-9)

    def test_quarter_turn_exact_interpolation(self):
        src = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
        dst = np.stack([-src[:, 1], src[:, 0]], axis=1)
        fitted = fit_affine2(src, dst)
        np.testing.assert_allclose(fitted.linear, [[0.0, -1.0], [1.0, 0.0]], atol=1e-6)

    def test_recovers_random_affine(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            linear = rng.uniform(-2, 2, size=(2, 2))
            if abs(np.linalg.det(linear)) < 0.1:
                continue
            true = Affine2(linear, rng.uniform(-5, 5, size=2))
            fitted = fit_affine2(SQUARE, true.apply(SQUARE))
            np.testing.assert_allclose(fitted.linear, true.linear, atol=1e-6)
            np.testing.assert_allclose(fitted.translation, true.translation, atol=1e-6)

    def test_collinear_falls_back_to_similarity(self):
        src = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        theta = np.deg2rad(30.0)
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        true = Affine2(2.0 * rot, np.array([1.0, -1.0]))
        fitted = fit_affine2(src, true.apply(src))
        assert fitted.degenerate
        np.testing.assert_allclose(fitted.apply(src), true.apply(src), atol=1e-9)

    def test_invert_round_trips(self):
        a = Affine2(np.array([[1.5, 0.2], [-0.3, 0.8]]), np.array([2.0, -1.0]))
        p = np.array([3.0, 4.0])
        np.testing.assert_allclose(a.invert().apply(a.apply(p)), p, atol=1e-9)


class TestJsonInterchange:
    def test_helmert_round_trip(self):
        rng = np.random.default_rng(48)
        t = Helmert3(1.7, random_rotation(rng), np.array([1.0, -2.0, 0.5]), True)
        back = helmert_from_dict(helmert_to_dict(t))
        assert back.scale == t.scale and back.degenerate
        np.testing.assert_allclose(back.rotation, t.rotation, atol=1e-12)
        np.testing.assert_allclose(back.translation, t.translation, atol=1e-12)

    def test_file_axis_order_is_xyz(self):
        # pure translation by (y=1, x=2, z=3) serializes as [x, y, z] = [2, 1, 3]
        t = Helmert3(1.0, np.eye(3), np.array([1.0, 2.0, 3.0]))
        d = helmert_to_dict(t)
        assert d["translation"] == [2.0, 1.0, 3.0]

    def test_file_rotation_acts_in_file_space(self):
        rng = np.random.default_rng(49)
        t = Helmert3(1.2, random_rotation(rng), rng.uniform(-3, 3, 3))
        d = helmert_to_dict(t)
        p_mem = rng.uniform(-5, 5, 3)
        p_file = p_mem[[1, 0, 2]]
        mapped_file = t.scale * np.asarray(d["rotation"]) @ p_file + np.asarray(
            d["translation"]
        )
        np.testing.assert_allclose(mapped_file, t.apply(p_mem)[[1, 0, 2]], atol=1e-12)

    def test_affine_round_trip(self):
        a = Affine2(np.array([[1.1, 0.3], [-0.2, 0.9]]), np.array([4.0, 5.0]))
        back = affine_from_dict(affine_to_dict(a))
        np.testing.assert_allclose(back.linear, a.linear, atol=1e-12)
        np.testing.assert_allclose(back.translation, a.translation, atol=1e-12)

    def test_transform_table_round_trip(self):
        rng = np.random.default_rng(50)
        table = {
            "head": Helmert3(1.0, np.eye(3), np.array([1.0, 2.0, 3.0])),
            "torso": Helmert3(0.9, random_rotation(rng), np.zeros(3)),
        }
        back = load_transforms(save_transforms(table))
        assert set(back) == {"head", "torso"}
        np.testing.assert_allclose(back["torso"].rotation, table["torso"].rotation, atol=1e-12)

    def test_mixed_table_rejected(self):
        table = {"a": Helmert3.identity(), "b": Affine2.identity()}
        with pytest.raises(ValueError):
            save_transforms(table)
