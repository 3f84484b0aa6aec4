"""Tests for D-H forward kinematics, rotations and error metrics."""

import math

import numpy as np
import pandas as pd
import pytest

from src.errors import (
    InvertedLimits,
    LengthMismatch,
    MalformedTable,
    NonFiniteInput,
    NotARotation,
    NotUnit,
    UnknownChain,
)
from src.robot.kinematics import (
    DHChain,
    DHRow,
    HomogeneousTransform,
    Pose,
    dh_transform,
    forward_kinematics,
    forward_kinematics_batch,
    get_chain,
    load_dh_chain_csv,
    pose_error,
    position_error,
    save_dh_chain_csv,
)
from src.robot.rotations import (
    Quaternion,
    check_rotation,
    quaternion_to_rotation,
    rotation_to_quaternion,
)

QUARTER_TURN_Z = Quaternion(0.0, 0.0, math.sin(math.pi / 4), math.cos(math.pi / 4))


def planar_chain() -> DHChain:
    """Two unit links rotating about parallel z axes."""
    return DHChain(rows=(DHRow(0.0, 1.0, 0.0, -math.pi, math.pi), DHRow(0.0, 1.0, 0.0, -math.pi, math.pi)))


class TestDHTransform:
    def test_single_row(self) -> None:
        row = DHRow(alpha=0.0, a=1.0, d=0.5, theta_lower=-math.pi, theta_upper=math.pi)
        T = dh_transform(row, math.pi / 2)
        np.testing.assert_allclose(T.position, [0.0, 1.0, 0.5], atol=1e-12)

    def test_alpha_twists_z_axis(self) -> None:
        row = DHRow(alpha=math.pi / 2, a=0.0, d=0.0, theta_lower=-1.0, theta_upper=1.0)
        T = dh_transform(row, 0.0)
        np.testing.assert_allclose(T.rotation[:, 2], [0.0, -1.0, 0.0], atol=1e-12)

    def test_non_finite_theta(self) -> None:
        row = DHRow(0.0, 1.0, 0.0, -1.0, 1.0)
        with pytest.raises(NonFiniteInput):
            dh_transform(row, float("nan"))

    def test_inverted_row_limits(self) -> None:
        with pytest.raises(InvertedLimits):
            DHRow(0.0, 1.0, 0.0, 1.0, -1.0)


class TestForwardKinematics:
    def test_planar_straight(self) -> None:
        T = forward_kinematics(planar_chain(), [0.0, 0.0])
        np.testing.assert_allclose(T.position, [2.0, 0.0, 0.0], atol=1e-12)

    def test_planar_elbow(self) -> None:
        T = forward_kinematics(planar_chain(), [math.pi / 2, -math.pi / 2])
        np.testing.assert_allclose(T.position, [1.0, 1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(T.rotation, np.eye(3), atol=1e-12)

    def test_rotation_is_orthonormal(self, chain, rng) -> None:
        for _ in range(100):
            T = forward_kinematics(chain, rng.uniform(chain.lower, chain.upper))
            check_rotation(T.rotation, tolerance=1e-9)

    def test_rotation_is_orthonormal_over_many_samples(self, chain, rng) -> None:
        thetas = rng.uniform(chain.lower, chain.upper, size=(10_000, 7))
        R = forward_kinematics_batch(chain, thetas)[:, :3, :3]
        gram = np.einsum("nji,njk->nik", R, R)
        assert np.max(np.abs(gram - np.eye(3))) < 1e-9
        assert np.max(np.abs(np.linalg.det(R) - 1.0)) < 1e-9

    def test_lipschitz_under_small_perturbation(self, chain, rng) -> None:
        """A joint change of 1e-7 rad moves the tool by at most reach times the change."""
        bound = chain.reach_bound()
        for _ in range(200):
            theta = rng.uniform(chain.lower, chain.upper)
            delta = rng.uniform(-1e-7, 1e-7, size=7)
            before = forward_kinematics(chain, theta)
            after = forward_kinematics(chain, theta + delta)
            step = np.sum(np.abs(delta))
            assert position_error(after.position, before.position) <= bound * step + 1e-12
            assert pose_error(after.quaternion(), before.quaternion()) <= step + 1e-7

    def test_position_within_reach(self, chain, rng) -> None:
        for _ in range(100):
            T = forward_kinematics(chain, rng.uniform(chain.lower, chain.upper))
            assert np.linalg.norm(T.position) <= chain.reach_bound()

    def test_batch_equals_single(self, chain, rng) -> None:
        thetas = rng.uniform(chain.lower, chain.upper, size=(25, len(chain)))
        batch = forward_kinematics_batch(chain, thetas)
        for theta, M in zip(thetas, batch):
            np.testing.assert_allclose(forward_kinematics(chain, theta).matrix, M, atol=1e-12)

    def test_wrong_length(self, chain) -> None:
        with pytest.raises(LengthMismatch):
            forward_kinematics(chain, [0.0] * 6)

    def test_non_finite(self, chain) -> None:
        with pytest.raises(NonFiniteInput):
            forward_kinematics(chain, [0.0, 0.0, float("inf"), 0.0, 0.0, 0.0, 0.0])

    def test_limits_not_checked(self, chain) -> None:
        """Forward kinematics evaluates any finite vector; limits are a planner concern."""
        T = forward_kinematics(chain, [5.0] * 7)
        assert np.all(np.isfinite(T.matrix))

    def test_transform_inverse(self, chain, rng) -> None:
        T = forward_kinematics(chain, rng.uniform(chain.lower, chain.upper))
        np.testing.assert_allclose((T @ T.inverse()).matrix, np.eye(4), atol=1e-12)


class TestRotations:
    def test_quarter_turn_round_trip(self) -> None:
        R = quaternion_to_rotation(QUARTER_TURN_Z)
        np.testing.assert_allclose(R, [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], atol=1e-12)
        q = rotation_to_quaternion(R)
        np.testing.assert_allclose(q.as_array(), QUARTER_TURN_Z.as_array(), atol=1e-12)

    def test_canonical_sign(self, rng) -> None:
        """Converted quaternions always have w >= 0."""
        for _ in range(50):
            q = rng.normal(size=4)
            q /= np.linalg.norm(q)
            result = rotation_to_quaternion(quaternion_to_rotation(Quaternion.from_array(q)))
            assert result.w >= 0.0
            assert abs(abs(np.dot(result.as_array(), q)) - 1.0) < 1e-9

    def test_half_turn(self) -> None:
        R = np.diag([1.0, -1.0, -1.0])
        q = rotation_to_quaternion(R)
        assert abs(q.x) == pytest.approx(1.0)
        assert q.norm() == pytest.approx(1.0)

    def test_rejects_reflection(self) -> None:
        with pytest.raises(NotARotation):
            rotation_to_quaternion(np.diag([1.0, 1.0, -1.0]))

    def test_rejects_scaled(self) -> None:
        with pytest.raises(NotARotation):
            rotation_to_quaternion(2.0 * np.eye(3))

    def test_non_unit_quaternion(self) -> None:
        with pytest.raises(NotUnit):
            quaternion_to_rotation(Quaternion(0.0, 0.0, 0.0, 2.0))


class TestErrorMetrics:
    def test_position_error(self) -> None:
        assert position_error([0.0, 0.0, 0.0], [3.0, 4.0, 0.0]) == pytest.approx(5.0)

    def test_position_error_shape_mismatch(self) -> None:
        with pytest.raises(LengthMismatch):
            position_error([0.0, 0.0, 0.0], [0.0, 0.0])

    def test_pose_error_identity(self) -> None:
        assert pose_error(Quaternion.identity(), Quaternion.identity()) == 0.0

    def test_pose_error_quarter_turn(self) -> None:
        assert pose_error(QUARTER_TURN_Z, Quaternion.identity()) == pytest.approx(math.pi / 2)

    def test_double_cover_folded(self) -> None:
        """q and -q describe the same rotation."""
        assert pose_error(QUARTER_TURN_Z, -QUARTER_TURN_Z) == pytest.approx(0.0, abs=1e-7)

    def test_strict_keeps_sign(self) -> None:
        assert pose_error(Quaternion.identity(), -Quaternion.identity(), strict=True) == pytest.approx(2 * math.pi)

    def test_pose_error_range(self, rng) -> None:
        for _ in range(100):
            a, b = rng.normal(size=(2, 4))
            qa = Quaternion.from_array(a / np.linalg.norm(a))
            qb = Quaternion.from_array(b / np.linalg.norm(b))
            assert 0.0 <= pose_error(qa, qb) <= math.pi + 1e-12

    def test_position_error_is_a_metric(self, rng) -> None:
        for _ in range(500):
            a, b, c = rng.normal(scale=2.0, size=(3, 3))
            assert position_error(a, b) == position_error(b, a)
            assert position_error(a, a) == 0.0
            assert position_error(a, c) <= position_error(a, b) + position_error(b, c) + 1e-12

    def test_pose_error_is_symmetric(self, rng) -> None:
        for _ in range(500):
            a, b = (Quaternion(*(v / np.linalg.norm(v))) for v in rng.normal(size=(2, 4)))
            assert pose_error(a, b) == pose_error(b, a)
            assert pose_error(a, b, strict=True) == pose_error(b, a, strict=True)

    def test_pose_error_non_unit(self) -> None:
        with pytest.raises(NotUnit):
            pose_error(Quaternion(0.0, 0.0, 0.0, 0.5), Quaternion.identity())


class TestPose:
    def test_from_values(self) -> None:
        pose = Pose.from_values([0.1, 0.2, 0.3, 0.0, 0.0, 0.0, 1.0])
        np.testing.assert_allclose(pose.position, [0.1, 0.2, 0.3])
        assert pose.orientation == Quaternion.identity()

    def test_from_values_wrong_length(self) -> None:
        with pytest.raises(LengthMismatch):
            Pose.from_values([0.0] * 6)

    def test_transform_round_trip(self, chain, rng) -> None:
        T = forward_kinematics(chain, rng.uniform(chain.lower, chain.upper))
        back = Pose.from_transform(T).to_transform()
        np.testing.assert_allclose(back.matrix, T.matrix, atol=1e-12)

    def test_identity_transform(self) -> None:
        np.testing.assert_array_equal(HomogeneousTransform.identity().matrix, np.eye(4))


class TestChains:
    def test_builtin_tiago(self, chain) -> None:
        assert len(chain) == 7
        assert chain.has_finite_limits
        assert chain.lower[0] == 0.0
        assert chain.upper[0] == 2.75

    def test_unknown_chain(self) -> None:
        with pytest.raises(UnknownChain):
            get_chain("ur5")

    def test_csv_matches_builtin(self, fixtures_dir, chain) -> None:
        loaded = load_dh_chain_csv(fixtures_dir / "tiago_arm_dh.csv")
        assert loaded.name == "tiago_arm_dh"
        np.testing.assert_allclose(loaded.to_frame().to_numpy(), chain.to_frame().to_numpy(), rtol=1e-15)

    def test_csv_save_load(self, tmp_path, chain) -> None:
        path = tmp_path / "arm.csv"
        save_dh_chain_csv(chain, path)
        loaded = load_dh_chain_csv(path)
        np.testing.assert_array_equal(loaded.to_frame().to_numpy(), chain.to_frame().to_numpy())
        theta = np.array([0.2, 0.3, -1.0, 1.2, 0.0, 0.5, 0.0])
        np.testing.assert_array_equal(forward_kinematics(loaded, theta).matrix, forward_kinematics(chain, theta).matrix)

    def test_csv_round_trip_is_exact_for_awkward_values(self, tmp_path) -> None:
        rows = [DHRow(alpha=0.1 + 0.2, a=1 / 3, d=-2 / 7, theta_lower=-math.pi, theta_upper=math.e)]
        original = DHChain(rows, name="awkward")
        path = tmp_path / "awkward.csv"
        save_dh_chain_csv(original, path)
        np.testing.assert_array_equal(load_dh_chain_csv(path).to_frame().to_numpy(), original.to_frame().to_numpy())

    def test_csv_missing_column(self, tmp_path) -> None:
        path = tmp_path / "bad.csv"
        pd.DataFrame({"alpha": [0.0], "a": [1.0], "d": [0.0], "lower": [-1.0]}).to_csv(path, index=False)
        with pytest.raises(MalformedTable):
            load_dh_chain_csv(path)

    def test_csv_inverted_limits(self, tmp_path) -> None:
        path = tmp_path / "bad.csv"
        pd.DataFrame({"alpha": [0.0], "a": [1.0], "d": [0.0], "lower": [1.0], "upper": [-1.0]}).to_csv(path, index=False)
        with pytest.raises(MalformedTable):
            load_dh_chain_csv(path)

    def test_csv_missing_file(self, tmp_path) -> None:
        with pytest.raises(MalformedTable):
            load_dh_chain_csv(tmp_path / "nope.csv")
