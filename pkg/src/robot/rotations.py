"""Rotation and quaternion helpers.

Quaternions are stored scalar-last ``(x, y, z, w)``, the order used by
``scipy.spatial.transform.Rotation``.
"""

from dataclasses import dataclass
from typing import Iterable, Tuple
import logging

import numpy as np
from scipy.spatial.transform import Rotation

from src.errors import NonFiniteInput, NotARotation, NotUnit

logger = logging.getLogger(__name__)

ROTATION_TOLERANCE = 1e-6
UNIT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion, scalar last."""

    x: float
    y: float
    z: float
    w: float

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(0.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Quaternion":
        x, y, z, w = (float(v) for v in values)
        return cls(x, y, z, w)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.w], dtype=float)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x, self.y, self.z, self.w)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.x, -self.y, -self.z, -self.w)


def check_rotation(matrix: np.ndarray, tolerance: float = ROTATION_TOLERANCE) -> np.ndarray:
    """
    Check that a matrix (or a stack of matrices) is a proper rotation.

    Args:
        matrix: Array of shape (3, 3) or (n, 3, 3)
        tolerance: Max deviation of R^T R from I and of det R from 1

    Returns:
        The input as a float array

    Raises:
        NotARotation: If any matrix is not orthonormal with determinant +1
    """
    R = np.asarray(matrix, dtype=float)
    if R.shape[-2:] != (3, 3):
        raise NotARotation(f"expected 3x3 blocks, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise NonFiniteInput("rotation contains non-finite entries")

    gram = np.swapaxes(R, -1, -2) @ R
    orth_dev = np.max(np.abs(gram - np.eye(3)))
    det_dev = np.max(np.abs(np.linalg.det(R) - 1.0))
    if orth_dev > tolerance or det_dev > tolerance:
        raise NotARotation(f"orthonormality deviation {orth_dev:.3g}, determinant deviation {det_dev:.3g}")
    return R


def rotation_to_quaternion_array(matrices: np.ndarray) -> np.ndarray:
    """
    Convert a stack of rotation matrices to canonical quaternions.

    scipy picks the numerically largest of the four Shepperd candidates, and
    ``canonical=True`` enforces w >= 0.

    Args:
        matrices: Array of shape (n, 3, 3), assumed to be rotations

    Returns:
        Array of shape (n, 4), scalar last
    """
    return Rotation.from_matrix(matrices).as_quat(canonical=True)


def rotation_to_quaternion(matrix: np.ndarray) -> Quaternion:
    """
    Convert a rotation matrix to its unit quaternion with w >= 0.

    Args:
        matrix: 3x3 rotation matrix, orthonormal within 1e-6

    Returns:
        Quaternion

    Raises:
        NotARotation: If the matrix is not a rotation
    """
    R = check_rotation(matrix)
    if R.ndim != 2:
        raise NotARotation(f"expected a single 3x3 matrix, got shape {R.shape}")
    return Quaternion.from_array(rotation_to_quaternion_array(R[np.newaxis])[0])


def quaternion_to_rotation(q: Quaternion) -> np.ndarray:
    """
    Convert a unit quaternion to a 3x3 rotation matrix.

    Raises:
        NotUnit: If the quaternion norm deviates from 1 by more than 1e-6
    """
    check_unit(q)
    return Rotation.from_quat(q.as_array()).as_matrix()


def check_unit(q: Quaternion, tolerance: float = UNIT_TOLERANCE) -> None:
    values = q.as_array()
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("quaternion contains non-finite entries")
    norm = float(np.linalg.norm(values))
    if abs(norm - 1.0) > tolerance:
        raise NotUnit(f"quaternion norm {norm:.9g}")


def rpy_to_rotation(rpy: Iterable[float]) -> np.ndarray:
    """Fixed-axis roll-pitch-yaw to rotation, R = Rz(yaw) Ry(pitch) Rx(roll)."""
    roll, pitch, yaw = (float(v) for v in rpy)
    return Rotation.from_euler("xyz", [roll, pitch, yaw]).as_matrix()


def axis_angle_to_rotation(axis: Iterable[float], angle: float) -> np.ndarray:
    """Rotation of ``angle`` radians about a unit ``axis``."""
    return Rotation.from_rotvec(np.asarray(list(axis), dtype=float) * float(angle)).as_matrix()
