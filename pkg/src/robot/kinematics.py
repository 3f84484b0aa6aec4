"""Denavit-Hartenberg forward kinematics and pose-error metrics."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union
import logging

import numpy as np
import pandas as pd
import pandera as pa

from config.robots import TIAGO_ARM_DH_ROWS, TIAGO_ARM_CHAIN_NAME
from src.errors import (
    LengthMismatch,
    MalformedTable,
    NonFiniteInput,
    UnknownChain,
    InvertedLimits,
)
from .rotations import (
    Quaternion,
    check_unit,
    quaternion_to_rotation,
    rotation_to_quaternion,
)

logger = logging.getLogger(__name__)

DH_COLUMNS = ["alpha", "a", "d", "lower", "upper"]

DH_TABLE_SCHEMA = pa.DataFrameSchema(
    {
        "alpha": pa.Column(float, pa.Check(np.isfinite)),
        "a": pa.Column(float, pa.Check(np.isfinite)),
        "d": pa.Column(float, pa.Check(np.isfinite)),
        "lower": pa.Column(float, nullable=False),
        "upper": pa.Column(float, nullable=False),
    },
    checks=[pa.Check(lambda df: df["lower"] <= df["upper"], error="lower must not exceed upper")],
    strict=True,
    coerce=True,
)


@dataclass(frozen=True)
class DHRow:
    """One D-H row with its joint limits (radians / meters)."""

    alpha: float
    a: float
    d: float
    theta_lower: float
    theta_upper: float

    def __post_init__(self):
        if not all(np.isfinite([self.alpha, self.a, self.d])):
            raise NonFiniteInput("alpha, a and d must be finite")
        if self.theta_lower > self.theta_upper:
            raise InvertedLimits(f"lower {self.theta_lower} > upper {self.theta_upper}")


@dataclass(frozen=True)
class DHChain:
    """Ordered D-H rows describing a serial arm."""

    rows: tuple
    name: str = "custom"

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise LengthMismatch("a chain needs at least one row")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def lower(self) -> np.ndarray:
        return np.array([row.theta_lower for row in self.rows], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([row.theta_upper for row in self.rows], dtype=float)

    @property
    def has_finite_limits(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def within_limits(self, theta: Sequence[float], tolerance: float = 0.0) -> bool:
        values = np.asarray(theta, dtype=float)
        return bool(np.all(values >= self.lower - tolerance) and np.all(values <= self.upper + tolerance))

    def reach_bound(self) -> float:
        """Coarse Lipschitz bound sum(|a_k| + |d_k|) + 1 of the end-effector position."""
        return float(sum(abs(row.a) + abs(row.d) for row in self.rows) + 1.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.alpha, r.a, r.d, r.theta_lower, r.theta_upper) for r in self.rows],
            columns=DH_COLUMNS,
        )

    @classmethod
    def from_frame(cls, df: pd.DataFrame, name: str = "custom") -> "DHChain":
        """
        Build a chain from a DataFrame with columns alpha, a, d, lower, upper.

        Raises:
            MalformedTable: If the frame fails schema validation
        """
        try:
            df = DH_TABLE_SCHEMA.validate(df)
        except (pa.errors.SchemaError, pa.errors.SchemaErrors) as e:
            raise MalformedTable(str(e).splitlines()[0], subject=name) from e

        rows = tuple(
            DHRow(float(r.alpha), float(r.a), float(r.d), float(r.lower), float(r.upper))
            for r in df.itertuples(index=False)
        )
        return cls(rows=rows, name=name)


@dataclass(frozen=True, eq=False)
class HomogeneousTransform:
    """Rigid transform: rotation R (columns n, o, a) and position P."""

    rotation: np.ndarray
    position: np.ndarray

    @classmethod
    def identity(cls) -> "HomogeneousTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "HomogeneousTransform":
        M = np.asarray(matrix, dtype=float)
        return cls(M[:3, :3].copy(), M[:3, 3].copy())

    @property
    def matrix(self) -> np.ndarray:
        M = np.eye(4)
        M[:3, :3] = self.rotation
        M[:3, 3] = self.position
        return M

    def __matmul__(self, other: "HomogeneousTransform") -> "HomogeneousTransform":
        return HomogeneousTransform.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "HomogeneousTransform":
        R_t = self.rotation.T
        return HomogeneousTransform(R_t, -R_t @ self.position)

    def quaternion(self) -> Quaternion:
        return rotation_to_quaternion(self.rotation)

    def to_dict(self) -> dict:
        q = self.quaternion()
        return {
            "position": [float(v) for v in self.position],
            "quaternion": list(q.as_tuple()),
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }


@dataclass(frozen=True, eq=False)
class Pose:
    """End-effector target: position (meters) and orientation quaternion."""

    position: np.ndarray
    orientation: Quaternion = field(default_factory=Quaternion.identity)

    def __post_init__(self):
        position = np.asarray(self.position, dtype=float).reshape(3)
        if not np.all(np.isfinite(position)):
            raise NonFiniteInput("pose position must be finite")
        object.__setattr__(self, "position", position)
        check_unit(self.orientation)

    @classmethod
    def from_transform(cls, transform: HomogeneousTransform) -> "Pose":
        return cls(transform.position.copy(), transform.quaternion())

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Pose":
        """Build from ``x, y, z, qx, qy, qz, qw``."""
        if len(values) != 7:
            raise LengthMismatch(f"pose needs 7 values, got {len(values)}")
        return cls(np.asarray(values[:3], dtype=float), Quaternion.from_array(values[3:]))

    def to_transform(self) -> HomogeneousTransform:
        return HomogeneousTransform(quaternion_to_rotation(self.orientation), self.position.copy())


def as_joint_vector(values: Iterable[float], chain: DHChain) -> np.ndarray:
    """
    Convert joint values into a float vector matching the chain length.

    Raises:
        LengthMismatch: If the length differs from the chain length
        NonFiniteInput: If any value is NaN or infinite
    """
    theta = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if theta.ndim != 1 or theta.shape[0] != len(chain):
        raise LengthMismatch(f"expected {len(chain)} joint values, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise NonFiniteInput("joint values must be finite")
    return theta


def _dh_matrices(alpha: float, a: float, d: float, theta: np.ndarray) -> np.ndarray:
    """Stack of joint transforms for one row evaluated at every theta, shape (n, 4, 4)."""
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    T = np.zeros(theta.shape + (4, 4))
    T[..., 0, 0] = ct
    T[..., 0, 1] = -st * ca
    T[..., 0, 2] = st * sa
    T[..., 0, 3] = a * ct
    T[..., 1, 0] = st
    T[..., 1, 1] = ct * ca
    T[..., 1, 2] = -ct * sa
    T[..., 1, 3] = a * st
    T[..., 2, 1] = sa
    T[..., 2, 2] = ca
    T[..., 2, 3] = d
    T[..., 3, 3] = 1.0
    return T


def dh_transform(row: DHRow, theta: float) -> HomogeneousTransform:
    """
    Transform between joint frames k-1 and k for one D-H row.

    Args:
        row: D-H row
        theta: Joint angle in radians (limits are not checked)

    Returns:
        HomogeneousTransform

    Raises:
        NonFiniteInput: If theta is not finite
    """
    if not np.isfinite(theta):
        raise NonFiniteInput(f"theta={theta}")
    return HomogeneousTransform.from_matrix(_dh_matrices(row.alpha, row.a, row.d, np.array([float(theta)]))[0])


def forward_kinematics_batch(chain: DHChain, thetas: np.ndarray) -> np.ndarray:
    """
    Evaluate the chain product for many joint vectors at once.

    Args:
        chain: D-H chain
        thetas: Array of shape (n, len(chain))

    Returns:
        Array of shape (n, 4, 4)
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != len(chain):
        raise LengthMismatch(f"expected (n, {len(chain)}) joint array, got shape {thetas.shape}")
    if not np.all(np.isfinite(thetas)):
        raise NonFiniteInput("joint values must be finite")

    result = None
    for k, row in enumerate(chain.rows):
        T_k = _dh_matrices(row.alpha, row.a, row.d, thetas[:, k])
        result = T_k if result is None else result @ T_k
    return result


def forward_kinematics(chain: DHChain, joints: Iterable[float]) -> HomogeneousTransform:
    """
    End-effector transform as the left-to-right product of the row transforms.

    Args:
        chain: D-H chain
        joints: One angle per row

    Returns:
        HomogeneousTransform with pose matrix R and position P

    Raises:
        LengthMismatch: If the joint count differs from the chain length
        NonFiniteInput: If any joint value is not finite
    """
    theta = as_joint_vector(joints, chain)
    return HomogeneousTransform.from_matrix(forward_kinematics_batch(chain, theta[np.newaxis])[0])


def position_error(p_current: Sequence[float], p_desired: Sequence[float]) -> float:
    """Euclidean distance between two positions (meters)."""
    a = np.asarray(p_current, dtype=float)
    b = np.asarray(p_desired, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NonFiniteInput("positions must be finite")
    if a.shape != b.shape:
        raise LengthMismatch(f"position shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def quaternion_angle(dots: np.ndarray, strict: bool = False) -> np.ndarray:
    """
    Rotation angle 2*arccos(dot) for quaternion inner products.

    In the default mode |dot| is used so that q and -q give the same angle;
    ``strict`` keeps the signed product (range [0, 2*pi]).
    """
    dots = np.asarray(dots, dtype=float)
    if strict:
        return 2.0 * np.arccos(np.clip(dots, -1.0, 1.0))
    return 2.0 * np.arccos(np.clip(np.abs(dots), 0.0, 1.0))


def pose_error(q_current: Quaternion, q_desired: Quaternion, strict: bool = False) -> float:
    """
    Orientation error between two unit quaternions (radians, in [0, pi]).

    Args:
        q_current: Current orientation
        q_desired: Desired orientation
        strict: Use the signed inner product without the double-cover fold

    Raises:
        NotUnit: If either quaternion is not unit within 1e-6
    """
    check_unit(q_current)
    check_unit(q_desired)
    dot = float(np.dot(q_current.as_array(), q_desired.as_array()))
    return float(quaternion_angle(dot, strict=strict))


_CHAINS = {
    TIAGO_ARM_CHAIN_NAME: DHChain(rows=tuple(DHRow(*row) for row in TIAGO_ARM_DH_ROWS), name=TIAGO_ARM_CHAIN_NAME),
}


def get_chain(name: str) -> DHChain:
    """
    Look up a built-in chain by name.

    Raises:
        UnknownChain: If no chain is registered under that name
    """
    if name not in _CHAINS:
        raise UnknownChain(f"known chains: {', '.join(sorted(_CHAINS))}", subject=name)
    return _CHAINS[name]


def load_dh_chain_csv(path: Union[str, Path], name: Optional[str] = None) -> DHChain:
    """
    Load a chain from a CSV file with columns alpha, a, d, lower, upper.

    Raises:
        MalformedTable: If the file cannot be read or fails schema validation
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, comment="#", skipinitialspace=True, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedTable(str(e), subject=str(path)) from e

    df.columns = df.columns.str.lower().str.strip()
    chain = DHChain.from_frame(df, name=name or path.stem)
    logger.info(f"Loaded D-H chain '{chain.name}' with {len(chain)} rows from {path}")
    return chain


def save_dh_chain_csv(chain: DHChain, path: Union[str, Path]) -> None:
    chain.to_frame().to_csv(path, index=False, float_format="%.17g")


def tiago_chain() -> DHChain:
    return get_chain(TIAGO_ARM_CHAIN_NAME)
