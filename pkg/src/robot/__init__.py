"""Robot modeling: URDF parsing, D-H forward kinematics and rotation helpers."""

from .rotations import Quaternion, rotation_to_quaternion, quaternion_to_rotation
from .kinematics import (
    DHRow,
    DHChain,
    HomogeneousTransform,
    Pose,
    dh_transform,
    forward_kinematics,
    forward_kinematics_batch,
    position_error,
    pose_error,
    get_chain,
    load_dh_chain_csv,
    save_dh_chain_csv,
)
from .urdf import (
    JointKind,
    UrdfLink,
    UrdfJoint,
    RobotModel,
    Violation,
    read_urdf_model,
    parse_urdf,
    load_urdf,
    serialize_urdf,
    validate,
    kinematic_chain,
    urdf_forward_kinematics,
    chain_limits,
)

__all__ = [
    "Quaternion",
    "rotation_to_quaternion",
    "quaternion_to_rotation",
    "DHRow",
    "DHChain",
    "HomogeneousTransform",
    "Pose",
    "dh_transform",
    "forward_kinematics",
    "forward_kinematics_batch",
    "position_error",
    "pose_error",
    "get_chain",
    "load_dh_chain_csv",
    "save_dh_chain_csv",
    "JointKind",
    "UrdfLink",
    "UrdfJoint",
    "RobotModel",
    "Violation",
    "read_urdf_model",
    "parse_urdf",
    "load_urdf",
    "serialize_urdf",
    "validate",
    "kinematic_chain",
    "urdf_forward_kinematics",
    "chain_limits",
]
