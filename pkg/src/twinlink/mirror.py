"""Robot state mirrored in the digital space."""

from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Sequence, Tuple
import logging
import math

from src.errors import LengthMismatch, LimitViolation, NonFiniteInput, StaleMessage
from src.robot.kinematics import DHChain, tiago_chain
from .messages import MessageKind, TwinMessage

logger = logging.getLogger(__name__)

HOME_JOINTS = (0.0,) * 7


@dataclass(frozen=True)
class TwinState:
    """Base pose (x m, y m, heading rad), arm joints and logical clock of one endpoint."""

    base_pose: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    arm_joints: Tuple[float, ...] = HOME_JOINTS
    last_seq: int = 0
    clock_ms: int = 0

    def __post_init__(self):
        base_pose = tuple(float(v) for v in self.base_pose)
        arm_joints = tuple(float(v) for v in self.arm_joints)
        if len(base_pose) != 3:
            raise LengthMismatch(f"base pose needs 3 values, got {len(base_pose)}")
        if not all(math.isfinite(v) for v in base_pose + arm_joints):
            raise NonFiniteInput("twin state must be finite")
        object.__setattr__(self, "base_pose", base_pose)
        object.__setattr__(self, "arm_joints", arm_joints)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base_pose": list(self.base_pose),
            "arm_joints": list(self.arm_joints),
            "last_seq": self.last_seq,
            "clock_ms": self.clock_ms,
        }


def check_joint_limits(joints: Sequence[float], chain: DHChain, subject: str = "arm_joints") -> None:
    """
    Raises:
        LengthMismatch: If the joint count differs from the chain
        LimitViolation: If a joint is outside its limits
    """
    if len(joints) != len(chain):
        raise LengthMismatch(f"expected {len(chain)} joints, got {len(joints)}", subject=subject)
    if not chain.within_limits(joints):
        raise LimitViolation("joint values outside limits", subject=subject)


def apply_to_digital(state: TwinState, message: TwinMessage, chain: Optional[DHChain] = None) -> TwinState:
    """
    Apply one message from the physical robot to the digital mirror.

    JointState replaces the arm joints and Odometry the base pose. Commands
    only advance the sequence number; they travel from the digital side to
    the robot, not the other way.

    Args:
        state: Current mirror state
        message: Incoming message
        chain: Chain whose limits JointState values must satisfy (TIAGo arm by default)

    Returns:
        New TwinState with last_seq and clock_ms taken from the message

    Raises:
        StaleMessage: If message.seq <= state.last_seq
        LimitViolation: If a JointState is outside the joint limits
    """
    if message.seq <= state.last_seq:
        raise StaleMessage(f"seq {message.seq} <= last seq {state.last_seq}", subject=str(message.seq))

    updated = replace(state, last_seq=message.seq, clock_ms=message.timestamp_ms)
    if message.kind == MessageKind.JOINT_STATE:
        check_joint_limits(message.payload, chain or tiago_chain(), subject=f"seq {message.seq}")
        updated = replace(updated, arm_joints=message.payload)
    elif message.kind == MessageKind.ODOMETRY:
        updated = replace(updated, base_pose=message.payload)
    return updated
