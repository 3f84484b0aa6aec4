"""Deterministic stand-in for the physical robot.

Commands are turned into the state messages a real robot would publish:
JointState samples along a rest-to-rest quintic for arm motions, and
Odometry along a translate-then-rotate path for base motions.
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple
import logging
import math

from config.settings import Settings
from src.errors import NonPositiveDuration, ScriptError
from src.planning.trajectory import plan_joint_trajectory, sample_trajectory
from src.robot.kinematics import DHChain, tiago_chain
from .messages import MessageKind, TwinMessage, joint_state, odometry
from .mirror import TwinState, check_joint_limits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulatorConfig:
    sample_rate_hz: float = 10.0
    translate_steps: int = 10
    rotate_steps: int = 5
    step_ms: int = 100

    @classmethod
    def from_settings(cls, settings: Settings) -> "SimulatorConfig":
        return cls(
            sample_rate_hz=settings.trajectory.sample_rate_hz,
            translate_steps=settings.twin.translate_steps,
            rotate_steps=settings.twin.rotate_steps,
            step_ms=settings.twin.step_ms,
        )


def _wrap_angle(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


def _arm_stream(
    state: TwinState, command: TwinMessage, config: SimulatorConfig, chain: DHChain
) -> List[TwinMessage]:
    target = command.joints
    duration = command.duration
    if not duration > 0:
        raise NonPositiveDuration(f"arm command duration {duration}", subject=f"seq {command.seq}")
    check_joint_limits(target, chain, subject=f"seq {command.seq}")
    check_joint_limits(state.arm_joints, chain, subject="current arm joints")

    segment = plan_joint_trajectory(state.arm_joints, target, duration, chain)
    samples = sample_trajectory(segment, max(2, round(duration * config.sample_rate_hz) + 1))

    messages = []
    for k, sample in enumerate(samples):
        if k == 0:
            joints = state.arm_joints
        elif k == len(samples) - 1:
            joints = target
        else:
            joints = tuple(float(v) for v in sample.position)
        timestamp = command.timestamp_ms + int(round(sample.time * 1000))
        messages.append(joint_state(command.seq + 1 + k, timestamp, joints))
    return messages


def _base_path(start: Tuple[float, float, float], goal: Tuple[float, float, float], config: SimulatorConfig):
    """Poses along the path: start, translation steps, then rotation steps."""
    x0, y0, h0 = start
    x1, y1, h1 = goal
    poses = [start]

    n = config.translate_steps
    for k in range(1, n + 1):
        if k == n:
            poses.append((x1, y1, h0))
        else:
            poses.append((x0 + (x1 - x0) * k / n, y0 + (y1 - y0) * k / n, h0))

    m = config.rotate_steps
    turn = _wrap_angle(h1 - h0)
    for k in range(1, m + 1):
        heading = h1 if k == m else h0 + turn * k / m
        poses.append((x1, y1, heading))
    return poses


def _move_stream(state: TwinState, command: TwinMessage, config: SimulatorConfig) -> List[TwinMessage]:
    goal = tuple(command.payload)
    poses = _base_path(state.base_pose, goal, config)
    return [
        odometry(command.seq + 1 + k, command.timestamp_ms + k * config.step_ms, pose)
        for k, pose in enumerate(poses)
    ]


def simulate_physical(
    state: TwinState,
    command: TwinMessage,
    config: SimulatorConfig = SimulatorConfig(),
    chain: Optional[DHChain] = None,
) -> List[TwinMessage]:
    """
    State messages the robot publishes while executing a command.

    The stream starts at the current state, ends exactly at the commanded
    target, and numbers messages contiguously from ``command.seq + 1``.
    An ArmCommand of duration d yields round(d * rate) + 1 (at least 2) JointState
    samples; a MoveCommand yields 1 + translate_steps + rotate_steps
    Odometry messages.

    Args:
        state: Physical state before the command
        command: MoveCommand or ArmCommand
        config: Sampling configuration
        chain: Arm chain (TIAGo arm by default)

    Raises:
        LimitViolation: If the arm target is outside the joint limits
        NonPositiveDuration: If an arm command has duration <= 0
        ScriptError: If the message is not a command
    """
    if command.kind == MessageKind.ARM_COMMAND:
        return _arm_stream(state, command, config, chain or tiago_chain())
    if command.kind == MessageKind.MOVE_COMMAND:
        return _move_stream(state, command, config)
    raise ScriptError(f"{command.kind.value} is not a command", subject=f"seq {command.seq}")


def execute_command(
    state: TwinState,
    command: TwinMessage,
    config: SimulatorConfig = SimulatorConfig(),
    chain: Optional[DHChain] = None,
) -> Tuple[TwinState, List[TwinMessage]]:
    """
    Execute a command on the physical robot.

    The resulting state is set from the command target, independently of
    the published stream, so a mirror that replays the stream can be
    checked against it.

    Returns:
        (state after the command, published messages)
    """
    stream = simulate_physical(state, command, config, chain)
    last = stream[-1]
    if command.kind == MessageKind.ARM_COMMAND:
        updated = replace(state, arm_joints=command.joints)
    else:
        updated = replace(state, base_pose=tuple(command.payload))
    updated = replace(updated, last_seq=last.seq, clock_ms=last.timestamp_ms)
    logger.debug(f"Executed {command.kind.value} seq {command.seq}: {len(stream)} messages")
    return updated, stream
