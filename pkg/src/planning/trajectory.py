"""Quintic joint-space trajectories."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from src.errors import LengthMismatch, LimitViolation, NonFiniteInput, NonPositiveDuration, TimeOutOfRange, TooFewSamples
from src.robot.kinematics import DHChain

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

_POWERS = np.arange(6)


def _normalized_coefficients(q_start, q_end, v_start, v_end, a_start, a_end, duration: float) -> np.ndarray:
    """Coefficients b_k of s(tau) = sum b_k tau^k with tau = t / duration."""
    T = duration
    h = q_end - q_start
    b0 = q_start
    b1 = v_start * T
    b2 = a_start * T**2 / 2
    b3 = (20 * h - (8 * v_end + 12 * v_start) * T - (3 * a_start - a_end) * T**2) / 2
    b4 = (-30 * h + (14 * v_end + 16 * v_start) * T + (3 * a_start - 2 * a_end) * T**2) / 2
    b5 = (12 * h - 6 * (v_end + v_start) * T + (a_end - a_start) * T**2) / 2
    return np.stack(np.broadcast_arrays(b0, b1, b2, b3, b4, b5), axis=-1).astype(float)


def _check_duration(duration: float) -> float:
    duration = float(duration)
    if not np.isfinite(duration) or duration <= 0:
        raise NonPositiveDuration(f"duration must be a positive number of seconds, got {duration}")
    return duration


def quintic_coefficients(
    q_start: ArrayLike,
    q_end: ArrayLike,
    v_start: ArrayLike = 0.0,
    v_end: ArrayLike = 0.0,
    a_start: ArrayLike = 0.0,
    a_end: ArrayLike = 0.0,
    duration: float = 1.0,
) -> np.ndarray:
    """
    Coefficients a0..a5 of the quintic meeting position, velocity and
    acceleration boundary conditions at t=0 and t=duration.

    Arguments broadcast, so per-joint vectors give one row of six
    coefficients per joint.

    Args:
        q_start: Start position(s), radians
        q_end: End position(s), radians
        v_start: Start velocity, rad/s
        v_end: End velocity, rad/s
        a_start: Start acceleration, rad/s^2
        a_end: End acceleration, rad/s^2
        duration: Segment length in seconds

    Returns:
        Array of shape (..., 6) with s(t) = sum_k a_k t^k

    Raises:
        NonPositiveDuration: If duration <= 0
        NonFiniteInput: If any boundary value is not finite
    """
    duration = _check_duration(duration)
    values = [np.asarray(v, dtype=float) for v in (q_start, q_end, v_start, v_end, a_start, a_end)]
    if not all(np.all(np.isfinite(v)) for v in values):
        raise NonFiniteInput("boundary conditions must be finite")
    return _normalized_coefficients(*values, duration) / duration**_POWERS


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    """State of every joint at one instant."""

    time: float
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray


@dataclass(frozen=True, eq=False)
class QuinticSegment:
    """
    One quintic per joint over a common duration.

    Polynomials are kept in normalized time tau = t / duration, so a segment
    planned over twice the duration evaluates to the same positions at twice
    the time.
    """

    normalized_coefficients: np.ndarray
    duration: float
    start: np.ndarray
    goal: np.ndarray
    rest_to_rest: bool = False

    @property
    def coefficients(self) -> np.ndarray:
        """Per-joint coefficients a0..a5 in seconds, shape (joints, 6)."""
        return self.normalized_coefficients / self.duration**_POWERS

    @property
    def joint_count(self) -> int:
        return self.normalized_coefficients.shape[0]

    def evaluate(self, t: float) -> TrajectorySample:
        """
        Position, velocity and acceleration at time ``t``.

        Raises:
            TimeOutOfRange: If t is outside [0, duration]
        """
        t = float(t)
        if not 0.0 <= t <= self.duration:
            raise TimeOutOfRange(f"t={t} outside [0, {self.duration}]")

        tau = t / self.duration
        b = self.normalized_coefficients
        position = b[:, 0] + tau * (b[:, 1] + tau * (b[:, 2] + tau * (b[:, 3] + tau * (b[:, 4] + tau * b[:, 5]))))
        velocity = (b[:, 1] + tau * (2 * b[:, 2] + tau * (3 * b[:, 3] + tau * (4 * b[:, 4] + tau * 5 * b[:, 5])))) / self.duration
        acceleration = (2 * b[:, 2] + tau * (6 * b[:, 3] + tau * (12 * b[:, 4] + tau * 20 * b[:, 5]))) / self.duration**2

        if self.rest_to_rest:
            # monotone between start and goal; clip float noise at the ends
            position = np.clip(position, np.minimum(self.start, self.goal), np.maximum(self.start, self.goal))
        return TrajectorySample(time=t, position=position, velocity=velocity, acceleration=acceleration)


def plan_joint_trajectory(
    start: Sequence[float],
    goal: Sequence[float],
    duration: float,
    chain: Optional[DHChain] = None,
) -> QuinticSegment:
    """
    Rest-to-rest quintic from start to goal.

    Args:
        start: Start joint vector
        goal: Goal joint vector
        duration: Segment length in seconds
        chain: Chain whose limits both endpoints must satisfy (optional)

    Returns:
        QuinticSegment with zero boundary velocity and acceleration

    Raises:
        LimitViolation: If an endpoint is outside the chain limits
        NonPositiveDuration: If duration <= 0
    """
    duration = _check_duration(duration)
    q0 = np.asarray(start, dtype=float)
    q1 = np.asarray(goal, dtype=float)
    if q0.shape != q1.shape or q0.ndim != 1:
        raise LengthMismatch(f"start and goal shapes differ: {q0.shape} vs {q1.shape}")
    if not (np.all(np.isfinite(q0)) and np.all(np.isfinite(q1))):
        raise NonFiniteInput("joint vectors must be finite")
    if chain is not None:
        if len(chain) != q0.shape[0]:
            raise LengthMismatch(f"expected {len(chain)} joints, got {q0.shape[0]}")
        if not chain.within_limits(q0):
            raise LimitViolation("start outside joint limits", subject="start")
        if not chain.within_limits(q1):
            raise LimitViolation("goal outside joint limits", subject="goal")

    zeros = np.zeros_like(q0)
    b = _normalized_coefficients(q0, q1, zeros, zeros, zeros, zeros, duration)
    return QuinticSegment(b, duration, q0.copy(), q1.copy(), rest_to_rest=True)


def sample_trajectory(segment: QuinticSegment, sample_count: int) -> List[TrajectorySample]:
    """
    Sample a segment on a uniform grid that includes both endpoints.

    Raises:
        TooFewSamples: If sample_count < 2
    """
    if sample_count < 2:
        raise TooFewSamples(f"need at least 2 samples, got {sample_count}")
    times = np.linspace(0.0, segment.duration, int(sample_count))
    return [segment.evaluate(t) for t in times]


def plan_approach_and_grasp(
    chain: DHChain,
    start: Sequence[float],
    approach: Sequence[float],
    grasp: Sequence[float],
    durations: Tuple[float, float] = (3.0, 2.0),
) -> Tuple[QuinticSegment, QuinticSegment]:
    """
    Two chained rest-to-rest segments: move to a pre-grasp configuration,
    then close in on the object.

    Args:
        chain: Chain providing the joint limits
        start: Current joint vector
        approach: Pre-grasp joint vector
        grasp: Grasp joint vector
        durations: Durations of the approach and grasp segments

    Returns:
        (approach segment, grasp segment)
    """
    approach_segment = plan_joint_trajectory(start, approach, durations[0], chain)
    grasp_segment = plan_joint_trajectory(approach, grasp, durations[1], chain)
    logger.info(f"Planned approach ({durations[0]} s) and grasp ({durations[1]} s) segments")
    return approach_segment, grasp_segment


def trajectory_to_frame(samples: Sequence[TrajectorySample]) -> pd.DataFrame:
    """Samples as a DataFrame with columns t, q1..qn, v1..vn, a1..an."""
    if not samples:
        raise TooFewSamples("no samples to export")
    n = len(samples[0].position)
    columns = (
        ["t"]
        + [f"q{k}" for k in range(1, n + 1)]
        + [f"v{k}" for k in range(1, n + 1)]
        + [f"a{k}" for k in range(1, n + 1)]
    )
    rows = [np.concatenate(([s.time], s.position, s.velocity, s.acceleration)) for s in samples]
    return pd.DataFrame(rows, columns=columns)


def write_trajectory_csv(samples: Sequence[TrajectorySample], path: Union[str, Path]) -> None:
    trajectory_to_frame(samples).to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Wrote {len(samples)} trajectory samples to {path}")
