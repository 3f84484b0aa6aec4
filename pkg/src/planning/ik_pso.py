"""Inverse kinematics of a redundant arm by an adaptive particle swarm.

The fitness of a joint vector is a random convex mix of end-effector position
and orientation error plus a weighted joint-displacement (flexibility) term
relative to the arm's current configuration. The flexibility term is scaled
down by ``flexibility_scale`` so it only ranks joint vectors whose pose errors
are nearly equal; the redundant arm reaches a target along a one-parameter
family of joint vectors and the term picks the one that moves cheap joints. Inertia and learning factors
follow quadratic schedules over the iteration budget.

Random stream order for a solve (numpy PCG64 seeded with ``rng_seed``):

1. initial positions, ``uniform(lower, upper, size=(particles, dof))``
2. omega_P, one ``random()`` draw (skipped when ``SwarmConfig.omega_p`` is set)
3. per iteration, ``random((particles, 2, dof))``: for particle i,
   ``[i, 0]`` is r1 and ``[i, 1]`` is r2

Drawing one block per iteration is the same sequence a particle-by-particle
loop would draw, so vectorized and per-particle updates agree bit for bit.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Any, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd

from config.settings import Settings
from src.errors import InfiniteLimits, InvalidConfig, LengthMismatch, LimitViolation, OutOfRange
from src.robot.kinematics import (
    DHChain,
    Pose,
    as_joint_vector,
    forward_kinematics,
    forward_kinematics_batch,
    pose_error,
    position_error,
    quaternion_angle,
)
from src.robot.rotations import rotation_to_quaternion_array

logger = logging.getLogger(__name__)

DEFAULT_JOINT_WEIGHTS = (1.0, 0.5, 0.5, 0.1, 0.1, 0.1, 0.1)
DEFAULT_SEED = 20231019
DEFAULT_FLEXIBILITY_SCALE = 1e-4


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm hyperparameters."""

    particle_count: int = 50
    max_iterations: int = 200
    w_start: float = 0.9
    w_end: float = 0.4
    c1_start: float = 1.5
    c1_end: float = 2.5
    c2_start: float = 2.5
    c2_end: float = 1.5
    velocity_clamp_fraction: float = 0.2
    early_exit_fitness: Optional[float] = None
    rng_seed: int = DEFAULT_SEED
    omega_p: Optional[float] = None
    include_reference_particle: bool = False
    joint_weights: Tuple[float, ...] = DEFAULT_JOINT_WEIGHTS
    position_tolerance: float = 0.005
    pose_tolerance: float = 0.05
    flexibility_scale: float = DEFAULT_FLEXIBILITY_SCALE

    def __post_init__(self):
        if self.particle_count < 2:
            raise InvalidConfig(f"particle_count must be >= 2, got {self.particle_count}")
        if self.max_iterations < 1:
            raise InvalidConfig(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.velocity_clamp_fraction <= 1.0:
            raise InvalidConfig(f"velocity_clamp_fraction must be in (0, 1], got {self.velocity_clamp_fraction}")
        if self.omega_p is not None and not 0.0 < self.omega_p < 1.0:
            raise InvalidConfig(f"omega_p must be in (0, 1), got {self.omega_p}")
        if not 0 <= self.rng_seed < 2**64:
            raise InvalidConfig(f"rng_seed must fit in 64 bits, got {self.rng_seed}")
        if any(w <= 0 for w in self.joint_weights):
            raise InvalidConfig("joint weights must be positive")
        if not self.flexibility_scale >= 0.0:
            raise InvalidConfig(f"flexibility_scale must be >= 0, got {self.flexibility_scale}")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "SwarmConfig":
        swarm = settings.swarm
        values = dict(
            particle_count=swarm.particle_count,
            max_iterations=swarm.max_iterations,
            w_start=swarm.w_start,
            w_end=swarm.w_end,
            c1_start=swarm.c1_start,
            c1_end=swarm.c1_end,
            c2_start=swarm.c2_start,
            c2_end=swarm.c2_end,
            velocity_clamp_fraction=swarm.velocity_clamp_fraction,
            joint_weights=tuple(swarm.joint_weights),
            position_tolerance=swarm.position_tolerance,
            pose_tolerance=swarm.pose_tolerance,
            flexibility_scale=swarm.flexibility_scale,
            rng_seed=settings.cli.default_seed,
        )
        values.update(overrides)
        return cls(**values)

    def with_seed(self, seed: int) -> "SwarmConfig":
        return replace(self, rng_seed=seed)


@dataclass(frozen=True)
class FitnessWeights:
    """Weights of the fitness terms."""

    omega_p: float
    joint_weights: Tuple[float, ...] = DEFAULT_JOINT_WEIGHTS
    flexibility_scale: float = DEFAULT_FLEXIBILITY_SCALE

    def __post_init__(self):
        if not 0.0 < self.omega_p < 1.0:
            raise InvalidConfig(f"omega_p must be in (0, 1), got {self.omega_p}")
        if any(w <= 0 for w in self.joint_weights):
            raise InvalidConfig("joint weights must be positive")
        if not self.flexibility_scale >= 0.0:
            raise InvalidConfig(f"flexibility_scale must be >= 0, got {self.flexibility_scale}")

    @property
    def omega_o(self) -> float:
        return 1.0 - self.omega_p


@dataclass
class Particle:
    """Swarm member: a candidate joint vector with its velocity and personal best."""

    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_fitness: float = float("inf")


@dataclass(frozen=True, eq=False)
class IkProblem:
    """Target pose for the end-effector and the arm's current configuration."""

    chain: DHChain
    target_pose: Pose
    reference_joints: np.ndarray

    def __post_init__(self):
        reference = as_joint_vector(self.reference_joints, self.chain)
        if not self.chain.within_limits(reference):
            raise LimitViolation("reference joints outside chain limits", subject="reference_joints")
        object.__setattr__(self, "reference_joints", reference)


@dataclass
class IterationRecord:
    """Swarm state after one evaluation."""

    iteration: int
    gbest_fitness: float
    w: float
    c1: float
    c2: float
    positions: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass
class IkSolution:
    """Best joint vector found and its diagnostics."""

    joints: np.ndarray
    fitness: float
    position_error: float
    pose_error: float
    iterations_used: int
    converged: bool
    seed: int
    omega_p: float
    trace: List[IterationRecord] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "joints": [float(v) for v in self.joints],
            "fitness": float(self.fitness),
            "position_error": float(self.position_error),
            "pose_error": float(self.pose_error),
            "iterations_used": int(self.iterations_used),
            "converged": bool(self.converged),
            "seed": int(self.seed),
        }

    def trace_frame(self) -> pd.DataFrame:
        """Convergence trace with columns iteration, gbest_fitness, W, C1, C2."""
        return pd.DataFrame(
            [(r.iteration, r.gbest_fitness, r.w, r.c1, r.c2) for r in self.trace],
            columns=["iteration", "gbest_fitness", "W", "C1", "C2"],
        )


def _flexibility_batch(candidates: np.ndarray, reference: np.ndarray, joint_weights: np.ndarray) -> np.ndarray:
    return np.sum((joint_weights * (candidates - reference)) ** 2, axis=1)


def flexibility_cost(
    candidate: Sequence[float],
    reference: Sequence[float],
    joint_weights: Sequence[float] = DEFAULT_JOINT_WEIGHTS,
) -> float:
    """
    Weighted squared joint displacement from the reference configuration.

    Args:
        candidate: Candidate joint vector
        reference: Current (previous) joint vector
        joint_weights: One positive weight per joint

    Returns:
        sum_k (w_k * (candidate_k - reference_k))^2

    Raises:
        LengthMismatch: If the three sequences differ in length
    """
    c = np.asarray(candidate, dtype=float)
    r = np.asarray(reference, dtype=float)
    w = np.asarray(joint_weights, dtype=float)
    if not (c.shape == r.shape == w.shape) or c.ndim != 1:
        raise LengthMismatch(f"shapes differ: {c.shape}, {r.shape}, {w.shape}")
    return float(_flexibility_batch(c[np.newaxis], r, w)[0])


def evaluate_batch(
    candidates: np.ndarray,
    problem: IkProblem,
    weights: FitnessWeights,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Fitness with its position and orientation terms for a stack of candidates.

    Args:
        candidates: Array of shape (n, dof)
        problem: IK problem
        weights: Fitness weights

    Returns:
        Tuple of (fitness, position_error, pose_error) arrays of shape (n,)
    """
    candidates = np.asarray(candidates, dtype=float)
    if len(weights.joint_weights) != len(problem.chain):
        raise LengthMismatch(f"{len(weights.joint_weights)} joint weights for a {len(problem.chain)}-joint chain")

    M = forward_kinematics_batch(problem.chain, candidates)
    e_p = np.linalg.norm(M[:, :3, 3] - problem.target_pose.position, axis=1)
    quats = rotation_to_quaternion_array(M[:, :3, :3])
    e_r = quaternion_angle(quats @ problem.target_pose.orientation.as_array())
    flex = _flexibility_batch(candidates, problem.reference_joints, np.asarray(weights.joint_weights, dtype=float))
    return weights.omega_p * e_p + weights.omega_o * e_r + weights.flexibility_scale * flex, e_p, e_r


def fitness_batch(candidates: np.ndarray, problem: IkProblem, weights: FitnessWeights) -> np.ndarray:
    return evaluate_batch(candidates, problem, weights)[0]


def fitness(candidate: Sequence[float], problem: IkProblem, weights: FitnessWeights) -> float:
    """
    Fitness of one joint vector: omega_P*E_P + omega_O*E_R + scale*flexibility.

    Args:
        candidate: Joint vector within the chain limits
        problem: IK problem
        weights: Fitness weights

    Returns:
        Non-negative fitness, lower is better
    """
    theta = as_joint_vector(candidate, problem.chain)
    return float(fitness_batch(theta[np.newaxis], problem, weights)[0])


def schedule(t: int, config: SwarmConfig) -> Tuple[float, float, float]:
    """
    Inertia weight and learning factors at iteration ``t``.

    Each value follows X(t) = (Xs - Xe)(t/T)^2 + (Xe - Xs)(2t/T) + Xs, falling
    (W, C2) or rising (C1) from its start to its end value.

    Raises:
        OutOfRange: If t is outside [0, T]
    """
    T = config.max_iterations
    if not 0 <= t <= T:
        raise OutOfRange(f"t={t} outside [0, {T}]")

    ratio = t / T

    def quadratic(start: float, end: float) -> float:
        return (start - end) * ratio**2 + (end - start) * (2 * ratio) + start

    return (
        quadratic(config.w_start, config.w_end),
        quadratic(config.c1_start, config.c1_end),
        quadratic(config.c2_start, config.c2_end),
    )


def _advance(
    x: np.ndarray,
    v: np.ndarray,
    pbest: np.ndarray,
    gbest: np.ndarray,
    w: float,
    c1: float,
    c2: float,
    r1: np.ndarray,
    r2: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    v_max: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Velocity and position update with velocity clamping and limit clamping."""
    v_new = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    v_new = np.clip(v_new, -v_max, v_max)
    x_new = x + v_new
    clamped = (x_new < lower) | (x_new > upper)
    x_new = np.clip(x_new, lower, upper)
    v_new = np.where(clamped, 0.0, v_new)
    return x_new, v_new


def update_particle(
    particle: Particle,
    gbest: np.ndarray,
    w: float,
    c1: float,
    c2: float,
    chain: DHChain,
    rng: np.random.Generator,
    velocity_clamp_fraction: float = 0.2,
) -> Particle:
    """
    Move one particle toward its personal best and the global best.

    Draws r1 then r2 (one uniform [0, 1) value per joint each) from ``rng``.

    Args:
        particle: Particle within the chain limits
        gbest: Global best position
        w: Inertia weight
        c1: Personal learning factor
        c2: Social learning factor
        chain: Chain providing joint limits
        rng: Seeded generator
        velocity_clamp_fraction: Velocity bound as a fraction of each joint range

    Returns:
        New Particle; the personal best is carried over unchanged
    """
    dof = len(chain)
    r1 = rng.random(dof)
    r2 = rng.random(dof)
    lower, upper = chain.lower, chain.upper
    x_new, v_new = _advance(
        np.asarray(particle.position, dtype=float),
        np.asarray(particle.velocity, dtype=float),
        np.asarray(particle.personal_best_position, dtype=float),
        np.asarray(gbest, dtype=float),
        w,
        c1,
        c2,
        r1,
        r2,
        lower,
        upper,
        velocity_clamp_fraction * (upper - lower),
    )
    return Particle(
        position=x_new,
        velocity=v_new,
        personal_best_position=np.array(particle.personal_best_position, dtype=float),
        personal_best_fitness=particle.personal_best_fitness,
    )


def draw_omega_p(rng: np.random.Generator) -> float:
    """Draw omega_P from (0, 1)."""
    omega = rng.random()
    while omega == 0.0:
        omega = rng.random()
    return float(omega)


def solve_ik(
    problem: IkProblem,
    config: SwarmConfig = SwarmConfig(),
    callback: Optional[Callable[[IterationRecord], None]] = None,
) -> IkSolution:
    """
    Solve for joint angles reaching the target pose.

    Each iteration evaluates every particle, keeps the smaller of old and new
    fitness as pBest, takes the smallest pBest as gBest (first index on ties),
    updates W, C1 and C2, then moves the swarm. After the last move the swarm
    is evaluated once more so the final positions count.

    Args:
        problem: IK problem with finite joint limits
        config: Swarm configuration
        callback: Called with an IterationRecord after every evaluation

    Returns:
        IkSolution for the gBest joint vector

    Raises:
        InfiniteLimits: If a joint of the chain has unbounded limits
        InvalidConfig: If the configuration does not fit the chain
    """
    chain = problem.chain
    if not chain.has_finite_limits:
        raise InfiniteLimits("continuous joints are not supported", subject=chain.name)
    if len(config.joint_weights) != len(chain):
        raise InvalidConfig(f"{len(config.joint_weights)} joint weights for a {len(chain)}-joint chain")

    rng = np.random.default_rng(config.rng_seed)
    lower, upper = chain.lower, chain.upper
    n, dof = config.particle_count, len(chain)
    v_max = config.velocity_clamp_fraction * (upper - lower)

    positions = rng.uniform(lower, upper, size=(n, dof))
    omega_p = config.omega_p if config.omega_p is not None else draw_omega_p(rng)
    weights = FitnessWeights(
        omega_p=omega_p,
        joint_weights=tuple(config.joint_weights),
        flexibility_scale=config.flexibility_scale,
    )
    if config.include_reference_particle:
        positions[0] = problem.reference_joints

    velocities = np.zeros((n, dof))
    pbest_positions = positions.copy()
    pbest_fitness = np.full(n, np.inf)
    gbest = positions[0].copy()
    gbest_fitness = np.inf
    trace: List[IterationRecord] = []

    def evaluate(iteration: int) -> None:
        nonlocal gbest, gbest_fitness
        values = fitness_batch(positions, problem, weights)
        improved = values < pbest_fitness
        pbest_positions[improved] = positions[improved]
        pbest_fitness[improved] = values[improved]
        best = int(np.argmin(pbest_fitness))
        gbest = pbest_positions[best].copy()
        gbest_fitness = float(pbest_fitness[best])

        w, c1, c2 = schedule(iteration, config)
        record = IterationRecord(iteration, gbest_fitness, w, c1, c2, positions.copy())
        trace.append(record)
        if callback is not None:
            callback(record)
        logger.debug(f"iteration {iteration}: gBest fitness {gbest_fitness:.6g}")

    early_exit = False
    iterations_used = config.max_iterations
    for t in range(config.max_iterations):
        evaluate(t)
        if config.early_exit_fitness is not None and gbest_fitness < config.early_exit_fitness:
            early_exit = True
            iterations_used = t + 1
            logger.info(f"Early exit at iteration {t} with fitness {gbest_fitness:.3g}")
            break

        w, c1, c2 = trace[-1].w, trace[-1].c1, trace[-1].c2
        r = rng.random((n, 2, dof))
        positions, velocities = _advance(
            positions, velocities, pbest_positions, gbest, w, c1, c2, r[:, 0, :], r[:, 1, :], lower, upper, v_max
        )

    if not early_exit:
        evaluate(config.max_iterations)

    current = forward_kinematics(chain, gbest)
    e_p = position_error(current.position, problem.target_pose.position)
    e_r = pose_error(current.quaternion(), problem.target_pose.orientation)
    converged = early_exit or (e_p < config.position_tolerance and e_r < config.pose_tolerance)

    logger.info(
        f"IK solved in {iterations_used} iterations: fitness {gbest_fitness:.6g}, "
        f"position error {e_p * 1000:.3f} mm, pose error {e_r:.4f} rad"
    )
    return IkSolution(
        joints=gbest,
        fitness=gbest_fitness,
        position_error=e_p,
        pose_error=e_r,
        iterations_used=iterations_used,
        converged=converged,
        seed=config.rng_seed,
        omega_p=omega_p,
        trace=trace,
    )
