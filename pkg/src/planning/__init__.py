"""Motion planning: particle swarm inverse kinematics and quintic trajectories."""

from .ik_pso import (
    SwarmConfig,
    FitnessWeights,
    Particle,
    IkProblem,
    IkSolution,
    IterationRecord,
    flexibility_cost,
    fitness,
    fitness_batch,
    schedule,
    update_particle,
    solve_ik,
)
from .trajectory import (
    QuinticSegment,
    TrajectorySample,
    quintic_coefficients,
    plan_joint_trajectory,
    sample_trajectory,
    plan_approach_and_grasp,
    trajectory_to_frame,
    write_trajectory_csv,
)

__all__ = [
    "SwarmConfig",
    "FitnessWeights",
    "Particle",
    "IkProblem",
    "IkSolution",
    "IterationRecord",
    "flexibility_cost",
    "fitness",
    "fitness_batch",
    "schedule",
    "update_particle",
    "solve_ik",
    "QuinticSegment",
    "TrajectorySample",
    "quintic_coefficients",
    "plan_joint_trajectory",
    "sample_trajectory",
    "plan_approach_and_grasp",
    "trajectory_to_frame",
    "write_trajectory_csv",
]
