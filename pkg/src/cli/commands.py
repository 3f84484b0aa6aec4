"""Subcommand handlers. Each returns the process exit code."""

from pathlib import Path
from typing import Any, Optional, Sequence
import argparse
import json
import logging
import sys

import numpy as np

from config.robots import TIAGO_ARM_CHAIN_NAME
from config.settings import Settings
from src.environment.attributes import Action
from src.environment.consistency import consistency_report, report_to_dict
from src.environment.scene import check_action
from src.environment.scene_io import load_scene_file
from src.planning.ik_pso import IkProblem, SwarmConfig, solve_ik
from src.planning.trajectory import plan_joint_trajectory, sample_trajectory, trajectory_to_frame
from src.robot.kinematics import DHChain, Pose, forward_kinematics, get_chain, load_dh_chain_csv
from src.robot.urdf import kinematic_chain, load_urdf, read_urdf_model, urdf_forward_kinematics, validate
from src.twinlink.messages import encode_log, read_log
from src.twinlink.mirror import TwinState
from src.twinlink.session import Session, audit_consistency, parse_script, run_session
from src.twinlink.simulator import SimulatorConfig
from .parser import CliUsageError

logger = logging.getLogger(__name__)


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def emit(text: str, output: Optional[str]) -> None:
    """Write text to the output file, or stdout when no file is given."""
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def emit_json(data: Any, output: Optional[str]) -> None:
    emit(json.dumps(data, indent=2) + "\n", output)


def _require_json(args: argparse.Namespace) -> None:
    if args.format not in (None, "json"):
        raise CliUsageError("InvalidValue", f"invalid format '{args.format}' for {args.command}; only json is supported")


def _resolve_chain(args: argparse.Namespace) -> DHChain:
    if args.dh_csv:
        return load_dh_chain_csv(args.dh_csv)
    return get_chain(args.chain or TIAGO_ARM_CHAIN_NAME)


def _check_joint_count(name: str, values: Optional[Sequence[float]], expected: int) -> None:
    if values is not None and len(values) != expected:
        raise CliUsageError("InvalidValue", f"invalid {name}: chain has {expected} joints, got {len(values)} values")


def cmd_urdf_validate(args: argparse.Namespace, settings: Settings) -> int:
    _require_json(args)
    model = read_urdf_model(Path(args.urdf).read_text(encoding="utf-8"))
    violations = validate(model)
    emit_json(
        {
            "file": args.urdf,
            "robot": model.name,
            "links": len(model.links),
            "joints": len(model.joints),
            "root": model.root_link,
            "violations": [v.to_dict() for v in violations],
            "summary": f"{len(violations)} violations",
        },
        args.output,
    )
    return 0 if not violations else 1


def cmd_urdf_chain(args: argparse.Namespace, settings: Settings) -> int:
    _require_json(args)
    model = load_urdf(args.urdf)
    chain = kinematic_chain(model, args.base, args.tip)
    emit_json(
        {
            "base": args.base,
            "tip": args.tip,
            "joints": [
                {
                    "name": j.name,
                    "type": j.kind.value,
                    "parent": j.parent_link,
                    "child": j.child_link,
                    "lower": _finite_or_none(j.limit_lower),
                    "upper": _finite_or_none(j.limit_upper),
                }
                for j in chain
            ],
        },
        args.output,
    )
    return 0


def cmd_fk(args: argparse.Namespace, settings: Settings) -> int:
    _require_json(args)
    if args.urdf:
        if args.chain or args.dh_csv:
            raise CliUsageError("Usage", "--urdf cannot be combined with --chain or --dh-csv")
        if not (args.base and args.tip):
            raise CliUsageError("Usage", "--urdf needs --base and --tip")
        model = load_urdf(args.urdf)
        movable = [j for j in kinematic_chain(model, args.base, args.tip) if not j.is_fixed]
        if len(args.joints) != len(movable):
            raise CliUsageError(
                "InvalidValue", f"invalid joints: chain has {len(movable)} movable joints, got {len(args.joints)} values"
            )
        values = {j.name: v for j, v in zip(movable, args.joints)}
        transform = urdf_forward_kinematics(model, values, args.base, args.tip)
    else:
        chain = _resolve_chain(args)
        _check_joint_count("joints", args.joints, len(chain))
        transform = forward_kinematics(chain, args.joints)
    emit_json(transform.to_dict(), args.output)
    return 0


def cmd_ik(args: argparse.Namespace, settings: Settings) -> int:
    _require_json(args)
    chain = _resolve_chain(args)
    _check_joint_count("reference", args.reference, len(chain))
    if args.reference is not None:
        reference = np.asarray(args.reference, dtype=float)
    else:
        reference = np.clip(np.zeros(len(chain)), chain.lower, chain.upper)

    config = SwarmConfig.from_settings(
        settings,
        particle_count=args.particles,
        max_iterations=args.iterations,
        early_exit_fitness=args.early_exit,
        omega_p=args.omega_p,
        rng_seed=args.seed,
        include_reference_particle=args.include_reference,
        joint_weights=tuple(settings.swarm.joint_weights)[: len(chain)],
    )
    problem = IkProblem(chain=chain, target_pose=Pose.from_values(args.target), reference_joints=reference)
    solution = solve_ik(problem, config)
    if args.trace:
        solution.trace_frame().to_csv(args.trace, index=False, float_format="%.17g")
    emit_json(solution.to_dict(), args.output)
    return 0


def cmd_traj(args: argparse.Namespace, settings: Settings) -> int:
    chain = _resolve_chain(args)
    _check_joint_count("start", args.start, len(chain))
    _check_joint_count("goal", args.goal, len(chain))
    segment = plan_joint_trajectory(args.start, args.goal, args.duration, chain)
    samples = sample_trajectory(segment, args.samples)
    frame = trajectory_to_frame(samples)
    if (args.format or "csv") == "csv":
        emit(frame.to_csv(index=False, float_format="%.17g"), args.output)
    else:
        emit_json(frame.to_dict(orient="records"), args.output)
    return 0


def cmd_scene_check(args: argparse.Namespace, settings: Settings) -> int:
    try:
        action = Action(args.action)
    except ValueError:
        raise CliUsageError("InvalidValue", f"invalid action '{args.action}'") from None

    scene = load_scene_file(args.scene)
    verdict = check_action(scene, action, args.target, args.instrument)
    result = {
        "action": action.value,
        "target": args.target,
        "instrument": args.instrument,
        **verdict.to_dict(),
    }

    report = None
    if args.digital:
        report = consistency_report(scene, load_scene_file(args.digital))
        result["consistency"] = report_to_dict(report)

    if (args.format or settings.cli.default_format) == "csv":
        if report is None:
            raise CliUsageError("InvalidValue", "invalid format 'csv' for scene-check without --digital")
        emit(report.to_csv(index=False, float_format="%.17g"), args.output)
    else:
        emit_json(result, args.output)
    return 0


def cmd_twin_simulate(args: argparse.Namespace, settings: Settings) -> int:
    _require_json(args)
    commands = parse_script(Path(args.script).read_text(encoding="utf-8"))
    session = run_session(commands, TwinState(base_pose=args.initial), SimulatorConfig.from_settings(settings))
    emit(encode_log(session.log), args.output)
    return 0


def cmd_twin_audit(args: argparse.Namespace, settings: Settings) -> int:
    _require_json(args)
    commands = parse_script(Path(args.script).read_text(encoding="utf-8"))
    initial = TwinState(base_pose=args.initial)
    reference = run_session(commands, initial, SimulatorConfig.from_settings(settings))
    recorded = Session(
        initial_state=initial,
        physical_state=reference.physical_state,
        digital_state=reference.digital_state,
        log=read_log(args.log),
        physical_trace=reference.physical_trace,
    )
    emit_json(audit_consistency(recorded).to_dict(), args.output)
    return 0


HANDLERS = {
    "urdf-validate": cmd_urdf_validate,
    "urdf-chain": cmd_urdf_chain,
    "fk": cmd_fk,
    "ik": cmd_ik,
    "traj": cmd_traj,
    "scene-check": cmd_scene_check,
    "twin-simulate": cmd_twin_simulate,
    "twin-audit": cmd_twin_audit,
}
