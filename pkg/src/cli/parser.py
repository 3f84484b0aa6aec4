"""Argument parsing for the command-line interface."""

from typing import Callable, Dict, Optional, Tuple
import argparse
import json
import math

from config.robots import TIAGO_ARM_CHAIN_NAME
from config.settings import Settings
from src import __version__, PROJECT_NAME

MAX_SEED = 2**64 - 1


class CliUsageError(Exception):
    """Invalid command line; reported with exit code 2."""

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}")

    def to_dict(self) -> Dict[str, str]:
        return {"error": self.code, "detail": self.message}


def classify_usage_error(message: str) -> str:
    if message.startswith("unrecognized arguments"):
        return "UnknownFlag"
    if "invalid" in message:
        return "InvalidValue"
    return "Usage"


class TwinArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises CliUsageError instead of exiting."""

    def error(self, message: str):
        raise CliUsageError(classify_usage_error(message), message)


def float_list(length: Optional[int] = None, name: str = "list") -> Callable[[str], Tuple[float, ...]]:
    """Argument type for comma-separated finite numbers."""

    def parse(text: str) -> Tuple[float, ...]:
        try:
            values = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {name} '{text}': expected comma-separated numbers") from None
        if not all(math.isfinite(v) for v in values):
            raise argparse.ArgumentTypeError(f"invalid {name} '{text}': values must be finite")
        if length is not None and len(values) != length:
            raise argparse.ArgumentTypeError(f"invalid {name} '{text}': expected {length} values, got {len(values)}")
        return values

    parse.__name__ = name
    return parse


def seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed '{text}'") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"invalid seed '{text}': must fit in 64 bits")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"invalid count '{text}': must be >= 1")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number '{text}'") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"invalid number '{text}': must be positive")
    return value


def swarm_size(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid swarm size '{text}'") from None
    if value < 2:
        raise argparse.ArgumentTypeError(f"invalid swarm size '{text}': need at least 2 particles")
    return value


def open_unit_fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid weight '{text}'") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"invalid weight '{text}': must lie strictly between 0 and 1")
    return value


def _add_chain_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--chain", default=None, help=f"built-in D-H chain (default {TIAGO_ARM_CHAIN_NAME})")
    source.add_argument("--dh-csv", default=None, help="CSV file with columns alpha,a,d,lower,upper")


def build_parser(settings: Settings) -> TwinArgumentParser:
    """
    Build the argument parser.

    Args:
        settings: Application settings providing defaults

    Returns:
        Configured parser; every subparser shares the common flags
    """
    common = TwinArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument(
        "--seed",
        type=seed,
        default=settings.cli.default_seed,
        help=f"random seed (default {settings.cli.default_seed})",
    )
    common.add_argument("--output", default=None, help="write results to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None, help="output format")

    parser = TwinArgumentParser(
        prog="twin",
        description="Kinematics, planning and digital-twin tools for a home-service robot",
        allow_abbrev=False,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=json.dumps({"name": PROJECT_NAME, "version": __version__}),
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return subparsers.add_parser(name, parents=[common], help=help_text, description=help_text, allow_abbrev=False)

    p = add("urdf-validate", "List structural violations of a URDF file")
    p.add_argument("urdf", help="URDF file")

    p = add("urdf-chain", "List the joints between two links of a URDF file")
    p.add_argument("urdf", help="URDF file")
    p.add_argument("--base", required=True, help="base link")
    p.add_argument("--tip", required=True, help="tip link")

    p = add("fk", "Forward kinematics of a joint vector")
    p.add_argument("--joints", type=float_list(name="joints"), required=True, help="comma-separated joint values")
    _add_chain_options(p)
    p.add_argument("--urdf", default=None, help="use a URDF chain instead of a D-H chain")
    p.add_argument("--base", default=None, help="base link (with --urdf)")
    p.add_argument("--tip", default=None, help="tip link (with --urdf)")

    p = add("ik", "Inverse kinematics by particle swarm")
    p.add_argument("--target", type=float_list(7, "pose"), required=True, help="target pose x,y,z,qx,qy,qz,qw")
    p.add_argument("--reference", type=float_list(name="joints"), default=None, help="current joint vector")
    _add_chain_options(p)
    p.add_argument("--particles", type=swarm_size, default=settings.swarm.particle_count, help="swarm size")
    p.add_argument("--iterations", type=positive_int, default=settings.swarm.max_iterations, help="iteration budget")
    p.add_argument("--early-exit", type=positive_float, default=None, help="stop once gBest fitness drops below this")
    p.add_argument("--omega-p", type=open_unit_fraction, default=None, help="fixed position weight in (0, 1)")
    p.add_argument("--include-reference", action="store_true", help="seed one particle at the reference joints")
    p.add_argument("--trace", default=None, help="write the convergence trace to this CSV file")

    p = add("traj", "Sample a rest-to-rest quintic joint trajectory")
    p.add_argument("--start", type=float_list(name="joints"), required=True, help="start joint vector")
    p.add_argument("--goal", type=float_list(name="joints"), required=True, help="goal joint vector")
    p.add_argument("--duration", type=positive_float, default=2.0, help="seconds (default 2.0)")
    p.add_argument(
        "--samples",
        type=positive_int,
        default=settings.trajectory.default_sample_count,
        help=f"sample count (default {settings.trajectory.default_sample_count})",
    )
    _add_chain_options(p)

    p = add("scene-check", "Check whether an action is possible in a scene")
    p.add_argument("scene", help="scene file")
    p.add_argument("--action", required=True, help="Pick, Put, Move, Heat, Cool, ToggleOn, ToggleOff, Open, Close, Slice or Fill")
    p.add_argument("--target", required=True, help="target object id")
    p.add_argument("--instrument", default=None, help="receptacle or appliance object id")
    p.add_argument("--digital", default=None, help="digital scene file to compare positions against")

    p = add("twin-simulate", "Run a script on the simulated robot and write the message log")
    p.add_argument("script", help="script file")
    p.add_argument("--initial", type=float_list(3, "pose"), default=(0.0, 0.0, 0.0), help="initial base pose x,y,heading")

    p = add("twin-audit", "Check a message log against a re-simulated script")
    p.add_argument("--script", required=True, help="script file")
    p.add_argument("--log", required=True, help="NDJSON message log")
    p.add_argument("--initial", type=float_list(3, "pose"), default=(0.0, 0.0, 0.0), help="initial base pose x,y,heading")

    return parser
