"""Sessions between the physical robot and its digital twin, and their audit."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import asyncio
import logging
import math

from src.errors import ScriptError, StaleMessage
from src.robot.kinematics import DHChain
from .messages import MessageKind, TwinMessage, decode, encode
from .mirror import TwinState, apply_to_digital
from .simulator import SimulatorConfig, execute_command

logger = logging.getLogger(__name__)

_END_OF_STREAM = None


@dataclass(frozen=True)
class ScriptCommand:
    """One line of a driving script: ``move x y heading`` or ``arm q1..q7 duration``."""

    kind: MessageKind
    payload: Tuple[float, ...]
    line_no: int = 0


def parse_script(text: str) -> List[ScriptCommand]:
    """
    Parse a driving script.

    Raises:
        ScriptError: If a line has an unknown verb, a wrong value count or a non-number
    """
    commands = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        verb, *values = line.split()
        if verb == "move":
            kind, expected = MessageKind.MOVE_COMMAND, 3
        elif verb == "arm":
            kind, expected = MessageKind.ARM_COMMAND, 8
        else:
            raise ScriptError(f"line {line_no}: unknown command '{verb}'")
        if len(values) != expected:
            raise ScriptError(f"line {line_no}: '{verb}' takes {expected} values, got {len(values)}")
        try:
            payload = tuple(float(v) for v in values)
        except ValueError:
            raise ScriptError(f"line {line_no}: values must be numbers") from None
        if not all(math.isfinite(v) for v in payload):
            raise ScriptError(f"line {line_no}: values must be finite")
        commands.append(ScriptCommand(kind, payload, line_no))
    return commands


@dataclass
class Session:
    """
    Outcome of a session: both endpoint states and the message log.

    ``physical_trace`` holds the physical state after each emitted message, in
    emission order. Sessions assembled by hand may leave it empty.
    """

    initial_state: TwinState
    physical_state: TwinState
    digital_state: TwinState
    log: List[TwinMessage] = field(default_factory=list)
    physical_trace: List[TwinState] = field(default_factory=list)


@dataclass(frozen=True)
class AuditReport:
    max_joint_divergence: float
    max_base_divergence: float
    max_heading_divergence: float
    messages_replayed: int
    synchronized: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_joint_divergence": self.max_joint_divergence,
            "max_base_divergence": self.max_base_divergence,
            "max_heading_divergence": self.max_heading_divergence,
            "messages_replayed": self.messages_replayed,
            "synchronized": self.synchronized,
        }


async def _physical_endpoint(
    commands: Sequence[ScriptCommand],
    state: TwinState,
    channel: asyncio.Queue,
    config: SimulatorConfig,
    chain: Optional[DHChain],
) -> Tuple[TwinState, List[TwinMessage], List[TwinState]]:
    log: List[TwinMessage] = []
    trace: List[TwinState] = []
    reported = state
    try:
        for cmd in commands:
            command = TwinMessage(seq=state.last_seq + 1, timestamp_ms=state.clock_ms, kind=cmd.kind, payload=cmd.payload)
            state, stream = execute_command(state, command, config, chain)
            for message in [command] + stream:
                reported = apply_to_digital(reported, message, chain)
                log.append(message)
                trace.append(reported)
                await channel.put(encode(message))
    finally:
        await channel.put(_END_OF_STREAM)
    return state, log, trace


async def _digital_endpoint(state: TwinState, channel: asyncio.Queue, chain: Optional[DHChain]) -> TwinState:
    while True:
        line = await channel.get()
        if line is _END_OF_STREAM:
            return state
        state = apply_to_digital(state, decode(line), chain)


async def run_session_async(
    commands: Sequence[ScriptCommand],
    initial_state: TwinState = TwinState(),
    config: SimulatorConfig = SimulatorConfig(),
    chain: Optional[DHChain] = None,
) -> Session:
    """Run the physical and digital endpoints as two tasks over one ordered channel."""
    channel: asyncio.Queue = asyncio.Queue()
    physical, digital = await asyncio.gather(
        _physical_endpoint(commands, initial_state, channel, config, chain),
        _digital_endpoint(initial_state, channel, chain),
    )
    physical_state, log, trace = physical
    logger.info(f"Session finished: {len(commands)} commands, {len(log)} messages")
    return Session(
        initial_state=initial_state,
        physical_state=physical_state,
        digital_state=digital,
        log=log,
        physical_trace=trace,
    )


def run_session(
    commands: Sequence[ScriptCommand],
    initial_state: TwinState = TwinState(),
    config: SimulatorConfig = SimulatorConfig(),
    chain: Optional[DHChain] = None,
) -> Session:
    """
    Drive the simulated robot through a script while the digital twin mirrors it.

    Args:
        commands: Parsed script
        initial_state: State of both endpoints at the start
        config: Simulator sampling configuration
        chain: Arm chain (TIAGo arm by default)

    Returns:
        Session with the final physical and digital states and the full log

    Raises:
        LimitViolation: If an arm command targets joints outside the limits
        NonPositiveDuration: If an arm command has duration <= 0
    """
    return asyncio.run(run_session_async(commands, initial_state, config, chain))


def _divergence(mirror: TwinState, physical: TwinState) -> Tuple[float, float, float]:
    joint = max((abs(a - b) for a, b in zip(mirror.arm_joints, physical.arm_joints)), default=0.0)
    base = math.hypot(mirror.base_pose[0] - physical.base_pose[0], mirror.base_pose[1] - physical.base_pose[1])
    heading = abs(mirror.base_pose[2] - physical.base_pose[2])
    return float(joint), float(base), float(heading)


def audit_consistency(session: Session, chain: Optional[DHChain] = None) -> AuditReport:
    """
    Replay the session log into a fresh mirror and compare it with the physical robot step by step.

    Each physical checkpoint (one per message the robot emitted) is compared
    with the mirror after every log message up to that sequence number has
    been applied, so a dropped or late message shows up even when a later
    message hides it from the final state. Without a physical trace only the
    final physical state is checked. Stale messages in the log are skipped.

    Returns:
        AuditReport with the largest divergences seen over all checkpoints
    """
    checkpoints = session.physical_trace or [session.physical_state]
    log = session.log
    state = session.initial_state
    replayed = 0
    position = 0

    def replay_through(last_seq: Optional[int]) -> None:
        nonlocal state, replayed, position
        while position < len(log) and (last_seq is None or log[position].seq <= last_seq):
            message = log[position]
            position += 1
            try:
                state = apply_to_digital(state, message, chain)
                replayed += 1
            except StaleMessage:
                logger.warning(f"Skipping stale message seq {message.seq}")

    worst = [0.0, 0.0, 0.0]
    for index, checkpoint in enumerate(checkpoints):
        is_last = index == len(checkpoints) - 1
        replay_through(None if is_last else checkpoint.last_seq)
        step = _divergence(state, checkpoint)
        if any(value > 0.0 for value in step):
            logger.debug(f"Divergence at seq {checkpoint.last_seq}: joint {step[0]:.3g}, base {step[1]:.3g}, heading {step[2]:.3g}")
        worst = [max(a, b) for a, b in zip(worst, step)]

    joint_divergence, base_divergence, heading_divergence = worst
    synchronized = joint_divergence == 0.0 and base_divergence == 0.0 and heading_divergence == 0.0

    report = AuditReport(
        max_joint_divergence=joint_divergence,
        max_base_divergence=base_divergence,
        max_heading_divergence=heading_divergence,
        messages_replayed=replayed,
        synchronized=synchronized,
    )
    logger.info(f"Audit: {replayed} messages replayed over {len(checkpoints)} checkpoints, synchronized={synchronized}")
    return report
