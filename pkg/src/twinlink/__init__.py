"""Physical/digital twin link: messages, mirror, simulated robot and session audit."""

from .messages import MessageKind, TwinMessage, encode, decode, read_log, write_log
from .mirror import TwinState, apply_to_digital
from .simulator import SimulatorConfig, simulate_physical, execute_command
from .session import ScriptCommand, Session, AuditReport, parse_script, run_session, audit_consistency

__all__ = [
    "MessageKind",
    "TwinMessage",
    "encode",
    "decode",
    "read_log",
    "write_log",
    "TwinState",
    "apply_to_digital",
    "SimulatorConfig",
    "simulate_physical",
    "execute_command",
    "ScriptCommand",
    "Session",
    "AuditReport",
    "parse_script",
    "run_session",
    "audit_consistency",
]
