"""Twin link messages and their newline-delimited JSON encoding."""

from enum import Enum
from pathlib import Path
from typing import Annotated, Iterable, List, Sequence, Tuple, Union
import json
import logging

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from src.errors import DecodeError

logger = logging.getLogger(__name__)

MAX_SEQ = 2**63 - 1

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]


class MessageKind(str, Enum):
    JOINT_STATE = "JointState"
    ODOMETRY = "Odometry"
    MOVE_COMMAND = "MoveCommand"
    ARM_COMMAND = "ArmCommand"


PAYLOAD_ARITY = {
    MessageKind.JOINT_STATE: 7,
    MessageKind.ODOMETRY: 3,
    MessageKind.MOVE_COMMAND: 3,
    MessageKind.ARM_COMMAND: 8,
}

COMMAND_KINDS = (MessageKind.MOVE_COMMAND, MessageKind.ARM_COMMAND)


class TwinMessage(BaseModel):
    """
    One message on the twin link.

    Payloads by kind: JointState carries seven joint angles (rad); Odometry
    and MoveCommand carry x (m), y (m), heading (rad); ArmCommand carries
    seven target joint angles followed by the duration in seconds.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    seq: int = Field(ge=0, le=MAX_SEQ)
    timestamp_ms: int = Field(ge=0, le=MAX_SEQ)
    kind: MessageKind
    payload: Tuple[FiniteFloat, ...]

    @model_validator(mode="after")
    def check_arity(self) -> "TwinMessage":
        expected = PAYLOAD_ARITY[self.kind]
        if len(self.payload) != expected:
            raise PydanticCustomError(
                "arity_mismatch",
                "{kind} payload needs {expected} values, got {actual}",
                {"kind": self.kind.value, "expected": expected, "actual": len(self.payload)},
            )
        return self

    @property
    def is_command(self) -> bool:
        return self.kind in COMMAND_KINDS

    @property
    def joints(self) -> Tuple[float, ...]:
        """Joint angles of a JointState or the target of an ArmCommand."""
        return self.payload[:7]

    @property
    def duration(self) -> float:
        return self.payload[7]


def joint_state(seq: int, timestamp_ms: int, joints: Sequence[float]) -> TwinMessage:
    return TwinMessage(seq=seq, timestamp_ms=timestamp_ms, kind=MessageKind.JOINT_STATE, payload=tuple(joints))


def odometry(seq: int, timestamp_ms: int, pose: Sequence[float]) -> TwinMessage:
    return TwinMessage(seq=seq, timestamp_ms=timestamp_ms, kind=MessageKind.ODOMETRY, payload=tuple(pose))


def move_command(seq: int, timestamp_ms: int, goal: Sequence[float]) -> TwinMessage:
    return TwinMessage(seq=seq, timestamp_ms=timestamp_ms, kind=MessageKind.MOVE_COMMAND, payload=tuple(goal))


def arm_command(seq: int, timestamp_ms: int, target: Sequence[float], duration: float) -> TwinMessage:
    return TwinMessage(
        seq=seq,
        timestamp_ms=timestamp_ms,
        kind=MessageKind.ARM_COMMAND,
        payload=tuple(target) + (duration,),
    )


def encode(message: TwinMessage) -> str:
    """Encode a message as one compact JSON line (no trailing newline)."""
    return json.dumps(message.model_dump(mode="json"), separators=(",", ":"), allow_nan=False)


def decode(line: str) -> TwinMessage:
    """
    Decode one JSON line.

    Fields are validated strictly: sequence numbers and timestamps must be JSON
    integers and payload entries JSON numbers, so quoted numbers and booleans
    are rejected.

    Raises:
        DecodeError: With reason Malformed, UnknownKind or ArityMismatch
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise DecodeError("Malformed", str(e)) from e

    if not isinstance(data, dict):
        raise DecodeError("Malformed", "message must be a JSON object")
    kind = data.get("kind")
    if not isinstance(kind, str) or kind not in {k.value for k in MessageKind}:
        raise DecodeError("UnknownKind", f"kind {kind!r}")

    try:
        return TwinMessage.model_validate_json(line, strict=True)
    except ValidationError as e:
        if any(err["type"] == "arity_mismatch" for err in e.errors()):
            raise DecodeError("ArityMismatch", e.errors()[0]["msg"]) from e
        raise DecodeError("Malformed", str(e.errors()[0]["msg"])) from e


def encode_log(messages: Iterable[TwinMessage]) -> str:
    return "".join(encode(m) + "\n" for m in messages)


def decode_log(text: str) -> List[TwinMessage]:
    return [decode(line) for line in text.splitlines() if line.strip()]


def write_log(path: Union[str, Path], messages: Iterable[TwinMessage]) -> None:
    messages = list(messages)
    Path(path).write_text(encode_log(messages), encoding="utf-8")
    logger.info(f"Wrote {len(messages)} messages to {path}")


def read_log(path: Union[str, Path]) -> List[TwinMessage]:
    messages = decode_log(Path(path).read_text(encoding="utf-8"))
    logger.info(f"Read {len(messages)} messages from {path}")
    return messages
