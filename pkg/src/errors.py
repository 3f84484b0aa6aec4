"""Domain error hierarchy shared by all toolkit modules.

Every error carries a machine-readable ``code`` (the class name unless
overridden) and an optional ``subject`` naming the offending element.
"""

from typing import Any, Dict, Optional


class DomainError(Exception):
    """Base class for all domain errors."""

    code: str = "DomainError"

    def __init__(self, detail: str = "", subject: Optional[str] = None, code: Optional[str] = None):
        self.detail = detail
        self.subject = subject
        if code is not None:
            self.code = code
        message = f"{self.code}: {detail}" if detail else self.code
        if subject is not None:
            message = f"{message} [{subject}]"
        super().__init__(message)

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "code" not in cls.__dict__:
            cls.code = cls.__name__

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "subject": self.subject, "detail": self.detail}


# Shared across modules
class LengthMismatch(DomainError):
    pass


class NonFiniteInput(DomainError):
    pass


class LimitViolation(DomainError):
    pass


class NonPositiveDuration(DomainError):
    pass


class MalformedTable(DomainError):
    pass


# urdf
class UrdfError(DomainError):
    pass


class MalformedXml(UrdfError):
    pass


class MissingRoot(UrdfError):
    pass


class DanglingReference(UrdfError):
    pass


class CycleDetected(UrdfError):
    pass


class DuplicateName(UrdfError):
    pass


class MissingLimit(UrdfError):
    pass


class InvertedLimits(UrdfError):
    pass


class MultipleParents(UrdfError):
    pass


class UnknownJointType(UrdfError):
    pass


class NoPath(UrdfError):
    pass


class UnknownLink(UrdfError):
    pass


class UnknownJoint(UrdfError):
    pass


class JointValueOutOfRange(UrdfError):
    pass


# kinematics
class KinematicsError(DomainError):
    pass


class NotARotation(KinematicsError):
    pass


class NotUnit(KinematicsError):
    pass


class UnknownChain(KinematicsError):
    pass


# ik_pso
class IkError(DomainError):
    pass


class InfiniteLimits(IkError):
    pass


class InvalidConfig(IkError):
    pass


class OutOfRange(IkError):
    pass


# trajectory
class TrajectoryError(DomainError):
    pass


class TooFewSamples(TrajectoryError):
    pass


class TimeOutOfRange(TrajectoryError):
    pass


# scene
class SceneError(DomainError):
    pass


class UnknownObject(SceneError):
    pass


class ActionDenied(SceneError):
    def __init__(self, reason: str, subject: Optional[str] = None):
        self.reason = reason
        super().__init__(detail=reason, subject=subject)


class SceneParseError(SceneError):
    code = "ParseError"


class UnknownAttribute(SceneError):
    pass


class DanglingContainment(SceneError):
    pass


class ContainmentCycle(SceneError):
    pass


class AttributeStateMismatch(SceneError):
    pass


# twinlink
class TwinError(DomainError):
    pass


class DecodeError(TwinError):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(detail=f"{reason}: {detail}" if detail else reason, subject=reason)


class StaleMessage(TwinError):
    pass


class ScriptError(TwinError):
    pass
