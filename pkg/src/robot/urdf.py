"""URDF parsing, structural validation and chain queries.

Only the elements robot, link, joint, origin, axis, limit, visual and material
are read; everything else is ignored. Meshes are kept as opaque path strings.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple, Union
import logging
import xml.etree.ElementTree as ET

import numpy as np

from src.errors import (
    CycleDetected,
    DanglingReference,
    DuplicateName,
    InvertedLimits,
    JointValueOutOfRange,
    MalformedXml,
    MissingLimit,
    MissingRoot,
    MultipleParents,
    NoPath,
    UnknownJoint,
    UnknownJointType,
    UnknownLink,
)
from .kinematics import HomogeneousTransform
from .rotations import axis_angle_to_rotation, rpy_to_rotation

logger = logging.getLogger(__name__)

Vector3 = Tuple[float, float, float]

AXIS_TOLERANCE = 1e-12


class JointKind(str, Enum):
    """Supported URDF joint types."""

    REVOLUTE = "revolute"
    CONTINUOUS = "continuous"
    PRISMATIC = "prismatic"
    FIXED = "fixed"


@dataclass(frozen=True)
class UrdfLink:
    """A rigid body of the robot."""

    name: str
    visual_mesh_ref: Optional[str] = None
    material_name: Optional[str] = None


@dataclass(frozen=True)
class UrdfJoint:
    """A joint connecting a parent link to a child link."""

    name: str
    kind: JointKind
    parent_link: str
    child_link: str
    origin_xyz: Vector3 = (0.0, 0.0, 0.0)
    origin_rpy: Vector3 = (0.0, 0.0, 0.0)
    axis: Vector3 = (1.0, 0.0, 0.0)
    limit_lower: float = 0.0
    limit_upper: float = 0.0

    @property
    def is_fixed(self) -> bool:
        return self.kind == JointKind.FIXED

    def origin_matrix(self) -> np.ndarray:
        M = np.eye(4)
        M[:3, :3] = rpy_to_rotation(self.origin_rpy)
        M[:3, 3] = self.origin_xyz
        return M

    def motion_matrix(self, value: float) -> np.ndarray:
        """Transform contributed by the joint variable alone."""
        M = np.eye(4)
        if self.kind in (JointKind.REVOLUTE, JointKind.CONTINUOUS):
            M[:3, :3] = axis_angle_to_rotation(self.axis, value)
        elif self.kind == JointKind.PRISMATIC:
            M[:3, 3] = np.asarray(self.axis) * value
        return M

    def accepts(self, value: float) -> bool:
        return math.isfinite(value) and self.limit_lower <= value <= self.limit_upper


@dataclass(frozen=True)
class Violation:
    """One broken structural invariant."""

    code: str
    subject: str
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"code": self.code, "subject": self.subject, "detail": self.detail}


@dataclass(frozen=True)
class RobotModel:
    """Immutable kinematic tree of links and joints."""

    name: str
    links: Mapping[str, UrdfLink]
    joints: Mapping[str, UrdfJoint]
    root_link: str
    _parent_index: Mapping[str, UrdfJoint] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "links", MappingProxyType(dict(self.links)))
        object.__setattr__(self, "joints", MappingProxyType(dict(self.joints)))
        index: Dict[str, UrdfJoint] = {}
        for joint in self.joints.values():
            index.setdefault(joint.child_link, joint)
        object.__setattr__(self, "_parent_index", MappingProxyType(index))

    def parent_joint(self, link: str) -> Optional[UrdfJoint]:
        return self._parent_index.get(link)

    def child_joints(self, link: str) -> List[UrdfJoint]:
        return sorted((j for j in self.joints.values() if j.parent_link == link), key=lambda j: j.name)

    def leaves(self) -> List[str]:
        parents = {j.parent_link for j in self.joints.values()}
        return sorted(name for name in self.links if name not in parents)

    def movable_joints(self) -> List[UrdfJoint]:
        return [j for j in self.joints.values() if not j.is_fixed]


def _parse_vector(text: Optional[str], default: Vector3, context: str) -> Vector3:
    if text is None:
        return default
    parts = text.split()
    if len(parts) != 3:
        raise MalformedXml(f"expected 3 numbers, got '{text}'", subject=context)
    try:
        return tuple(float(p) for p in parts)
    except ValueError as e:
        raise MalformedXml(f"invalid number in '{text}'", subject=context) from e


def _parse_float(text: Optional[str], default: float, context: str) -> float:
    if text is None:
        return default
    try:
        return float(text.strip())
    except ValueError as e:
        raise MalformedXml(f"invalid number '{text}'", subject=context) from e


def _normalize_axis(axis: Vector3, context: str) -> Vector3:
    norm = math.sqrt(sum(c * c for c in axis))
    if norm == 0.0 or not math.isfinite(norm):
        raise MalformedXml("axis must be a finite non-zero vector", subject=context)
    if abs(norm - 1.0) <= AXIS_TOLERANCE:
        return axis
    logger.warning(f"Normalizing axis of joint '{context}' (norm {norm:.6g})")
    return tuple(c / norm for c in axis)


def _parse_link(element: ET.Element) -> UrdfLink:
    name = (element.get("name") or "").strip()
    if not name:
        raise MalformedXml("link without a name")

    mesh_ref = None
    material = None
    visual = element.find("visual")
    if visual is not None:
        mesh = visual.find("geometry/mesh")
        if mesh is not None:
            mesh_ref = mesh.get("filename")
        material_element = visual.find("material")
        if material_element is not None:
            material = material_element.get("name")

    return UrdfLink(name=name, visual_mesh_ref=mesh_ref, material_name=material)


def _parse_joint(element: ET.Element) -> UrdfJoint:
    name = (element.get("name") or "").strip()
    if not name:
        raise MalformedXml("joint without a name")

    try:
        kind = JointKind((element.get("type") or "").strip())
    except ValueError as e:
        raise UnknownJointType(f"type '{element.get('type')}'", subject=name) from e

    parent = element.find("parent")
    child = element.find("child")
    if parent is None or child is None or not parent.get("link") or not child.get("link"):
        raise MalformedXml("joint needs <parent link=...> and <child link=...>", subject=name)

    origin = element.find("origin")
    xyz = _parse_vector(origin.get("xyz") if origin is not None else None, (0.0, 0.0, 0.0), name)
    rpy = _parse_vector(origin.get("rpy") if origin is not None else None, (0.0, 0.0, 0.0), name)

    axis_element = element.find("axis")
    axis = _parse_vector(axis_element.get("xyz") if axis_element is not None else None, (1.0, 0.0, 0.0), name)
    axis = _normalize_axis(axis, name)

    limit = element.find("limit")
    if kind == JointKind.CONTINUOUS:
        lower, upper = -math.inf, math.inf
    elif kind == JointKind.FIXED:
        lower, upper = 0.0, 0.0
    elif limit is None:
        raise MissingLimit(f"{kind.value} joint has no <limit>", subject=name)
    else:
        lower = _parse_float(limit.get("lower"), 0.0, name)
        upper = _parse_float(limit.get("upper"), 0.0, name)

    return UrdfJoint(
        name=name,
        kind=kind,
        parent_link=parent.get("link").strip(),
        child_link=child.get("link").strip(),
        origin_xyz=xyz,
        origin_rpy=rpy,
        axis=axis,
        limit_lower=lower,
        limit_upper=upper,
    )


def _find_roots(model: RobotModel) -> List[str]:
    children = {j.child_link for j in model.joints.values()}
    return sorted(name for name in model.links if name not in children)


def validate(model: RobotModel) -> List[Violation]:
    """
    Check every structural invariant of a model.

    Args:
        model: Any robot model, possibly built by hand

    Returns:
        List of violations; empty iff the model is a valid tree
    """
    violations: List[Violation] = []

    for name in model.links:
        if not name:
            violations.append(Violation("EmptyName", name, "link name is empty"))

    parents_of: Dict[str, List[str]] = {}
    for joint in sorted(model.joints.values(), key=lambda j: j.name):
        for role, link in (("parent", joint.parent_link), ("child", joint.child_link)):
            if link not in model.links:
                violations.append(Violation("DanglingReference", joint.name, f"{role} link '{link}' does not exist"))
        if joint.parent_link == joint.child_link:
            violations.append(Violation("SelfLoop", joint.name, "parent and child are the same link"))
        if joint.kind in (JointKind.REVOLUTE, JointKind.PRISMATIC) and joint.limit_lower > joint.limit_upper:
            violations.append(
                Violation("InvertedLimits", joint.name, f"lower {joint.limit_lower} > upper {joint.limit_upper}")
            )
        norm = math.sqrt(sum(c * c for c in joint.axis))
        if abs(norm - 1.0) > 1e-9:
            violations.append(Violation("NonUnitAxis", joint.name, f"axis norm {norm:.6g}"))
        parents_of.setdefault(joint.child_link, []).append(joint.name)

    for link, joint_names in sorted(parents_of.items()):
        if len(joint_names) > 1:
            violations.append(Violation("MultipleParents", link, f"child of {', '.join(joint_names)}"))

    # Walk parent pointers; a revisit within one walk is a cycle
    reported = set()
    for start in sorted(model.links):
        seen = []
        link = start
        while True:
            joint = model.parent_joint(link)
            if joint is None or joint.parent_link == joint.child_link:
                break
            if link in seen:
                cycle = frozenset(seen[seen.index(link):])
                if cycle not in reported:
                    reported.add(cycle)
                    violations.append(Violation("CycleDetected", min(cycle), f"cycle through {', '.join(sorted(cycle))}"))
                break
            seen.append(link)
            link = joint.parent_link

    roots = _find_roots(model)
    if len(roots) != 1:
        detail = "no link without a parent joint" if not roots else f"several roots: {', '.join(roots)}"
        violations.append(Violation("MissingRoot", model.root_link, detail))
    elif roots[0] != model.root_link:
        violations.append(Violation("MissingRoot", model.root_link, f"declared root differs from tree root '{roots[0]}'"))

    return violations


# Parse errors raised for violations, highest priority first
_VIOLATION_ERRORS = [
    ("DanglingReference", DanglingReference),
    ("SelfLoop", CycleDetected),
    ("CycleDetected", CycleDetected),
    ("MultipleParents", MultipleParents),
    ("MissingRoot", MissingRoot),
    ("InvertedLimits", InvertedLimits),
    ("NonUnitAxis", MalformedXml),
    ("EmptyName", MalformedXml),
]


def read_urdf_model(xml_text: str) -> RobotModel:
    """
    Read a URDF document into a model without checking the tree structure.

    Use validate() on the result to list every structural violation.

    Raises:
        MalformedXml: If the document is not well-formed or a value is invalid
        DuplicateName: If two links or two joints share a name
        MissingLimit: If a revolute or prismatic joint has no <limit>
        MissingRoot: If the document declares no links
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as e:
        raise MalformedXml(str(e)) from e

    if root.tag != "robot":
        raise MalformedXml(f"root element must be 'robot', found '{root.tag}'")

    links: Dict[str, UrdfLink] = {}
    joints: Dict[str, UrdfJoint] = {}
    for element in root:
        if element.tag == "link":
            link = _parse_link(element)
            if link.name in links:
                raise DuplicateName("duplicate link name", subject=link.name)
            links[link.name] = link
        elif element.tag == "joint":
            joint = _parse_joint(element)
            if joint.name in joints:
                raise DuplicateName("duplicate joint name", subject=joint.name)
            joints[joint.name] = joint
        else:
            logger.debug(f"Ignoring <{element.tag}> element")

    if not links:
        raise MissingRoot("document declares no links")

    roots = sorted(name for name in links if name not in {j.child_link for j in joints.values()})
    return RobotModel(
        name=root.get("name", ""),
        links=links,
        joints=joints,
        root_link=roots[0] if roots else "",
    )


def parse_urdf(xml_text: str) -> RobotModel:
    """
    Parse a URDF document into a validated robot model.

    Args:
        xml_text: URDF XML text

    Returns:
        RobotModel satisfying all structural invariants

    Raises:
        MalformedXml: If the document is not well-formed or a value is invalid
        DuplicateName: If two links or two joints share a name
        MissingLimit: If a revolute or prismatic joint has no <limit>
        DanglingReference, CycleDetected, MultipleParents, MissingRoot, InvertedLimits:
            If the joints do not form a valid tree
    """
    model = read_urdf_model(xml_text)
    violations = validate(model)
    for code, error_class in _VIOLATION_ERRORS:
        for violation in violations:
            if violation.code == code:
                raise error_class(violation.detail, subject=violation.subject)

    logger.info(f"Parsed URDF '{model.name}': {len(model.links)} links, {len(model.joints)} joints, root '{model.root_link}'")
    return model


def load_urdf(path: Union[str, Path]) -> RobotModel:
    """Read and parse a URDF file (UTF-8)."""
    return parse_urdf(Path(path).read_text(encoding="utf-8"))


def _format(value: float) -> str:
    return format(value, ".17g")


def _format_vector(values: Vector3) -> str:
    return " ".join(_format(v) for v in values)


def serialize_urdf(model: RobotModel) -> str:
    """
    Canonical XML for a model: links then joints, each alphabetical, 17 significant digits.

    Args:
        model: Robot model

    Returns:
        XML text that parses back to an equal model
    """
    robot = ET.Element("robot", {"name": model.name})

    for name in sorted(model.links):
        link = model.links[name]
        element = ET.SubElement(robot, "link", {"name": link.name})
        if link.visual_mesh_ref is not None or link.material_name is not None:
            visual = ET.SubElement(element, "visual")
            if link.visual_mesh_ref is not None:
                geometry = ET.SubElement(visual, "geometry")
                ET.SubElement(geometry, "mesh", {"filename": link.visual_mesh_ref})
            if link.material_name is not None:
                ET.SubElement(visual, "material", {"name": link.material_name})

    for name in sorted(model.joints):
        joint = model.joints[name]
        element = ET.SubElement(robot, "joint", {"name": joint.name, "type": joint.kind.value})
        ET.SubElement(element, "parent", {"link": joint.parent_link})
        ET.SubElement(element, "child", {"link": joint.child_link})
        ET.SubElement(element, "origin", {"xyz": _format_vector(joint.origin_xyz), "rpy": _format_vector(joint.origin_rpy)})
        ET.SubElement(element, "axis", {"xyz": _format_vector(joint.axis)})
        if joint.kind in (JointKind.REVOLUTE, JointKind.PRISMATIC):
            ET.SubElement(element, "limit", {"lower": _format(joint.limit_lower), "upper": _format(joint.limit_upper)})

    ET.indent(robot)
    return ET.tostring(robot, encoding="unicode") + "\n"


def kinematic_chain(model: RobotModel, base: str, tip: str) -> List[UrdfJoint]:
    """
    Joint path from ``base`` to ``tip`` in parent-to-child order.

    Fixed joints are included.

    Raises:
        UnknownLink: If either link is not in the model
        NoPath: If ``tip`` is not in the subtree of ``base``
    """
    for link in (base, tip):
        if link not in model.links:
            raise UnknownLink("link not in model", subject=link)

    path: List[UrdfJoint] = []
    link = tip
    visited = set()
    while link != base:
        joint = model.parent_joint(link)
        if joint is None or link in visited:
            raise NoPath(f"'{tip}' is not below '{base}'", subject=tip)
        visited.add(link)
        path.append(joint)
        link = joint.parent_link
    path.reverse()
    return path


def urdf_forward_kinematics(
    model: RobotModel,
    joint_values: Mapping[str, float],
    base: str,
    tip: str,
) -> HomogeneousTransform:
    """
    Compose joint transforms from ``base`` to ``tip``.

    Each joint contributes its origin transform followed by the motion of its
    value about (or along) its axis; fixed joints contribute the origin only.

    Args:
        model: Robot model
        joint_values: Value per movable joint name (radians or meters)
        base: Base link name
        tip: Tip link name

    Returns:
        HomogeneousTransform from base to tip

    Raises:
        UnknownJoint: If a key names no joint in the model
        JointValueOutOfRange: If a chain joint has no value or one outside its limits
        NoPath, UnknownLink: If the chain cannot be formed
    """
    for name in joint_values:
        if name not in model.joints:
            raise UnknownJoint("no such joint", subject=name)

    M = np.eye(4)
    for joint in kinematic_chain(model, base, tip):
        M = M @ joint.origin_matrix()
        if joint.is_fixed:
            continue
        if joint.name not in joint_values:
            raise JointValueOutOfRange("no value given", subject=joint.name)
        value = float(joint_values[joint.name])
        if not joint.accepts(value):
            raise JointValueOutOfRange(
                f"{value} outside [{joint.limit_lower}, {joint.limit_upper}]", subject=joint.name
            )
        M = M @ joint.motion_matrix(value)

    return HomogeneousTransform.from_matrix(M)


def chain_limits(chain: List[UrdfJoint]) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper limits of the movable joints of a chain."""
    movable = [j for j in chain if not j.is_fixed]
    return (
        np.array([j.limit_lower for j in movable], dtype=float),
        np.array([j.limit_upper for j in movable], dtype=float),
    )
