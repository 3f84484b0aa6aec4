"""
Line-oriented scene files.

One object per record::

    id | name | x,y[,height] | Attr1;Attr2 | gravity,collision | contained_in | flag1;flag2

The last two fields are optional. Coordinates are centimeters. State flags
are ``open``, ``toggled_on``, ``filled``, ``sliced``, ``heated`` or
``cooled``, and ``held`` for the object in the gripper. Lines starting with
``#`` are comments.
"""

from pathlib import Path
from typing import List, Optional, Tuple, Union
import logging

from src.errors import SceneParseError
from .attributes import TemperatureTag, parse_attributes
from .scene import ObjectState, PhysicalFlags, Scene, SceneObject

logger = logging.getLogger(__name__)

FIELD_SEPARATOR = "|"
LIST_SEPARATOR = ";"
HELD_FLAG = "held"

_BOOLEANS = {"true": True, "false": False}
_BOOLEAN_FLAGS = ("open", "toggled_on", "filled", "sliced")
_TEMPERATURE_FLAGS = {TemperatureTag.HEATED.value, TemperatureTag.COOLED.value}


def _parse_number(text: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise SceneParseError(f"line {line_no}: '{text}' is not a number") from None


def _parse_position(text: str, line_no: int) -> Tuple[Tuple[float, float], Optional[float]]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 3):
        raise SceneParseError(f"line {line_no}: expected 'x,y' or 'x,y,height', got '{text}'")
    values = [_parse_number(p, line_no) for p in parts]
    height = values[2] if len(values) == 3 else None
    return (values[0], values[1]), height


def _parse_physical(text: str, line_no: int) -> PhysicalFlags:
    parts = [p.strip().lower() for p in text.split(",")]
    if len(parts) != 2 or any(p not in _BOOLEANS for p in parts):
        raise SceneParseError(f"line {line_no}: expected 'gravity,collision' as true/false, got '{text}'")
    return PhysicalFlags(has_gravity=_BOOLEANS[parts[0]], has_collision=_BOOLEANS[parts[1]])


def _parse_state(text: str, line_no: int) -> Tuple[ObjectState, bool]:
    flags = [f.strip() for f in text.split(LIST_SEPARATOR) if f.strip()]
    values = {}
    temperature = TemperatureTag.NORMAL
    held = False
    for flag in flags:
        if flag in _BOOLEAN_FLAGS:
            values[flag] = True
        elif flag in _TEMPERATURE_FLAGS:
            if temperature != TemperatureTag.NORMAL:
                raise SceneParseError(f"line {line_no}: object cannot be both heated and cooled")
            temperature = TemperatureTag(flag)
        elif flag == HELD_FLAG:
            held = True
        else:
            raise SceneParseError(f"line {line_no}: unknown state flag '{flag}'")
    return ObjectState(temperature=temperature, **values), held


def _parse_record(line: str, line_no: int) -> Tuple[SceneObject, bool]:
    fields = [f.strip() for f in line.split(FIELD_SEPARATOR)]
    if not 5 <= len(fields) <= 7:
        raise SceneParseError(f"line {line_no}: expected 5 to 7 fields, got {len(fields)}")
    fields += [""] * (7 - len(fields))
    object_id, name, position, attributes, physical, contained_in, state = fields

    if not object_id:
        raise SceneParseError(f"line {line_no}: empty object id")
    pose, height = _parse_position(position, line_no)
    obj_state, held = _parse_state(state, line_no)
    obj = SceneObject(
        id=object_id,
        name=name,
        pose_2d=pose,
        height_cm=height,
        attributes=parse_attributes(attributes.split(LIST_SEPARATOR)),
        physical=_parse_physical(physical, line_no),
        state=obj_state,
        contained_in=contained_in or None,
    )
    return obj, held


def load_scene(text: str) -> Scene:
    """
    Parse a scene document.

    Args:
        text: Scene file contents

    Returns:
        Scene satisfying all invariants

    Raises:
        SceneParseError: If a record is malformed or an id repeats
        UnknownAttribute: If a record names an unknown attribute
        DanglingContainment: If a container is missing or not a Receptacle
        ContainmentCycle: If containment loops
        AttributeStateMismatch: If a state flag lacks its attribute
    """
    objects: List[SceneObject] = []
    seen = set()
    held: Optional[str] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        obj, is_held = _parse_record(line, line_no)
        if obj.id in seen:
            raise SceneParseError(f"line {line_no}: duplicate id '{obj.id}'")
        seen.add(obj.id)
        if is_held:
            if held is not None:
                raise SceneParseError(f"line {line_no}: only one object can be held")
            held = obj.id
        objects.append(obj)

    scene = Scene.from_objects(objects, held=held)
    logger.info(f"Loaded scene with {len(scene)} objects")
    return scene


def load_scene_file(path: Union[str, Path]) -> Scene:
    return load_scene(Path(path).read_text(encoding="utf-8"))


def _format_record(obj: SceneObject, held: bool) -> str:
    position = [repr(obj.pose_2d[0]), repr(obj.pose_2d[1])]
    if obj.height_cm is not None:
        position.append(repr(float(obj.height_cm)))
    flags = obj.state.active_flags()
    if held:
        flags.append(HELD_FLAG)
    fields = [
        obj.id,
        obj.name,
        ",".join(position),
        LIST_SEPARATOR.join(sorted(a.value for a in obj.attributes)),
        f"{str(obj.physical.has_gravity).lower()},{str(obj.physical.has_collision).lower()}",
        obj.contained_in or "",
        LIST_SEPARATOR.join(flags),
    ]
    return f" {FIELD_SEPARATOR} ".join(fields).rstrip()


def serialize_scene(scene: Scene) -> str:
    """Serialize a scene so that load_scene reproduces it exactly."""
    lines = [_format_record(obj, obj.id == scene.held) for obj in scene.objects.values()]
    return "\n".join(lines) + "\n"
