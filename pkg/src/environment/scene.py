"""Digital-space model of the home: household objects and the actions on them."""

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple
import logging
import math

from src.errors import (
    ActionDenied,
    AttributeStateMismatch,
    ContainmentCycle,
    DanglingContainment,
    NonFiniteInput,
    SceneError,
    UnknownObject,
)
from .attributes import (
    INSTRUMENT_REQUIREMENTS,
    STATE_ATTRIBUTES,
    TARGET_REQUIREMENTS,
    Action,
    FunctionalAttribute,
    TemperatureTag,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysicalFlags:
    has_gravity: bool = True
    has_collision: bool = True


@dataclass(frozen=True)
class ObjectState:
    """Mutable-by-action state of an object."""

    open: bool = False
    toggled_on: bool = False
    filled: bool = False
    sliced: bool = False
    temperature: TemperatureTag = TemperatureTag.NORMAL

    def active_flags(self) -> List[str]:
        """Names of the flags that are set, temperature included unless normal."""
        flags = [name for name in STATE_ATTRIBUTES if getattr(self, name)]
        if self.temperature != TemperatureTag.NORMAL:
            flags.append(self.temperature.value)
        return flags


@dataclass(frozen=True)
class SceneObject:
    """
    A household object placed on the map.

    Coordinates are centimeters on the map plane with the origin at the
    upper left corner of the map.
    """

    id: str
    name: str
    pose_2d: Tuple[float, float]
    attributes: FrozenSet[FunctionalAttribute] = frozenset()
    physical: PhysicalFlags = field(default_factory=PhysicalFlags)
    state: ObjectState = field(default_factory=ObjectState)
    contained_in: Optional[str] = None
    height_cm: Optional[float] = None

    def __post_init__(self):
        x, y = (float(v) for v in self.pose_2d)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NonFiniteInput("object coordinates must be finite", subject=self.id)
        object.__setattr__(self, "pose_2d", (x, y))
        object.__setattr__(self, "attributes", frozenset(self.attributes))

    def has(self, attribute: FunctionalAttribute) -> bool:
        return attribute in self.attributes

    def with_state(self, **changes) -> "SceneObject":
        return replace(self, state=replace(self.state, **changes))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "pose_2d": list(self.pose_2d),
            "height_cm": self.height_cm,
            "attributes": sorted(a.value for a in self.attributes),
            "has_gravity": self.physical.has_gravity,
            "has_collision": self.physical.has_collision,
            "state": self.state.active_flags(),
            "contained_in": self.contained_in,
        }


def _check_invariants(objects: Mapping[str, SceneObject], held: Optional[str]) -> None:
    for obj in objects.values():
        for flag, attribute in STATE_ATTRIBUTES.items():
            if getattr(obj.state, flag) and not obj.has(attribute):
                raise AttributeStateMismatch(f"state '{flag}' requires {attribute.value}", subject=obj.id)

        if obj.contained_in is None:
            continue
        container = objects.get(obj.contained_in)
        if container is None:
            raise DanglingContainment(f"container '{obj.contained_in}' does not exist", subject=obj.id)
        if not container.has(FunctionalAttribute.RECEPTACLE):
            raise DanglingContainment(f"container '{container.id}' is not a Receptacle", subject=obj.id)

    for obj in objects.values():
        seen = {obj.id}
        current = obj.contained_in
        while current is not None:
            if current in seen:
                raise ContainmentCycle(f"containment loops back through '{current}'", subject=obj.id)
            seen.add(current)
            current = objects[current].contained_in

    if held is not None:
        if held not in objects:
            raise UnknownObject("held object does not exist", subject=held)
        if objects[held].contained_in is not None:
            raise SceneError("held object cannot also be contained", subject=held)


@dataclass(frozen=True)
class Scene:
    """Immutable set of objects keyed by id, plus the object in the gripper."""

    objects: Mapping[str, SceneObject]
    held: Optional[str] = None

    def __post_init__(self):
        objects = dict(self.objects)
        for key, obj in objects.items():
            if key != obj.id:
                raise SceneError(f"object stored under '{key}' has id '{obj.id}'", subject=key)
        _check_invariants(objects, self.held)
        object.__setattr__(self, "objects", MappingProxyType(objects))

    @classmethod
    def from_objects(cls, objects: Iterable[SceneObject], held: Optional[str] = None) -> "Scene":
        mapping: Dict[str, SceneObject] = {}
        for obj in objects:
            if obj.id in mapping:
                raise SceneError("duplicate object id", subject=obj.id)
            mapping[obj.id] = obj
        return cls(mapping, held)

    def __len__(self) -> int:
        return len(self.objects)

    def __contains__(self, object_id: str) -> bool:
        return object_id in self.objects

    def get(self, object_id: str) -> SceneObject:
        """
        Raises:
            UnknownObject: If no object has that id
        """
        try:
            return self.objects[object_id]
        except KeyError:
            raise UnknownObject("no such object", subject=object_id) from None

    def with_objects(self, *updated: SceneObject, held: Optional[str] = None) -> "Scene":
        objects = dict(self.objects)
        for obj in updated:
            objects[obj.id] = obj
        return Scene(objects, held)

    def contents_of(self, container_id: str) -> List[str]:
        return [obj.id for obj in self.objects.values() if obj.contained_in == container_id]

    def ancestors(self, object_id: str) -> List[str]:
        """Containers enclosing an object, innermost first."""
        chain = []
        current = self.get(object_id).contained_in
        while current is not None:
            chain.append(current)
            current = self.objects[current].contained_in
        return chain


@dataclass(frozen=True)
class ActionVerdict:
    allowed: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.allowed

    def to_dict(self) -> Dict[str, Any]:
        return {"allowed": self.allowed, "reason": self.reason}


_ALLOWED = ActionVerdict(True)


def _deny(reason: str) -> ActionVerdict:
    return ActionVerdict(False, reason)


def _source_closed(scene: Scene, obj: SceneObject) -> bool:
    if obj.contained_in is None:
        return False
    source = scene.get(obj.contained_in)
    return source.has(FunctionalAttribute.OPENABLE) and not source.state.open


def check_action(
    scene: Scene,
    action: Action,
    target: str,
    instrument: Optional[str] = None,
) -> ActionVerdict:
    """
    Decide whether an action is possible in the current scene.

    Attribute requirements are checked first, then state preconditions.

    Args:
        scene: Scene to check against
        action: Action to perform
        target: Id of the object acted upon
        instrument: Id of the receptacle (Put) or appliance (Heat, Cool)

    Returns:
        ActionVerdict; a denial carries a machine-readable reason such as
        ``MissingAttribute(Heatable)`` or ``ReceptacleClosed``

    Raises:
        UnknownObject: If target or instrument does not exist
    """
    action = Action(action)
    obj = scene.get(target)
    tool = scene.get(instrument) if instrument is not None else None

    if action in INSTRUMENT_REQUIREMENTS and tool is None:
        return _deny("MissingInstrument")
    if tool is not None and tool.id == obj.id:
        return _deny("SelfReference")

    required = TARGET_REQUIREMENTS.get(action)
    if required is not None and not obj.has(required):
        return _deny(f"MissingAttribute({required.value})")
    required = INSTRUMENT_REQUIREMENTS.get(action)
    if required is not None and not tool.has(required):
        return _deny(f"MissingAttribute({required.value})")

    state = obj.state
    if action == Action.PICK:
        if scene.held is not None:
            return _deny("GripperOccupied")
        if _source_closed(scene, obj):
            return _deny("ReceptacleClosed")
    elif action == Action.PUT:
        if _source_closed(scene, obj):
            return _deny("ReceptacleClosed")
        if tool.has(FunctionalAttribute.OPENABLE) and not tool.state.open:
            return _deny("ReceptacleClosed")
        if obj.id in scene.ancestors(tool.id):
            return _deny("ContainmentCycle")
    elif action in (Action.HEAT, Action.COOL):
        if tool.has(FunctionalAttribute.TOGGLEABLE) and not tool.state.toggled_on:
            return _deny("InstrumentOff")
        if obj.contained_in != tool.id:
            return _deny("NotContained")
    elif action == Action.OPEN and state.open:
        return _deny("AlreadyInState")
    elif action == Action.CLOSE and not state.open:
        return _deny("AlreadyInState")
    elif action == Action.TOGGLE_ON and state.toggled_on:
        return _deny("AlreadyInState")
    elif action == Action.TOGGLE_OFF and not state.toggled_on:
        return _deny("AlreadyInState")
    elif action == Action.SLICE and state.sliced:
        return _deny("AlreadySliced")
    elif action == Action.FILL and state.filled:
        return _deny("AlreadyInState")

    return _ALLOWED


def apply_action(
    scene: Scene,
    action: Action,
    target: str,
    instrument: Optional[str] = None,
    destination: Optional[Tuple[float, float]] = None,
) -> Scene:
    """
    Apply an allowed action and return the resulting scene.

    The input scene is never modified. ``destination`` is only used by Move,
    which relocates the target on the map plane.

    Raises:
        ActionDenied: If check_action denies the action
        UnknownObject: If target or instrument does not exist
    """
    action = Action(action)
    verdict = check_action(scene, action, target, instrument)
    if not verdict.allowed:
        logger.debug(f"{action.value}({target}, {instrument}) denied: {verdict.reason}")
        raise ActionDenied(verdict.reason, subject=target)

    obj = scene.get(target)
    held = scene.held

    if action == Action.PICK:
        obj = replace(obj, contained_in=None)
        held = obj.id
    elif action == Action.PUT:
        obj = replace(obj, contained_in=instrument)
        if held == obj.id:
            held = None
    elif action == Action.MOVE:
        if destination is not None:
            obj = replace(obj, pose_2d=tuple(destination))
    elif action == Action.HEAT:
        obj = obj.with_state(temperature=TemperatureTag.HEATED)
    elif action == Action.COOL:
        obj = obj.with_state(temperature=TemperatureTag.COOLED)
    elif action in (Action.TOGGLE_ON, Action.TOGGLE_OFF):
        obj = obj.with_state(toggled_on=action == Action.TOGGLE_ON)
    elif action in (Action.OPEN, Action.CLOSE):
        obj = obj.with_state(open=action == Action.OPEN)
    elif action == Action.SLICE:
        obj = obj.with_state(sliced=True)
    elif action == Action.FILL:
        obj = obj.with_state(filled=True)

    logger.debug(f"Applied {action.value}({target}, {instrument})")
    return scene.with_objects(obj, held=held)
