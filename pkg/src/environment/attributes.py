"""Functional attributes, object states and actions of household objects."""

from enum import Enum
from typing import Dict, Iterable, FrozenSet

from src.errors import UnknownAttribute


class FunctionalAttribute(str, Enum):
    """What a robot can do with (or by means of) an object."""

    PICKABLE = "Pickable"
    MOVEABLE = "Moveable"
    HEATABLE = "Heatable"
    COOLABLE = "Coolable"
    RECEPTACLE = "Receptacle"
    TOGGLEABLE = "Toggleable"
    OPENABLE = "Openable"
    SLICEABLE = "Sliceable"
    FILLABLE = "Fillable"


class TemperatureTag(str, Enum):
    NORMAL = "normal"
    HEATED = "heated"
    COOLED = "cooled"


class Action(str, Enum):
    PICK = "Pick"
    PUT = "Put"
    MOVE = "Move"
    HEAT = "Heat"
    COOL = "Cool"
    TOGGLE_ON = "ToggleOn"
    TOGGLE_OFF = "ToggleOff"
    OPEN = "Open"
    CLOSE = "Close"
    SLICE = "Slice"
    FILL = "Fill"


# State flag -> attribute it requires
STATE_ATTRIBUTES: Dict[str, FunctionalAttribute] = {
    "open": FunctionalAttribute.OPENABLE,
    "toggled_on": FunctionalAttribute.TOGGLEABLE,
    "filled": FunctionalAttribute.FILLABLE,
    "sliced": FunctionalAttribute.SLICEABLE,
}

# Attribute the target must carry
TARGET_REQUIREMENTS: Dict[Action, FunctionalAttribute] = {
    Action.PICK: FunctionalAttribute.PICKABLE,
    Action.PUT: FunctionalAttribute.PICKABLE,
    Action.MOVE: FunctionalAttribute.MOVEABLE,
    Action.TOGGLE_ON: FunctionalAttribute.TOGGLEABLE,
    Action.TOGGLE_OFF: FunctionalAttribute.TOGGLEABLE,
    Action.OPEN: FunctionalAttribute.OPENABLE,
    Action.CLOSE: FunctionalAttribute.OPENABLE,
    Action.SLICE: FunctionalAttribute.SLICEABLE,
    Action.FILL: FunctionalAttribute.FILLABLE,
}

# Attribute the instrument must carry
INSTRUMENT_REQUIREMENTS: Dict[Action, FunctionalAttribute] = {
    Action.PUT: FunctionalAttribute.RECEPTACLE,
    Action.HEAT: FunctionalAttribute.HEATABLE,
    Action.COOL: FunctionalAttribute.COOLABLE,
}


def parse_attribute(name: str) -> FunctionalAttribute:
    """
    Look up an attribute by its exact name.

    Raises:
        UnknownAttribute: If the name is not one of the nine attributes
    """
    try:
        return FunctionalAttribute(name.strip())
    except ValueError:
        raise UnknownAttribute(f"'{name}' is not a functional attribute", subject=name) from None


def parse_attributes(names: Iterable[str]) -> FrozenSet[FunctionalAttribute]:
    return frozenset(parse_attribute(n) for n in names if n.strip())


def parse_action(name: str) -> Action:
    try:
        return Action(name)
    except ValueError:
        valid = ", ".join(a.value for a in Action)
        raise ValueError(f"Unknown action '{name}'. Valid actions: {valid}") from None
