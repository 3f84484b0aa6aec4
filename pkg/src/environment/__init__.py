"""Household scene model: functional attributes, actions and geometric consistency."""

from .attributes import FunctionalAttribute, TemperatureTag, Action, parse_attribute
from .scene import PhysicalFlags, ObjectState, SceneObject, Scene, ActionVerdict, check_action, apply_action
from .scene_io import load_scene, load_scene_file, serialize_scene
from .consistency import geometric_error_2d, consistency_report, dimension_errors

__all__ = [
    "FunctionalAttribute",
    "TemperatureTag",
    "Action",
    "parse_attribute",
    "PhysicalFlags",
    "ObjectState",
    "SceneObject",
    "Scene",
    "ActionVerdict",
    "check_action",
    "apply_action",
    "load_scene",
    "load_scene_file",
    "serialize_scene",
    "geometric_error_2d",
    "consistency_report",
    "dimension_errors",
]
