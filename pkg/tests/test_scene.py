"""Tests for the household scene: attributes, actions, scene files and consistency."""

import math

import numpy as np
import pytest

from config.robots import LAB_HOME_DIGITAL_XY, LAB_HOME_PHYSICAL_XY, TIAGO_DIGITAL_DIMENSIONS, TIAGO_PHYSICAL_DIMENSIONS
from src.environment.attributes import Action, FunctionalAttribute, TemperatureTag, parse_action, parse_attribute
from src.environment.consistency import consistency_report, dimension_errors, geometric_error_2d, report_to_dict
from src.environment.scene import Scene, SceneObject, apply_action, check_action
from src.environment.scene_io import load_scene, load_scene_file, serialize_scene
from src.errors import (
    ActionDenied,
    AttributeStateMismatch,
    ContainmentCycle,
    DanglingContainment,
    NonFiniteInput,
    SceneParseError,
    UnknownAttribute,
    UnknownObject,
)

P = FunctionalAttribute


def reason(scene: Scene, action: Action, target: str, instrument: str = None) -> str:
    verdict = check_action(scene, action, target, instrument)
    return "allowed" if verdict else verdict.reason


class TestAttributes:
    def test_parse_attribute(self) -> None:
        assert parse_attribute("Heatable") == P.HEATABLE

    def test_unknown_attribute(self) -> None:
        with pytest.raises(UnknownAttribute):
            parse_attribute("Sittable")

    def test_attribute_names_are_case_sensitive(self) -> None:
        with pytest.raises(UnknownAttribute):
            parse_attribute("heatable")

    def test_nine_attributes(self) -> None:
        assert len(FunctionalAttribute) == 9

    def test_parse_action(self) -> None:
        assert parse_action("ToggleOn") == Action.TOGGLE_ON
        with pytest.raises(ValueError):
            parse_action("Teleport")


class TestHeatApple:
    """Heating the apple from the fridge in the microwave, step by step."""

    def test_full_sequence(self, kitchen: Scene) -> None:
        scene = kitchen
        assert reason(scene, Action.HEAT, "apple", "microwave") == "InstrumentOff"
        scene = apply_action(scene, Action.TOGGLE_ON, "microwave")
        assert reason(scene, Action.HEAT, "apple", "microwave") == "NotContained"

        assert reason(scene, Action.PICK, "apple") == "ReceptacleClosed"
        scene = apply_action(scene, Action.OPEN, "fridge")
        scene = apply_action(scene, Action.PICK, "apple")
        assert scene.held == "apple"
        assert scene.get("apple").contained_in is None

        assert reason(scene, Action.PUT, "apple", "microwave") == "ReceptacleClosed"
        scene = apply_action(scene, Action.OPEN, "microwave")
        scene = apply_action(scene, Action.PUT, "apple", "microwave")
        assert scene.held is None
        assert scene.get("apple").contained_in == "microwave"

        scene = apply_action(scene, Action.HEAT, "apple", "microwave")
        assert scene.get("apple").state.temperature == TemperatureTag.HEATED

    def test_input_scene_untouched(self, kitchen: Scene) -> None:
        apply_action(kitchen, Action.TOGGLE_ON, "microwave")
        assert not kitchen.get("microwave").state.toggled_on

    def test_denied_action_raises(self, kitchen: Scene) -> None:
        with pytest.raises(ActionDenied) as excinfo:
            apply_action(kitchen, Action.HEAT, "apple", "microwave")
        assert excinfo.value.reason == "InstrumentOff"
        assert excinfo.value.subject == "apple"


class TestCheckAction:
    def test_cool_in_place(self, kitchen: Scene) -> None:
        """The fridge has no switch, so cooling what is inside it is allowed."""
        scene = apply_action(kitchen, Action.COOL, "apple", "fridge")
        assert scene.get("apple").state.temperature == TemperatureTag.COOLED

    def test_stove_heats_without_switch(self, kitchen: Scene) -> None:
        scene = apply_action(kitchen, Action.PICK, "cup")
        scene = apply_action(scene, Action.PUT, "cup", "stove")
        assert reason(scene, Action.HEAT, "cup", "stove") == "allowed"

    def test_slice_twice(self, kitchen: Scene) -> None:
        scene = apply_action(kitchen, Action.SLICE, "apple")
        assert scene.get("apple").state.sliced
        assert reason(scene, Action.SLICE, "apple") == "AlreadySliced"

    def test_missing_target_attribute(self, kitchen: Scene) -> None:
        assert reason(kitchen, Action.PICK, "fridge") == "MissingAttribute(Pickable)"
        assert reason(kitchen, Action.SLICE, "cup") == "MissingAttribute(Sliceable)"

    def test_missing_instrument_attribute(self, kitchen: Scene) -> None:
        assert reason(kitchen, Action.HEAT, "cup", "fridge") == "MissingAttribute(Heatable)"
        assert reason(kitchen, Action.PUT, "cup", "chair") == "MissingAttribute(Receptacle)"

    def test_missing_instrument(self, kitchen: Scene) -> None:
        assert reason(kitchen, Action.PUT, "cup") == "MissingInstrument"

    def test_self_reference(self, kitchen: Scene) -> None:
        assert reason(kitchen, Action.PUT, "cup", "cup") == "SelfReference"

    def test_gripper_occupied(self, kitchen: Scene) -> None:
        scene = apply_action(kitchen, Action.PICK, "cup")
        assert reason(scene, Action.PICK, "apple") == "GripperOccupied"

    def test_already_in_state(self, kitchen: Scene) -> None:
        assert reason(kitchen, Action.CLOSE, "fridge") == "AlreadyInState"
        assert reason(kitchen, Action.TOGGLE_ON, "lamp") == "AlreadyInState"
        scene = apply_action(kitchen, Action.FILL, "cup")
        assert scene.get("cup").state.filled
        assert reason(scene, Action.FILL, "cup") == "AlreadyInState"

    def test_toggle_off(self, kitchen: Scene) -> None:
        scene = apply_action(kitchen, Action.TOGGLE_OFF, "lamp")
        assert not scene.get("lamp").state.toggled_on

    def test_move_relocates(self, kitchen: Scene) -> None:
        scene = apply_action(kitchen, Action.MOVE, "chair", destination=(330.0, 240.0))
        assert scene.get("chair").pose_2d == (330.0, 240.0)
        assert reason(kitchen, Action.MOVE, "table") == "MissingAttribute(Moveable)"

    def test_containment_cycle(self) -> None:
        boxes = Scene.from_objects(
            [
                SceneObject("outer", "Outer box", (0.0, 0.0), {P.PICKABLE, P.RECEPTACLE}),
                SceneObject("inner", "Inner box", (0.0, 0.0), {P.PICKABLE, P.RECEPTACLE}, contained_in="outer"),
            ]
        )
        assert reason(boxes, Action.PUT, "outer", "inner") == "ContainmentCycle"

    def test_unknown_object(self, kitchen: Scene) -> None:
        with pytest.raises(UnknownObject):
            check_action(kitchen, Action.PICK, "sofa")
        with pytest.raises(UnknownObject):
            check_action(kitchen, Action.PUT, "cup", "sofa")

    def test_verdict_to_dict(self, kitchen: Scene) -> None:
        assert check_action(kitchen, Action.PICK, "cup").to_dict() == {"allowed": True, "reason": None}


class TestSceneInvariants:
    def test_attribute_state_mismatch(self) -> None:
        with pytest.raises(AttributeStateMismatch):
            Scene.from_objects([SceneObject("chair", "Chair", (0.0, 0.0), {P.MOVEABLE}).with_state(open=True)])

    def test_dangling_container(self) -> None:
        with pytest.raises(DanglingContainment):
            Scene.from_objects([SceneObject("cup", "Cup", (0.0, 0.0), {P.PICKABLE}, contained_in="ghost")])

    def test_container_must_be_receptacle(self) -> None:
        with pytest.raises(DanglingContainment):
            Scene.from_objects(
                [
                    SceneObject("chair", "Chair", (0.0, 0.0), {P.MOVEABLE}),
                    SceneObject("cup", "Cup", (0.0, 0.0), {P.PICKABLE}, contained_in="chair"),
                ]
            )

    def test_containment_loop(self) -> None:
        with pytest.raises(ContainmentCycle):
            Scene.from_objects(
                [
                    SceneObject("a", "A", (0.0, 0.0), {P.RECEPTACLE}, contained_in="b"),
                    SceneObject("b", "B", (0.0, 0.0), {P.RECEPTACLE}, contained_in="a"),
                ]
            )

    def test_non_finite_position(self) -> None:
        with pytest.raises(NonFiniteInput):
            SceneObject("cup", "Cup", (math.nan, 0.0))

    def test_contents_and_ancestors(self, kitchen: Scene) -> None:
        assert kitchen.contents_of("fridge") == ["apple"]
        assert kitchen.ancestors("apple") == ["fridge"]
        assert kitchen.ancestors("fridge") == []

    def test_random_actions_keep_invariants(self, kitchen: Scene) -> None:
        """Any sequence of allowed actions yields a valid scene that survives a file round trip."""
        rng = np.random.default_rng(3)
        ids = sorted(kitchen.objects)
        actions = list(Action)
        scene = kitchen
        applied = 0
        attempts = 0
        while applied < 1000 and attempts < 100_000:
            attempts += 1
            action = actions[rng.integers(len(actions))]
            target = ids[rng.integers(len(ids))]
            instrument = ids[rng.integers(len(ids))] if rng.random() < 0.6 else None
            if check_action(scene, action, target, instrument):
                scene = apply_action(scene, action, target, instrument)
                applied += 1
                assert load_scene(serialize_scene(scene)) == scene
        assert applied == 1000


class TestSceneFile:
    def test_load_kitchen(self, kitchen: Scene) -> None:
        assert len(kitchen) == 8
        cup = kitchen.get("cup")
        assert cup.contained_in == "table"
        assert cup.height_cm == 83.0
        assert cup.attributes == {P.FILLABLE, P.MOVEABLE, P.PICKABLE}
        lamp = kitchen.get("lamp")
        assert lamp.state.toggled_on
        assert not lamp.physical.has_collision
        assert kitchen.held is None

    def test_round_trip(self, kitchen: Scene) -> None:
        assert load_scene(serialize_scene(kitchen)) == kitchen

    def test_round_trip_with_held_object(self, kitchen: Scene) -> None:
        scene = apply_action(kitchen, Action.PICK, "cup")
        text = serialize_scene(scene)
        assert "held" in text
        assert load_scene(text).held == "cup"

    def test_unknown_attribute_in_file(self) -> None:
        with pytest.raises(UnknownAttribute):
            load_scene("sofa | Sofa | 1.0,2.0 | Sittable | true,true\n")

    def test_dangling_in_file(self) -> None:
        with pytest.raises(DanglingContainment):
            load_scene("cup | Cup | 1.0,2.0 | Pickable | true,true | ghost\n")

    @pytest.mark.parametrize(
        "line",
        [
            "cup | Cup | 1.0,2.0 | Pickable",
            "cup | Cup | one,2.0 | Pickable | true,true",
            "cup | Cup | 1.0 | Pickable | true,true",
            "cup | Cup | 1.0,2.0 | Pickable | yes,true",
            "cup | Cup | 1.0,2.0 | Pickable | true,true | | broken",
            "cup | Cup | 1.0,2.0 | Pickable | true,true | | heated;cooled",
            " | Cup | 1.0,2.0 | Pickable | true,true",
        ],
    )
    def test_malformed_records(self, line) -> None:
        with pytest.raises(SceneParseError):
            load_scene(line + "\n")

    def test_duplicate_id(self) -> None:
        text = "cup | Cup | 1.0,2.0 | Pickable | true,true\ncup | Mug | 3.0,4.0 | Pickable | true,true\n"
        with pytest.raises(SceneParseError):
            load_scene(text)

    def test_two_held_objects(self) -> None:
        text = (
            "cup | Cup | 1.0,2.0 | Pickable | true,true | | held\n"
            "mug | Mug | 3.0,4.0 | Pickable | true,true | | held\n"
        )
        with pytest.raises(SceneParseError):
            load_scene(text)

    def test_comments_and_blank_lines(self) -> None:
        scene = load_scene("# header\n\ncup | Cup | 1.0,2.0 | Pickable | true,true\n")
        assert list(scene.objects) == ["cup"]


class TestConsistency:
    @pytest.fixture
    def lab(self, fixtures_dir):
        return load_scene_file(fixtures_dir / "lab_home.scene"), load_scene_file(fixtures_dir / "lab_home_digital.scene")

    def test_reference_errors(self) -> None:
        assert geometric_error_2d(LAB_HOME_PHYSICAL_XY["fridge"], LAB_HOME_DIGITAL_XY["fridge"]) == pytest.approx(1.662, abs=5e-4)
        assert geometric_error_2d(LAB_HOME_PHYSICAL_XY["table1"], LAB_HOME_DIGITAL_XY["table1"]) == pytest.approx(2.279, abs=5e-4)

    def test_all_reference_objects_within_three_cm(self) -> None:
        for name, xy in LAB_HOME_PHYSICAL_XY.items():
            assert geometric_error_2d(xy, LAB_HOME_DIGITAL_XY[name]) < 3.0

    def test_metric_properties(self, rng) -> None:
        for _ in range(100):
            a, b, c = rng.uniform(0, 500, size=(3, 2))
            assert geometric_error_2d(a, a) == 0.0
            assert geometric_error_2d(a, b) == geometric_error_2d(b, a)
            assert geometric_error_2d(a, c) <= geometric_error_2d(a, b) + geometric_error_2d(b, c) + 1e-9

    def test_non_finite(self) -> None:
        with pytest.raises(NonFiniteInput):
            geometric_error_2d((math.inf, 0.0), (0.0, 0.0))

    def test_report(self, lab) -> None:
        physical, digital = lab
        report = consistency_report(physical, digital)
        assert list(report["object"]) == ["fridge", "table1", "table2", "desk", "microwave", "television"]
        fridge = report.set_index("object").loc["fridge"]
        assert fridge["error_cm"] == pytest.approx(1.662, abs=5e-4)
        assert report.attrs["max_error_cm"] == pytest.approx(report["error_cm"].max())
        assert report_to_dict(report)["mean_error_cm"] == pytest.approx(report["error_cm"].mean())

    def test_report_skips_unmatched(self, lab, kitchen) -> None:
        physical, _ = lab
        report = consistency_report(physical, kitchen)
        assert list(report["object"]) == ["fridge", "microwave"]

    def test_dimension_errors(self) -> None:
        result = dimension_errors(TIAGO_PHYSICAL_DIMENSIONS, TIAGO_DIGITAL_DIMENSIONS)
        assert result["complete"]
        assert result["errors"]["height"] == pytest.approx(0.0998)
        assert result["errors"]["chassis_diameter"] == pytest.approx(0.828)
        assert result["max_error"] == pytest.approx(0.828)
        assert "components" not in result["errors"]
