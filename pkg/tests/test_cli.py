"""Tests for the twin command-line interface."""

import json

import pandas as pd
import pytest

from src.cli import run

TARGET = "0.4,0.2,0.9,0,0,0,1"


def error_report(err: str) -> dict:
    """The structured error report is the last line written to stderr."""
    return json.loads(err.strip().splitlines()[-1])


class TestUrdfCommands:
    def test_validate_clean(self, fixtures_dir, capsys) -> None:
        assert run(["urdf-validate", str(fixtures_dir / "tiago_arm.urdf")]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["summary"] == "0 violations"
        assert out["violations"] == []

    def test_validate_reports_violations(self, fixtures_dir, capsys) -> None:
        assert run(["urdf-validate", str(fixtures_dir / "inverted_limits.urdf")]) == 1
        out = json.loads(capsys.readouterr().out)
        assert out["violations"]

    def test_chain(self, fixtures_dir, capsys) -> None:
        argv = ["urdf-chain", str(fixtures_dir / "tiago_arm.urdf"), "--base", "torso_lift_link", "--tip", "arm_tool_link"]
        assert run(argv) == 0
        names = [j["name"] for j in json.loads(capsys.readouterr().out)["joints"]]
        assert names == [f"arm_{k}_joint" for k in range(1, 8)] + ["arm_tool_joint"]

    def test_missing_file(self, tmp_path, capsys) -> None:
        assert run(["urdf-validate", str(tmp_path / "absent.urdf")]) == 1
        assert error_report(capsys.readouterr().err)["error"] == "IoError"


class TestKinematicsCommands:
    def test_fk(self, capsys) -> None:
        assert run(["fk", "--joints", "0.2,0.3,-1.0,1.2,0.0,0.5,0.0"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert set(out) == {"position", "quaternion", "matrix"}
        assert len(out["matrix"]) == 4

    @pytest.mark.parametrize(
        "argv",
        [
            ["fk", "--joints", "0.1,0.2"],
            ["ik", "--target", TARGET, "--reference", "0.1,0.2,0.3"],
            ["traj", "--start", "0.2,0.3", "--goal", "1.0,-0.5"],
        ],
    )
    def test_wrong_joint_count(self, argv, capsys) -> None:
        assert run(argv) == 2
        assert error_report(capsys.readouterr().err)["error"] == "InvalidValue"

    def test_wrong_joint_count_for_csv_chain(self, tmp_path, capsys) -> None:
        csv = tmp_path / "planar.csv"
        csv.write_text("alpha,a,d,lower,upper\n0,0.5,0,-3,3\n0,0.5,0,-3,3\n", encoding="utf-8")
        assert run(["fk", "--dh-csv", str(csv), "--joints", "0.1,0.2"]) == 0
        capsys.readouterr()
        assert run(["fk", "--dh-csv", str(csv), "--joints", "0.1,0.2,0.3"]) == 2
        assert error_report(capsys.readouterr().err)["error"] == "InvalidValue"

    @pytest.mark.parametrize(
        "extra",
        [
            ["--omega-p", "1.5"],
            ["--omega-p", "0"],
            ["--omega-p", "1"],
            ["--omega-p", "nan"],
            ["--particles", "1"],
            ["--particles", "0"],
        ],
    )
    def test_ik_invalid_swarm_options(self, extra, capsys) -> None:
        assert run(["ik", "--target", TARGET, "--iterations", "1", *extra]) == 2
        assert error_report(capsys.readouterr().err)["error"] == "InvalidValue"

    def test_ik_deterministic(self, capsys) -> None:
        argv = ["ik", "--target", TARGET, "--particles", "4", "--iterations", "3", "--seed", "5"]
        assert run(argv) == 0
        first = capsys.readouterr().out
        assert run(argv) == 0
        second = capsys.readouterr().out
        assert first == second
        out = json.loads(first)
        assert out["seed"] == 5
        assert len(out["joints"]) == 7

    def test_ik_trace(self, tmp_path, capsys) -> None:
        trace = tmp_path / "trace.csv"
        argv = ["ik", "--target", TARGET, "--particles", "4", "--iterations", "3", "--trace", str(trace)]
        assert run(argv) == 0
        frame = pd.read_csv(trace)
        assert list(frame.columns) == ["iteration", "gbest_fitness", "W", "C1", "C2"]
        assert len(frame) == 4

    def test_traj_csv(self, capsys) -> None:
        argv = ["traj", "--start", "0.2,0.3,-1.0,1.2,0.0,0.5,0.0", "--goal", "1.0,-0.5,0.5,2.0,1.0,-0.5,1.5", "--samples", "5"]
        assert run(argv) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("t,q1,q2")
        assert len(lines) == 6

    def test_traj_limit_violation(self, capsys) -> None:
        argv = ["traj", "--start", "0.2,0.3,-1.0,1.2,0.0,0.5,0.0", "--goal", "3.0,-0.5,0.5,2.0,1.0,-0.5,1.5"]
        assert run(argv) == 1
        assert error_report(capsys.readouterr().err)["error"] == "LimitViolation"


class TestSceneCommands:
    def test_heat_needs_appliance_on(self, fixtures_dir, capsys) -> None:
        argv = ["scene-check", str(fixtures_dir / "kitchen.scene"), "--action", "Heat", "--target", "apple", "--instrument", "microwave"]
        assert run(argv) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["allowed"] is False
        assert out["reason"] == "InstrumentOff"

    def test_unknown_action(self, fixtures_dir, capsys) -> None:
        argv = ["scene-check", str(fixtures_dir / "kitchen.scene"), "--action", "Juggle", "--target", "apple"]
        assert run(argv) == 2
        assert error_report(capsys.readouterr().err)["error"] == "InvalidValue"

    def test_consistency_csv(self, fixtures_dir, capsys) -> None:
        argv = [
            "scene-check",
            str(fixtures_dir / "lab_home.scene"),
            "--action",
            "Move",
            "--target",
            "fridge",
            "--digital",
            str(fixtures_dir / "lab_home_digital.scene"),
            "--format",
            "csv",
        ]
        assert run(argv) == 0
        assert capsys.readouterr().out.startswith("object,")

    def test_format_falls_back_to_settings_default(self, fixtures_dir, capsys) -> None:
        argv = [
            "scene-check",
            str(fixtures_dir / "lab_home.scene"),
            "--action",
            "Move",
            "--target",
            "fridge",
            "--digital",
            str(fixtures_dir / "lab_home_digital.scene"),
        ]
        assert run(argv) == 0
        out = json.loads(capsys.readouterr().out)
        assert "consistency" in out


class TestTwinCommands:
    def test_simulate_deterministic(self, fixtures_dir, capsys) -> None:
        argv = ["twin-simulate", str(fixtures_dir / "approach.twin")]
        assert run(argv) == 0
        first = capsys.readouterr().out
        assert run(argv) == 0
        assert capsys.readouterr().out == first
        assert len(first.strip().splitlines()) == 68

    def test_audit_written_log(self, fixtures_dir, tmp_path, capsys) -> None:
        log = tmp_path / "approach.ndjson"
        script = str(fixtures_dir / "approach.twin")
        assert run(["twin-simulate", script, "--output", str(log)]) == 0
        assert run(["twin-audit", "--script", script, "--log", str(log)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["synchronized"] is True
        assert out["messages_replayed"] == 68


class TestUsage:
    def test_version(self, capsys) -> None:
        assert run(["--version"]) == 0
        assert json.loads(capsys.readouterr().out) == {"name": "home-robot-twin", "version": "0.1.0"}

    def test_unknown_flag(self, capsys) -> None:
        assert run(["fk", "--joints", "0,0,0,0,0,0,0", "--bogus"]) == 2
        assert error_report(capsys.readouterr().err)["error"] == "UnknownFlag"

    @pytest.mark.parametrize(
        "extra",
        [
            ["--seed", "-1"],
            ["--seed", "abc"],
            ["--seed", str(2**64)],
            ["--format", "xml"],
        ],
    )
    def test_invalid_value(self, extra, capsys) -> None:
        assert run(["fk", "--joints", "0,0,0,0,0,0,0", *extra]) == 2
        assert error_report(capsys.readouterr().err)["error"] == "InvalidValue"

    def test_missing_subcommand(self, capsys) -> None:
        assert run([]) == 2
        assert error_report(capsys.readouterr().err)["error"] == "Usage"
