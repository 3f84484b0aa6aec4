"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from config.settings import get_settings
from src.environment.scene_io import load_scene_file
from src.robot.kinematics import tiago_chain
from src.robot.urdf import load_urdf

PROJECT_ROOT = Path(__file__).parent.parent
FIXTURES_DIR = PROJECT_ROOT / get_settings().app.fixtures_directory


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def chain():
    return tiago_chain()


@pytest.fixture
def tiago_model():
    return load_urdf(FIXTURES_DIR / "tiago_arm.urdf")


@pytest.fixture
def two_link_model():
    return load_urdf(FIXTURES_DIR / "two_link.urdf")


@pytest.fixture
def kitchen():
    return load_scene_file(FIXTURES_DIR / "kitchen.scene")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
