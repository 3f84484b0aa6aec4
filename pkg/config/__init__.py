"""Configuration module for the home-service robot twin toolkit."""

from .settings import Settings, load_settings, get_settings
from .robots import (
    TIAGO_ARM_DH_ROWS,
    TIAGO_ARM_CHAIN_NAME,
    TIAGO_PHYSICAL_DIMENSIONS,
    TIAGO_DIGITAL_DIMENSIONS,
    LAB_HOME_PHYSICAL_XY,
    LAB_HOME_DIGITAL_XY,
)

__all__ = [
    "Settings",
    "load_settings",
    "get_settings",
    "TIAGO_ARM_DH_ROWS",
    "TIAGO_ARM_CHAIN_NAME",
    "TIAGO_PHYSICAL_DIMENSIONS",
    "TIAGO_DIGITAL_DIMENSIONS",
    "LAB_HOME_PHYSICAL_XY",
    "LAB_HOME_DIGITAL_XY",
]
