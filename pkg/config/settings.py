"""Configuration settings for the home-service robot twin toolkit."""

import os
from dataclasses import dataclass, field
from typing import Literal, Optional
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Output format type
OutputFormat = Literal["json", "csv"]


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, repr(default)))


@dataclass
class SwarmSettings:
    """Particle swarm IK configuration settings."""

    particle_count: int = field(default_factory=lambda: _env_int("TWIN_IK_PARTICLES", 50))
    max_iterations: int = field(default_factory=lambda: _env_int("TWIN_IK_ITERATIONS", 200))
    velocity_clamp_fraction: float = field(default_factory=lambda: _env_float("TWIN_IK_VELOCITY_CLAMP", 0.2))

    # Quadratic schedule endpoints: W falls, C1 rises, C2 falls
    w_start: float = 0.9
    w_end: float = 0.4
    c1_start: float = 1.5
    c1_end: float = 2.5
    c2_start: float = 2.5
    c2_end: float = 1.5

    # Shoulder joints are cheap to move, wrist joints expensive
    joint_weights: tuple = (1.0, 0.5, 0.5, 0.1, 0.1, 0.1, 0.1)

    # Acceptance tolerances used for the converged flag
    position_tolerance: float = 0.005  # meters
    pose_tolerance: float = 0.05  # radians

    # Flexibility only separates joint vectors with near-equal pose error
    flexibility_scale: float = field(default_factory=lambda: _env_float("TWIN_IK_FLEX_SCALE", 1e-4))


@dataclass
class TrajectorySettings:
    """Trajectory sampling settings."""

    sample_rate_hz: float = 10.0
    default_sample_count: int = 101


@dataclass
class TwinSettings:
    """Physical/digital synchronization settings."""

    translate_steps: int = field(default_factory=lambda: _env_int("TWIN_TRANSLATE_STEPS", 10))
    rotate_steps: int = field(default_factory=lambda: _env_int("TWIN_ROTATE_STEPS", 5))
    step_ms: int = 100


@dataclass
class CliSettings:
    """Command-line defaults."""

    default_seed: int = field(default_factory=lambda: _env_int("TWIN_DEFAULT_SEED", 20231019))
    default_format: OutputFormat = "json"


@dataclass
class AppSettings:
    """Application-level settings."""

    log_level: str = field(default_factory=lambda: os.getenv("TWIN_LOG_LEVEL", "WARNING").upper())
    fixtures_directory: str = field(default_factory=lambda: os.getenv("TWIN_FIXTURES_DIR", "data/fixtures"))


@dataclass
class Settings:
    """Main settings container."""

    swarm: SwarmSettings = field(default_factory=SwarmSettings)
    trajectory: TrajectorySettings = field(default_factory=TrajectorySettings)
    twin: TwinSettings = field(default_factory=TwinSettings)
    cli: CliSettings = field(default_factory=CliSettings)
    app: AppSettings = field(default_factory=AppSettings)

    def get_validation_errors(self) -> list[str]:
        """Get list of validation errors."""
        errors = []

        if self.swarm.particle_count < 2:
            errors.append(f"TWIN_IK_PARTICLES must be >= 2, got {self.swarm.particle_count}")
        if self.swarm.max_iterations < 1:
            errors.append(f"TWIN_IK_ITERATIONS must be >= 1, got {self.swarm.max_iterations}")
        if not 0.0 < self.swarm.velocity_clamp_fraction <= 1.0:
            errors.append(
                f"TWIN_IK_VELOCITY_CLAMP must be in (0, 1], got {self.swarm.velocity_clamp_fraction}"
            )
        if not self.swarm.flexibility_scale >= 0.0:
            errors.append(f"TWIN_IK_FLEX_SCALE must be >= 0, got {self.swarm.flexibility_scale}")
        if self.twin.translate_steps < 1 or self.twin.rotate_steps < 1:
            errors.append("TWIN_TRANSLATE_STEPS and TWIN_ROTATE_STEPS must be >= 1")
        if self.app.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"Invalid TWIN_LOG_LEVEL: {self.app.log_level}")

        return errors


# Global settings instance
_settings: Optional[Settings] = None


def load_settings() -> Settings:
    """
    Load and return application settings.

    Returns:
        Settings instance

    Raises:
        ValueError: If the environment holds invalid values
    """
    global _settings

    if _settings is None:
        _settings = Settings()

    errors = _settings.get_validation_errors()
    if errors:
        raise ValueError(f"Configuration errors: {', '.join(errors)}")

    return _settings


def get_settings() -> Settings:
    """
    Get the current settings instance without validation.

    Returns:
        Settings instance
    """
    global _settings

    if _settings is None:
        _settings = Settings()

    return _settings
