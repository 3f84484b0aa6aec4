"""
Home-Service Robot Digital Twin Toolkit

Command-line entry point for URDF inspection, arm kinematics, particle swarm
inverse kinematics, trajectory planning, household scene checks and
physical/digital twin synchronization.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import run


def main() -> int:
    """Main application entry point."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
