"""Source modules for the home-service robot twin toolkit."""

PROJECT_NAME = "home-robot-twin"
__version__ = "0.1.0"
