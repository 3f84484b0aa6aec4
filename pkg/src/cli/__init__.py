"""Command-line interface."""

from typing import List, Optional
import json
import logging
import sys

from config.settings import load_settings
from src.errors import DomainError
from .commands import HANDLERS
from .parser import CliUsageError, TwinArgumentParser, build_parser

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _report(payload: dict) -> None:
    print(json.dumps(payload), file=sys.stderr)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, dispatch the subcommand and map failures to exit codes.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        0 on success, 1 on domain errors, 2 on usage errors
    """
    try:
        settings = load_settings()
    except ValueError as e:
        _report({"error": "InvalidConfig", "subject": None, "detail": str(e)})
        return 1

    logging.basicConfig(level=settings.app.log_level, format=LOG_FORMAT, stream=sys.stderr)

    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
        return HANDLERS[args.command](args, settings)
    except CliUsageError as e:
        _report(e.to_dict())
        return 2
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except DomainError as e:
        logger.error(f"{e.code}: {e.detail}")
        _report(e.to_dict())
        return 1
    except OSError as e:
        logger.error(f"I/O error: {e}")
        _report({"error": "IoError", "subject": getattr(e, "filename", None), "detail": e.strerror or str(e)})
        return 1


__all__ = ["run", "build_parser", "CliUsageError", "TwinArgumentParser"]
