# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Shared module for the command registry and the worker cap

"""
Shared module holding process-wide state.
Command modules register themselves here on import, and numerical modules read the
worker cap from here, so neither side has to import main.py.
"""

# Standard library imports
from dataclasses import dataclass
from typing import Callable, Optional

# Local imports
from config.vars import DEFAULT_THREADS


@dataclass(frozen=True)
class Command:
    name: str
    description: str
    handler: Callable  # handler(config, out_dir) -> dict report


COMMANDS: dict[str, Command] = {}

# Worker cap (set from --threads during startup)
_threads: Optional[int] = None


def register_command(name: str, description: str) -> Callable:
    """
    Decorator registering an experiment handler as a CLI subcommand.

    Args:
        name: Subcommand name, also the scenario kind
        description: One-line help text

    Returns:
        The decorator
    """
    def decorator(func: Callable) -> Callable:
        if name in COMMANDS:
            raise RuntimeError(f"Command '{name}' registered twice.")
        COMMANDS[name] = Command(name=name, description=description, handler=func)
        return func
    return decorator


def get_command(name: str) -> Command:
    """
    Get a registered command.
    Raises KeyError if no module registered it.
    """
    if name not in COMMANDS:
        raise KeyError(f"Unknown command '{name}'. Known: {', '.join(sorted(COMMANDS))}")
    return COMMANDS[name]


def set_threads(count: int) -> None:
    """Set the global worker cap. Should only be called by main.py or the runner."""
    global _threads
    if count < 1:
        raise ValueError("Thread count must be at least 1.")
    _threads = count


def get_threads() -> int:
    """Get the worker cap, falling back to DEFAULT_THREADS."""
    return _threads if _threads is not None else DEFAULT_THREADS
