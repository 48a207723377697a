"""Plasmon-dressed states of a quantum emitter next to a metal nanosphere."""

__version__ = "0.1.0"

from .api import Command, PlasmonStudy, run_command
from .core.config import RunConfig, load_config, parse_config

__all__ = ["Command", "PlasmonStudy", "RunConfig", "load_config", "parse_config", "run_command"]
