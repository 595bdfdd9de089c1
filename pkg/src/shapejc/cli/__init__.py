"""Configuration-driven command-line interface."""

from .commands import COMMANDS, CommandResult, RUNNERS
from .config import (
    ConfigError,
    InitialState,
    OutputSpec,
    ParseError,
    RunConfig,
    TimeGrid,
    UnknownKey,
    ValidationError,
    parse_config,
    serialize_config,
)
from .main import main
