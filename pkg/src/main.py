# Shared setup for the command-line tools

import os
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from rich.console import Console
from rich.logging import RichHandler

from .errors import (ConfigError, EmptyObservationError, RankChainError, ShapeMismatchError,
                      SolverDivergenceError, TensorFormatError)
from .run_config import DEFAULT_CONFIG_FILE, load_base_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_SHAPE = 3
EXIT_DIVERGED = 4

console = Console(stderr=True)


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """config.yaml from the given path, the working directory or the project root"""
    if path and os.path.exists(path):
        return load_base_config(path)
    if path and path != DEFAULT_CONFIG_FILE:
        raise FileNotFoundError(f"Config file not found: {path}")
    for candidate in (Path(DEFAULT_CONFIG_FILE), Path(__file__).parent.parent / DEFAULT_CONFIG_FILE):
        if candidate.exists():
            return load_base_config(str(candidate))
    return {}


def setup_logging(config: Dict[str, Any], verbose: bool = False, quiet: bool = False):
    """Rich console logging plus an optional log file from the `logging` section"""
    settings = config.get('logging', {}) or {}
    level = 'DEBUG' if verbose else ('WARNING' if quiet else settings.get('level', 'INFO'))
    handlers = [RichHandler(console=console, show_path=False)]
    log_file = settings.get('file')
    if log_file:
        os.makedirs(os.path.dirname(log_file) or '.', exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        handlers.append(file_handler)
    logging.basicConfig(
        level=level,
        format='%(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        handlers=handlers,
        force=True,
    )
    logger = logging.getLogger()
    logger.setLevel(level)
    return logger


def exit_code_for(error: BaseException) -> int:
    """Map library exceptions to the documented exit codes"""
    if isinstance(error, SolverDivergenceError):
        return EXIT_DIVERGED
    if isinstance(error, (ShapeMismatchError, RankChainError)):
        return EXIT_SHAPE
    if isinstance(error, (ConfigError, TensorFormatError, EmptyObservationError, ValueError,
                          FileNotFoundError)):
        return EXIT_PARSE
    return EXIT_FAILURE
