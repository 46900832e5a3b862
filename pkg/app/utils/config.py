"""
Environment-driven settings for the plane Lie algebra toolkit.
"""

import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

logger = logging.getLogger(__name__)

# Try to import dotenv, but handle the case where it might not be available
try:
    from dotenv import load_dotenv
    # Load environment variables from .env file
    load_dotenv()
except ImportError:
    print("Warning: python-dotenv not installed. Environment variables must be set manually.", file=sys.stderr)

LOG_LEVEL_VAR = "PLANE_LIE_LOG_LEVEL"
CACHE_SIZE_VAR = "PLANE_LIE_CACHE_SIZE"
SEED_VAR = "PLANE_LIE_SEED"

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class Settings:
    """Runtime settings; every field has a default so no variable is required."""
    log_level: str = "WARNING"
    cache_size: int = 256
    default_seed: int = 0


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring malformed %s=%r, using %d", name, raw, default)
        return default


def get_settings() -> Settings:
    """
    Read the settings from the environment.

    Returns:
        Settings populated from PLANE_LIE_* variables or their defaults
    """
    level = os.environ.get(LOG_LEVEL_VAR, Settings.log_level).upper()
    if not isinstance(logging.getLevelName(level), int):
        logger.warning("Ignoring unknown log level %r", level)
        level = Settings.log_level
    return Settings(
        log_level=level,
        cache_size=max(1, _int_from_env(CACHE_SIZE_VAR, Settings.cache_size)),
        default_seed=_int_from_env(SEED_VAR, Settings.default_seed),
    )


def configure_logging(level: Optional[str] = None) -> None:
    """
    Configure the root logger once; logs go to stderr so stdout stays reproducible.

    Args:
        level: Explicit level name, overriding PLANE_LIE_LOG_LEVEL
    """
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
