"""Community-based association rule mining for categorical data."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    DataError,
    InvariantError,
    StageError,
    __doc__,
)

__all__ = [name for name in dir() if not name.startswith("_")]
