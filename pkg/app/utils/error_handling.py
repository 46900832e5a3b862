"""
Error handling utilities for the plane Lie algebra toolkit.
"""

import functools
import logging
from typing import Any, Callable, Tuple, TypeVar

logger = logging.getLogger(__name__)

# Define a generic type for the return value of the decorated function
T = TypeVar('T')

# Exit codes of the command-line front end
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3


# Custom exceptions
class PlaneAlgebraError(Exception):
    """Base exception for every error raised by the toolkit."""
    pass


class UsageError(PlaneAlgebraError):
    """Exception raised when a command line cannot be parsed."""
    pass


class InvalidArgumentError(PlaneAlgebraError, ValueError):
    """Exception raised when an operation is called outside its preconditions."""
    pass


class DegreeCapError(InvalidArgumentError):
    """Exception raised when a degree cap is too small for the requested input."""
    pass


class OriginInTupleError(InvalidArgumentError):
    """Exception raised when a point tuple contains the origin."""
    pass


class DuplicatePointsError(InvalidArgumentError):
    """Exception raised when a point tuple repeats a point."""
    pass


class InterpolationError(InvalidArgumentError):
    """Exception raised when interpolation nodes violate the separation hypothesis."""
    pass


class IllDefinedDerivationError(InvalidArgumentError):
    """Exception raised when a derivation does not preserve the defining ideal."""
    pass


class NotLocallyNilpotentError(PlaneAlgebraError):
    """Exception raised when an exponential series does not terminate."""
    pass


def require(condition: bool, message: str, error: type = InvalidArgumentError) -> None:
    """
    Raise ``error(message)`` unless ``condition`` holds.

    Args:
        condition: The precondition to check
        message: Stable message naming the offending argument
        error: Exception class to raise
    """
    if not condition:
        raise error(message)


def exit_status_for(error: BaseException) -> int:
    """Map an exception to the exit code of the command-line front end."""
    if isinstance(error, UsageError):
        return EXIT_USAGE
    if isinstance(error, PlaneAlgebraError):
        return EXIT_PRECONDITION
    raise error


def translate_errors(
    render_error: Callable[[str], str]
) -> Callable[[Callable[..., Tuple[int, str]]], Callable[..., Tuple[int, str]]]:
    """
    Turn toolkit exceptions raised by a command handler into an exit status.

    Args:
        render_error: Formats an error message for output

    Returns:
        Decorator function
    """
    def decorator(func: Callable[..., Tuple[int, str]]) -> Callable[..., Tuple[int, str]]:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Tuple[int, str]:
            try:
                return func(*args, **kwargs)
            except PlaneAlgebraError as e:
                status = exit_status_for(e)
                logger.info("%s failed with status %d: %s", func.__name__, status, e)
                return status, render_error(str(e))

        return wrapper

    return decorator
