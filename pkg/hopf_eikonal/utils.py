import logging
import math
import os
import sys
from functools import wraps

import click
import numpy as np

from hopf_eikonal import (
    config,
    EXIT_DOMAIN,
    EXIT_TOLERANCE,
    EXIT_TRACE,
    EXIT_LINKING,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class HopfError(Exception):
    def __init__(self, message, exit_code=EXIT_DOMAIN):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code


class DomainError(HopfError):
    """Invalid input or a point where the requested quantity is undefined"""

    def __init__(self, message):
        super().__init__(message, EXIT_DOMAIN)


class SingularityError(DomainError):
    """Base for evaluation at a singular locus of a field"""


class DegeneratePointError(SingularityError):
    pass


class NearFocalCircleError(SingularityError):
    pass


class AxisDegeneracyError(SingularityError):
    pass


class ZeroModulusError(SingularityError):
    pass


class PoleError(SingularityError):
    pass


class InversionSingularityError(SingularityError):
    pass


class DegenerateJacobianError(SingularityError):
    pass


class StencilError(DomainError):
    pass


class EmptySampleError(DomainError):
    pass


class ToleranceError(HopfError):
    def __init__(self, message):
        super().__init__(message, EXIT_TOLERANCE)


class TraceError(HopfError):
    def __init__(self, message):
        super().__init__(message, EXIT_TRACE)


class LinkingError(HopfError):
    def __init__(self, message):
        super().__init__(message, EXIT_LINKING)


def setting(name, value=None):
    """Return value, or the configured default for name when value is None."""
    return config[name] if value is None else value


def worker_count():
    """Number of worker threads, HOPF_EIKONAL_THREADS taking precedence over THREADS"""
    raw = os.environ.get("HOPF_EIKONAL_THREADS")
    if raw is None:
        return max(1, int(config["THREADS"]))
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"HOPF_EIKONAL_THREADS should be an integer, got {raw!r}")


def reduce_angle(angle):
    reduced = math.fmod(angle, TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if reduced >= TWO_PI else reduced


def wrap_angle(angle):
    """Map an angle difference to (-pi, pi]"""
    wrapped = math.remainder(angle, TWO_PI)
    return math.pi if wrapped == -math.pi else wrapped


def unit(vector):
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise DegenerateJacobianError("Cannot normalise a zero vector")
    return vector / norm


def reports_errors(func):
    """Click decorator turning library errors into a stderr message and a process exit code.

    Args:
        func (Callable): Command callback to be decorated

    Returns:
        [Callable]: Decorated callback, which exits with the error's exit code on failure
    """

    @wraps(func)
    def decorated_func(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except HopfError as error:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"Error: {error.message}", err=True)
            sys.exit(error.exit_code)
        except AssertionError as error:  # validators on the domain types
            click.echo(f"Error: {' '.join(str(arg) for arg in error.args)}", err=True)
            sys.exit(EXIT_DOMAIN)

    return decorated_func


class ClickEchoHandler(logging.Handler):
    """Logging handler that writes through click.echo to stderr, resolving the stream at emit time"""

    def emit(self, record):
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def install_log_handler(level):
    package_logger = logging.getLogger("hopf_eikonal")
    if not any(isinstance(handler, ClickEchoHandler) for handler in package_logger.handlers):
        handler = ClickEchoHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        package_logger.addHandler(handler)
    package_logger.setLevel(level)
