from django.core.management.base import CommandError

from geomopt.exceptions import (
    CapacityError,
    ConfigValidationError,
    GeometryOptimizationError,
)

EXIT_CODES = {
    'validation': 2,
    'capacity': 3,
    'numerical': 4,
}


def exit_code_for(exc):
    return EXIT_CODES.get(getattr(exc, 'category', 'validation'), 1)


def command_error_for(exc):
    """
    Convert a domain exception into a CommandError carrying the exit code.

    Capacity errors are surfaced verbatim; config violations are listed one
    per line.
    """
    if isinstance(exc, ConfigValidationError):
        return CommandError(str(exc), returncode=EXIT_CODES['validation'])

    if isinstance(exc, CapacityError):
        return CommandError(str(exc), returncode=EXIT_CODES['capacity'])

    if isinstance(exc, GeometryOptimizationError):
        return CommandError(
            f"{type(exc).__name__}: {exc}", returncode=exit_code_for(exc)
        )

    return CommandError(str(exc))
