"""Exception hierarchy shared by the library, the CLI and the HTTP service.

Each class carries the process exit code the CLI uses for it.
"""

from __future__ import annotations


class PhotodistillError(ValueError):
    exit_code = 1


class InvalidInputError(PhotodistillError):
    exit_code = 2


class ReconstructionError(InvalidInputError):
    """Amplitudes admit no consistent set of phases."""

    def __init__(self, message: str, triple: tuple[float, float, float] | None = None):
        super().__init__(message)
        self.triple = triple


class NoHeraldError(PhotodistillError):
    exit_code = 3


class ConvergenceError(PhotodistillError):
    exit_code = 4

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class AboveThresholdError(PhotodistillError):
    exit_code = 5
