"""
Error handling and exit codes for HyperBit CLI.
Implements distinct POSIX exit codes and structured error responses.
"""

from enum import IntEnum
from typing import Optional


class ExitCode(IntEnum):
    """Exit codes for HyperBit CLI"""

    SUCCESS = 0  # Command completed successfully
    GENERAL_ERROR = 1  # General error condition
    INVALID_USAGE = 2  # Invalid command line usage
    CONFIG_ERROR = 3  # Invalid configuration file or flags
    IO_ERROR = 4  # File system error
    NUMERIC_TRAP = 5  # Fixed-point overflow under the trap policy
    ACCEPTANCE_FAILED = 6  # Acceptance-mode test run missed its floor
    INSUFFICIENT_DATA = 7  # Not enough bits for the requested analysis
    VALIDATION_ERROR = 8  # Invalid argument to a domain operation


class HyperBitError(Exception):
    """Base exception with structured error information"""

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        suggestion: Optional[str] = None,
        exit_code: int = ExitCode.GENERAL_ERROR,
    ):
        self.message = message
        self.code = code or "GENERAL_ERROR"
        self.suggestion = suggestion
        self.exit_code = exit_code
        super().__init__(message)


class ConfigError(HyperBitError):
    """Invalid or unreadable configuration"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code="CONFIG_ERROR",
            suggestion=suggestion or "Run 'hyperbit config' to inspect the effective settings",
            exit_code=ExitCode.CONFIG_ERROR,
        )


class ValidationError(HyperBitError):
    """Invalid argument to a domain operation"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code="VALIDATION_ERROR",
            suggestion=suggestion or "Check the argument ranges in the command help",
            exit_code=ExitCode.VALIDATION_ERROR,
        )


class ExportError(HyperBitError):
    """File system operation error"""

    def __init__(self, message: str, suggestion: Optional[str] = None):
        super().__init__(
            message=message,
            code="IO_ERROR",
            suggestion=suggestion or "Check file system permissions and disk space",
            exit_code=ExitCode.IO_ERROR,
        )


class NumericTrapError(HyperBitError):
    """Fixed-point overflow detected while the trap policy is active"""

    def __init__(
        self,
        operation: str,
        raw: int,
        step: Optional[int] = None,
    ):
        self.operation = operation
        self.raw = raw
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            message=f"Fixed-point overflow in {operation}{where} (raw result {raw})",
            code="NUMERIC_TRAP",
            suggestion="Use --overflow wrap or saturate, or pick a bounded initial condition",
            exit_code=ExitCode.NUMERIC_TRAP,
        )

    def at_step(self, step: int) -> "NumericTrapError":
        """Return a copy of this trap tagged with the trajectory step index"""
        return NumericTrapError(self.operation, self.raw, step)


class FixedPointOverflow(NumericTrapError):
    """Operation-level overflow raised by the fixed-point kernels"""


class DivergenceError(HyperBitError):
    """Trajectory left the bounded region"""

    def __init__(self, time: float, norm: float):
        self.time = time
        self.norm = norm
        super().__init__(
            message=f"Trajectory diverged at t={time:.2f} (norm {norm:.3g})",
            code="DIVERGENCE",
            suggestion="Initial conditions with c > 0.92 are unbounded",
            exit_code=ExitCode.NUMERIC_TRAP,
        )


class InsufficientBitsError(HyperBitError):
    """Not enough input bits for the requested analysis"""

    def __init__(self, required: int, available: int, what: str = "bits"):
        self.required = required
        self.available = available
        super().__init__(
            message=f"Insufficient {what}: {required} required, {available} available",
            code="INSUFFICIENT_DATA",
            suggestion="Generate more bits or lower --sequences/--length",
            exit_code=ExitCode.INSUFFICIENT_DATA,
        )


class LengthMismatchError(ValidationError):
    """Bit sequences that must be aligned have different lengths"""


class PreconditionError(ValidationError):
    """Statistical test called outside its documented domain"""


class AcceptanceError(HyperBitError):
    """Acceptance-mode run did not meet its threshold"""

    def __init__(self, message: str):
        super().__init__(
            message=message,
            code="ACCEPTANCE_FAILED",
            suggestion="Inspect the per-test table with --pretty",
            exit_code=ExitCode.ACCEPTANCE_FAILED,
        )


def handle_command_error(error: Exception) -> int:
    """Convert exceptions to appropriate exit codes"""
    if isinstance(error, HyperBitError):
        return error.exit_code
    elif isinstance(error, KeyboardInterrupt):
        return ExitCode.GENERAL_ERROR
    elif isinstance(error, (FileNotFoundError, PermissionError, OSError)):
        return ExitCode.IO_ERROR
    else:
        return ExitCode.GENERAL_ERROR


def format_error(error: HyperBitError) -> dict:
    """Format error consistently for JSON output"""
    error_data = {"success": False, "error": error.message, "code": error.code}

    if error.suggestion:
        error_data["suggestion"] = error.suggestion

    return error_data
