"""Exception hierarchy. Every error carries the CLI exit code it maps to."""


class LaplaceForgeError(Exception):
    exit_code = 3
    kind = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def record(self) -> dict:
        return {
            "error": self.kind,
            "message": str(self),
            "exit_code": self.exit_code,
            **self.details,
        }


class UsageError(LaplaceForgeError):
    exit_code = 1
    kind = "usage"


class StorageError(LaplaceForgeError, OSError):
    exit_code = 2
    kind = "io"


# ---------- numeric failures ----------

class NumericError(LaplaceForgeError, ArithmeticError):
    exit_code = 3
    kind = "numeric"


class ConvergenceError(NumericError):
    kind = "non-convergence"


class NearZeroFrequencyError(NumericError):
    kind = "near-zero-frequency"


class PoleProximityError(NumericError):
    kind = "pole-proximity"


class DivergentSeriesError(NumericError):
    kind = "divergent-series"


class OverflowGuardError(NumericError):
    kind = "overflow"


class RankDeficientError(NumericError):
    kind = "rank-deficient"


class InsufficientZerosError(NumericError):
    kind = "insufficient-zeros"


# ---------- invalid inputs ----------

class InvalidInputError(LaplaceForgeError, ValueError):
    exit_code = 3
    kind = "invalid-input"


class InvalidWindowError(InvalidInputError):
    kind = "invalid-window"


class InvalidSignalError(InvalidInputError):
    kind = "invalid-signal"


class InvalidPartitionError(InvalidInputError):
    kind = "invalid-partition"


class EmptyOverlapError(InvalidInputError):
    kind = "empty-overlap"
