"""Exception types shared across the package."""


class HearthkitError(Exception):
    code = "error"
    exit_code = 2

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "location": self.location}


class ValidationError(HearthkitError):
    """Malformed or inconsistent input data."""

    code = "validation"
    exit_code = 1


class PreconditionError(HearthkitError):
    code = "precondition"


class SizeBoundError(HearthkitError):
    code = "size-bound"


class NotSemistableError(PreconditionError):
    code = "not-semistable"


class PhaseMismatchError(PreconditionError):
    code = "phase-mismatch"


class NotInHeartError(PreconditionError):
    code = "not-in-heart"


class StabilizationError(HearthkitError):
    code = "no-stabilization"


class WindowError(HearthkitError):
    code = "window-too-small"
