"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, field values, or cross-field constraints.

    Messages name the offending field/constraint so CLI diagnostics can
    surface them verbatim (exit code 2).
    """


class OutOfDomainError(ConfigurationError):
    """A position falls outside the grid's bounding box."""


class InstabilityError(RuntimeError):
    """A non-finite sample was produced during time stepping."""

    def __init__(self, step_index: int, message: str | None = None):
        self.step_index = step_index
        super().__init__(
            message or f"non-finite value detected at step {step_index}"
        )


class FormatError(ValueError):
    """Malformed binary container; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class IntegrityError(RuntimeError):
    """A stored file does not match its recorded checksum."""
