"""Shared exception types."""


class GuardExceeded(RuntimeError):
    """A work-size guard was exceeded before any summation started.

    Carries the offending size and the configured limit so callers (and the
    CLI) can report actionable numbers.
    """

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what}: {size} exceeds guard {limit}")
        self.what = what
        self.size = size
        self.limit = limit
