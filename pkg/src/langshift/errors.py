"""Exception types shared across the toolkit."""


class LangShiftError(Exception):
    """Base class for toolkit errors."""


class InvalidParams(LangShiftError, ValueError):
    """Thresholds out of range, or a checker called outside its domain."""


class PatternFormatError(LangShiftError, ValueError):
    """Malformed pattern text. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NonQuiescentBackground(LangShiftError):
    """Background state does not map to itself under the active thresholds."""


class BudgetExhausted(LangShiftError):
    """A search ran out of nodes. ``partial`` carries whatever was built so far."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class TooLarge(LangShiftError):
    """Instance exceeds the brute-force oracle's ceiling."""
