"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range user input: files, flags, or fields."""


class NoValidDesignError(RuntimeError):
    """A search exhausted its sample budget without one in-budget design."""

    def __init__(self, message, best_report=None):
        super().__init__(message)
        self.best_report = best_report
