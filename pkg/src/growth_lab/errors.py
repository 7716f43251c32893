class GrowthLabError(Exception):
    """Base class for errors raised by growth_lab."""


class CapabilityError(GrowthLabError):
    """An input is valid in principle but too large for the exact method."""


class AuditFailure(GrowthLabError):
    """An exact check that must hold by construction did not hold.

    These are never caught internally: a failure means either a bug or a
    counterexample to the mathematics being audited, and both need a human.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        detail = ", ".join(f"{k}={v!r}" for k, v in sorted(self.diagnostics.items()))
        return f"{base} ({detail})"
