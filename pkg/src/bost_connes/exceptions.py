"""Exception and warning types raised across the package."""


class FieldError(ValueError):
    """Invalid field specification (non-squarefree or degenerate m)."""


class IdealError(ValueError):
    """Invalid ideal input: mixed fields, zero ideal, coprimality violated."""


class BoundExhaustedError(ValueError):
    """Ideal enumeration reached its hard cap before finding every class."""


class VerificationError(AssertionError):
    """A proved identity failed. Carries the check id and a counterexample."""

    def __init__(self, check_id: str, message: str, witness=None):
        super().__init__(f"[{check_id}] {message}")
        self.check_id = check_id
        self.witness = witness


class DeviationWarning(UserWarning):
    """An audited (not proved) claim failed on a concrete case."""
