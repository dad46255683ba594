"""Exception types shared across the toolkit."""


class HeatsymError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HeatsymError):
    """Evaluation requested outside the mathematical domain of a form."""


class UnsupportedFormError(HeatsymError):
    """Operation not available for this function form or map shape."""


class ConstraintError(HeatsymError):
    """A structural constraint (form closure, scale compatibility) is violated."""


class SingularTransformError(HeatsymError):
    """A transformation is degenerate at the requested point (zero Jacobian, pole)."""


class BracketError(HeatsymError):
    """Root bracketing failed; carries diagnostics in the message."""


class SolverAbort(HeatsymError):
    """A numerical run was aborted (step underflow, loss of positivity)."""


class SpecFileError(HeatsymError):
    """A problem-specification file could not be parsed."""
