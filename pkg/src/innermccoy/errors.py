"""Exception hierarchy shared by all modules."""


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class ConstructionError(WorkbenchError):
    """A ring, shape or presentation could not be built (e.g. non-associative table)."""


class InvalidModulus(ConstructionError):
    pass


class RingMismatch(WorkbenchError):
    """Operands belong to rings with different ids."""


class InadmissiblePosition(WorkbenchError):
    """Matrix cell not allowed by the ring's shape."""


class BudgetExceeded(WorkbenchError):
    """Enumeration, basis or solver budget would be exceeded."""


class DegreeBudgetError(BudgetExceeded):
    """A product in a truncated graded ring left the retained degree range."""


class RewriteBudgetError(BudgetExceeded):
    """Reduction did not terminate within the step budget."""


class HypothesisViolation(WorkbenchError):
    """Inputs to a witness lifter do not satisfy the construction's hypotheses."""


class LiftFailure(WorkbenchError):
    """A lifted witness did not inner-annihilate when replayed."""


class DSLSyntaxError(WorkbenchError, ValueError):
    """Malformed ring specification or polynomial text."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        self.text = text
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
