"""Exception hierarchy shared by all modules."""


class DlabError(Exception):
    """Base class for library errors."""


class UnknownConstant(DlabError, KeyError):
    pass


class IndeterminateSign(DlabError):
    """The enclosure still contains 0 at the precision cap."""

    def __init__(self, message: str = "sign undecided at precision cap", precision: int | None = None):
        super().__init__(message)
        self.precision = precision


class DimensionMismatch(DlabError, ValueError):
    pass


class ZeroForm(DlabError, ValueError):
    pass


class VanishingForm(DlabError, ValueError):
    """A form value is exactly zero where a logarithm is needed."""


class DegreeMismatch(DlabError, ValueError):
    pass


class InvalidSpec(DlabError, ValueError):
    pass


class SingularSystem(DlabError, ValueError):
    pass


class InconsistentExponents(DlabError, ValueError):
    pass


class InvalidKappa(DlabError, ValueError):
    pass


class InvalidDegrees(DlabError, ValueError):
    pass


class InvalidDelta(DlabError, ValueError):
    pass


class NoPointFound(DlabError):
    pass


class SearchBudgetExceeded(DlabError):
    def __init__(self, size: int, budget: int):
        super().__init__(f"search box has {size} points, budget is {budget}")
        self.size = size
        self.budget = budget


class NoPivot(DlabError):
    pass


class ChainStepFailed(DlabError):
    def __init__(self, step: str, detail: str = ""):
        super().__init__(f"proof chain step ({step}) failed" + (f": {detail}" if detail else ""))
        self.step = step
