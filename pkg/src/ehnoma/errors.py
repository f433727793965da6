"""Exception hierarchy shared by all modules."""


class EhnomaError(Exception):
    """Base class."""


class DomainError(EhnomaError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(EhnomaError, ValueError):
    """One or more parameters failed validation.

    ``fields`` lists every offending field name.
    """

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        self.fields = list(self.problems)
        msg = "; ".join(f"{k}: {v}" for k, v in self.problems.items())
        super().__init__(f"invalid parameters: {msg}")


class UnsupportedModelError(EhnomaError, ValueError):
    """The requested closed form does not exist for this fading model."""


class ConsistencyError(EhnomaError, ArithmeticError):
    """A closed form produced a value outside [0, 1] beyond rounding slack."""
