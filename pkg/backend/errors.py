class EngineError(Exception):
    """Base class for engine failures."""


class DimensionMismatch(EngineError):
    def __init__(self, left: int, right: int):
        super().__init__(f"Dimension mismatch: {left} != {right}")
        self.left = left
        self.right = right


class PoleError(EngineError):
    """Raised when a printed coefficient has a vanishing denominator."""

    def __init__(self, expression: str, params: dict | None = None):
        params = params or {}
        detail = ", ".join(f"{k}={v}" for k, v in params.items())
        super().__init__(f"Pole: {expression} = 0 at {detail}")
        self.expression = expression
        self.params = params


class BudgetExceeded(EngineError):
    def __init__(self, terms: int, budget: int):
        super().__init__(f"Term budget exceeded: {terms} > {budget}")
        self.terms = terms
        self.budget = budget


class SamplePointError(EngineError):
    """Raised for singular points or points whose norm is not rational."""


class NotInSpaceError(EngineError):
    """Raised when an input is not harmonic, monogenic or homogeneous as required."""


class UnknownVariable(EngineError):
    pass


class SingularGramError(EngineError):
    pass
