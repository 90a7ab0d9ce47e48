"""Exception hierarchy shared by every heightlab module."""


class HeightlabError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class ParseError(HeightlabError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class ZeroPolynomialError(HeightlabError):
    pass


class NotDivisibleError(HeightlabError):
    pass


class RootFindingError(HeightlabError):
    pass


class SamplingError(HeightlabError):
    pass


class PoleError(HeightlabError):
    pass


class PolarizationError(HeightlabError):
    pass


class CurveError(HeightlabError):
    pass


class BudgetExceededError(HeightlabError):
    def __init__(self, cardinality, budget):
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(
            f"search space of {cardinality} tuples exceeds budget {budget}"
        )
