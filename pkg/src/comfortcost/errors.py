"""Exception hierarchy shared by every module."""


class ComfortCostError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ComfortCostError, ValueError):
    pass


class DegenerateInputError(InvalidInputError):
    pass


class OutOfDomainError(InvalidInputError):
    pass


class InvalidConfigError(InvalidInputError):
    pass


class InvalidContextError(InvalidInputError):
    pass


class InvalidModelError(InvalidInputError):
    pass


class NoOverlapError(InvalidInputError):
    pass


class UnknownPartialError(ComfortCostError, KeyError):
    def __init__(self, cost_id):
        super().__init__(cost_id)
        self.cost_id = cost_id

    def __str__(self):
        return f"unknown partial cost {self.cost_id!r}"


class MissingContextError(ComfortCostError):
    """A partial needs context that the caller did not provide.

    ``cost_ids`` names the partials that could not be evaluated.
    """

    def __init__(self, message, cost_ids=()):
        super().__init__(message)
        self.cost_ids = tuple(cost_ids)


class CostExprError(ComfortCostError, ValueError):
    """Malformed cost expression; carries the character offset of the problem."""

    def __init__(self, text, position, reason):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at position {position}: {text!r}")


class CatalogLookupError(ComfortCostError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no named cost function {self.name!r}"


class NoFeasibleCandidateError(ComfortCostError):
    def __init__(self, reports):
        self.reports = list(reports)
        super().__init__(f"none of {len(self.reports)} candidates is feasible")
