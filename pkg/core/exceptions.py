"""
Typed errors shared by every app.

Operations that produce a verdict never raise for a negative outcome; these
exceptions are reserved for inputs outside an operation's domain and for
searches that run out of budget.
"""


class K3EquivariantError(Exception):
    """Base class for all domain errors."""


class DegenerateLatticeError(K3EquivariantError, ValueError):
    def __init__(self, message: str = "degenerate Gram matrix"):
        super().__init__(message)


class NotAGlueVectorError(K3EquivariantError, ValueError):
    def __init__(self, message: str = "not a glue vector"):
        super().__init__(message)


class IndefiniteLatticeError(K3EquivariantError, ValueError):
    def __init__(
        self, message: str = "definite only; use stable_equivalence_check"
    ):
        super().__init__(message)


class OrderLimitExceeded(K3EquivariantError):
    def __init__(self, order: int, limit: int):
        self.order = order
        self.limit = limit
        super().__init__(
            f"discriminant group of order {order} exceeds the limit {limit}"
        )


class SearchBudgetExceeded(K3EquivariantError):
    """A bounded search visited more nodes than it was allowed to."""

    def __init__(self, budget: int, what: str = "search"):
        self.budget = budget
        self.what = what
        super().__init__(f"{what} exhausted its budget of {budget} nodes")


class PoleError(K3EquivariantError, ZeroDivisionError):
    """A fixed-point contribution was requested at a zero weight."""


class InconsistentTraceError(K3EquivariantError, ValueError):
    pass


class InvalidConfigurationError(K3EquivariantError, ValueError):
    pass


class UnknownLatticeError(K3EquivariantError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown standard lattice: {name!r}")

    def __str__(self) -> str:
        return self.args[0]


class PreconditionError(K3EquivariantError, ValueError):
    pass
