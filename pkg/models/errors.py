class SolverError(Exception):
    """Base class for every failure raised by the solver suite."""


class DimensionMismatchError(SolverError, ValueError):
    pass


class NonFiniteValueError(SolverError, ArithmeticError):
    pass


class InfeasiblePointError(SolverError, ValueError):
    pass


class NoDescentError(SolverError):
    """No feasible decreasing model step exists: the iterate is numerically critical."""


class InnerBudgetExceededError(SolverError):
    pass


class UnknownProblemError(SolverError, KeyError):
    def __str__(self):
        return f'Unknown problem: {self.args[0]}'


class ConstraintsRequiredError(SolverError, ValueError):
    pass


class TargetBudgetExceededError(SolverError):
    pass


class InitialTargetError(SolverError, ValueError):
    pass


class DegenerateMultiplierError(SolverError, ZeroDivisionError):
    pass


class StaleCacheError(SolverError):
    pass


class TraceFormatError(SolverError, ValueError):
    pass


class SweepGridError(SolverError, ValueError):
    pass


class UnexpectedConstraintsError(SolverError, ValueError):
    pass


class SweepPointError(SolverError):
    pass
