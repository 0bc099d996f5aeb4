"""Exception types shared across the package."""


class RobustGuardError(Exception):
    """Base class for all package errors."""


class InputError(RobustGuardError):
    """Bad user input (maps to CLI exit code 2)."""


class InvalidPolygon(InputError):
    pass


class PointOutsideDomain(InputError):
    pass


class DegenerateParameters(InputError):
    pass


class ParallelLines(InputError):
    pass


class AlphaTooLarge(InputError):
    pass


class FatnessOutOfRange(InputError):
    pass


class DegenerateCone(RobustGuardError):
    pass


class DegenerateDisk(RobustGuardError):
    pass


class NotRobustlyGuarded(RobustGuardError):
    pass


class NonTermination(RobustGuardError):
    pass


class BudgetExceeded(RobustGuardError):
    pass


class ReplacementNotFound(RobustGuardError):
    pass


class Infeasible(RobustGuardError):
    pass
