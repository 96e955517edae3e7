"""Exception hierarchy shared by every module of the package."""


class SteinerError(Exception):
    """Base class for all package errors."""


# core model
class DisconnectedGraph(SteinerError):
    pass


class NonPositiveWeight(SteinerError):
    pass


class DuplicatePoint(SteinerError):
    pass


class TooFewTerminals(SteinerError):
    pass


class UnknownEdge(SteinerError):
    pass


class InvalidTree(SteinerError):
    pass


# exact oracles
class BudgetExceeded(SteinerError):
    pass


class TooManyTerminals(SteinerError):
    pass


# stability engine
class MultiplierOutOfRange(SteinerError):
    pass


class SameTree(SteinerError):
    pass


# structure checkers
class ThetaOutOfRange(SteinerError):
    pass


class MissingCoordinates(SteinerError):
    pass


class PreconditionViolated(SteinerError):
    pass


# solvers
class NoFeasibleStep(SteinerError):
    pass


class OracleContractViolated(SteinerError):
    pass


class InconsistentTrace(SteinerError):
    pass


# generators
class SearchExhausted(SteinerError):
    def __init__(self, tries, best_gamma):
        self.tries = tries
        self.best_gamma = best_gamma
        super().__init__(f"no instance reached the target after {tries} tries "
                         f"(best gamma_star {best_gamma:.6g})")


# STP format
class StpError(SteinerError):
    pass


class StpSyntaxError(StpError):
    def __init__(self, line, detail):
        self.line = line
        self.detail = detail
        super().__init__(f"line {line}: {detail}")


class MissingSection(StpError):
    pass


class IndexOutOfRange(StpError):
    pass


class DuplicateEdge(StpError):
    pass
