"""Exception hierarchy for the solver package."""


class TTRSError(Exception):
    """Base class for all errors raised by this package."""


class EigenError(TTRSError):
    """The dense symmetric eigensolver failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NotPositiveDefinite(TTRSError, ValueError):
    """A matrix required to be positive definite failed to factorize."""


class PencilError(NotPositiveDefinite):
    """The right-hand matrix of a symmetric-definite pencil is not positive definite."""


class RankError(TTRSError, ValueError):
    """A basis is rank deficient under the requested inner product."""


class SolverError(TTRSError):
    """A trust-region subproblem could not be solved to the requested accuracy."""


class InfeasibleReduction(SolverError):
    """The reduced hard-case sphere problem has a negative squared radius."""


class GenError(TTRSError):
    """A random instance generator exhausted its retry budget."""


class EmptyFeasibleSample(TTRSError):
    """The brute-force oracle found no sample inside the feasible region."""


class ProblemFileError(TTRSError, ValueError):
    """A problem file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
