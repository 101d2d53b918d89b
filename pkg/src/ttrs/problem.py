"""The two-ellipsoid problem type."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_radius, check_spd, check_sym_matrix, check_vector
from .trs import TrsProblem

__all__ = ["TtrsProblem", "FEAS_RTOL"]

FEAS_RTOL = 1e-8


@dataclass(eq=False)
class TtrsProblem:
    """``min 1/2 x'Ax + a'x  s.t. ‖x‖^2 <= delta1^2, (x-c)'B(x-c) <= delta2^2``.

    ``A`` is symmetric (normally indefinite) and ``B`` symmetric positive definite.
    Inputs are validated and stored as float arrays; ``A`` and ``B`` are
    symmetrized.
    """

    A: np.ndarray
    a: np.ndarray
    B: np.ndarray
    c: np.ndarray
    delta1: float
    delta2: float

    def __post_init__(self):
        self.A = check_sym_matrix(self.A, "A")
        n = self.A.shape[0]
        self.a = check_vector(self.a, "a", n)
        self.B = check_spd(check_sym_matrix(self.B, "B", n), "B")
        self.c = check_vector(self.c, "c", n)
        self.delta1 = check_radius(self.delta1, "delta1")
        self.delta2 = check_radius(self.delta2, "delta2")

    @property
    def n(self):
        return self.A.shape[0]

    def objective(self, x):
        return float(0.5 * x @ self.A @ x + self.a @ x)

    def g1(self, x):
        return float(x @ x - self.delta1**2)

    def g2(self, x):
        d = x - self.c
        return float(d @ self.B @ d - self.delta2**2)

    def in_e1(self, x, rtol=FEAS_RTOL):
        return float(x @ x) <= self.delta1**2 * (1.0 + rtol)

    def in_e2(self, x, rtol=FEAS_RTOL):
        d = x - self.c
        return float(d @ self.B @ d) <= self.delta2**2 * (1.0 + rtol)

    def is_feasible(self, x, rtol=FEAS_RTOL):
        return self.in_e1(x, rtol) and self.in_e2(x, rtol)

    def trs1(self):
        """The subproblem obtained by dropping the ellipsoid constraint."""
        return TrsProblem(self.A, self.a, None, None, self.delta1)

    def trs2(self):
        """The subproblem obtained by dropping the ball constraint."""
        return TrsProblem(self.A, self.a, self.B, self.c, self.delta2)

    def __eq__(self, other):
        if not isinstance(other, TtrsProblem):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.c, other.c)
            and self.delta1 == other.delta1
            and self.delta2 == other.delta2
        )
