"""Hybrid solver for the two-ellipsoid trust-region subproblem.

Minimizes ``1/2 x'Ax + a'x`` over ``‖x‖ <= delta1`` and
``(x-c)'B(x-c) <= delta2`` by combining global and local non-global
trust-region solutions with an ADMM splitting of the two constraints.
"""

from .estimator import HybridTTRS
from .exceptions import (
    EigenError,
    EmptyFeasibleSample,
    GenError,
    InfeasibleReduction,
    NotPositiveDefinite,
    PencilError,
    ProblemFileError,
    RankError,
    SolverError,
    TTRSError,
)
from .gen import GenSpec, ProblemClass, generate, oracle_2d, reference_examples
from .hybrid import (
    CurvatureClass,
    HybridConfig,
    KktPoint,
    SolveReport,
    Source,
    Status,
    certify,
    check_feasibility,
    recover_multipliers,
    solve,
    starting_point,
)
from .io import read_problem, write_problem
from .lngm import LngmReason, lngm, lngm_ellipsoid
from .problem import TtrsProblem
from .trs import SolverConfig, TrsProblem, solve_trs

__version__ = "0.1.0"
