"""Adaptive mixed interior-penalty DG for two-dimensional curl-curl problems.

Solve ``curl(alpha curl u) + beta u = f`` with ``u.t = 0`` on the boundary
using elementwise rigid-rotation fields for ``u`` and piecewise constants
for ``p = curl u``, estimate the error with a residual estimator and
refine adaptively by newest-vertex bisection.
"""
from .adapt import AdaptHistory, StopCriteria, amipdg_loop, dorfler_mark
from .assembly import assemble_aip, assemble_load, assemble_mixed
from .estimator import EstimateReport, dg_error, estimate
from .linalg import SolverConfig, SolverError, estimate_cond2, solve_spd
from .mesh import Mesh, MeshError, bisect, build_structured_mesh, check_conforming
from .problem import ProblemError, ProblemSpec
from .problems import get_problem, problem_ex1, problem_ex2, problem_ex3
from .solve import MixedSolution, recover_p, solve_mixed, solve_primal
from .space import DGFunction, PiecewiseConstant

__version__ = "0.1.0"

__all__ = [
    "AdaptHistory", "StopCriteria", "amipdg_loop", "dorfler_mark",
    "assemble_aip", "assemble_load", "assemble_mixed",
    "EstimateReport", "dg_error", "estimate",
    "SolverConfig", "SolverError", "estimate_cond2", "solve_spd",
    "Mesh", "MeshError", "bisect", "build_structured_mesh", "check_conforming",
    "ProblemError", "ProblemSpec", "get_problem", "problem_ex1", "problem_ex2", "problem_ex3",
    "MixedSolution", "recover_p", "solve_mixed", "solve_primal",
    "DGFunction", "PiecewiseConstant",
]
