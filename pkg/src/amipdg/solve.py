"""Solve the mixed problem via the primal system and elementwise recovery of p_h."""
from dataclasses import dataclass, field

import numpy as np

from .assembly import assemble_aip, assemble_load, edge_data, jump_integrals
from .linalg import SolverConfig, solve_spd
from .space import CURL, DGFunction, PiecewiseConstant


@dataclass
class MixedSolution:
    u: DGFunction
    p: PiecewiseConstant
    info: dict = field(default_factory=dict)

    @property
    def mesh(self):
        return self.u.mesh


def solve_primal(mesh, problem, kappa=50.0, cfg=SolverConfig(), matrix=None):
    """Solve a_IP(u_h, v_h) = (f, v_h) for all v_h; returns ``(u_h, info)``."""
    A = assemble_aip(mesh, problem, kappa) if matrix is None else matrix
    b = assemble_load(mesh, problem)
    x, info = solve_spd(A, b, cfg)
    info["n_dofs"] = len(b)
    return DGFunction(mesh, x), info


def recover_p(mesh, u_h, edge_degree=5):
    """P0 solution of the first mixed equation for given u_h.

    p|tau = curl u_h|tau - |tau|^-1 sum_e c_e int_e [[u_h]],
    with c_e = 1/2 on interior edges and 1 on boundary edges.
    """
    eg = edge_data(mesh, edge_degree)
    jint = jump_integrals(mesh, u_h.coeffs, eg)
    corr = np.zeros(mesh.n_triangles)
    c = eg.weight_c
    np.add.at(corr, eg.tri[:, 0], c * jint)
    inner = ~eg.boundary
    np.add.at(corr, eg.tri[inner, 1], c[inner] * jint[inner])
    p = u_h.local @ CURL - corr / mesh.geometry.area
    return PiecewiseConstant(mesh, p)


def solve_mixed(mesh, problem, kappa=50.0, cfg=SolverConfig(), matrix=None):
    u_h, info = solve_primal(mesh, problem, kappa, cfg, matrix)
    p_h = recover_p(mesh, u_h, problem.edge_degree)
    return MixedSolution(u_h, p_h, info)
