"""Residual a posteriori error estimator and the DG error norm.

For each triangle the squared indicator is

    ||R1||^2 + h_T^2 (||R2||^2 + ||R3||^2)
      + sum_{e in dT} h_e (||J1||^2 + ||J2||^2) + kappa sum_{e in dT} h_e^-1 ||J3||^2

with R1 = p_h - curl u_h, R2 = f - curl(alpha p_h) - beta u_h,
R3 = div(f - beta u_h), J1 = [[alpha p_h]], J2 = [f - beta u_h] (normal jump)
and J3 = [[u_h]] (tangential jump).  By default an interior edge's jump
terms are split evenly between its two neighbours, so every edge is counted
once in the global eta; ``edge_share="full"`` charges both neighbours the
whole edge instead.  By default J1 and J2 vanish on boundary edges.
"""
import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assembly import edge_data, element_data
from .space import CURL

COLUMNS = ("R1", "R2", "R3", "J1", "J2", "J3")


class EstimatorError(RuntimeError):
    pass


@dataclass
class EstimateReport:
    """Per-triangle indicator contributions (already weighted) and global values."""

    contributions: np.ndarray  # (T, 6) in COLUMNS order
    kappa: float
    dg_error: Optional[float] = None
    dg_parts: Optional[dict] = None
    extras: dict = field(default_factory=dict)

    @property
    def local_sq(self):
        return self.contributions.sum(axis=1)

    @property
    def eta(self):
        return global_estimator(self)

    @property
    def sigma(self):
        if self.dg_error is None:
            return None
        return effectivity(self.dg_error, self.eta)

    def totals(self):
        return dict(zip(COLUMNS, self.contributions.sum(axis=0)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("element",) + COLUMNS + ("eta_sq",))
            for i, row in enumerate(self.contributions):
                w.writerow([i] + [f"{v:.5e}" for v in row] + [f"{row.sum():.5e}"])


def element_residuals(mesh, u_h, p_h, problem, degree=None):
    """Squared L2 norms of R1, R2, R3 on every triangle, shape ``(T, 3)``."""
    ed = element_data(mesh, problem, degree)
    loc = u_h.local
    p = p_h.values
    area = mesh.geometry.area
    r1 = area * (p - loc @ CURL) ** 2

    uh = np.matmul(loc[:, None, None, :], ed.phi)[:, :, 0, :]
    beta = ed.sample(problem.beta)
    f = ed.sample(problem.f)
    ga = ed.sample(problem.grad_alpha)
    curl_ap = p[:, None, None] * np.stack([ga[..., 1], -ga[..., 0]], axis=-1)
    R2 = f - curl_ap - np.einsum("tqij,tqj->tqi", beta, uh)
    r2 = np.einsum("tq,tqi,tqi->t", ed.w, R2, R2, optimize=True)

    dbx = ed.sample(problem.dbeta_dx)
    dby = ed.sample(problem.dbeta_dy)
    c = loc[:, 2][:, None]
    # div(beta u) = (d_x beta_1j + d_y beta_2j) u_j + c (beta_12 - beta_21)
    div_bu = (np.einsum("tqj,tqj->tq", dbx[..., 0, :] + dby[..., 1, :], uh)
              + c * (beta[..., 0, 1] - beta[..., 1, 0]))
    R3 = ed.sample(problem.div_f) - div_bu
    r3 = np.einsum("tq,tq->t", ed.w, R3 * R3)
    return np.column_stack([r1, r2, r3])


def edge_jumps(mesh, u_h, p_h, problem, degree=None, boundary_jumps=False):
    """Squared L2 norms of J1, J2, J3 on every edge, shape ``(E, 3)``."""
    eg = edge_data(mesh, degree or problem.edge_degree)
    regions = problem.regions(mesh)
    loc = u_h.local
    p = p_h.values
    tri = np.maximum(eg.tri, 0)
    side = (eg.tri >= 0).astype(float)  # (E, 2)
    uh = np.einsum("esa,esqai->esqi", loc[tri], eg.phi)  # zero on a missing side

    j1 = np.zeros(eg.w.shape)
    j2 = np.zeros(eg.w.shape)
    for s in range(2):
        a = eg.sample(problem.alpha, regions, s)
        j1 += (1.0 if s == 0 else -1.0) * side[:, s, None] * a * p[tri[:, s], None]
        flux = eg.sample(problem.f, regions, s) - np.einsum(
            "eqij,eqj->eqi", eg.sample(problem.beta, regions, s), uh[:, s])
        j2 += side[:, s, None] * np.einsum("eqi,ei->eq", flux, eg.normal[:, s])
    j3 = np.einsum("esqi,esi->eq", uh, eg.tangent)
    if not boundary_jumps:
        j1[eg.boundary] = 0.0
        j2[eg.boundary] = 0.0
    sq = lambda v: np.einsum("eq,eq->e", eg.w, v * v)  # noqa: E731
    return np.column_stack([sq(j1), sq(j2), sq(j3)])


EDGE_SHARES = ("half", "full")


def local_estimator(mesh, residuals, jumps, kappa, h_tau=None, edge_share="half"):
    """Weighted contributions ``(T, 6)`` in COLUMNS order; row sums are eta^2(T)."""
    if edge_share not in EDGE_SHARES:
        raise ValueError(f"edge_share must be one of {EDGE_SHARES}")
    topo = mesh.edges
    h_tau = mesh.geometry.h if h_tau is None else h_tau
    he = topo.length
    edge_w = np.column_stack([he * jumps[:, 0], he * jumps[:, 1], kappa / he * jumps[:, 2]])
    if edge_share == "half":
        edge_w[topo.interior] *= 0.5
    per_tri = edge_w[topo.tri_edge].sum(axis=1)
    return np.column_stack([
        residuals[:, 0],
        h_tau**2 * residuals[:, 1],
        h_tau**2 * residuals[:, 2],
        per_tri[:, 0],
        per_tri[:, 1],
        per_tri[:, 2],
    ])


def global_estimator(report):
    return float(np.sqrt(report.local_sq.sum()))


def dg_error(mesh, u_h, p_h, problem, kappa, degree=None, edge_degree=None):
    """DG-norm error and its four squared parts (p, u, curl u, jumps)."""
    if not problem.has_exact:
        raise EstimatorError(f"problem {problem.name!r} has no exact solution")
    ed = element_data(mesh, problem, max(7, degree or problem.tri_degree))
    loc = u_h.local
    uh = np.matmul(loc[:, None, None, :], ed.phi)[:, :, 0, :]
    du = ed.sample(problem.u) - uh
    curl_ex = ed.sample(problem.curl_u)
    e_p = np.einsum("tq,tq->", ed.w, (curl_ex - p_h.values[:, None]) ** 2)
    e_u = np.einsum("tq,tqi,tqi->", ed.w, du, du, optimize=True)
    e_c = np.einsum("tq,tq->", ed.w, (curl_ex - (loc @ CURL)[:, None]) ** 2)
    eg = edge_data(mesh, edge_degree or problem.edge_degree)
    tri = np.maximum(eg.tri, 0)
    j3 = np.einsum("esqa,esa->eq", eg.trace, loc[tri] * (eg.tri >= 0)[..., None])
    e_j = kappa * np.sum(np.einsum("eq,eq->e", eg.w, j3 * j3) / eg.length)
    parts = {"p": e_p, "u": e_u, "curl": e_c, "jump": e_j}
    return float(np.sqrt(e_p + e_u + e_c + e_j)), parts


def effectivity(dg, eta):
    if eta <= 0:
        if dg > 0:
            raise EstimatorError("zero estimator with non-zero error")
        return 1.0
    return dg / eta


def estimate(mesh, u_h, p_h, problem, kappa, with_error=None, boundary_jumps=False,
             h_tau=None, edge_share="half"):
    """Full report: per-triangle contributions plus the DG error when available."""
    res = element_residuals(mesh, u_h, p_h, problem)
    jumps = edge_jumps(mesh, u_h, p_h, problem, boundary_jumps=boundary_jumps)
    contrib = local_estimator(mesh, res, jumps, kappa, h_tau, edge_share)
    report = EstimateReport(contrib, kappa)
    if with_error is None:
        with_error = problem.has_exact
    if with_error:
        report.dg_error, report.dg_parts = dg_error(mesh, u_h, p_h, problem, kappa)
    return report
