"""Doerfler marking and the solve / estimate / mark / refine cycle."""
import csv
import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .estimator import estimate
from .linalg import SolverConfig
from .mesh import bisect, build_structured_mesh
from .solve import solve_mixed

log = logging.getLogger(__name__)

DOFS_PER_ELEMENT = 4  # three velocity coefficients and one value of p
HISTORY_FIELDS = ("k", "N", "eta", "dg_error", "sigma", "triangles", "h_min")


def dorfler_mark(eta_sq, theta):
    """Minimum-cardinality set M with sum(eta_sq[M]) >= theta * sum(eta_sq).

    Indicators are sorted in descending order with ties going to the lower
    index, and the shortest prefix that carries the bulk is returned
    (sorted by element index).

    Parameters
    ----------
    eta_sq : array_like
        Non-negative squared local indicators.
    theta : float
        Bulk parameter in (0, 1).

    Returns
    -------
    numpy.ndarray
        Marked element indices. Empty when every indicator is zero.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    eta_sq = np.asarray(eta_sq, dtype=float)
    if eta_sq.ndim != 1:
        raise ValueError("indicators must be a 1D array")
    if np.any(eta_sq < 0) or not np.all(np.isfinite(eta_sq)):
        raise ValueError("indicators must be finite and non-negative")
    total = eta_sq.sum()
    if total == 0.0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(-eta_sq, kind="stable")
    csum = np.cumsum(eta_sq[order])
    # guard against round-off in the last partial sum
    n = int(np.searchsorted(csum, theta * total * (1 - 1e-14), side="left")) + 1
    return np.sort(order[:min(n, len(order))])


@dataclass
class StopCriteria:
    tol: float = 0.0
    max_dofs: int = 100_000
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if self.tol < 0:
            raise ValueError("tol must be non-negative")
        if self.max_dofs <= 0:
            raise ValueError("max_dofs must be positive")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")


@dataclass
class AdaptRecord:
    k: int
    N: int
    eta: float
    dg_error: Optional[float]
    sigma: Optional[float]
    triangles: int
    h_min: float
    n_marked: int = 0


@dataclass
class AdaptHistory:
    records: List[AdaptRecord] = field(default_factory=list)
    meshes: list = field(default_factory=list)
    final_mesh: object = None
    final_solution: object = None
    final_report: object = None

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def slope(self, quantity="dg_error", last=5):
        """Least-squares slope of ln(quantity) against ln(N) over the final iterations."""
        N = self.column("N")[-last:]
        y = self.column(quantity)[-last:]
        if len(N) < 2:
            raise ValueError("need at least two iterations to fit a slope")
        return float(np.polyfit(np.log(N), np.log(y), 1)[0])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HISTORY_FIELDS)
            for r in self.records:
                w.writerow([r.k, r.N, _fmt(r.eta), _fmt(r.dg_error), _fmt(r.sigma),
                            r.triangles, _fmt(r.h_min)])


def _fmt(v):
    return "" if v is None else f"{v:.5e}"  # six significant digits


def amipdg_loop(problem, theta=0.5, kappa=50.0, stop=None, cfg=SolverConfig(), mesh=None,
                M=8, keep_meshes=False, callback=None):
    """Run the adaptive cycle until ``eta <= tol``, the DoF cap or the iteration cap.

    The DoF cap is checked before solving: a refined mesh whose DoF count
    exceeds ``stop.max_dofs`` is not solved on. ``stop.max_iterations``
    counts refinements, so ``max_iterations=0`` performs a single solve.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    stop = stop or StopCriteria()
    mesh = mesh if mesh is not None else build_structured_mesh(problem.domain, M)
    hist = AdaptHistory()
    stalled = 0
    k = 0
    while True:
        sol = solve_mixed(mesh, problem, kappa, cfg)
        rep = estimate(mesh, sol.u, sol.p, problem, kappa)
        rec = AdaptRecord(k=k, N=DOFS_PER_ELEMENT * mesh.n_triangles, eta=rep.eta,
                          dg_error=rep.dg_error, sigma=rep.sigma, triangles=mesh.n_triangles,
                          h_min=float(mesh.geometry.h.min()))
        if hist.records and rec.eta >= hist.records[-1].eta:
            stalled += 1
            if stalled >= 5:
                warnings.warn(f"eta has not decreased for {stalled} consecutive iterations",
                              RuntimeWarning, stacklevel=2)
        else:
            stalled = 0
        hist.records.append(rec)
        if keep_meshes:
            hist.meshes.append(mesh)
        log.info("k=%d N=%d eta=%.6e", k, rec.N, rec.eta)
        if callback is not None:
            callback(rec, mesh, sol, rep)
        hist.final_mesh, hist.final_solution, hist.final_report = mesh, sol, rep
        if rec.eta <= stop.tol:
            break
        if stop.max_iterations is not None and k >= stop.max_iterations:
            break
        marked = dorfler_mark(rep.local_sq, theta)
        rec.n_marked = len(marked)
        new_mesh = bisect(mesh, marked)
        if DOFS_PER_ELEMENT * new_mesh.n_triangles > stop.max_dofs:
            break
        mesh = new_mesh
        k += 1
    return hist
