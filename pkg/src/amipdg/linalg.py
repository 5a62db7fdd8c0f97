"""Sparse SPD solves and spectral condition number estimates."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Breakdown, non-convergence or a non-positive pivot."""


@dataclass(frozen=True)
class SolverConfig:
    method: str = "direct"  # "cholesky", "direct" (Cholesky, LU if indefinite) or "cg"
    rtol: float = 1e-12
    maxiter: int = 20000
    preconditioner: str = "jacobi"  # or "none"; used by CG only
    seed: int = 20240101

    def __post_init__(self):
        if self.method not in ("cholesky", "direct", "cg"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.preconditioner not in ("none", "jacobi"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")
        if not self.rtol > 0:
            raise ValueError("tolerance must be positive")


class SPDFactor:
    """Sparse LDL^T-type factorisation of an SPD matrix.

    SuperLU with a symmetric fill-reducing ordering and pivoting switched
    off factors ``P A P^T = L U`` where ``U = D L^T``; all pivots positive
    is then equivalent to ``A`` being positive definite.
    """

    def __init__(self, A, allow_indefinite=False):
        A = sp.csc_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise SolverError("matrix must be square")
        try:
            self._lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                                 options={"SymmetricMode": True})
        except RuntimeError as exc:  # exactly singular
            raise SolverError(f"factorisation failed: {exc}") from exc
        piv = self._lu.U.diagonal()
        self.pivots = piv
        self.definite = bool(np.all(piv > 0) and np.all(np.isfinite(piv)))
        if not self.definite:
            if not allow_indefinite:
                raise SolverError(f"non-positive pivot ({piv.min():.3e}); matrix is not SPD")
            log.info("matrix is indefinite; refactoring with partial pivoting")
            self._lu = spla.splu(A, permc_spec="COLAMD")

    def solve(self, b):
        return self._lu.solve(np.asarray(b, dtype=float))


def is_spd(A):
    try:
        SPDFactor(A)
    except SolverError:
        return False
    return True


def _cg(A, b, cfg):
    n = len(b)
    if cfg.preconditioner == "jacobi":
        d = A.diagonal()
        if np.any(d <= 0):
            raise SolverError("Jacobi preconditioner needs a positive diagonal")
        M = spla.LinearOperator((n, n), matvec=lambda x: x / d)
    else:
        M = None
    it = [0]

    def count(_):
        it[0] += 1

    x, info = spla.cg(A, b, rtol=cfg.rtol, atol=0.0, maxiter=cfg.maxiter, M=M, callback=count)
    if info != 0:
        raise SolverError(f"CG did not converge in {it[0]} iterations (info={info})")
    return x, it[0]


def solve_spd(A, b, cfg=SolverConfig()):
    """Solve ``A x = b`` for SPD ``A``; returns ``(x, info)`` with iterations and residual.

    ``method="direct"`` also accepts symmetric indefinite matrices (small
    penalties make the interior-penalty matrix indefinite).
    """
    b = np.asarray(b, dtype=float)
    A = sp.csr_matrix(A)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b), {"iterations": 0, "residual": 0.0}
    if cfg.method in ("cholesky", "direct"):
        x = SPDFactor(A, allow_indefinite=cfg.method == "direct").solve(b)
        iters = 0
    else:
        x, iters = _cg(A, b, cfg)
    res = np.linalg.norm(A @ x - b) / bnorm
    if cfg.method == "cg" and res > 10 * cfg.rtol:
        raise SolverError(f"CG residual {res:.3e} above tolerance after {iters} iterations")
    return x, {"iterations": iters, "residual": float(res)}


def _power(apply, n, rng, tol, maxiter):
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for k in range(1, maxiter + 1):
        y = apply(x)
        lam_new = abs(float(x @ y))
        ny = np.linalg.norm(y)
        if ny == 0.0:
            raise SolverError("power iteration collapsed to zero")
        x = y / ny
        if k > 1 and abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new, k
        lam = lam_new
    log.warning("power iteration stopped at maxiter=%d (last change above %.1e)", maxiter, tol)
    return lam, maxiter


def estimate_cond2(A, cfg=SolverConfig(), tol=1e-6, maxiter=100000):
    """|lambda|_max / |lambda|_min by power and inverse power iteration.

    The start vectors come from a generator seeded with ``cfg.seed``.
    """
    A = sp.csr_matrix(A)
    n = A.shape[0]
    rng = np.random.default_rng(cfg.seed)
    lmax, _ = _power(lambda x: A @ x, n, rng, tol, maxiter)
    if cfg.method in ("cholesky", "direct"):
        fac = SPDFactor(A, allow_indefinite=cfg.method == "direct")
        inv = fac.solve
    else:
        def inv(x):
            return solve_spd(A, x, cfg)[0]
    mu, _ = _power(inv, n, rng, tol, maxiter)
    return lmax * mu


def write_matrix_market(A, path):
    scipy.io.mmwrite(str(path), sp.coo_matrix(A), symmetry="general")
