"""Problem data for curl(alpha curl u) + beta u = f with u.t = 0 on the boundary.

Every field is a vectorised callable ``fn(x, region)`` where ``x`` is an
``(N, 2)`` array of points and ``region`` an ``(N,)`` integer array naming
the coefficient subdomain the point is evaluated from.  Regions are
assigned per triangle (by centroid), so data that jumps across a mesh-aligned
interface is always evaluated one-sidedly.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


class ProblemError(ValueError):
    pass


def constant_scalar(c):
    return lambda x, region: np.full(len(x), float(c))


def constant_matrix(c):
    m = np.asarray(c, dtype=float) * np.eye(2) if np.ndim(c) == 0 else np.asarray(c, dtype=float)
    return lambda x, region: np.broadcast_to(m, (len(x), 2, 2)).copy()


def zero_vector(x, region):
    return np.zeros((len(x), 2))


def zero_scalar(x, region):
    return np.zeros(len(x))


def zero_matrix(x, region):
    return np.zeros((len(x), 2, 2))


def single_region(centroids):
    return np.zeros(len(centroids), dtype=np.int64)


@dataclass
class ProblemSpec:
    """Coefficients, source and (optionally) exact solution.

    ``beta`` returns ``(N, 2, 2)`` matrices; ``dbeta_dx`` and ``dbeta_dy``
    their partial derivatives.  ``u`` and ``curl_u`` are ``None`` when no
    exact solution is known.
    """

    name: str
    domain: str
    f: Field
    div_f: Field
    alpha: Field = field(default_factory=lambda: constant_scalar(1.0))
    grad_alpha: Field = zero_vector
    beta: Field = field(default_factory=lambda: constant_matrix(1.0))
    dbeta_dx: Field = zero_matrix
    dbeta_dy: Field = zero_matrix
    u: Optional[Field] = None
    curl_u: Optional[Field] = None
    region: Callable[[np.ndarray], np.ndarray] = single_region
    tri_degree: int = 4
    edge_degree: int = 5

    @property
    def has_exact(self):
        return self.u is not None and self.curl_u is not None

    def regions(self, mesh):
        return np.asarray(self.region(mesh.geometry.centroid), dtype=np.int64)

    def check_coefficients(self, alpha, beta):
        if np.any(alpha <= 0):
            raise ProblemError("alpha must be positive")
        sym = np.abs(beta[:, 0, 1] - beta[:, 1, 0]) <= 1e-12 * np.abs(beta).max(initial=1.0)
        det = beta[:, 0, 0] * beta[:, 1, 1] - beta[:, 0, 1] * beta[:, 1, 0]
        if not (np.all(sym) and np.all(beta[:, 0, 0] > 0) and np.all(det > 0)):
            raise ProblemError("beta is not symmetric positive definite at every sample")


def constant_problem(f, div_f=None, alpha=1.0, beta=1.0, name="constant", domain="square", **kw):
    """Problem with constant coefficients; ``f`` given as ``f(x)``."""
    return ProblemSpec(
        name=name,
        domain=domain,
        f=lambda x, region: f(x),
        div_f=(lambda x, region: div_f(x)) if div_f is not None else zero_scalar,
        alpha=constant_scalar(alpha),
        beta=constant_matrix(beta),
        **kw,
    )
