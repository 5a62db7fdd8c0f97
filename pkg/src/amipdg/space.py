"""Broken spaces U_h (elementwise rigid rotations plus constants) and Q_h (P0).

On a triangle with centroid ``(xc, yc)`` the three velocity basis
functions are ``(1, 0)``, ``(0, 1)`` and ``(-(y - yc), x - xc)``; their
scalar curls are ``0, 0, 2``.  Degrees of freedom are numbered
``3 * tau + a`` for the velocity and ``tau`` for the scalar.
"""
from dataclasses import dataclass

import numpy as np

CURL = np.array([0.0, 0.0, 2.0])


@dataclass(frozen=True)
class DofMap:
    n_elements: int

    @property
    def n_u(self):
        return 3 * self.n_elements

    @property
    def n_p(self):
        return self.n_elements

    @property
    def n_total(self):
        """Velocity plus scalar unknowns, the count used when reporting DoFs."""
        return self.n_u + self.n_p

    def u_dofs(self, tau):
        tau = np.asarray(tau)
        return 3 * tau[..., None] + np.arange(3)

    def p_dofs(self, tau):
        return np.asarray(tau)


class DGFunction:
    """Member of U_h stored as a ``(T, 3)`` coefficient array."""

    def __init__(self, mesh, coeffs=None):
        self.mesh = mesh
        T = mesh.n_triangles
        if coeffs is None:
            coeffs = np.zeros(3 * T)
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1)
        if coeffs.size != 3 * T:
            raise ValueError(f"expected {3 * T} coefficients, got {coeffs.size}")
        self.coeffs = coeffs

    @property
    def local(self):
        return self.coeffs.reshape(-1, 3)

    def __call__(self, tau, x):
        return eval_dg(self.mesh, self.local, tau, x)

    def curl(self):
        """Elementwise constant curl, one value per triangle."""
        return self.local @ CURL

    def __mul__(self, s):
        return DGFunction(self.mesh, self.coeffs * s)

    __rmul__ = __mul__


class PiecewiseConstant:
    """Member of Q_h: one value per triangle."""

    def __init__(self, mesh, values=None):
        self.mesh = mesh
        if values is None:
            values = np.zeros(mesh.n_triangles)
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size != mesh.n_triangles:
            raise ValueError(f"expected {mesh.n_triangles} values, got {values.size}")
        self.values = values

    def __call__(self, tau, x=None):
        return self.values[tau]

    def __mul__(self, s):
        return PiecewiseConstant(self.mesh, self.values * s)

    __rmul__ = __mul__


def basis_eval(centroid, x):
    """Basis values at ``x``; returns ``(..., 3, 2)``.

    ``centroid`` broadcasts against ``x`` (both ``(..., 2)``).
    """
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(centroid, dtype=float)
    out = np.zeros(d.shape[:-1] + (3, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 2, 0] = -d[..., 1]
    out[..., 2, 1] = d[..., 0]
    return out


def basis_curl(geom=None):
    """Curls of the three basis functions; independent of the element."""
    return CURL.copy()


def eval_dg(mesh, local, tau, x):
    """Evaluate coefficients ``local`` (T, 3) of triangles ``tau`` at points ``x``."""
    tau = np.asarray(tau)
    phi = basis_eval(mesh.geometry.centroid[tau], x)
    return np.einsum("...a,...ai->...i", local[tau], phi)


def element_points(mesh, rule):
    """Physical quadrature points ``(T, nq, 2)`` and weights ``(T, nq)``."""
    lam = rule.barycentric
    xy = np.matmul(lam, mesh.vertices[mesh.triangles])
    w = 2.0 * mesh.geometry.area[:, None] * rule.weights[None, :]
    return xy, w


def edge_points(mesh, rule, edges=None):
    """Quadrature points ``(E, nq, 2)`` and weights ``(E, nq)`` on global edges."""
    topo = mesh.edges
    if edges is None:
        edges = np.arange(topo.n_edges)
    a = mesh.vertices[topo.edges[edges, 0]]
    b = mesh.vertices[topo.edges[edges, 1]]
    s = np.asarray(rule.points)
    xy = a[:, None, :] + s[None, :, None] * (b - a)[:, None, :]
    w = topo.length[edges, None] * rule.weights[None, :]
    return xy, w


@dataclass(frozen=True)
class TraceSample:
    average: np.ndarray
    tangential_jump: np.ndarray
    normal_jump: np.ndarray


def trace_sample(w1, t1, n1, w2=None, t2=None, n2=None):
    """Average, tangential jump and normal jump of a vector field on an edge.

    Pass one side on boundary edges and two on interior edges.  ``t_i`` and
    ``n_i`` are the element-local tangent and outward normal of side ``i``.
    """
    w1 = np.asarray(w1, dtype=float)
    sides = [w2, t2, n2]
    if all(s is None for s in sides):
        return TraceSample(w1, (w1 * t1).sum(-1), (w1 * n1).sum(-1))
    if any(s is None for s in sides):
        raise ValueError("second side needs a value, tangent and normal")
    w2 = np.asarray(w2, dtype=float)
    return TraceSample(
        0.5 * (w1 + w2),
        (w1 * t1).sum(-1) + (w2 * t2).sum(-1),
        (w1 * n1).sum(-1) + (w2 * n2).sum(-1),
    )


def scalar_trace(phi1, t1, phi2=None, t2=None):
    """Average and (vector) tangential jump of a scalar field on an edge."""
    phi1 = np.asarray(phi1, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    if phi2 is None:
        return phi1, phi1[..., None] * t1
    return 0.5 * (phi1 + phi2), phi1[..., None] * t1 + np.asarray(phi2)[..., None] * np.asarray(t2)


def interpolate(mesh, field, rule=None):
    """L2 projection of a vector field onto U_h (elementwise, exact for R1 fields)."""
    from .quadrature import tri_rule

    rule = rule or tri_rule(7)
    xy, w = element_points(mesh, rule)
    T, nq = w.shape
    vals = np.asarray(field(xy.reshape(-1, 2))).reshape(T, nq, 2)
    phi = basis_eval(mesh.geometry.centroid[:, None, :], xy)
    G = np.einsum("tq,tqai,tqbi->tab", w, phi, phi, optimize=True)
    rhs = np.einsum("tq,tqai,tqi->ta", w, phi, vals, optimize=True)
    return DGFunction(mesh, np.linalg.solve(G, rhs[..., None])[..., 0])
