"""Assembly of the primal interior-penalty system and of the mixed blocks.

The primal form on U_h is

    a_IP(u, v) = (beta u, v) + (alpha curl u, curl v)
                 - <{{alpha curl v}}, [[u]]> - <{{alpha curl u}}, [[v]]>
                 + kappa <h_e^-1 [[u]], [[v]]>

summed over all triangles and all edges (boundary edges use one-sided
traces).  Inside edge averages ``alpha`` is replaced by its mean over the
neighbouring triangle, which is what eliminating the P0 variable from the
mixed system produces; for elementwise constant ``alpha`` nothing changes.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .quadrature import edge_rule, tri_rule
from .space import CURL, basis_eval, edge_points, element_points


def _region_per_point(regions, tau, nq):
    return np.repeat(regions[tau], nq)


@dataclass
class ElementData:
    """Coefficient samples at element quadrature points."""

    xy: np.ndarray  # (T, nq, 2)
    w: np.ndarray  # (T, nq)
    phi: np.ndarray  # (T, nq, 3, 2)
    region: np.ndarray  # (T,)

    def sample(self, fn):
        T, nq = self.w.shape
        out = np.asarray(fn(self.xy.reshape(-1, 2), np.repeat(self.region, nq)))
        return out.reshape((T, nq) + out.shape[1:])


def element_data(mesh, problem, degree=None):
    degree = degree or problem.tri_degree
    key = ("element", degree)
    if key not in mesh.cache:
        xy, w = element_points(mesh, tri_rule(degree))
        mesh.cache[key] = _frozen((xy, w, basis_eval(mesh.geometry.centroid[:, None, :], xy)))
    return ElementData(*mesh.cache[key], problem.regions(mesh))


@dataclass
class EdgeData:
    """Traces on every edge; side 1 is empty (index -1) on boundary edges.

    ``trace[e, s, q, a]`` is basis function ``a`` of side ``s`` dotted with
    that side's counter-clockwise tangent; ``weight_c[e]`` is the average
    weight (1/2 inside, 1 on the boundary).
    """

    xy: np.ndarray  # (E, nq, 2)
    w: np.ndarray  # (E, nq)
    tri: np.ndarray  # (E, 2)
    tangent: np.ndarray  # (E, 2, 2)
    normal: np.ndarray  # (E, 2, 2)
    phi: np.ndarray  # (E, 2, nq, 3, 2)
    trace: np.ndarray  # (E, 2, nq, 3)
    length: np.ndarray  # (E,)
    boundary: np.ndarray  # (E,) bool

    @property
    def weight_c(self):
        return np.where(self.boundary, 1.0, 0.5)

    def sample(self, fn, regions, side):
        """Evaluate ``fn`` at edge points from ``side`` (uses side 0 where side 1 is absent)."""
        E, nq = self.w.shape
        tri = np.where(self.tri[:, side] >= 0, self.tri[:, side], self.tri[:, 0])
        out = np.asarray(fn(self.xy.reshape(-1, 2), np.repeat(regions[tri], nq)))
        return out.reshape((E, nq) + out.shape[1:])


def edge_data(mesh, degree=5):
    """Edge traces for ``edge_rule(degree)``; cached on the mesh (treat as read-only)."""
    key = ("edge", degree)
    if key not in mesh.cache:
        eg = _edge_data(mesh, degree)
        _frozen(vars(eg).values())
        mesh.cache[key] = eg
    return mesh.cache[key]


def _frozen(arrays):
    for a in arrays:
        if isinstance(a, np.ndarray):
            a.setflags(write=False)
    return arrays


def _edge_data(mesh, degree):
    topo = mesh.edges
    geom = mesh.geometry
    xy, w = edge_points(mesh, edge_rule(degree))
    E, nq = w.shape
    tri = topo.edge_tri
    boundary = tri[:, 1] < 0
    tangent = np.zeros((E, 2, 2))
    normal = np.zeros((E, 2, 2))
    phi = np.zeros((E, 2, nq, 3, 2))
    for s in range(2):
        has = tri[:, s] >= 0
        t, k = tri[has, s], topo.edge_local[has, s]
        tangent[has, s] = geom.tangent[t, k]
        normal[has, s] = geom.normal[t, k]
        phi[has, s] = basis_eval(geom.centroid[t][:, None, :], xy[has])
    trace = np.matmul(phi, tangent[:, :, None, :, None])[..., 0]
    return EdgeData(xy, w, tri, tangent, normal, phi, trace, topo.length, boundary)


def alpha_mean(mesh, problem, edata=None):
    """Mean of alpha over each triangle."""
    ed = edata or element_data(mesh, problem)
    a = ed.sample(problem.alpha)
    return (ed.w * a).sum(axis=1) / mesh.geometry.area


def _check_kappa(kappa):
    if not kappa > 0:
        raise ValueError(f"penalty parameter must be positive, got {kappa!r}")


# ---------------------------------------------------------------- volume terms

def assemble_volume(mesh, problem, edata=None):
    """Elementwise beta-mass and alpha curl-curl blocks, each ``(T, 3, 3)``."""
    ed = edata or element_data(mesh, problem)
    alpha = ed.sample(problem.alpha)
    beta = ed.sample(problem.beta)
    problem.check_coefficients(alpha.ravel(), beta.reshape(-1, 2, 2))
    T, nq = ed.w.shape
    bphi = np.matmul(ed.phi, beta.transpose(0, 1, 3, 2))  # (T, nq, 3, 2): beta phi_b
    wphi = (ed.w[:, :, None, None] * ed.phi).transpose(0, 2, 1, 3).reshape(T, 3, -1)
    mass = np.matmul(wphi, bphi.transpose(0, 1, 3, 2).reshape(T, -1, 3))
    curl = np.einsum("tq,a,b->tab", ed.w * alpha, CURL, CURL, optimize=True)
    return mass, curl


def _block_to_csr(rows, cols, vals, shape):
    A = sp.coo_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=shape).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return A


def _elem_block_indices(T):
    dofs = 3 * np.arange(T)[:, None] + np.arange(3)
    return np.broadcast_to(dofs[:, :, None], (T, 3, 3)), np.broadcast_to(dofs[:, None, :], (T, 3, 3))


def _edge_dofs(tri):
    # (E, 6) dof indices of the two sides, -1 for a missing side
    d = 3 * tri[:, :, None] + np.arange(3)
    d[tri < 0] = -1
    return d.reshape(len(tri), 6)


def edge_blocks(mesh, problem, kappa, abar, eg=None):
    """Per-edge integrated traces and local a_IP edge blocks ``(E, 6, 6)``."""
    eg = eg or edge_data(mesh, problem.edge_degree)
    c = eg.weight_c
    int_tr = np.einsum("eq,esqa->esa", eg.w, eg.trace).reshape(-1, 6)
    tr = eg.trace.transpose(0, 2, 1, 3).reshape(len(c), -1, 6)  # (E, nq, 6)
    tt = np.matmul((eg.w[:, :, None] * tr).transpose(0, 2, 1), tr)
    side_alpha = np.where(eg.tri >= 0, abar[np.maximum(eg.tri, 0)], 0.0)
    cvec = (c[:, None, None] * side_alpha[:, :, None] * CURL).reshape(-1, 6)
    return eg, int_tr, tt, cvec


def assemble_aip(mesh, problem, kappa, edges=None):
    """Symmetric interior-penalty stiffness matrix on U_h as CSR."""
    _check_kappa(kappa)
    T = mesh.n_triangles
    ed = element_data(mesh, problem)
    mass, curl = assemble_volume(mesh, problem, ed)
    abar = alpha_mean(mesh, problem, ed)
    eg, int_tr, tt, cvec = edge_blocks(mesh, problem, kappa, abar)
    local = -(int_tr[:, :, None] * cvec[:, None, :] + cvec[:, :, None] * int_tr[:, None, :])
    local += (kappa / eg.length)[:, None, None] * tt
    dofs = _edge_dofs(eg.tri)
    er = np.broadcast_to(dofs[:, :, None], local.shape)
    ec = np.broadcast_to(dofs[:, None, :], local.shape)
    keep = (er >= 0) & (ec >= 0)
    vr, vc = _elem_block_indices(T)
    rows = np.concatenate([vr.ravel(), er[keep]])
    cols = np.concatenate([vc.ravel(), ec[keep]])
    vals = np.concatenate([(mass + curl).ravel(), local[keep]])
    A = _block_to_csr(rows, cols, vals, (3 * T, 3 * T))
    # exact symmetry regardless of summation order
    return ((A + A.T) * 0.5).tocsr()


def assemble_load(mesh, problem):
    """Load vector b[i] = (f, phi_i) over all triangles."""
    ed = element_data(mesh, problem)
    f = ed.sample(problem.f)
    return np.einsum("tq,tqai,tqi->ta", ed.w, ed.phi, f, optimize=True).ravel()


# ---------------------------------------------------------------- mixed blocks

@dataclass
class MixedBlocks:
    """Matrices of the mixed discrete problem.

    With ``u`` the velocity and ``p`` the P0 coefficients the residuals are

        r1 = Mp p - B u             (tested against Q_h basis)
        r2 = D p + C u - K u - F    (tested against U_h basis)

    where ``B`` already contains the edge term d_{1,h} and ``K`` is d_{2,h}.
    """

    Mp: sp.csr_matrix
    B: sp.csr_matrix
    D: sp.csr_matrix
    C: sp.csr_matrix
    K: sp.csr_matrix
    F: np.ndarray

    def primal(self):
        """Matrix obtained by eliminating p: D Mp^-1 B + C - K."""
        Minv = sp.diags(1.0 / self.Mp.diagonal())
        return (self.D @ Minv @ self.B + self.C - self.K).tocsr()


def assemble_mixed(mesh, problem, kappa):
    _check_kappa(kappa)
    T = mesh.n_triangles
    area = mesh.geometry.area
    ed = element_data(mesh, problem)
    mass, _ = assemble_volume(mesh, problem, ed)
    abar = alpha_mean(mesh, problem, ed)
    eg, int_tr, tt, cvec = edge_blocks(mesh, problem, kappa, abar)
    dofs = _edge_dofs(eg.tri)
    c = eg.weight_c

    Mp = sp.diags(area).tocsr()
    # b_h minus the edge coupling of d_{1,h}
    rows = [np.arange(T)]
    cols = [3 * np.arange(T) + 2]
    vals = [2.0 * area]
    for s in range(2):
        has = eg.tri[:, s] >= 0
        r = np.broadcast_to(eg.tri[has, s][:, None], (has.sum(), 6))
        cc = dofs[has]
        v = -c[has, None] * int_tr[has]
        ok = cc >= 0
        rows.append(r[ok])
        cols.append(cc[ok])
        vals.append(v[ok])
    B = _block_to_csr(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (T, 3 * T))

    D = _block_to_csr(3 * np.arange(T) + 2, np.arange(T), 2.0 * abar * area, (3 * T, T))
    vr, vc = _elem_block_indices(T)
    C = _block_to_csr(vr, vc, mass, (3 * T, 3 * T))
    local = int_tr[:, :, None] * cvec[:, None, :] - (kappa / eg.length)[:, None, None] * tt
    er = np.broadcast_to(dofs[:, :, None], local.shape)
    ec = np.broadcast_to(dofs[:, None, :], local.shape)
    keep = (er >= 0) & (ec >= 0)
    K = _block_to_csr(er[keep], ec[keep], local[keep], (3 * T, 3 * T))
    return MixedBlocks(Mp, B, D, C, K, assemble_load(mesh, problem))


def apply_mixed_forms(u_h, p_h, v_h, q_h, problem, kappa, blocks=None):
    """Residuals (r1, r2) of the mixed equations for trial (u_h, p_h) and test (v_h, q_h).

    r1 = a_h(p, q) - b_h(u, q) - d_1h(u, q)
    r2 = d_h(v, p) + c_h(u, v) - l_2h(v) - d_2h(u, v)
    """
    mesh = u_h.mesh
    if not (p_h.mesh is mesh and v_h.mesh is mesh and q_h.mesh is mesh):
        raise ValueError("all functions must live on the same mesh")
    blocks = blocks or assemble_mixed(mesh, problem, kappa)
    r1 = blocks.Mp @ p_h.values - blocks.B @ u_h.coeffs
    r2 = blocks.D @ p_h.values + blocks.C @ u_h.coeffs - blocks.K @ u_h.coeffs - blocks.F
    return float(q_h.values @ r1), float(v_h.coeffs @ r2)


def mixed_residual_vectors(blocks, u, p):
    """Residuals against every basis function, (r1, r2)."""
    r1 = blocks.Mp @ p - blocks.B @ u
    r2 = blocks.D @ p + blocks.C @ u - blocks.K @ u - blocks.F
    return r1, r2


def jump_integrals(mesh, u_coeffs, eg=None, degree=5):
    """Per-edge integral of the tangential jump of a U_h function, ``(E,)``."""
    eg = eg or edge_data(mesh, degree)
    loc = np.asarray(u_coeffs).reshape(-1, 3)
    tri = np.maximum(eg.tri, 0)
    vals = np.einsum("esqa,esa->esq", eg.trace, loc[tri])
    vals[:, 1][eg.boundary] = 0.0
    return np.einsum("eq,eq->e", eg.w, vals.sum(axis=1))
