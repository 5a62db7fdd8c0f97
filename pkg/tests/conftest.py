import numpy as np
import pytest

from amipdg.mesh import Mesh, bisect, build_structured_mesh
from amipdg.space import DGFunction


def unit_square_two_triangles():
    v = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    return Mesh.from_arrays(v, [(0, 1, 2), (0, 2, 3)])


def single_triangle(vertices=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))):
    return Mesh.from_arrays(vertices, [(0, 1, 2)])


def random_mesh(rng, M=4, rounds=2, jitter=0.15, domain="square"):
    """Structured mesh, a few rounds of random local bisection, then vertex jitter."""
    mesh = build_structured_mesh(domain, M)
    for _ in range(rounds):
        k = max(1, mesh.n_triangles // 10)
        mesh = bisect(mesh, rng.choice(mesh.n_triangles, size=k, replace=False))
    v = mesh.vertices.copy()
    interior = (np.abs(v[:, 0]) < 1 - 1e-12) & (np.abs(v[:, 1]) < 1 - 1e-12)
    if domain == "lshape":
        interior &= ~((np.abs(v[:, 0]) < 1e-12) | (np.abs(v[:, 1]) < 1e-12))
    h = np.sqrt(mesh.geometry.area.min())
    v[interior] += jitter * h * rng.uniform(-1, 1, size=(interior.sum(), 2))
    return Mesh(v, mesh.triangles, mesh.refine_edge, mesh.generation)


def whitney_field(mesh, edge_weights):
    """Lowest-order edge-element field sum_e w_e (l_i grad l_j - l_j grad l_i).

    It is elementwise of the form a + b (-(y - yc), x - xc), has a continuous
    tangential trace and vanishing tangential trace on edges with zero weight.
    """
    topo = mesh.edges
    V = mesh.vertices
    coeffs = np.zeros((mesh.n_triangles, 3))
    for t, tri in enumerate(mesh.triangles):
        P = V[tri]
        # barycentric gradients: rows of inv([[1,x,y],...])^T
        G = np.linalg.inv(np.column_stack([np.ones(3), P]))[1:].T  # (3, 2)
        for k in range(3):
            e = topo.tri_edge[t, k]
            w = edge_weights[e]
            if w == 0.0:
                continue
            i, j = topo.edges[e]  # global orientation low -> high
            li, lj = list(tri).index(i), list(tri).index(j)
            const = (G[lj] - G[li]) / 3.0  # value at the centroid (all l = 1/3)
            rot = G[li, 0] * G[lj, 1] - G[li, 1] * G[lj, 0]  # half the curl
            coeffs[t, :2] += w * const
            coeffs[t, 2] += w * rot
    return DGFunction(mesh, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_problem(rng, variable_alpha=True):
    """Random SPD coefficients and a smooth random source on (-1, 1)^2."""
    from amipdg.problem import ProblemSpec, constant_matrix

    a0, a1 = rng.uniform(0.5, 2.0), rng.uniform(0.0, 0.4) if variable_alpha else 0.0
    L = rng.standard_normal((2, 2))
    beta = L @ L.T + 0.5 * np.eye(2)
    c = rng.standard_normal((2, 3))

    def alpha(x, region=None):
        return a0 * (1.0 + a1 * np.sin(2.0 * x[:, 0] + x[:, 1]))

    def f(x, region=None):
        X, Y = x[:, 0], x[:, 1]
        return np.column_stack([c[0, 0] + c[0, 1] * np.sin(3 * Y) + c[0, 2] * X * Y,
                                c[1, 0] + c[1, 1] * np.cos(2 * X) + c[1, 2] * X * X])

    def div_f(x, region=None):
        X, Y = x[:, 0], x[:, 1]
        return c[0, 2] * Y + 2 * c[1, 2] * X

    return ProblemSpec(name="random", domain="square", f=f, div_f=div_f, alpha=alpha,
                       beta=constant_matrix(beta))
