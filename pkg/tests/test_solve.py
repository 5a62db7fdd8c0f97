import numpy as np
import pytest

from amipdg.assembly import assemble_mixed
from amipdg.estimator import dg_error
from amipdg.mesh import build_structured_mesh
from amipdg.problem import constant_problem
from amipdg.problems import problem_ex1
from amipdg.solve import recover_p, solve_mixed, solve_primal
from amipdg.space import DGFunction

from conftest import random_mesh, unit_square_two_triangles, whitney_field

ZERO_F = constant_problem(lambda x: np.zeros((len(x), 2)))


def test_zero_source_gives_zero_solution():
    m = build_structured_mesh("lshape", 4)
    u, info = solve_primal(m, ZERO_F)
    assert not np.any(u.coeffs)
    assert info["n_dofs"] == 3 * m.n_triangles
    sol = solve_mixed(m, ZERO_F)
    assert not np.any(sol.u.coeffs) and not np.any(sol.p.values)


def test_recover_zero():
    m = build_structured_mesh("square", 4)
    assert not np.any(recover_p(m, DGFunction(m)).values)


def test_recover_conforming_field_gives_curl(rng):
    m = random_mesh(rng, M=4, rounds=2)
    w = np.where(m.edges.is_boundary, 0.0, rng.standard_normal(m.edges.n_edges))
    u = whitney_field(m, w)
    np.testing.assert_allclose(recover_p(m, u).values, u.curl(), rtol=0, atol=1e-12)


def _hand_recovery(mesh, u):
    """p|tau = 2c - |tau|^-1 sum_e c_e int_e [[u]], with Simpson's rule on each edge."""
    V, tris = mesh.vertices, mesh.triangles
    edges = {}
    for t, tri in enumerate(tris):
        for k in range(3):
            a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
            edges.setdefault(frozenset((a, b)), []).append((t, a, b))
    p = np.array([2 * u.local[t, 2] for t in range(len(tris))])
    area = mesh.geometry.area
    for sides in edges.values():
        c = 1.0 if len(sides) == 1 else 0.5
        jump = 0.0
        for t, a, b in sides:
            tvec = V[b] - V[a]  # counter-clockwise direction for triangle t, length |e|
            pts = [V[a], 0.5 * (V[a] + V[b]), V[b]]
            vals = [u(t, x) @ tvec for x in pts]
            jump += (vals[0] + 4 * vals[1] + vals[2]) / 6.0
        for t, _, _ in sides:
            p[t] -= c * jump / area[t]
    return p


def test_recover_two_triangles_matches_mixed_block_and_hand_oracle(rng):
    m = unit_square_two_triangles()
    u = DGFunction(m, rng.standard_normal(6))
    p = recover_p(m, u).values
    blocks = assemble_mixed(m, problem_ex1(), 50.0)
    direct = np.linalg.solve(blocks.Mp.toarray(), blocks.B @ u.coeffs)
    np.testing.assert_allclose(p, direct, rtol=1e-13)
    np.testing.assert_allclose(p, _hand_recovery(m, u), rtol=1e-12)


def test_recover_random_mesh_matches_hand_oracle(rng):
    m = random_mesh(rng, M=3, rounds=1)
    u = DGFunction(m, rng.standard_normal(3 * m.n_triangles))
    np.testing.assert_allclose(recover_p(m, u).values, _hand_recovery(m, u), rtol=1e-11, atol=1e-12)


def test_dg_error_decreases_under_uniform_refinement():
    p = problem_ex1()
    errs = []
    for M in (8, 16, 32):
        m = build_structured_mesh("square", M)
        sol = solve_mixed(m, p, 50.0)
        errs.append(dg_error(m, sol.u, sol.p, p, 50.0)[0])
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.1)


def test_solution_records_diagnostics():
    m = build_structured_mesh("square", 4)
    sol = solve_mixed(m, problem_ex1())
    assert sol.mesh is m
    assert sol.info["residual"] < 1e-10
