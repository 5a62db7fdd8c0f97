import numpy as np
import pytest
import sympy as sp

from amipdg.problem import ProblemError
from amipdg.problems import get_problem, problem_ex1, problem_ex2, problem_ex3

PI = np.pi


def _pt(x, y):
    return np.array([[x, y]], dtype=float)


def _boundary_points(n=9):
    s = np.linspace(-1, 1, n)
    one = np.ones(n)
    return [(np.column_stack([s, -one]), (1, 0)), (np.column_stack([one, s]), (0, 1)),
            (np.column_stack([s, one]), (-1, 0)), (np.column_stack([-one, s]), (0, -1))]


@pytest.mark.parametrize("make", [problem_ex1, problem_ex2])
def test_tangential_trace_vanishes_on_boundary(make):
    p = make()
    for x, t in _boundary_points():
        ut = p.u(x, np.zeros(len(x), dtype=int)) @ np.array(t, dtype=float)
        np.testing.assert_allclose(ut, 0.0, atol=1e-15)


def test_ex1_printed_source_at_half_zero():
    f = problem_ex1("printed").f(_pt(0.5, 0.0))[0]
    np.testing.assert_allclose(f, [0.0, 1 - 2 * PI**2], atol=1e-14)


def test_ex1_consistent_source_is_curl_curl_plus_u():
    X, Y = sp.symbols("x y")
    u1, u2 = sp.cos(sp.pi * X) * sp.sin(sp.pi * Y), -sp.cos(sp.pi * Y) * sp.sin(sp.pi * X)
    w = sp.diff(u2, X) - sp.diff(u1, Y)
    f = sp.lambdify((X, Y), [sp.diff(w, Y) + u1, -sp.diff(w, X) + u2])
    for x, y in [(0.3, -0.7), (0.11, 0.5), (-0.9, 0.2)]:
        np.testing.assert_allclose(problem_ex1().f(_pt(x, y))[0], f(x, y), rtol=1e-13, atol=1e-14)


def test_ex1_curl_at_origin():
    # the analytic curl of u is -2 pi cos(pi x) cos(pi y); the value 0 quoted for
    # the origin comes from a mis-stated formula and does not hold
    p = problem_ex1()
    d = 1e-6
    fd = ((p.u(_pt(d, 0))[0, 1] - p.u(_pt(-d, 0))[0, 1])
          - (p.u(_pt(0, d))[0, 0] - p.u(_pt(0, -d))[0, 0])) / (2 * d)
    assert p.curl_u(_pt(0, 0))[0] == pytest.approx(-2 * PI, rel=1e-15)
    assert fd == pytest.approx(-2 * PI, rel=1e-8)
    assert p.curl_u(_pt(0, 0))[0] != 0.0


def test_ex1_unknown_source_variant():
    with pytest.raises(ProblemError):
        problem_ex1("other")


def test_ex2_origin():
    np.testing.assert_array_equal(problem_ex2().u(_pt(0, 0))[0], [0.0, 0.0])


def _ex2_symbolic():
    X, Y = sp.symbols("x y")
    g = (X**2 - 1) * (Y**2 - 1) / (X**2 + Y**2 + sp.Rational(1, 50))
    u1, u2 = Y * g, -X * g
    w = sp.diff(u2, X) - sp.diff(u1, Y)
    return X, Y, u1, u2, w


@pytest.mark.parametrize("region,beta,point", [(0, 1.0, (0.21, -0.13)), (0, 1.0, (-0.4, 0.35)),
                                                (1, 100.0, (0.7, 0.6))])
def test_ex2_source_matches_symbolic_oracle(region, beta, point):
    X, Y, u1, u2, w = _ex2_symbolic()
    f = sp.lambdify((X, Y), [sp.diff(w, Y) + beta * u1, -sp.diff(w, X) + beta * u2])
    div = sp.lambdify((X, Y), beta * (sp.diff(u1, X) + sp.diff(u2, Y)))
    curl = sp.lambdify((X, Y), w)
    p = problem_ex2()
    x, r = _pt(*point), np.array([region])
    np.testing.assert_allclose(p.f(x, r)[0], f(*point), rtol=1e-12)
    assert p.curl_u(x)[0] == pytest.approx(float(curl(*point)), rel=1e-12)
    assert p.div_f(x, r)[0] == pytest.approx(float(div(*point)), rel=1e-10, abs=1e-12)


def test_ex2_regions_follow_inner_square():
    p = problem_ex2()
    r = p.region(np.array([[0.1, 0.1], [0.6, 0.0], [-0.45, 0.45], [0.0, -0.9]]))
    np.testing.assert_array_equal(r, [0, 1, 0, 1])
    np.testing.assert_allclose(p.beta(np.zeros((2, 2)), np.array([0, 1]))[:, 0, 0], [1.0, 100.0])


def test_ex3_alpha_and_beta():
    p = problem_ex3()
    assert p.alpha(_pt(0, 0))[0] == 1.0
    b = p.beta(_pt(1, 1))[0]
    np.testing.assert_array_equal(b, [[2.0, 1.0], [1.0, 2.0]])
    assert np.all(np.linalg.eigvalsh(b) > 0)


def _central(fn, x, y, d=1e-5):
    return ((fn(_pt(x + d, y)) - fn(_pt(x - d, y))) / (2 * d),
            (fn(_pt(x, y + d)) - fn(_pt(x, y - d))) / (2 * d))


def test_ex3_div_f_finite_difference():
    p = problem_ex3()
    x, y, d = 0.3, -0.2, 1e-4
    # fourth-order central differences
    def dd(fn, e):
        e = np.array(e) * d
        return (-fn(_pt(x, y) + 2 * e) + 8 * fn(_pt(x, y) + e) - 8 * fn(_pt(x, y) - e)
                + fn(_pt(x, y) - 2 * e)) / (12 * d)
    fd = dd(p.f, (1, 0))[0, 0] + dd(p.f, (0, 1))[0, 1]
    assert p.div_f(_pt(x, y))[0] == pytest.approx(fd, abs=1e-8)


def test_ex3_coefficient_derivatives():
    p = problem_ex3()
    for x, y in [(0.3, -0.2), (-0.7, 0.4)]:
        gx, gy = _central(p.alpha, x, y)
        np.testing.assert_allclose(p.grad_alpha(_pt(x, y))[0], [gx[0], gy[0]], rtol=1e-8)
        bx, by = _central(p.beta, x, y)
        np.testing.assert_allclose(p.dbeta_dx(_pt(x, y))[0], bx[0], atol=1e-9)
        np.testing.assert_allclose(p.dbeta_dy(_pt(x, y))[0], by[0], atol=1e-9)


def test_ex3_has_no_exact_solution():
    p = problem_ex3()
    assert not p.has_exact and p.domain == "lshape"


def test_get_problem():
    assert get_problem("ex2").name == "ex2"
    with pytest.raises(ProblemError):
        get_problem("ex9")
