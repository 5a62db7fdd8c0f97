"""The three benchmark problems.

ex1  smooth sinusoidal solution on (-1, 1)^2, alpha = beta = 1
ex2  peaked solution at the origin, beta jumping across (-0.5, 0.5)^2
ex3  L-shaped domain, variable alpha and matrix beta, no exact solution
"""
import numpy as np

from .problem import ProblemError, ProblemSpec, constant_matrix, constant_scalar, zero_matrix, zero_vector

PI = np.pi


def problem_ex1(source="consistent"):
    """Smooth solution u = (cos(pi x) sin(pi y), -cos(pi y) sin(pi x)).

    ``source="consistent"`` uses f = (2 pi^2 + 1) u, which is what
    curl curl u + u evaluates to.  ``source="printed"`` keeps the factor
    (2 pi^2 - 1) as printed with the benchmark; u is then not the exact
    solution of the discrete data and is only useful for comparison.
    """
    if source == "consistent":
        factor = 2 * PI**2 + 1
    elif source == "printed":
        factor = 2 * PI**2 - 1
    else:
        raise ProblemError(f"unknown source variant {source!r}")

    def u(x, region=None):
        X, Y = x[:, 0], x[:, 1]
        return np.column_stack([np.cos(PI * X) * np.sin(PI * Y), -np.cos(PI * Y) * np.sin(PI * X)])

    def curl_u(x, region=None):
        return -2 * PI * np.cos(PI * x[:, 0]) * np.cos(PI * x[:, 1])

    def f(x, region=None):
        return factor * u(x)

    def div_f(x, region=None):
        # div u = -pi sin(pi x) sin(pi y) + pi sin(pi y) sin(pi x) = 0
        return np.zeros(len(x))

    return ProblemSpec(name="ex1", domain="square", f=f, div_f=div_f, u=u, curl_u=curl_u,
                       alpha=constant_scalar(1.0), beta=constant_matrix(1.0))


EPS2 = 0.02
INNER = 0.5
BETA_INNER, BETA_OUTER = 1.0, 100.0


def _ex2_g(x):
    """g = (x^2-1)(y^2-1)/(x^2+y^2+0.02) and its first and second derivatives."""
    X, Y = x[:, 0], x[:, 1]
    a, b = X * X - 1, Y * Y - 1
    N, Nx, Ny = a * b, 2 * X * b, 2 * Y * a
    Nxx, Nyy, Nxy = 2 * b, 2 * a, 4 * X * Y
    D = X * X + Y * Y + EPS2
    Dx, Dy = 2 * X, 2 * Y
    g = N / D
    gx = (Nx - g * Dx) / D
    gy = (Ny - g * Dy) / D
    gxx = (Nxx - 2 * gx * Dx - 2 * g) / D
    gyy = (Nyy - 2 * gy * Dy - 2 * g) / D
    gxy = (Nxy - gx * Dy - gy * Dx) / D
    return g, gx, gy, gxx, gyy, gxy


def _ex2_region(centroids):
    c = np.asarray(centroids)
    inside = (np.abs(c[:, 0]) < INNER) & (np.abs(c[:, 1]) < INNER)
    return np.where(inside, 0, 1)


def _ex2_beta_value(region):
    return np.where(np.asarray(region) == 0, BETA_INNER, BETA_OUTER)


def problem_ex2():
    """u = g (y, -x); alpha = 1; beta = 1 on (-0.5, 0.5)^2 and 100 outside."""

    def u(x, region=None):
        g = _ex2_g(x)[0]
        return np.column_stack([x[:, 1] * g, -x[:, 0] * g])

    def curl_u(x, region=None):
        g, gx, gy = _ex2_g(x)[:3]
        return -2 * g - x[:, 0] * gx - x[:, 1] * gy

    def f(x, region):
        g, gx, gy, gxx, gyy, gxy = _ex2_g(x)
        X, Y = x[:, 0], x[:, 1]
        px = -3 * gx - X * gxx - Y * gxy
        py = -3 * gy - X * gxy - Y * gyy
        b = _ex2_beta_value(region)
        return np.column_stack([py + b * Y * g, -px - b * X * g])

    def div_f(x, region):
        g, gx, gy = _ex2_g(x)[:3]
        return _ex2_beta_value(region) * (x[:, 1] * gx - x[:, 0] * gy)

    def beta(x, region):
        b = _ex2_beta_value(region)
        return b[:, None, None] * np.eye(2)[None]

    return ProblemSpec(name="ex2", domain="square", f=f, div_f=div_f, u=u, curl_u=curl_u,
                       alpha=constant_scalar(1.0), beta=beta, region=_ex2_region,
                       tri_degree=7, edge_degree=9)


EPS3 = 0.01


def problem_ex3():
    """L-shape with alpha = 1/(1+x^2+y^2), beta = [[1+x^2, xy], [xy, 1+y^2]]."""

    def alpha(x, region=None):
        return 1.0 / (1.0 + x[:, 0] ** 2 + x[:, 1] ** 2)

    def grad_alpha(x, region=None):
        s = 1.0 + x[:, 0] ** 2 + x[:, 1] ** 2
        return -2.0 * x / (s * s)[:, None]

    def beta(x, region=None):
        X, Y = x[:, 0], x[:, 1]
        out = np.empty((len(x), 2, 2))
        out[:, 0, 0] = 1 + X * X
        out[:, 0, 1] = out[:, 1, 0] = X * Y
        out[:, 1, 1] = 1 + Y * Y
        return out

    def dbeta_dx(x, region=None):
        X, Y = x[:, 0], x[:, 1]
        out = np.zeros((len(x), 2, 2))
        out[:, 0, 0] = 2 * X
        out[:, 0, 1] = out[:, 1, 0] = Y
        return out

    def dbeta_dy(x, region=None):
        X, Y = x[:, 0], x[:, 1]
        out = np.zeros((len(x), 2, 2))
        out[:, 0, 1] = out[:, 1, 0] = X
        out[:, 1, 1] = 2 * Y
        return out

    def f(x, region=None):
        v = 1.0 / (x[:, 0] ** 2 + x[:, 1] ** 2 + EPS3)
        return np.column_stack([v, v])

    def div_f(x, region=None):
        D = x[:, 0] ** 2 + x[:, 1] ** 2 + EPS3
        return -2.0 * (x[:, 0] + x[:, 1]) / (D * D)

    return ProblemSpec(name="ex3", domain="lshape", f=f, div_f=div_f, alpha=alpha,
                       grad_alpha=grad_alpha, beta=beta, dbeta_dx=dbeta_dx, dbeta_dy=dbeta_dy,
                       tri_degree=7, edge_degree=9)


PROBLEMS = {"ex1": problem_ex1, "ex2": problem_ex2, "ex3": problem_ex3}


def get_problem(name):
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ProblemError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None


__all__ = ["problem_ex1", "problem_ex2", "problem_ex3", "get_problem", "PROBLEMS",
           "zero_vector", "zero_matrix"]
