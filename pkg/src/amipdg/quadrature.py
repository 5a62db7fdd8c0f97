"""Quadrature rules on the reference triangle and the unit interval.

The reference triangle has vertices (0, 0), (1, 0), (0, 1); its rules
carry weights summing to 1/2.  Edge rules live on [0, 1] with weights
summing to 1.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_DEGREE = 30


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray  # (n, 2) reference coordinates, or (n,) on [0, 1]
    weights: np.ndarray  # (n,)
    degree: int

    def __len__(self):
        return len(self.weights)

    @property
    def barycentric(self):
        """Barycentric coordinates (n, 3) of triangle points."""
        p = np.atleast_2d(self.points)
        return np.column_stack([1.0 - p[:, 0] - p[:, 1], p[:, 0], p[:, 1]])


def _check_degree(degree):
    if not isinstance(degree, (int, np.integer)) or degree < 0 or degree > MAX_DEGREE:
        raise ValueError(f"unsupported quadrature degree {degree!r} (0..{MAX_DEGREE})")


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def edge_rule(degree=5):
    """Gauss-Legendre rule on [0, 1] exact up to ``degree``."""
    _check_degree(degree)
    n = max(1, (degree + 2) // 2)
    x, w = _gauss01(n)
    return QuadratureRule(x, w, degree)


# Symmetric 6-point rule of degree 4 (Dunavant).
_D4_A = 0.445948490915965
_D4_WA = 0.223381589678011
_D4_B = 0.091576213509771
_D4_WB = 0.109951743655322


def _conical_product(degree):
    # Collapsed Gauss rule: x along the base, y towards the apex.
    n = max(1, (degree + 2) // 2)
    s, ws = _gauss01(n)
    # Jacobi-weighted rule in the collapsed direction, weight (1 - t).
    t, wt = np.polynomial.legendre.leggauss(n + 1)
    t = 0.5 * (t + 1.0)
    wt = 0.5 * wt
    ss, tt = np.meshgrid(s, t, indexing="ij")
    ww = np.outer(ws, wt * (1.0 - t))
    x = ss * (1.0 - tt)
    y = tt
    return np.column_stack([x.ravel(), y.ravel()]), ww.ravel()


@lru_cache(maxsize=None)
def tri_rule(degree=4):
    """Positive-weight quadrature on the reference triangle exact up to ``degree``."""
    _check_degree(degree)
    if degree <= 1:
        pts = np.array([[1.0 / 3.0, 1.0 / 3.0]])
        wts = np.array([0.5])
    elif degree == 2:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        wts = np.full(3, 1.0 / 6.0)
    elif degree <= 4:
        a, b = _D4_A, _D4_B
        pts = np.array([
            [a, a], [1 - 2 * a, a], [a, 1 - 2 * a],
            [b, b], [1 - 2 * b, b], [b, 1 - 2 * b],
        ])
        wts = 0.5 * np.array([_D4_WA] * 3 + [_D4_WB] * 3)
    else:
        pts, wts = _conical_product(degree)
    return QuadratureRule(pts, wts, degree)
