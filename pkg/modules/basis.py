"""
Basis Module

Orthonormal Proriol-Koornwinder-Dubiner (PKD) polynomials on the reference
triangle and tetrahedron: Vandermonde matrices, their Cartesian derivatives
and the moment vector of the basis.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .errors import BasisError
from .geometry import ReferenceSimplex, cartesian_to_barycentric

logger = logging.getLogger(__name__)

# Points may sit this far outside the closed simplex in barycentric terms
CLOSURE_TOL = 1e-12
# Collapsed coordinates are pinned to -1 closer than this to the singular vertex/edge
COLLAPSE_TOL = 1e-14


def jacobi_table(x: np.ndarray, n: int, alpha: float, beta: float) -> np.ndarray:
    """Orthonormal Jacobi polynomials of degrees 0..n at every point of ``x``.

    The polynomials are normalized on [-1, 1] against the weight
    ``(1-x)^alpha (1+x)^beta``. The leading constant is computed in log space
    so high degrees and large ``alpha`` do not overflow.

    Returns:
        Array of shape ``(n+1, len(x))``
    """
    x = np.asarray(x, dtype=float).ravel()
    table = np.zeros((n + 1, x.size))
    if n < 0:
        return table[:0]

    apb = alpha + beta
    log_gamma0 = ((apb + 1.0) * math.log(2.0) - math.log(apb + 1.0)
                  + gammaln(alpha + 1.0) + gammaln(beta + 1.0) - gammaln(apb + 1.0))
    gamma0 = math.exp(log_gamma0)
    table[0] = 1.0 / math.sqrt(gamma0)
    if n == 0:
        return table

    gamma1 = (alpha + 1.0) * (beta + 1.0) / (apb + 3.0) * gamma0
    table[1] = ((apb + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / math.sqrt(gamma1)

    a_old = 2.0 / (2.0 + apb) * math.sqrt((alpha + 1.0) * (beta + 1.0) / (apb + 3.0))
    for i in range(1, n):
        h1 = 2.0 * i + apb
        a_new = 2.0 / (h1 + 2.0) * math.sqrt(
            (i + 1.0) * (i + 1.0 + apb) * (i + 1.0 + alpha) * (i + 1.0 + beta)
            / (h1 + 1.0) / (h1 + 3.0)
        )
        b_new = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0)
        table[i + 1] = (-a_old * table[i - 1] + (x - b_new) * table[i]) / a_new
        a_old = a_new
    return table


def jacobi_derivative_table(x: np.ndarray, n: int, alpha: float, beta: float) -> np.ndarray:
    """First derivatives of the orthonormal Jacobi polynomials of degrees 0..n."""
    x = np.asarray(x, dtype=float).ravel()
    table = np.zeros((n + 1, x.size))
    if n >= 1:
        shifted = jacobi_table(x, n - 1, alpha + 1.0, beta + 1.0)
        for k in range(1, n + 1):
            table[k] = math.sqrt(k * (k + alpha + beta + 1.0)) * shifted[k - 1]
    return table


def basis_size(q: int, dim: int) -> int:
    """Number of PKD modes of total degree at most ``q``."""
    return math.comb(q + dim, dim)


@lru_cache(maxsize=None)
def pkd_indices(q: int, dim: int) -> Tuple[Tuple[int, ...], ...]:
    """Mode multi-indices, graded by total degree then lexicographic."""
    indices = []
    for total in range(q + 1):
        if dim == 2:
            for i in range(total + 1):
                indices.append((i, total - i))
        else:
            for i in range(total + 1):
                for j in range(total - i + 1):
                    indices.append((i, j, total - i - j))
    return tuple(indices)


def _check_points(points: np.ndarray, q: int, simplex: ReferenceSimplex) -> np.ndarray:
    if q < 0:
        raise BasisError(f"basis degree must be non-negative, got {q}")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != simplex.dim:
        raise BasisError(f"expected {simplex.dim}-D points, got shape {points.shape}")
    if points.shape[0]:
        lam = cartesian_to_barycentric(points, simplex)
        if not np.all(np.isfinite(lam)) or lam.min() < -CLOSURE_TOL:
            worst = int(np.argmin(lam.min(axis=1)))
            raise BasisError(
                f"point {points[worst].tolist()} lies outside the closed {simplex.name}"
            )
    return points


def _collapse_2d(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x, y = points[:, 0], points[:, 1]
    denom = 1.0 - y
    singular = np.abs(denom) < COLLAPSE_TOL
    a = np.where(singular, -1.0, 2.0 * (1.0 + x) / np.where(singular, 1.0, denom) - 1.0)
    return a, y.copy()


def _collapse_3d(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, s, t = points[:, 0], points[:, 1], points[:, 2]
    denom_a = -s - t
    singular_a = np.abs(denom_a) < COLLAPSE_TOL
    a = np.where(singular_a, -1.0, 2.0 * (1.0 + r) / np.where(singular_a, 1.0, denom_a) - 1.0)
    denom_b = 1.0 - t
    singular_b = np.abs(denom_b) < COLLAPSE_TOL
    b = np.where(singular_b, -1.0, 2.0 * (1.0 + s) / np.where(singular_b, 1.0, denom_b) - 1.0)
    return a, b, t.copy()


def _pow(base: np.ndarray, exponent: int) -> np.ndarray:
    return np.power(base, max(exponent, 0))


class _JacobiCache:
    """Jacobi values and derivatives at one coordinate, keyed by (alpha, degree)."""

    def __init__(self, x: np.ndarray):
        self.x = x
        self._values: Dict[Tuple[float, int], np.ndarray] = {}
        self._derivs: Dict[Tuple[float, int], np.ndarray] = {}

    def values(self, alpha: float, n: int) -> np.ndarray:
        key = (alpha, n)
        if key not in self._values:
            self._values[key] = jacobi_table(self.x, n, alpha, 0.0)
        return self._values[key]

    def derivs(self, alpha: float, n: int) -> np.ndarray:
        key = (alpha, n)
        if key not in self._derivs:
            self._derivs[key] = jacobi_derivative_table(self.x, n, alpha, 0.0)
        return self._derivs[key]


def _triangle_modes(points: np.ndarray, q: int, gradients: bool):
    a, b = _collapse_2d(points)
    fa, gb = _JacobiCache(a), _JacobiCache(b)
    one_b = 1.0 - b
    scale = math.sqrt(2.0)

    indices = pkd_indices(q, 2)
    V = np.empty((points.shape[0], len(indices)))
    Vx = (np.empty_like(V), np.empty_like(V)) if gradients else None

    for col, (i, j) in enumerate(indices):
        f = fa.values(0.0, q)[i]
        g = gb.values(2.0 * i + 1.0, q - i)[j]
        V[:, col] = scale * f * g * _pow(one_b, i)
        if not gradients:
            continue
        df = fa.derivs(0.0, q)[i]
        dg = gb.derivs(2.0 * i + 1.0, q - i)[j]
        lower = _pow(one_b, i - 1)
        Vx[0][:, col] = 2.0 * scale * df * g * lower
        Vx[1][:, col] = scale * (df * (1.0 + a) * g * lower
                                 + f * dg * _pow(one_b, i)
                                 - i * f * g * lower)
    return V, Vx


def _tetrahedron_modes(points: np.ndarray, q: int, gradients: bool):
    a, b, c = _collapse_3d(points)
    fa, gb, hc = _JacobiCache(a), _JacobiCache(b), _JacobiCache(c)
    one_b = 1.0 - b
    one_c = 1.0 - c
    scale = 2.0 * math.sqrt(2.0)

    indices = pkd_indices(q, 3)
    V = np.empty((points.shape[0], len(indices)))
    Vx = tuple(np.empty_like(V) for _ in range(3)) if gradients else None

    for col, (i, j, k) in enumerate(indices):
        alpha_g = 2.0 * i + 1.0
        alpha_h = 2.0 * (i + j) + 2.0
        f = fa.values(0.0, q)[i]
        g = gb.values(alpha_g, q - i)[j]
        h = hc.values(alpha_h, q - i - j)[k]
        V[:, col] = scale * f * g * h * _pow(one_b, i) * _pow(one_c, i + j)
        if not gradients:
            continue
        df = fa.derivs(0.0, q)[i]
        dg = gb.derivs(alpha_g, q - i)[j]
        dh = hc.derivs(alpha_h, q - i - j)[k]

        term_a = 2.0 * (1.0 + a) * df * g * h * _pow(one_b, i - 1) * _pow(one_c, i + j - 1)
        term_b = f * h * _pow(one_c, i + j - 1) * (dg * _pow(one_b, i) - i * g * _pow(one_b, i - 1))
        term_c = f * g * _pow(one_b, i) * (dh * _pow(one_c, i + j) - (i + j) * h * _pow(one_c, i + j - 1))

        Vx[0][:, col] = scale * 4.0 * df * g * h * _pow(one_b, i - 1) * _pow(one_c, i + j - 1)
        Vx[1][:, col] = scale * (term_a + 2.0 * term_b)
        Vx[2][:, col] = scale * (term_a + (1.0 + b) * term_b + term_c)
    return V, Vx


def pkd_vandermonde(points, q: int, simplex: ReferenceSimplex) -> np.ndarray:
    """Values of every PKD mode up to degree ``q``.

    Args:
        points: Cartesian points, shape ``(n, dim)``, inside the closed simplex
        q: Total degree
        simplex: Reference simplex

    Returns:
        ``V`` of shape ``(n, basis_size(q, dim))``, column j holding mode j
    """
    points = _check_points(points, q, simplex)
    if simplex.dim == 2:
        V, _ = _triangle_modes(points, q, gradients=False)
    else:
        V, _ = _tetrahedron_modes(points, q, gradients=False)
    return V


def pkd_gradients(points, q: int, simplex: ReferenceSimplex) -> Tuple[np.ndarray, ...]:
    """Cartesian partial derivatives of every PKD mode, one matrix per axis."""
    points = _check_points(points, q, simplex)
    if simplex.dim == 2:
        _, Vx = _triangle_modes(points, q, gradients=True)
    else:
        _, Vx = _tetrahedron_modes(points, q, gradients=True)
    return Vx


def moment_vector(q: int, simplex: ReferenceSimplex) -> np.ndarray:
    """Exact integrals of the PKD modes: only the constant mode is nonzero."""
    if q < 0:
        raise BasisError(f"basis degree must be non-negative, got {q}")
    f = np.zeros(basis_size(q, simplex.dim))
    f[0] = math.sqrt(simplex.measure)
    return f


@dataclass
class BasisEval:
    """PKD basis data at a node set.

    Attributes:
        degree: Total degree q of the basis
        V: Mode values, shape ``(n_nodes, n_b)``
        Vx: Cartesian derivatives of ``V``, one matrix per axis
        f: Moment vector
    """
    degree: int
    V: np.ndarray
    Vx: Optional[Tuple[np.ndarray, ...]]
    f: np.ndarray

    @property
    def n_b(self) -> int:
        return self.f.size


def evaluate_basis(points, q: int, simplex: ReferenceSimplex, gradients: bool = True) -> BasisEval:
    """Vandermonde, optional derivative matrices and moments in one pass."""
    points = _check_points(points, q, simplex)
    builder = _triangle_modes if simplex.dim == 2 else _tetrahedron_modes
    V, Vx = builder(points, q, gradients)
    logger.debug("evaluated %d PKD modes of degree %d at %d points on %s",
                 V.shape[1], q, V.shape[0], simplex.name)
    return BasisEval(degree=q, V=V, Vx=Vx, f=moment_vector(q, simplex))
