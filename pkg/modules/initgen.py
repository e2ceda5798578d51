"""
Initial Guess Generator

Builds line-LG starting rules: the non-positive Legendre-Gauss nodes of a
1-D rule are laid out as a tensor grid on the corner quadrilateral
(triangle) or hexahedron (tetrahedron) at one vertex, mapped into the
simplex, and reduced to the unique symmetry orbits they generate.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import GenerationError, NumericError
from .geometry import (
    CLASSIFY_TOL,
    KINDS_BY_DIM,
    OrbitKind,
    QuadRule,
    ReferenceSimplex,
    SymOrbit,
    classify_orbit,
    orbit_cardinality,
)

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-15
NEWTON_MAX_ITER = 100
DEDUP_TOL = 1e-12
# Coordinate gaps between these two values cannot be classified reliably
AMBIGUITY_GAP = 1e-6


@dataclass(frozen=True)
class LineLGSeed:
    """The 1-D Legendre-Gauss data behind a line-LG initial guess."""
    q: int
    n1: int
    half_nodes: Tuple[float, ...]

    @property
    def m(self) -> int:
        return self.n1 % 2

    @property
    def n_r(self) -> int:
        return (self.n1 - self.m) // 2


def select_n1(domain: str, q: int) -> int:
    """Number of 1-D Legendre-Gauss nodes used for a degree-``q`` guess."""
    if q < 1:
        raise GenerationError(f"degree must be at least 1, got {q}")
    half = q // 2
    if domain == "tri":
        if (q - 1) % 4 == 0 or q % 2 == 0 or q >= 30:
            return half + 1
        return half + 2
    if domain == "tet":
        return half + 2 if q in (3, 7, 11) else half + 1
    raise GenerationError(f"unknown domain '{domain}'")


def legendre_roots(n: int) -> np.ndarray:
    """Roots of the degree-``n`` Legendre polynomial, ascending.

    Newton iteration on the three-term recurrence, started from the
    asymptotic cosine guesses.
    """
    if n < 1:
        raise NumericError(f"Legendre root count must be positive, got {n}")
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (4 * k - 1) / (4 * n + 2))

    for _ in range(NEWTON_MAX_ITER):
        p_prev, p = np.ones_like(x), x.copy()
        for j in range(2, n + 1):
            p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    else:
        raise NumericError(f"Newton iteration for {n}-point Legendre-Gauss nodes did not converge")
    return np.sort(x)


def half_line_lg_nodes(n1: int) -> List[float]:
    """Legendre-Gauss nodes of the ``n1``-point rule lying in [-1, 0]."""
    roots = legendre_roots(n1)
    m = n1 % 2
    count = (n1 - m) // 2 + m
    half = [float(x) for x in roots[:count]]
    if m:
        half[-1] = 0.0
    return half


def line_lg_seed(domain: str, q: int, n1: Optional[int] = None) -> LineLGSeed:
    if n1 is None:
        n1 = select_n1(domain, q)
    elif n1 < 1:
        raise GenerationError(f"n1 must be positive, got {n1}")
    return LineLGSeed(q=q, n1=n1, half_nodes=tuple(half_line_lg_nodes(n1)))


def predict_orbit_counts(domain: str, n1: int) -> Dict[OrbitKind, int]:
    """Orbit counts a line-LG guess built from ``n1`` nodes produces."""
    m = n1 % 2
    n_r = (n1 - m) // 2
    if domain == "tri":
        return {
            OrbitKind.S1: m,
            OrbitKind.S21: (1 + m) * n_r,
            OrbitKind.S111: (n_r * n_r - n_r) // 2,
        }
    if domain == "tet":
        return {
            OrbitKind.S1: m,
            OrbitKind.S31: (1 + m) * n_r,
            OrbitKind.S22: m * n_r,
            OrbitKind.S211: (1 + 2 * m) * (n_r * n_r - n_r) // (1 + m),
            OrbitKind.S1111: ((n_r - 1) ** 3 - n_r + 1) // 6,
        }
    raise GenerationError(f"unknown domain '{domain}'")


def _corner_points(dim: int) -> Dict[Tuple[int, ...], np.ndarray]:
    """Barycentric corners of the subdomain at vertex 0, keyed by unit-cube corner.

    A corner's nonzero bits select the vertices whose barycenter with
    vertex 0 it is: the vertex itself, edge midpoints, face centroids and
    the cell centroid.
    """
    corners = {}
    for bits in itertools.product((0, 1), repeat=dim):
        members = [0] + [axis + 1 for axis, bit in enumerate(bits) if bit]
        lam = np.zeros(dim + 1)
        lam[members] = 1.0 / len(members)
        corners[bits] = lam
    return corners


def corner_map(params: np.ndarray, dim: int) -> np.ndarray:
    """Multilinear map of unit-cube parameters onto the vertex-0 corner subdomain.

    Args:
        params: Array of shape ``(n, dim)`` with entries in [0, 1]

    Returns:
        Barycentric coordinates of shape ``(n, dim+1)``
    """
    params = np.atleast_2d(params)
    lam = np.zeros((params.shape[0], dim + 1))
    for bits, corner in _corner_points(dim).items():
        factor = np.ones(params.shape[0])
        for axis, bit in enumerate(bits):
            factor *= params[:, axis] if bit else 1.0 - params[:, axis]
        lam += factor[:, None] * corner
    return lam


def _unique_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    order = np.lexsort(rows.T[::-1])
    ordered = rows[order]
    keep = [0]
    for i in range(1, len(ordered)):
        if np.max(np.abs(ordered[i] - ordered[keep[-1]])) > tol:
            keep.append(i)
    return ordered[keep]


def _check_unambiguous(lam: np.ndarray) -> None:
    gaps = np.diff(np.sort(lam))
    if np.any((gaps > CLASSIFY_TOL) & (gaps < AMBIGUITY_GAP)):
        raise GenerationError(
            f"generated node with barycentric coordinates {lam.tolist()} cannot be "
            f"classified unambiguously"
        )


def generate_initial_guess(domain: str, q: int, n1: Optional[int] = None) -> QuadRule:
    """Line-LG initial guess of degree ``q``.

    Args:
        domain: ``"tri"`` or ``"tet"``
        q: Target degree
        n1: Number of 1-D nodes; chosen from ``q`` when omitted

    Returns:
        An unconverged rule whose orbit weights all equal ``(2/q)^3``

    Raises:
        GenerationError: A node is ambiguous or the orbit counts disagree
            with ``predict_orbit_counts``
    """
    simplex = ReferenceSimplex.from_name(domain)
    seed = line_lg_seed(domain, q, n1)
    dim = simplex.dim

    u = np.asarray(seed.half_nodes) + 1.0
    grid = np.array(list(itertools.product(u, repeat=dim)))
    lam = np.sort(corner_map(grid, dim), axis=1)
    unique = _unique_rows(lam, DEDUP_TOL)

    weight = (2.0 / q) ** 3
    orbits = []
    for point in unique:
        _check_unambiguous(point)
        kind, params = classify_orbit(point)
        orbits.append(SymOrbit(kind, params, weight, dim=dim))

    rule = QuadRule(simplex, q, orbits).sorted()
    predicted = predict_orbit_counts(domain, seed.n1)
    actual = rule.orbit_counts()
    if actual != predicted:
        raise GenerationError(
            f"line-LG guess for {domain} q={q} n1={seed.n1} produced orbit counts "
            f"{_format_counts(actual)}, expected {_format_counts(predicted)}"
        )
    logger.info("line-LG guess %s q=%d n1=%d: %d orbits, %d nodes",
                domain, q, seed.n1, len(rule.orbits), rule.num_nodes)
    return rule


def predicted_node_count(domain: str, n1: int) -> int:
    dim = 2 if domain == "tri" else 3
    return sum(orbit_cardinality(kind, dim) * n for kind, n in predict_orbit_counts(domain, n1).items())


def _format_counts(counts: Dict[OrbitKind, int]) -> str:
    kinds = KINDS_BY_DIM[3] if OrbitKind.S31 in counts else KINDS_BY_DIM[2]
    return " ".join(f"{kind.value}={counts.get(kind, 0)}" for kind in kinds)
