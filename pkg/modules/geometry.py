"""
Geometry Module

Reference simplices, barycentric/Cartesian maps, symmetry orbits and their
expansion into full node sets.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DegeneracyError, GeometryError, InteriorityError, OrbitInputError

logger = logging.getLogger(__name__)

# Equality tolerance on barycentric coordinates for orbit classification
CLASSIFY_TOL = 1e-10


class OrbitKind(Enum):
    """Symmetry orbit types on the triangle and the tetrahedron."""
    S1 = "S1"
    S21 = "S21"
    S111 = "S111"
    S31 = "S31"
    S22 = "S22"
    S211 = "S211"
    S1111 = "S1111"


TRI_KINDS = (OrbitKind.S1, OrbitKind.S21, OrbitKind.S111)
TET_KINDS = (OrbitKind.S1, OrbitKind.S31, OrbitKind.S22, OrbitKind.S211, OrbitKind.S1111)
KINDS_BY_DIM = {2: TRI_KINDS, 3: TET_KINDS}


@dataclass(frozen=True)
class _OrbitPattern:
    """Affine description of an orbit's representative barycentric point.

    The representative is ``offset + slopes @ params``; ``labels`` mark which
    coordinates are symbolically equal.
    """
    labels: Tuple[str, ...]
    offset: Tuple[float, ...]
    slopes: Tuple[Tuple[float, ...], ...]

    @property
    def n_params(self) -> int:
        return len(self.slopes[0]) if self.slopes else 0


_PATTERNS: Dict[Tuple[int, OrbitKind], _OrbitPattern] = {
    (2, OrbitKind.S1): _OrbitPattern(
        ("a", "a", "a"), (1 / 3, 1 / 3, 1 / 3), ((), (), ())),
    (2, OrbitKind.S21): _OrbitPattern(
        ("a", "a", "b"), (0.0, 0.0, 1.0), ((1.0,), (1.0,), (-2.0,))),
    (2, OrbitKind.S111): _OrbitPattern(
        ("a", "b", "c"), (0.0, 0.0, 1.0), ((1.0, 0.0), (0.0, 1.0), (-1.0, -1.0))),
    (3, OrbitKind.S1): _OrbitPattern(
        ("a", "a", "a", "a"), (0.25, 0.25, 0.25, 0.25), ((), (), (), ())),
    (3, OrbitKind.S31): _OrbitPattern(
        ("a", "a", "a", "b"), (0.0, 0.0, 0.0, 1.0), ((1.0,), (1.0,), (1.0,), (-3.0,))),
    (3, OrbitKind.S22): _OrbitPattern(
        ("a", "a", "b", "b"), (0.0, 0.0, 0.5, 0.5), ((1.0,), (1.0,), (-1.0,), (-1.0,))),
    (3, OrbitKind.S211): _OrbitPattern(
        ("a", "a", "b", "c"), (0.0, 0.0, 0.0, 1.0),
        ((1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-2.0, -1.0))),
    (3, OrbitKind.S1111): _OrbitPattern(
        ("a", "b", "c", "d"), (0.0, 0.0, 0.0, 1.0),
        ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (-1.0, -1.0, -1.0))),
}


def _pattern(kind: OrbitKind, dim: int) -> _OrbitPattern:
    try:
        return _PATTERNS[(dim, kind)]
    except KeyError:
        raise GeometryError(f"orbit kind {kind.value} does not exist in dimension {dim}") from None


@lru_cache(maxsize=None)
def orbit_permutations(kind: OrbitKind, dim: int) -> Tuple[Tuple[int, ...], ...]:
    """Distinct vertex permutations of an orbit, in lexicographic order.

    Two permutations are the same node when they map the representative's
    label pattern to the same tuple, whatever the numeric parameter values.
    """
    labels = _pattern(kind, dim).labels
    seen = set()
    perms = []
    for perm in itertools.permutations(range(dim + 1)):
        key = tuple(labels[i] for i in perm)
        if key not in seen:
            seen.add(key)
            perms.append(perm)
    return tuple(perms)


def orbit_cardinality(kind: OrbitKind, dim: int) -> int:
    """Number of nodes generated by one orbit of ``kind``."""
    return len(orbit_permutations(kind, dim))


def orbit_param_count(kind: OrbitKind, dim: int) -> int:
    return _pattern(kind, dim).n_params


def orbit_affine_map(kind: OrbitKind, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Offset vector and slope matrix of the representative point.

    Returns:
        ``(offset, slopes)`` with shapes ``(dim+1,)`` and ``(dim+1, n_params)``.
    """
    pattern = _pattern(kind, dim)
    offset = np.array(pattern.offset, dtype=float)
    slopes = np.array(pattern.slopes, dtype=float).reshape(dim + 1, pattern.n_params)
    return offset, slopes


@dataclass(frozen=True)
class ReferenceSimplex:
    """A reference triangle or tetrahedron.

    Attributes:
        name: Short domain name, ``"tri"`` or ``"tet"``
        dim: Spatial dimension
        vertices: Cartesian vertex coordinates, one vertex per row
        measure: Exact area or volume
    """
    name: str
    dim: int
    vertices: Tuple[Tuple[float, ...], ...]
    measure: Fraction

    @classmethod
    def triangle(cls) -> "ReferenceSimplex":
        return cls("tri", 2, ((-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)), Fraction(2))

    @classmethod
    def tetrahedron(cls) -> "ReferenceSimplex":
        return cls(
            "tet", 3,
            ((-1.0, -1.0, -1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)),
            Fraction(4, 3),
        )

    @classmethod
    def from_name(cls, name: str) -> "ReferenceSimplex":
        """Look up a reference simplex by domain name (``tri`` or ``tet``)."""
        if name == "tri":
            return cls.triangle()
        if name == "tet":
            return cls.tetrahedron()
        raise GeometryError(f"unknown domain '{name}' (expected 'tri' or 'tet')")

    @property
    def vertex_matrix(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @property
    def kinds(self) -> Tuple[OrbitKind, ...]:
        return KINDS_BY_DIM[self.dim]

    @property
    def centroid(self) -> np.ndarray:
        return self.vertex_matrix.mean(axis=0)


@dataclass(frozen=True)
class SymOrbit:
    """One symmetry orbit: a kind, its free barycentric parameters and one weight.

    Attributes:
        kind: Orbit type
        params: Free parameters (alpha, beta, gamma), 0 to 3 of them
        weight: Weight shared by every node of the orbit
        dim: Dimension of the simplex the orbit lives on
    """
    kind: OrbitKind
    params: Tuple[float, ...]
    weight: float
    dim: int = 2

    def __post_init__(self):
        expected = orbit_param_count(self.kind, self.dim)
        if len(self.params) != expected:
            raise GeometryError(
                f"{self.kind.value} takes {expected} parameter(s), got {len(self.params)}"
            )
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def cardinality(self) -> int:
        return orbit_cardinality(self.kind, self.dim)

    def representative(self) -> np.ndarray:
        """Barycentric coordinates of the orbit's representative node."""
        offset, slopes = orbit_affine_map(self.kind, self.dim)
        return offset + slopes @ np.asarray(self.params, dtype=float)

    def expand_barycentric(self) -> np.ndarray:
        """Barycentric coordinates of every node, shape ``(cardinality, dim+1)``."""
        rep = self.representative()
        return rep[np.array(orbit_permutations(self.kind, self.dim))]

    def with_weight(self, weight: float) -> "SymOrbit":
        return replace(self, weight=weight)


def check_orbit(orbit: SymOrbit, tol: float = CLASSIFY_TOL) -> None:
    """Raise if the orbit's nodes are not interior or its pattern is degenerate."""
    rep = orbit.representative()
    if not np.all(np.isfinite(rep)) or np.min(rep) <= 0.0:
        raise InteriorityError(
            f"{orbit.kind.value} orbit with params {orbit.params} has a node outside the "
            f"open simplex (barycentric {rep.tolist()})"
        )
    labels = _pattern(orbit.kind, orbit.dim).labels
    for i in range(len(rep)):
        for j in range(i + 1, len(rep)):
            if labels[i] != labels[j] and abs(rep[i] - rep[j]) <= tol:
                raise DegeneracyError(
                    f"{orbit.kind.value} orbit with params {orbit.params} collapses onto a "
                    f"smaller symmetry pattern"
                )


def barycentric_to_cartesian(lam, simplex: ReferenceSimplex) -> np.ndarray:
    """Map barycentric rows to Cartesian coordinates, ``y = T^T lambda``."""
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    if lam.shape[1] != simplex.dim + 1:
        raise GeometryError(
            f"expected {simplex.dim + 1} barycentric coordinates per point, got {lam.shape[1]}"
        )
    return lam @ simplex.vertex_matrix


def cartesian_to_barycentric(points, simplex: ReferenceSimplex) -> np.ndarray:
    """Map Cartesian rows to barycentric coordinates.

    Solves the vertex matrix augmented with a row of ones, so every output row
    sums to one.

    Args:
        points: Array of shape ``(n, dim)``
        simplex: The reference simplex

    Returns:
        Array of shape ``(n, dim+1)``
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != simplex.dim:
        raise GeometryError(f"expected {simplex.dim} coordinates per point, got {points.shape[1]}")
    augmented = np.vstack([simplex.vertex_matrix.T, np.ones(simplex.dim + 1)])
    rhs = np.vstack([points.T, np.ones(points.shape[0])])
    try:
        lam = np.linalg.solve(augmented, rhs)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"singular vertex matrix for {simplex.name}: {exc}") from exc
    return lam.T


def expand_orbit(orbit: SymOrbit, simplex: ReferenceSimplex) -> Tuple[np.ndarray, np.ndarray]:
    """Expand an orbit into Cartesian nodes and replicated weights.

    Raises:
        DegeneracyError: Parameters collapse the orbit's pattern
        InteriorityError: A node is not strictly inside the simplex
    """
    if orbit.dim != simplex.dim:
        raise GeometryError(f"{orbit.dim}-D orbit cannot be expanded on a {simplex.name}")
    check_orbit(orbit)
    nodes = barycentric_to_cartesian(orbit.expand_barycentric(), simplex)
    weights = np.full(orbit.cardinality, orbit.weight)
    return nodes, weights


def min_facet_distance(orbit: SymOrbit) -> float:
    """Smallest barycentric coordinate over the orbit's nodes."""
    return float(np.min(orbit.representative()))


def _group_coordinates(values: np.ndarray, tol: float) -> List[Tuple[float, int]]:
    """Cluster sorted values into (mean, multiplicity) groups."""
    groups: List[List[float]] = []
    for v in np.sort(values):
        if groups and v - groups[-1][-1] <= tol:
            groups[-1].append(float(v))
        else:
            groups.append([float(v)])
    return [(sum(g) / len(g), len(g)) for g in groups]


def classify_orbit(point: Sequence[float], tol: float = CLASSIFY_TOL) -> Tuple[OrbitKind, Tuple[float, ...]]:
    """Determine the orbit kind and canonical parameters of a barycentric point.

    Args:
        point: Barycentric coordinates (3 on a triangle, 4 on a tetrahedron)
        tol: Equality tolerance between coordinates

    Returns:
        ``(kind, params)`` with params taken from the sorted canonical
        representative
    """
    lam = np.asarray(point, dtype=float).ravel()
    if lam.size not in (3, 4):
        raise OrbitInputError(f"expected 3 or 4 barycentric coordinates, got {lam.size}")
    if abs(float(lam.sum()) - 1.0) > tol:
        raise OrbitInputError(f"barycentric coordinates {lam.tolist()} do not sum to one")

    groups = _group_coordinates(lam, tol)
    sizes = tuple(size for _, size in groups)

    if lam.size == 3:
        if len(groups) == 1:
            return OrbitKind.S1, ()
        if len(groups) == 2:
            alpha = next(value for value, size in groups if size == 2)
            return OrbitKind.S21, (alpha,)
        return OrbitKind.S111, (groups[0][0], groups[1][0])

    if len(groups) == 1:
        return OrbitKind.S1, ()
    if len(groups) == 2:
        if 3 in sizes:
            alpha = next(value for value, size in groups if size == 3)
            return OrbitKind.S31, (alpha,)
        return OrbitKind.S22, (groups[0][0],)
    if len(groups) == 3:
        alpha = next(value for value, size in groups if size == 2)
        beta = min(value for value, size in groups if size == 1)
        return OrbitKind.S211, (alpha, beta)
    return OrbitKind.S1111, (groups[0][0], groups[1][0], groups[2][0])


def canonical_orbit(orbit: SymOrbit, tol: float = CLASSIFY_TOL) -> SymOrbit:
    """Return the same orbit with its parameters in canonical order."""
    kind, params = classify_orbit(orbit.representative(), tol)
    if kind is not orbit.kind:
        raise DegeneracyError(
            f"{orbit.kind.value} orbit with params {orbit.params} classifies as {kind.value}"
        )
    if np.allclose(params, orbit.params, rtol=0.0, atol=tol):
        return orbit
    return replace(orbit, params=params)


def _orbit_sort_key(orbit: SymOrbit):
    kinds = KINDS_BY_DIM[orbit.dim]
    return (kinds.index(orbit.kind), orbit.params, orbit.weight)


@dataclass(frozen=True)
class QuadRule:
    """A fully symmetric quadrature rule given as a list of orbits.

    Attributes:
        simplex: Reference simplex the rule integrates over
        degree: Polynomial degree the rule is meant to integrate exactly
        orbits: Symmetry orbits making up the rule
    """
    simplex: ReferenceSimplex
    degree: int
    orbits: Tuple[SymOrbit, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        for orbit in self.orbits:
            if orbit.dim != self.simplex.dim:
                raise GeometryError(f"{orbit.dim}-D orbit in a rule on a {self.simplex.name}")

    @property
    def domain(self) -> str:
        return self.simplex.name

    @property
    def num_nodes(self) -> int:
        return sum(orbit.cardinality for orbit in self.orbits)

    def orbit_counts(self) -> Dict[OrbitKind, int]:
        """Number of orbits of each kind available on the rule's simplex."""
        counts = {kind: 0 for kind in self.simplex.kinds}
        for orbit in self.orbits:
            counts[orbit.kind] += 1
        return counts

    def barycentric_nodes(self) -> np.ndarray:
        """All nodes in barycentric coordinates, orbit-major."""
        if not self.orbits:
            return np.zeros((0, self.simplex.dim + 1))
        return np.vstack([orbit.expand_barycentric() for orbit in self.orbits])

    def expand(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flat Cartesian nodes and weights, orbit-major."""
        if not self.orbits:
            return np.zeros((0, self.simplex.dim)), np.zeros(0)
        parts = [expand_orbit(orbit, self.simplex) for orbit in self.orbits]
        return np.vstack([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    def without_orbit(self, index: int) -> "QuadRule":
        orbits = self.orbits[:index] + self.orbits[index + 1:]
        return replace(self, orbits=orbits)

    def with_orbits(self, orbits: Sequence[SymOrbit]) -> "QuadRule":
        return replace(self, orbits=tuple(orbits))

    def sorted(self) -> "QuadRule":
        """Orbits ordered by kind, then parameters."""
        return replace(self, orbits=tuple(sorted(self.orbits, key=_orbit_sort_key)))
