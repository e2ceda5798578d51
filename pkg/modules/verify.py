"""
Verification Module

Rule validation against the moment equations and an exact monomial oracle,
mesh integration of test functions on the unit square and cube, and
grid-convergence and efficiency studies.
"""
import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from .basis import evaluate_basis
from .bounds import efficiency, lower_bound
from .errors import BasisError, GeometryError, UsageError
from .geometry import QuadRule, ReferenceSimplex
from .rule_store import RuleStore

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-13
MONOMIAL_TOL = 1e-12
# Errors at or below this are treated as round-off when computing rates
SATURATION_FLOOR = 1e-15
_MESH_CHUNK = 4096


@dataclass
class ValidationReport:
    """Outcome of ``validate_rule``; ``passed`` only when every check holds."""
    domain: str
    degree: int
    num_nodes: int
    tol: float
    max_residual: float
    min_weight: float
    min_barycentric: float
    symmetry_defect: float
    monomial_error: float
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


def exact_monomial_integral(exponents: Sequence[int], simplex: ReferenceSimplex) -> Fraction:
    """Exact integral of a product of barycentric coordinate powers.

    Uses ``d! * measure * prod(a_i!) / (sum(a_i) + d)!`` in rational
    arithmetic.
    """
    exponents = tuple(exponents)
    if len(exponents) != simplex.dim + 1:
        raise GeometryError(f"expected {simplex.dim + 1} exponents, got {len(exponents)}")
    if any(not isinstance(a, int) or a < 0 for a in exponents):
        raise GeometryError(f"exponents must be non-negative integers, got {exponents}")
    numerator = math.factorial(simplex.dim) * math.prod(math.factorial(a) for a in exponents)
    return simplex.measure * Fraction(numerator, math.factorial(sum(exponents) + simplex.dim))


def _monomial_exponents(q: int, n_vars: int):
    """Exponent tuples of ``n_vars`` variables with total degree at most ``q``."""
    if n_vars == 1:
        for a in range(q + 1):
            yield (a,)
        return
    for a in range(q + 1):
        for rest in _monomial_exponents(q - a, n_vars - 1):
            yield (a,) + rest


def monomial_error(rule: QuadRule, degree: Optional[int] = None) -> float:
    """Largest relative error over all barycentric monomials up to ``degree``."""
    degree = rule.degree if degree is None else degree
    lam = rule.barycentric_nodes()
    w = _replicated_weights(rule)
    worst = 0.0
    for exps in _monomial_exponents(degree, rule.simplex.dim + 1):
        exact = float(exact_monomial_integral(exps, rule.simplex))
        approx = float(w @ np.prod(lam ** np.array(exps), axis=1))
        worst = max(worst, abs(approx - exact) / exact)
    return worst


def symmetry_defect(rule: QuadRule) -> float:
    """Largest distance from a permuted node (with its weight) to the nearest original."""
    lam = rule.barycentric_nodes()
    w = _replicated_weights(rule)
    points = np.hstack([lam, w[:, None]])
    worst = 0.0
    for perm in itertools.permutations(range(rule.simplex.dim + 1)):
        permuted = np.hstack([lam[:, perm], w[:, None]])
        diff = np.abs(permuted[:, None, :] - points[None, :, :]).max(axis=2)
        worst = max(worst, float(diff.min(axis=1).max()))
    return worst


def validate_rule(rule: QuadRule, tol: float = 1e-13, degree: Optional[int] = None) -> ValidationReport:
    """Run every check on a rule.

    Args:
        rule: Rule to check
        tol: Bound on the max-norm of the moment residual
        degree: Degree to check exactness at; the rule's own degree by default

    Returns:
        A report; failures are recorded, not raised
    """
    degree = rule.degree if degree is None else degree
    lam = rule.barycentric_nodes()
    nodes = lam @ rule.simplex.vertex_matrix
    w = _replicated_weights(rule)

    min_lam = float(lam.min()) if lam.size else float("nan")
    min_w = float(w.min()) if w.size else float("nan")
    try:
        basis = evaluate_basis(nodes, degree, rule.simplex, gradients=False)
        max_res = float(np.max(np.abs(basis.V.T @ w - basis.f)))
    except BasisError:
        max_res = float("inf")
    defect = symmetry_defect(rule) if rule.orbits else float("inf")
    mono = monomial_error(rule, degree) if rule.orbits else float("inf")

    report = ValidationReport(
        domain=rule.domain, degree=degree, num_nodes=rule.num_nodes, tol=tol,
        max_residual=max_res, min_weight=min_w, min_barycentric=min_lam,
        symmetry_defect=defect, monomial_error=mono,
    )
    report.checks = {
        "exactness": max_res <= tol,
        "positivity": bool(w.size) and min_w > 0.0,
        "interiority": bool(lam.size) and min_lam > 0.0,
        "symmetry": defect <= SYMMETRY_TOL,
        "monomials": mono <= MONOMIAL_TOL,
    }
    logger.debug("validation %s q=%d: %s", rule.domain, degree,
                 "pass" if report.passed else "fail: " + ", ".join(report.failures))
    return report


def _replicated_weights(rule: QuadRule) -> np.ndarray:
    if not rule.orbits:
        return np.zeros(0)
    return np.concatenate([np.full(o.cardinality, o.weight) for o in rule.orbits])


@dataclass(frozen=True)
class TestIntegrand:
    """A test function on the unit square or cube with its reference integral."""
    name: str
    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    exact: float

    __test__ = False

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.func(x)


INTEGRANDS: Dict[str, TestIntegrand] = {
    "I2": TestIntegrand(
        "I2", 2,
        lambda x: np.sin(48 * np.pi * x[..., 0] ** 8) * np.cos(48 * np.pi * x[..., 1] ** 5),
        0.03116210698718051,
    ),
    "I3": TestIntegrand(
        "I3", 3,
        lambda x: (np.sin(16 * np.pi * x[..., 0] ** 8) * np.cos(16 * np.pi * x[..., 1] ** 5)
                   * np.cos(16 * np.pi * x[..., 2] ** 7)),
        0.02288392144769807,
    ),
    "J3": TestIntegrand(
        "J3", 3,
        lambda x: np.sin(3 * np.pi * x[..., 0]) * np.sin(5 * np.pi * x[..., 1]) * np.sin(3 * np.pi * x[..., 2]),
        8.0 / (45.0 * math.pi ** 3),
    ),
}


def get_integrand(name: str) -> TestIntegrand:
    try:
        return INTEGRANDS[name]
    except KeyError:
        raise UsageError(f"unknown test integrand '{name}' (choose from {', '.join(INTEGRANDS)})") from None


@dataclass(frozen=True)
class UniformMesh:
    """Unit square split into 2n^2 triangles, or unit cube into 6n^3 tetrahedra.

    Squares are cut along the diagonal from (0,0) to (1,1); cubes use the
    six-tetrahedra split sharing the main diagonal.
    """
    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UsageError(f"meshes exist for dimension 2 or 3, got {self.dim}")
        if self.n < 1:
            raise UsageError(f"mesh needs at least one subdivision per axis, got {self.n}")

    @property
    def num_elements(self) -> int:
        return math.factorial(self.dim) * self.n ** self.dim

    def elements(self) -> np.ndarray:
        """Element vertices, shape ``(num_elements, dim+1, dim)``."""
        eye = np.eye(self.dim, dtype=int)
        paths = []
        for perm in itertools.permutations(range(self.dim)):
            corner = np.zeros(self.dim, dtype=int)
            path = [corner.copy()]
            for axis in perm:
                corner = corner + eye[axis]
                path.append(corner.copy())
            paths.append(np.array(path))
        local = np.array(paths)

        cells = np.array(list(itertools.product(range(self.n), repeat=self.dim)))
        elements = (cells[:, None, None, :] + local[None, :, :, :]) / self.n
        return elements.reshape(-1, self.dim + 1, self.dim)


def integrate_on_mesh(rule: QuadRule, mesh: UniformMesh,
                      integrand: Union[str, TestIntegrand, Callable]) -> float:
    """Composite quadrature of ``integrand`` over the mesh.

    Element sums are reduced in element order with ``math.fsum`` so the
    result is reproducible bit for bit.
    """
    if isinstance(integrand, str):
        integrand = get_integrand(integrand)
    if isinstance(integrand, TestIntegrand) and integrand.dim != mesh.dim:
        raise UsageError(f"integrand {integrand.name} is {integrand.dim}-D but the mesh is {mesh.dim}-D")
    if rule.simplex.dim != mesh.dim:
        raise UsageError(f"a {rule.domain} rule cannot integrate over a {mesh.dim}-D mesh")

    lam = rule.barycentric_nodes()
    w = _replicated_weights(rule)
    elements = mesh.elements()
    edges = elements[:, 1:, :] - elements[:, :1, :]
    scale = np.abs(np.linalg.det(edges)) / 2.0 ** mesh.dim

    partial = []
    for start in range(0, len(elements), _MESH_CHUNK):
        chunk = elements[start:start + _MESH_CHUNK]
        x = np.einsum("nj,mjk->mnk", lam, chunk)
        values = integrand(x)
        partial.extend((values @ w) * scale[start:start + _MESH_CHUNK])
    return math.fsum(partial)


@dataclass
class ConvergenceRow:
    n: int
    elements: int
    approx: float
    error: float
    rate: Optional[float]
    saturated: bool


@dataclass
class ConvergenceStudy:
    domain: str
    degree: int
    integrand: str
    rows: List[ConvergenceRow] = field(default_factory=list)

    @property
    def errors(self) -> List[float]:
        return [row.error for row in self.rows]

    @property
    def rates(self) -> List[Optional[float]]:
        return [row.rate for row in self.rows[1:]]


def convergence_rates(rule: QuadRule, integrand: Union[str, TestIntegrand],
                      n_list: Sequence[int]) -> ConvergenceStudy:
    """Errors on a sequence of uniform meshes and the observed rates between them.

    A rate is marked saturated, and left as ``None``, when either error is
    at the round-off floor.
    """
    if isinstance(integrand, str):
        integrand = get_integrand(integrand)
    n_list = list(n_list)
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise UsageError(f"mesh sizes must be increasing with at least two entries, got {n_list}")

    study = ConvergenceStudy(rule.domain, rule.degree, integrand.name)
    for n in n_list:
        mesh = UniformMesh(rule.simplex.dim, n)
        approx = integrate_on_mesh(rule, mesh, integrand)
        error = abs(approx - integrand.exact)
        rate, saturated = None, error <= SATURATION_FLOOR
        if study.rows:
            prev = study.rows[-1]
            if prev.error <= SATURATION_FLOOR or saturated:
                saturated = True
            else:
                rate = math.log(prev.error / error) / math.log(n / prev.n)
        study.rows.append(ConvergenceRow(n, mesh.num_elements, approx, error, rate, saturated))
        logger.info("%s q=%d %s n=%d: error %.4e", rule.domain, rule.degree, integrand.name, n, error)
    return study


@dataclass
class EfficiencyRow:
    domain: str
    q: int
    n_q: int
    bound: int
    efficiency: float
    references: Dict[str, Optional[int]] = field(default_factory=dict)


def efficiency_report(rules_dir: Union[str, Path], catalog=None) -> List[EfficiencyRow]:
    """Node counts, lower bounds and efficiencies of every rule file in a directory.

    Args:
        rules_dir: Directory managed by a ``RuleStore``
        catalog: Optional ``Catalog``; adds published counts per source
    """
    store = RuleStore(rules_dir)
    rows = []
    for domain, q, _ in store.list_rules():
        rule = store.load(domain, q)
        bound = lower_bound(domain, q)
        row = EfficiencyRow(domain, q, rule.num_nodes, bound.total, efficiency(rule.num_nodes, bound))
        if catalog is not None:
            row.references = {source: catalog.published_count(domain, q, source)
                              for source in catalog.sources(domain)}
        rows.append(row)
    return rows


def write_efficiency_csv(rows: Sequence[EfficiencyRow], path: Union[str, Path]) -> None:
    sources = sorted({source for row in rows for source in row.references})
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["domain", "q", "n_q", "n_q_min", "e_q"] + sources)
        for row in rows:
            writer.writerow([row.domain, row.q, row.n_q, row.bound, f"{row.efficiency:.6f}"]
                            + ["" if row.references.get(s) is None else row.references[s] for s in sources])


def write_convergence_csv(study: ConvergenceStudy, path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["n", "elements", "approx", "error", "rate"])
        for row in study.rows:
            rate = "saturated" if row.saturated else ("" if row.rate is None else f"{row.rate:.4f}")
            writer.writerow([row.n, row.elements, repr(row.approx), f"{row.error:.6e}", rate])
