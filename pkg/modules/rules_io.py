"""
Rule File I/O

Line-oriented text format for symmetric rules:

    # domain: tri
    # degree: 2
    # nodes: 3
    # orbits: S1=0 S21=1 S111=0
    # status: converged
    # residual: 1.1102230246251565e-16
    S21 1.6666666666666666e-1 6.6666666666666663e-1

Each record is an orbit kind, its free parameters and its weight. Reals are
written with 17 significant digits so doubles survive a round trip. Flat
point sets (``x y [z] w`` rows) can be exported, and imported back into
orbits.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .basis import evaluate_basis
from .errors import GeometryError, OrbitInputError, RuleParseError, UsageError
from .geometry import (
    OrbitKind,
    QuadRule,
    ReferenceSimplex,
    SymOrbit,
    canonical_orbit,
    cartesian_to_barycentric,
    check_orbit,
    classify_orbit,
    orbit_cardinality,
    orbit_param_count,
)

logger = logging.getLogger(__name__)

STATUSES = ("initial", "converged", "eliminated", "imported")
IMPORT_TOL = 1e-9


def format_real(value: float) -> str:
    """17 significant digits with a compact exponent, e.g. ``6.6666666666666663e-1``."""
    mantissa, exponent = f"{value:.16e}".split("e")
    return f"{mantissa}e{int(exponent)}"


@dataclass
class RuleFile:
    """A parsed rule file: the rule plus its header metadata."""
    rule: QuadRule
    status: str = "converged"
    residual: Optional[float] = None


def moment_residual_norm(rule: QuadRule) -> float:
    """Max-norm of the moment residual of a rule at its own degree."""
    nodes, weights = rule.expand()
    basis = evaluate_basis(nodes, rule.degree, rule.simplex, gradients=False)
    return float(np.max(np.abs(basis.V.T @ weights - basis.f)))


def serialize_rule(rule: QuadRule, status: str = "converged", residual: Optional[float] = None) -> str:
    """Render a rule in the canonical text format.

    Orbits are written with canonical parameters, sorted by kind, then
    parameters. The residual is computed from the rule when not supplied.

    Raises:
        DegeneracyError: An orbit collapses onto a smaller pattern
    """
    if status not in STATUSES:
        raise UsageError(f"unknown rule status '{status}'")
    rule = rule.with_orbits([canonical_orbit(orbit) for orbit in rule.orbits]).sorted()
    if residual is None:
        residual = moment_residual_norm(rule)
    counts = rule.orbit_counts()
    lines = [
        f"# domain: {rule.domain}",
        f"# degree: {rule.degree}",
        f"# nodes: {rule.num_nodes}",
        "# orbits: " + " ".join(f"{kind.value}={n}" for kind, n in counts.items()),
        f"# status: {status}",
        f"# residual: {format_real(residual)}",
    ]
    for orbit in rule.orbits:
        fields = [orbit.kind.value] + [format_real(p) for p in orbit.params] + [format_real(orbit.weight)]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def _parse_int(value: str, key: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise RuleParseError(f"header '{key}' expects an integer, got '{value}'", line) from None


def _parse_orbit_counts(value: str, simplex: ReferenceSimplex, line: int) -> Dict[OrbitKind, int]:
    counts = {}
    for item in value.split():
        tag, _, number = item.partition("=")
        try:
            kind = OrbitKind(tag)
        except ValueError:
            raise RuleParseError(f"unknown orbit kind '{tag}' in orbit counts", line) from None
        if kind not in simplex.kinds:
            raise RuleParseError(f"orbit kind {tag} does not exist on a {simplex.name}", line)
        counts[kind] = _parse_int(number, "orbits", line)
    return counts


def parse_rule_file(text: str) -> RuleFile:
    """Parse rule-file text into a rule and its header.

    Raises:
        RuleParseError: Malformed header or record, unknown kind, count
            mismatch, non-interior parameters or non-positive weight; the
            message names the line
    """
    header: Dict[str, Tuple[str, int]] = {}
    records: List[Tuple[List[str], int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                header[key.strip().lower()] = (value.strip(), number)
            continue
        records.append((line.split(), number))

    if "domain" not in header:
        raise RuleParseError("missing '# domain:' header")
    domain, domain_line = header["domain"]
    try:
        simplex = ReferenceSimplex.from_name(domain)
    except GeometryError as exc:
        raise RuleParseError(str(exc), domain_line) from None
    if "degree" not in header:
        raise RuleParseError("missing '# degree:' header")
    degree = _parse_int(header["degree"][0], "degree", header["degree"][1])
    if degree < 0:
        raise RuleParseError(f"degree must be non-negative, got {degree}", header["degree"][1])

    orbits = []
    for fields, number in records:
        tag, values = fields[0], fields[1:]
        try:
            kind = OrbitKind(tag)
        except ValueError:
            raise RuleParseError(f"unknown orbit kind '{tag}'", number) from None
        if kind not in simplex.kinds:
            raise RuleParseError(f"orbit kind {tag} does not exist on a {simplex.name}", number)
        expected = orbit_param_count(kind, simplex.dim) + 1
        if len(values) != expected:
            raise RuleParseError(f"{tag} record needs {expected} numbers, got {len(values)}", number)
        try:
            numbers = [float(v) for v in values]
        except ValueError:
            raise RuleParseError(f"malformed number in record '{' '.join(fields)}'", number) from None
        orbit = SymOrbit(kind, tuple(numbers[:-1]), numbers[-1], dim=simplex.dim)
        if not orbit.weight > 0.0:
            raise RuleParseError(f"weight must be positive, got {orbit.weight}", number)
        try:
            check_orbit(orbit)
        except GeometryError as exc:
            raise RuleParseError(str(exc), number) from None
        orbits.append(orbit)

    rule = QuadRule(simplex, degree, orbits)

    if "nodes" in header:
        declared, number = header["nodes"]
        if _parse_int(declared, "nodes", number) != rule.num_nodes:
            raise RuleParseError(f"header declares {declared} nodes but the records expand to "
                                 f"{rule.num_nodes}", number)
    if "orbits" in header:
        value, number = header["orbits"]
        declared_counts = _parse_orbit_counts(value, simplex, number)
        actual = rule.orbit_counts()
        for kind, n in declared_counts.items():
            if actual[kind] != n:
                raise RuleParseError(f"header declares {n} {kind.value} orbits but the records "
                                     f"contain {actual[kind]}", number)

    status = "converged"
    if "status" in header:
        status, number = header["status"]
        if status not in STATUSES:
            raise RuleParseError(f"unknown status '{status}'", number)

    residual = None
    if "residual" in header:
        value, number = header["residual"]
        try:
            residual = float(value)
        except ValueError:
            raise RuleParseError(f"malformed residual '{value}'", number) from None

    return RuleFile(rule=rule, status=status, residual=residual)


def parse_rule(text: str) -> QuadRule:
    """Parse rule-file text into a ``QuadRule``."""
    return parse_rule_file(text).rule


def read_rule(path: Union[str, Path]) -> RuleFile:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Rule file not found: {path}")
    return parse_rule_file(path.read_text())


def write_rule(path: Union[str, Path], rule: QuadRule, status: str = "converged",
               residual: Optional[float] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_rule(rule, status, residual))
    logger.debug("wrote %s rule of degree %d to %s", rule.domain, rule.degree, path)
    return path


def expand_to_pointset(rule: QuadRule) -> Tuple[np.ndarray, np.ndarray]:
    """Cartesian nodes and weights, orbit-major, permutations in lexicographic order."""
    return rule.expand()


def format_pointset(rule: QuadRule) -> str:
    """Flat ``x1 x2 [x3] w`` rows of the expanded rule."""
    nodes, weights = expand_to_pointset(rule)
    rows = [" ".join(format_real(v) for v in list(node) + [w]) for node, w in zip(nodes, weights)]
    return "\n".join(rows) + "\n"


def import_pointset(text: str, domain: str, degree: int, tol: float = IMPORT_TOL) -> QuadRule:
    """Group a flat point set on the reference simplex into symmetry orbits.

    Args:
        text: Rows of ``x1 x2 [x3] w``; blank lines and ``#`` comments skipped
        domain: ``"tri"`` or ``"tet"``
        degree: Degree to attach to the rule
        tol: Tolerance for coordinate equality and for weights within an orbit

    Raises:
        RuleParseError: Malformed row, point outside the simplex, incomplete
            orbit or inconsistent weights within an orbit
    """
    simplex = ReferenceSimplex.from_name(domain)
    groups: List[dict] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values = [float(v) for v in line.split()]
        except ValueError:
            raise RuleParseError(f"malformed point row '{line}'", number) from None
        if len(values) != simplex.dim + 1:
            raise RuleParseError(f"expected {simplex.dim + 1} columns, got {len(values)}", number)

        lam = cartesian_to_barycentric(np.array(values[:-1]), simplex)[0]
        if lam.min() <= 0.0:
            raise RuleParseError(f"point {values[:-1]} is not strictly inside the {domain}", number)
        try:
            kind, params = classify_orbit(lam, tol)
        except OrbitInputError as exc:
            raise RuleParseError(str(exc), number) from None

        for group in groups:
            if group["kind"] is kind and np.max(np.abs(np.subtract(group["params"][0], params)), initial=0.0) <= tol:
                group["params"].append(params)
                group["weights"].append(values[-1])
                break
        else:
            groups.append({"kind": kind, "params": [params], "weights": [values[-1]], "line": number})

    orbits = []
    for group in groups:
        kind, weights = group["kind"], np.array(group["weights"])
        expected = orbit_cardinality(kind, simplex.dim)
        if len(weights) != expected:
            raise RuleParseError(f"{kind.value} orbit has {len(weights)} of its {expected} nodes",
                                 group["line"])
        if weights.max() - weights.min() > tol * max(1.0, abs(weights.max())):
            raise RuleParseError(f"{kind.value} orbit nodes carry different weights", group["line"])
        if weights.min() <= 0.0:
            raise RuleParseError(f"{kind.value} orbit has a non-positive weight", group["line"])
        params = tuple(np.mean(np.array(group["params"]), axis=0)) if group["params"][0] else ()
        orbits.append(SymOrbit(kind, params, float(weights.mean()), dim=simplex.dim))

    rule = QuadRule(simplex, degree, orbits).sorted()
    logger.info("imported %d points as %d orbits on the %s", rule.num_nodes, len(rule.orbits), domain)
    return rule
