"""
Node Elimination

Removes whole orbits from a converged rule and re-solves, keeping every
removal that converges again, until an outer sweep removes nothing.
"""
import logging
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Collection, List, Optional, Tuple

from .basis import basis_size
from .bounds import BoundEstimate, lower_bound
from .errors import UsageError
from .geometry import QuadRule, min_facet_distance, orbit_cardinality
from .solver import SolverConfig, solve_with_damping
from .verify import validate_rule

logger = logging.getLogger(__name__)

DEFAULT_NU_SWEEP = tuple(10.0 ** k for k in range(-8, 5))


class Criterion(Enum):
    """How orbits are ranked for removal."""
    FACET = "facet"
    WEIGHT = "weight"
    AUTO = "auto"

    @classmethod
    def parse(cls, value: str) -> "Criterion":
        aliases = {"facet_proximity": cls.FACET, "smallest_weight": cls.WEIGHT}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise UsageError(f"unknown elimination criterion '{value}'") from None

    def other(self) -> "Criterion":
        return Criterion.WEIGHT if self is Criterion.FACET else Criterion.FACET


@dataclass(frozen=True)
class ElimConfig:
    """Settings of an elimination run."""
    criterion: Criterion = Criterion.AUTO
    nu_sweep: Tuple[float, ...] = DEFAULT_NU_SWEEP
    respect_bounds_outer_iters: int = 2
    tol: Optional[float] = None
    retry_other_criterion: bool = True
    restarts: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not self.nu_sweep or any(nu <= 0.0 for nu in self.nu_sweep):
            raise UsageError("nu_sweep must be a non-empty list of positive values")
        if self.restarts < 0:
            raise UsageError(f"restarts must be non-negative, got {self.restarts}")
        object.__setattr__(self, "nu_sweep", tuple(float(nu) for nu in self.nu_sweep))


@dataclass
class EliminationAttempt:
    """One attempted orbit removal."""
    outer_iter: int
    orbit_index: int
    kind: str
    criterion: str
    nu: Optional[float]
    converged: bool
    node_count: int

    def to_dict(self) -> dict:
        return asdict(self)


def _score(rule: QuadRule, index: int, criterion: Criterion) -> float:
    orbit = rule.orbits[index]
    if criterion is Criterion.WEIGHT:
        return orbit.weight
    return min_facet_distance(orbit)


def rank_orbits(rule: QuadRule,
                criterion: Criterion,
                phase: int,
                skip: Collection[int] = (),
                respect_bounds_outer_iters: int = 2,
                bound: Optional[BoundEstimate] = None) -> List[int]:
    """Orbit indices in the order they should be tried for removal.

    Args:
        rule: Current rule
        criterion: ``FACET`` ranks by ascending facet distance, ``WEIGHT`` by
            ascending weight
        phase: 1-based outer iteration
        skip: Indices already attempted in this outer iteration
        respect_bounds_outer_iters: Number of leading phases that only reduce
            kinds still above their lower-bound count
        bound: Lower-bound estimate; computed from the rule when omitted

    Returns:
        Candidate indices, best first. Empty when nothing is left to try.
    """
    if criterion is Criterion.AUTO:
        raise UsageError("rank_orbits needs a concrete criterion")
    bound = bound or lower_bound(rule.domain, rule.degree)
    if len(rule.orbits) <= 1:
        return []
    open_indices = [i for i in range(len(rule.orbits)) if i not in skip]

    if phase <= respect_bounds_outer_iters:
        counts = rule.orbit_counts()
        reducible = [kind for kind in rule.simplex.kinds if counts[kind] > bound.count(kind)]
        by_size = sorted(reducible, key=lambda kind: -orbit_cardinality(kind, rule.simplex.dim))
        for kind in by_size:
            candidates = [i for i in open_indices if rule.orbits[i].kind is kind]
            if candidates:
                return sorted(candidates, key=lambda i: (_score(rule, i, criterion), i))
        return []

    candidates = [
        i for i in open_indices
        if rule.num_nodes - rule.orbits[i].cardinality >= bound.total
    ]
    return sorted(
        candidates,
        key=lambda i: (_score(rule, i, criterion), rule.orbits[i].cardinality, i),
    )


def try_eliminate(rule: QuadRule,
                  orbit_index: int,
                  nu_sweep: Collection[float] = DEFAULT_NU_SWEEP,
                  tol: Optional[float] = None,
                  solver: Optional[SolverConfig] = None) -> Tuple[Optional[QuadRule], Optional[float]]:
    """Remove one orbit and re-solve from each damping value in turn.

    Returns:
        ``(reduced_rule, nu)`` for the first damping value that converges to
        a valid rule, or ``(None, None)`` when every value fails
    """
    if len(rule.orbits) <= 1:
        return None, None
    reduced = rule.without_orbit(orbit_index)
    solver = solver or SolverConfig()
    if tol is not None:
        solver = replace(solver, tol=tol)

    for nu in nu_sweep:
        solved, report = solve_with_damping(reduced, nu, solver)
        if not report.converged:
            continue
        check_tol = max(1e-13, solver.tolerance(basis_size(solved.degree, solved.simplex.dim)))
        if validate_rule(solved, tol=check_tol).passed:
            return solved, nu
        logger.debug("converged rule at nu=%.0e failed validation", nu)
    return None, None


def _eliminate(rule: QuadRule, criterion: Criterion, config: ElimConfig,
               log: List[EliminationAttempt]) -> QuadRule:
    bound = lower_bound(rule.domain, rule.degree)
    outer = 0
    while True:
        outer += 1
        nodes_before = rule.num_nodes
        attempted = [False] * len(rule.orbits)
        while True:
            skip = {i for i, done in enumerate(attempted) if done}
            ranking = rank_orbits(rule, criterion, outer, skip,
                                  config.respect_bounds_outer_iters, bound)
            if not ranking:
                break
            index = ranking[0]
            attempted[index] = True
            kind = rule.orbits[index].kind
            reduced, nu = try_eliminate(rule, index, config.nu_sweep, config.tol, config.solver)
            if reduced is not None:
                rule = reduced
                del attempted[index]
            log.append(EliminationAttempt(
                outer_iter=outer, orbit_index=index, kind=kind.value, criterion=criterion.value,
                nu=nu, converged=reduced is not None, node_count=rule.num_nodes,
            ))
            logger.info("outer %d: remove %s orbit %d -> %s (%d nodes)", outer, kind.value, index,
                        "accepted" if reduced is not None else "rejected", rule.num_nodes)
        if rule.num_nodes == nodes_before:
            if outer > config.respect_bounds_outer_iters:
                return rule
            # a bound-respecting sweep with no removal will not change on repeat
            outer = config.respect_bounds_outer_iters


def _run_criterion(rule: QuadRule, criterion: Criterion, config: ElimConfig,
                   log: List[EliminationAttempt]) -> QuadRule:
    result = _eliminate(rule, criterion, config, log)
    if config.retry_other_criterion:
        logger.info("retrying from %d nodes with the %s criterion",
                    result.num_nodes, criterion.other().value)
        result = _eliminate(result, criterion.other(), config, log)
    return result


def _reduce(rule: QuadRule, config: ElimConfig, log: List[EliminationAttempt]) -> QuadRule:
    if config.criterion is Criterion.AUTO and rule.simplex.dim == 2:
        by_facet = _run_criterion(rule, Criterion.FACET, config, log)
        by_weight = _run_criterion(rule, Criterion.WEIGHT, config, log)
        return by_weight if by_weight.num_nodes < by_facet.num_nodes else by_facet
    if config.criterion is Criterion.AUTO:
        return _run_criterion(rule, Criterion.FACET, config, log)
    return _run_criterion(rule, config.criterion, config, log)


def restart_candidates(rule: QuadRule, bound: Optional[BoundEstimate] = None) -> List[int]:
    """Orbits the bound-respecting phases never offer, smallest orbits first.

    These are the orbits of kinds already at or below their lower-bound
    count whose removal keeps the rule at or above the bound total.
    """
    bound = bound or lower_bound(rule.domain, rule.degree)
    if len(rule.orbits) <= 1:
        return []
    counts = rule.orbit_counts()
    candidates = [
        i for i, orbit in enumerate(rule.orbits)
        if counts[orbit.kind] <= bound.count(orbit.kind)
        and rule.num_nodes - orbit.cardinality >= bound.total
    ]
    return sorted(candidates, key=lambda i: (rule.orbits[i].cardinality,
                                             -min_facet_distance(rule.orbits[i]), i))


def eliminate_all(rule: QuadRule, config: Optional[ElimConfig] = None) -> Tuple[QuadRule, List[EliminationAttempt]]:
    """Repeat elimination sweeps until the node count stops decreasing.

    With the ``AUTO`` criterion a triangle rule is reduced with both
    criteria and the smaller result kept (facet proximity on ties); a
    tetrahedron rule uses facet proximity.

    When the result is still above the lower bound, up to
    ``config.restarts`` further runs start from the original rule with one
    of the ``restart_candidates`` removed first. A restart replaces the
    result only when it ends with strictly fewer nodes.

    Returns:
        The reduced rule, orbits sorted, and the log of every attempt
    """
    config = config or ElimConfig()
    log: List[EliminationAttempt] = []
    result = _reduce(rule, config, log)

    bound = lower_bound(rule.domain, rule.degree)
    for index in restart_candidates(rule, bound)[:config.restarts]:
        if result.num_nodes <= bound.total:
            break
        kind = rule.orbits[index].kind
        first, nu = try_eliminate(rule, index, config.nu_sweep, config.tol, config.solver)
        log.append(EliminationAttempt(
            outer_iter=0, orbit_index=index, kind=kind.value, criterion=config.criterion.value,
            nu=nu, converged=first is not None,
            node_count=first.num_nodes if first is not None else rule.num_nodes,
        ))
        if first is None:
            logger.info("restart without %s orbit %d did not converge", kind.value, index)
            continue
        logger.info("restarting from %d nodes without %s orbit %d", first.num_nodes, kind.value, index)
        candidate = _reduce(first, config, log)
        if candidate.num_nodes < result.num_nodes:
            result = candidate

    logger.info("elimination %s q=%d: %d -> %d nodes in %d attempts",
                rule.domain, rule.degree, rule.num_nodes, result.num_nodes, len(log))
    return result.sorted(), log
