"""
Solver Module

Moment residual, Jacobian assembly and a Levenberg-Marquardt minimizer for
symmetric quadrature rules. The unknowns are the free orbit parameters
followed by the orbit weights; a safeguard keeps the weights positive and
steps leaving the simplex are rejected.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .basis import evaluate_basis
from .errors import GeometryError, NumericError
from .geometry import (
    QuadRule,
    SymOrbit,
    check_orbit,
    orbit_affine_map,
    orbit_param_count,
    orbit_permutations,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of one Levenberg-Marquardt solve.

    ``tol`` of ``None`` means ``3e-15 * sqrt(n_b)`` on the max-norm of the
    residual.
    """
    tol: Optional[float] = None
    max_iter: int = 200
    nu0: float = 1e-3
    nu_min: float = 1e-12
    nu_max: float = 1e16
    eps: float = 1e-4
    svd_rcond: float = 1e-13

    def tolerance(self, n_b: int) -> float:
        if self.tol is not None:
            return self.tol
        return 3e-15 * math.sqrt(n_b)


class OrbitLayout:
    """Affine bookkeeping between the parameter vector and the expanded nodes.

    Node barycentric coordinates are ``offset + slopes @ params`` with
    constant ``offset`` of shape ``(n_nodes, d+1)`` and ``slopes`` of shape
    ``(n_nodes, d+1, n_params)``; node weights are ``membership @ weights``.
    """

    def __init__(self, rule: QuadRule):
        self.simplex = rule.simplex
        self.degree = rule.degree
        self.kinds = [orbit.kind for orbit in rule.orbits]
        dim = self.simplex.dim
        self.n_orbits = len(rule.orbits)
        self.n_params = sum(orbit_param_count(kind, dim) for kind in self.kinds)
        self.n_nodes = rule.num_nodes

        self.offset = np.zeros((self.n_nodes, dim + 1))
        self.slopes = np.zeros((self.n_nodes, dim + 1, self.n_params))
        self.membership = np.zeros((self.n_nodes, self.n_orbits))
        self.param_slices: List[slice] = []

        row, col = 0, 0
        for index, kind in enumerate(self.kinds):
            c0, a = orbit_affine_map(kind, dim)
            width = a.shape[1]
            perms = np.array(orbit_permutations(kind, dim))
            rows = slice(row, row + len(perms))
            self.offset[rows] = c0[perms]
            self.slopes[rows, :, col:col + width] = a[perms]
            self.membership[rows, index] = 1.0
            self.param_slices.append(slice(col, col + width))
            row += len(perms)
            col += width

    @property
    def n_tau(self) -> int:
        return self.n_params + self.n_orbits

    def pack(self, rule: QuadRule) -> np.ndarray:
        params = [p for orbit in rule.orbits for p in orbit.params]
        weights = [orbit.weight for orbit in rule.orbits]
        return np.array(params + weights, dtype=float)

    def unpack(self, tau: np.ndarray) -> QuadRule:
        dim = self.simplex.dim
        orbits = [
            SymOrbit(kind, tuple(tau[self.param_slices[i]]), float(tau[self.n_params + i]), dim=dim)
            for i, kind in enumerate(self.kinds)
        ]
        return QuadRule(self.simplex, self.degree, orbits)

    def barycentric(self, tau: np.ndarray) -> np.ndarray:
        return self.offset + self.slopes @ tau[:self.n_params]

    def node_weights(self, tau: np.ndarray) -> np.ndarray:
        return self.membership @ tau[self.n_params:]

    def weights(self, tau: np.ndarray) -> np.ndarray:
        return tau[self.n_params:]


def _evaluate(layout: OrbitLayout, tau: np.ndarray, need_jacobian: bool = True):
    """Residual and optionally Jacobian at ``tau``."""
    lam = layout.barycentric(tau)
    T = layout.simplex.vertex_matrix
    nodes = lam @ T
    w = layout.node_weights(tau)

    basis = evaluate_basis(nodes, layout.degree, layout.simplex, gradients=need_jacobian)
    g = basis.V.T @ w - basis.f
    if not need_jacobian:
        return g, None

    dY = np.einsum("njp,jk->nkp", layout.slopes, T)
    Vx = np.stack(basis.Vx)
    J_params = np.einsum("knb,n,nkp->bp", Vx, w, dY)
    J_weights = basis.V.T @ layout.membership
    return g, np.hstack([J_params, J_weights])


def residual(rule: QuadRule) -> np.ndarray:
    """Moment residual ``V^T w - f`` of a rule at its own degree."""
    layout = OrbitLayout(rule)
    g, _ = _evaluate(layout, layout.pack(rule), need_jacobian=False)
    return g


def jacobian(rule: QuadRule) -> np.ndarray:
    """Derivative of the moment residual with respect to ``[params, weights]``."""
    layout = OrbitLayout(rule)
    _, J = _evaluate(layout, layout.pack(rule))
    return J


@dataclass
class SolverState:
    """One Levenberg-Marquardt iterate."""
    tau: np.ndarray
    g: np.ndarray
    J: np.ndarray
    nu: float
    h: Optional[np.ndarray] = None
    eta: float = 1.0
    eps: float = 1e-4

    @property
    def n_tau(self) -> int:
        return self.tau.size

    @property
    def cost(self) -> float:
        return 0.5 * float(self.g @ self.g)


def lm_step(state: SolverState, rcond: float = 1e-13) -> np.ndarray:
    """Damped step ``h = -A^+ J^T g`` with ``A = J^T J + nu diag(J^T J)``.

    The pseudo-inverse drops singular values below ``rcond`` times the
    largest one.
    """
    JtJ = state.J.T @ state.J
    A = JtJ + state.nu * np.diag(np.diag(JtJ))
    rhs = state.J.T @ state.g
    try:
        U, s, Vh = np.linalg.svd(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD of the damped normal matrix failed: {exc}") from exc

    s_inv = np.zeros_like(s)
    if s.size and s[0] > 0.0:
        keep = s > rcond * s[0]
        s_inv[keep] = 1.0 / s[keep]
    h = -(Vh.T @ (s_inv * (U.T @ rhs)))
    if not np.all(np.isfinite(h)):
        raise NumericError("Levenberg-Marquardt step is not finite")
    state.h = h
    return h


def safeguard_scale(weights: np.ndarray, step: np.ndarray, eps: float) -> float:
    """Step scale keeping every weight positive.

    A weight the full step would drive below zero is stopped at ``eps``, or
    at half its current value when it is already below ``eps``. The most
    restrictive weight decides.
    """
    eta = 1.0
    violated = weights + step < 0.0
    for i in np.flatnonzero(violated):
        floor = eps if weights[i] >= eps else 0.5 * weights[i]
        eta = min(eta, (floor - weights[i]) / step[i])
    return max(eta, 0.0)


def admissible(layout: OrbitLayout, tau: np.ndarray) -> bool:
    """Whether every node of ``tau`` is interior and no orbit collapses onto a smaller pattern."""
    if not np.all(layout.barycentric(tau) > 0.0):
        return False
    try:
        for orbit in layout.unpack(tau).orbits:
            check_orbit(orbit)
    except GeometryError:
        return False
    return True


@dataclass
class SolveReport:
    """Outcome of ``lm_solve``; non-convergence is reported, never raised."""
    converged: bool
    iterations: int
    residual_norm: float
    nu_history: List[float] = field(default_factory=list)
    cost_history: List[float] = field(default_factory=list)
    rejected_steps: int = 0


def lm_solve(initial: QuadRule, config: Optional[SolverConfig] = None) -> Tuple[QuadRule, SolveReport]:
    """Drive the moment residual of ``initial`` to zero.

    Args:
        initial: Starting rule with interior orbits and positive weights
        config: Solver settings, defaults when omitted

    Returns:
        The last accepted rule and a report of the solve
    """
    config = config or SolverConfig()
    layout = OrbitLayout(initial)
    tau = layout.pack(initial)
    g, J = _evaluate(layout, tau)
    tol = config.tolerance(g.size)
    nu = config.nu0

    report = SolveReport(converged=False, iterations=0, residual_norm=float(np.max(np.abs(g))),
                         nu_history=[nu], cost_history=[0.5 * float(g @ g)])
    logger.debug("solve %s q=%d: %d unknowns, %d moments, start |g|=%.3e",
                 layout.simplex.name, layout.degree, layout.n_tau, g.size, report.residual_norm)

    while report.residual_norm > tol and report.iterations < config.max_iter:
        if nu > config.nu_max:
            logger.debug("damping %.1e exceeded the ceiling; giving up", nu)
            break
        report.iterations += 1
        state = SolverState(tau=tau, g=g, J=J, nu=nu, eps=config.eps)
        h = lm_step(state, config.svd_rcond)
        state.eta = safeguard_scale(layout.weights(tau), h[layout.n_params:], config.eps)
        trial = tau + state.eta * h

        if not admissible(layout, trial):
            nu *= 10.0
            report.rejected_steps += 1
            report.nu_history.append(nu)
            logger.debug("iter %d: step leaves the simplex or collapses an orbit, nu -> %.1e",
                         report.iterations, nu)
            continue

        trial_g, trial_J = _evaluate(layout, trial)
        trial_cost = 0.5 * float(trial_g @ trial_g)
        if trial_cost < state.cost:
            tau, g, J = trial, trial_g, trial_J
            nu = max(nu / 10.0, config.nu_min)
            report.residual_norm = float(np.max(np.abs(g)))
            report.cost_history.append(trial_cost)
        else:
            nu *= 10.0
            report.rejected_steps += 1
        report.nu_history.append(nu)
        logger.debug("iter %d: |g|=%.3e eta=%.3g nu=%.1e",
                     report.iterations, report.residual_norm, state.eta, nu)

    report.converged = report.residual_norm <= tol
    level = logging.DEBUG if report.converged else logging.INFO
    logger.log(level, "solve %s q=%d %s after %d iterations, |g|=%.3e",
               layout.simplex.name, layout.degree,
               "converged" if report.converged else "did not converge",
               report.iterations, report.residual_norm)
    return layout.unpack(tau), report


def solve_with_damping(initial: QuadRule, nu0: float, config: Optional[SolverConfig] = None):
    """``lm_solve`` started from a given damping value."""
    return lm_solve(initial, replace(config or SolverConfig(), nu0=nu0))
