"""
Bounds Module

Lower-bound estimates of the node count per symmetry orbit type and the
efficiency of a rule measured against them. All intermediate quantities are
kept as exact integers.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict

from .errors import BoundsDomainError
from .geometry import KINDS_BY_DIM, OrbitKind, orbit_cardinality

logger = logging.getLogger(__name__)

# Indexed by q mod 6
_TRI_ALPHA = (3, -4, -1, 0, -1, -4)


@dataclass(frozen=True)
class BoundEstimate:
    """Per-kind orbit counts of a lower-bound estimate at degree ``q``."""
    domain: str
    q: int
    counts: Dict[OrbitKind, int] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 2 if self.domain == "tri" else 3

    @property
    def total(self) -> int:
        return sum(orbit_cardinality(kind, self.dim) * n for kind, n in self.counts.items())

    def count(self, kind: OrbitKind) -> int:
        return self.counts.get(kind, 0)

    def as_tuple(self):
        return tuple(self.count(kind) for kind in KINDS_BY_DIM[self.dim])


def _check_degree(q: int) -> None:
    if q < 1:
        raise BoundsDomainError(f"lower bounds are defined for degree q >= 1, got {q}")


def _clamped(name: str, value: int, q: int) -> int:
    if value < 0:
        logger.warning("bound intermediate %s = %d is negative at q=%d; clamping to 0", name, value, q)
        return 0
    return value


def _floor_div(num: int, den: int) -> int:
    return num // den


def _ceil_div(num: int, den: int) -> int:
    return -((-num) // den)


def _round_div(num: int, den: int) -> int:
    """Nearest integer to num/den, halves rounded up."""
    return (2 * num + den) // (2 * den)


def tri_lower_bound(q: int) -> BoundEstimate:
    """Lower-bound orbit counts on the triangle at degree ``q``.

    The estimate ``E(q) = ((q+3)^2 + alpha_q) / 12`` is carried scaled by 12
    so every step stays integral.
    """
    _check_degree(q)
    alpha_q = _TRI_ALPHA[q % 6]
    e12 = (q + 3) ** 2 + alpha_q

    if q < 6:
        n111 = 0
    else:
        # (E(q-6) + 2) / 3 scaled by 36
        n111 = _floor_div((q - 3) ** 2 + alpha_q + 24, 36)
    n111 = _clamped("|S111|", n111, q)
    n21 = _clamped("|S21|", _floor_div(e12 - 36 * n111, 24), q)
    n1 = 0 if 12 * (1 + 2 * n21 + 3 * n111) > e12 else 1

    estimate = BoundEstimate("tri", q, {OrbitKind.S1: n1, OrbitKind.S21: n21, OrbitKind.S111: n111})
    logger.debug("triangle bound q=%d: %s total %d", q, estimate.as_tuple(), estimate.total)
    return estimate


def _tet_cubic(x: int) -> int:
    return x ** 3 + 3 * x ** 2 - 9 * x * (x % 2)


def tet_lower_bound(q: int) -> BoundEstimate:
    """Lower-bound orbit counts on the tetrahedron at degree ``q``."""
    _check_degree(q)
    q12 = q - 12
    m2 = (q // 2 - 1) if q >= 4 else 0
    m3 = ((q - 4) ** 2 // 4) if q >= 6 else 0
    m4 = _round_div(_tet_cubic(q12 + 4), 144) if q12 >= 0 else 0
    me = _round_div(_tet_cubic(q + 4), 144)

    n1111 = _clamped("|S1111|", _ceil_div(m4, 4), q)
    n211 = _clamped("|S211|", _ceil_div(m4 + m3 - 4 * n1111, 3), q)
    n22 = _clamped("|S22|", _ceil_div(m4 + m3 + m2 - 3 * n211 - 4 * n1111, 2), q)
    n31 = _clamped("|S31|", _floor_div(me - 2 * n22 - 3 * n211 - 4 * n1111, 2), q)
    n1 = _clamped("|S1|", me - 2 * n31 - 2 * n22 - 3 * n211 - 4 * n1111, q)

    estimate = BoundEstimate("tet", q, {
        OrbitKind.S1: n1, OrbitKind.S31: n31, OrbitKind.S22: n22,
        OrbitKind.S211: n211, OrbitKind.S1111: n1111,
    })
    logger.debug("tetrahedron bound q=%d: %s total %d", q, estimate.as_tuple(), estimate.total)
    return estimate


def lower_bound(domain: str, q: int) -> BoundEstimate:
    """Dispatch to the triangle or tetrahedron estimate."""
    if domain == "tri":
        return tri_lower_bound(q)
    if domain == "tet":
        return tet_lower_bound(q)
    raise BoundsDomainError(f"unknown domain '{domain}'")


def efficiency(n_q: int, bound: BoundEstimate) -> float:
    """Ratio of the lower-bound node count to an actual node count.

    Values above one are returned unchanged and logged as a warning.
    """
    if n_q <= 0:
        raise BoundsDomainError(f"node count must be positive, got {n_q}")
    value = bound.total / n_q
    if value > 1.0:
        logger.warning("%s rule of degree %d with %d nodes beats the lower-bound estimate %d",
                       bound.domain, bound.q, n_q, bound.total)
    return value
