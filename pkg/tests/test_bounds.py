"""
Tests for the lower-bound estimates.
"""
import logging

import pytest

from modules.bounds import efficiency, lower_bound, tet_lower_bound, tri_lower_bound
from modules.errors import BoundsDomainError
from modules.geometry import OrbitKind


@pytest.mark.parametrize("q, counts, total", [
    (1, (1, 0, 0), 1),
    (2, (0, 1, 0), 3),
    (4, (0, 2, 0), 6),
    (5, (1, 2, 0), 7),
    (6, (0, 2, 1), 12),
    (8, (1, 3, 1), 16),
    (10, (0, 4, 2), 24),
    (12, (0, 5, 3), 33),
])
def test_triangle_bounds(q, counts, total):
    bound = tri_lower_bound(q)
    assert bound.as_tuple() == counts
    assert bound.total == total


@pytest.mark.parametrize("q, counts, total", [
    (1, (1, 0, 0, 0, 0), 1),
    (2, (0, 1, 0, 0, 0), 4),
    (4, (1, 1, 1, 0, 0), 11),
    (5, (0, 2, 1, 0, 0), 14),
    (6, (0, 3, 0, 1, 0), 24),
    (12, (1, 5, 2, 5, 1), 117),
])
def test_tetrahedron_bounds(q, counts, total):
    bound = tet_lower_bound(q)
    assert bound.as_tuple() == counts
    assert bound.total == total


def test_bounds_are_defined_over_the_whole_range():
    for domain, top in (("tri", 84), ("tet", 40)):
        assert all(lower_bound(domain, q).total >= 1 for q in range(1, top + 1))
        assert all(count >= 0 for q in range(1, top + 1) for count in lower_bound(domain, q).as_tuple())


def test_count_lookup():
    bound = tri_lower_bound(8)
    assert bound.count(OrbitKind.S21) == 3
    assert bound.count(OrbitKind.S31) == 0


def test_degree_below_one_is_rejected():
    with pytest.raises(BoundsDomainError):
        tri_lower_bound(0)
    with pytest.raises(BoundsDomainError):
        tet_lower_bound(-3)
    with pytest.raises(BoundsDomainError):
        lower_bound("quad", 4)


@pytest.mark.parametrize("domain, q, n_q, expected", [
    ("tri", 8, 16, 1.0),
    ("tri", 10, 25, 0.96),
    ("tet", 2, 4, 1.0),
])
def test_efficiency(domain, q, n_q, expected):
    assert efficiency(n_q, lower_bound(domain, q)) == pytest.approx(expected)


def test_efficiency_above_one_is_flagged(caplog):
    with caplog.at_level(logging.WARNING, logger="modules.bounds"):
        value = efficiency(12, tri_lower_bound(8))
    assert value == pytest.approx(16 / 12)
    assert "beats the lower-bound estimate" in caplog.text


def test_efficiency_needs_nodes():
    with pytest.raises(BoundsDomainError):
        efficiency(0, tri_lower_bound(2))
