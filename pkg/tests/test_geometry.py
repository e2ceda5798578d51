"""
Tests for the geometry module.
"""
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules.errors import DegeneracyError, GeometryError, InteriorityError, OrbitInputError
from modules.geometry import (
    OrbitKind,
    QuadRule,
    ReferenceSimplex,
    SymOrbit,
    barycentric_to_cartesian,
    canonical_orbit,
    cartesian_to_barycentric,
    check_orbit,
    classify_orbit,
    expand_orbit,
    min_facet_distance,
    orbit_cardinality,
    orbit_param_count,
    orbit_permutations,
)

TRI = ReferenceSimplex.triangle()
TET = ReferenceSimplex.tetrahedron()


@pytest.mark.parametrize("kind, dim, size, n_params", [
    (OrbitKind.S1, 2, 1, 0),
    (OrbitKind.S21, 2, 3, 1),
    (OrbitKind.S111, 2, 6, 2),
    (OrbitKind.S1, 3, 1, 0),
    (OrbitKind.S31, 3, 4, 1),
    (OrbitKind.S22, 3, 6, 1),
    (OrbitKind.S211, 3, 12, 2),
    (OrbitKind.S1111, 3, 24, 3),
])
def test_orbit_sizes(kind, dim, size, n_params):
    """Every kind has its fixed cardinality and parameter count."""
    assert orbit_cardinality(kind, dim) == size
    assert orbit_param_count(kind, dim) == n_params


def test_permutations_are_lexicographic():
    perms = orbit_permutations(OrbitKind.S21, 2)
    assert perms == ((0, 1, 2), (0, 2, 1), (2, 0, 1))
    assert list(orbit_permutations(OrbitKind.S111, 2)) == sorted(orbit_permutations(OrbitKind.S111, 2))


def test_tetrahedral_kind_on_triangle_is_rejected():
    with pytest.raises(GeometryError):
        orbit_cardinality(OrbitKind.S31, 2)


def test_reference_simplices():
    assert TRI.measure == 2
    assert TET.measure == Fraction(4, 3)
    assert TRI.kinds == (OrbitKind.S1, OrbitKind.S21, OrbitKind.S111)
    assert ReferenceSimplex.from_name("tet") == TET
    with pytest.raises(GeometryError):
        ReferenceSimplex.from_name("hex")


def test_orbit_parameter_count_is_checked():
    with pytest.raises(GeometryError):
        SymOrbit(OrbitKind.S21, (0.1, 0.2), 1.0)


def test_expand_three_point_orbit():
    """The S21 orbit at 1/6 gives the classic degree-2 nodes."""
    orbit = SymOrbit(OrbitKind.S21, (1 / 6,), 2 / 3)
    nodes, weights = expand_orbit(orbit, TRI)
    # x = 2*lambda_2 - 1, y = 2*lambda_3 - 1
    expected = np.array([[-2 / 3, 1 / 3], [1 / 3, -2 / 3], [-2 / 3, -2 / 3]])
    np.testing.assert_allclose(nodes, expected, atol=1e-15)
    assert weights.sum() == pytest.approx(2.0, abs=1e-15)


def test_expand_tetrahedral_orbit_sums_to_one():
    orbit = SymOrbit(OrbitKind.S1111, (0.05, 0.15, 0.3), 0.01, dim=3)
    lam = orbit.expand_barycentric()
    assert lam.shape == (24, 4)
    np.testing.assert_allclose(lam.sum(axis=1), 1.0, atol=1e-15)
    assert len({tuple(row) for row in np.round(lam, 12)}) == 24


def test_check_orbit_rejects_boundary_and_degenerate_orbits():
    with pytest.raises(InteriorityError):
        check_orbit(SymOrbit(OrbitKind.S21, (0.6,), 1.0))
    with pytest.raises(InteriorityError):
        check_orbit(SymOrbit(OrbitKind.S31, (0.0,), 1.0, dim=3))
    with pytest.raises(DegeneracyError):
        check_orbit(SymOrbit(OrbitKind.S21, (1 / 3,), 1.0))
    with pytest.raises(DegeneracyError):
        expand_orbit(SymOrbit(OrbitKind.S111, (0.2, 0.2), 1.0), TRI)


def test_barycentric_cartesian_inverse():
    lam = np.array([[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]])
    x = barycentric_to_cartesian(lam, TRI)
    np.testing.assert_allclose(x[1], [-1.0, -1.0])
    np.testing.assert_allclose(cartesian_to_barycentric(x, TRI), lam, atol=1e-15)
    with pytest.raises(GeometryError):
        barycentric_to_cartesian(np.ones((1, 4)) / 4, TRI)


@pytest.mark.parametrize("point, kind, params", [
    ((1 / 3, 1 / 3, 1 / 3), OrbitKind.S1, ()),
    ((0.6, 0.2, 0.2), OrbitKind.S21, (0.2,)),
    ((0.6, 0.1, 0.3), OrbitKind.S111, (0.1, 0.3)),
    ((0.25, 0.25, 0.25, 0.25), OrbitKind.S1, ()),
    ((0.1, 0.7, 0.1, 0.1), OrbitKind.S31, (0.1,)),
    ((0.4, 0.1, 0.1, 0.4), OrbitKind.S22, (0.1,)),
    ((0.5, 0.1, 0.3, 0.1), OrbitKind.S211, (0.1, 0.3)),
    ((0.1, 0.2, 0.3, 0.4), OrbitKind.S1111, (0.1, 0.2, 0.3)),
])
def test_classify_orbit(point, kind, params):
    found_kind, found_params = classify_orbit(point)
    assert found_kind is kind
    assert found_params == pytest.approx(params, abs=1e-15)


def test_classify_orbit_rejects_bad_input():
    with pytest.raises(OrbitInputError):
        classify_orbit((0.5, 0.5, 0.5))
    with pytest.raises(OrbitInputError):
        classify_orbit((0.2, 0.2, 0.2, 0.2, 0.2))


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(min_value=0.01, max_value=0.15),
    b=st.floats(min_value=0.2, max_value=0.3),
    perm=st.permutations([0, 1, 2]),
)
def test_classification_ignores_vertex_order(a, b, perm):
    """Any node of an S111 orbit classifies back to the orbit's parameters."""
    orbit = SymOrbit(OrbitKind.S111, (a, b), 0.1)
    node = orbit.representative()[list(perm)]
    kind, params = classify_orbit(node)
    assert kind is OrbitKind.S111
    assert params == pytest.approx((a, b), abs=1e-14)


def test_canonical_orbit_reorders_parameters():
    orbit = canonical_orbit(SymOrbit(OrbitKind.S111, (0.3, 0.1), 0.5))
    assert orbit.params == pytest.approx((0.1, 0.3))
    assert orbit.weight == 0.5


def test_min_facet_distance():
    assert min_facet_distance(SymOrbit(OrbitKind.S21, (0.45,), 1.0)) == pytest.approx(0.1)
    assert min_facet_distance(SymOrbit(OrbitKind.S1, (), 1.0, dim=3)) == pytest.approx(0.25)


def test_quad_rule_bookkeeping():
    rule = QuadRule(TRI, 4, [
        SymOrbit(OrbitKind.S21, (0.4,), 0.2),
        SymOrbit(OrbitKind.S1, (), 0.3),
        SymOrbit(OrbitKind.S21, (0.1,), 0.1),
    ])
    assert rule.domain == "tri"
    assert rule.num_nodes == 7
    assert rule.orbit_counts() == {OrbitKind.S1: 1, OrbitKind.S21: 2, OrbitKind.S111: 0}
    ordered = rule.sorted()
    assert [o.kind for o in ordered.orbits] == [OrbitKind.S1, OrbitKind.S21, OrbitKind.S21]
    assert ordered.orbits[1].params == (0.1,)
    assert rule.without_orbit(1).num_nodes == 6
    nodes, weights = rule.expand()
    assert nodes.shape == (7, 2)
    assert weights.sum() == pytest.approx(0.3 + 3 * 0.3)


def test_rule_rejects_mixed_dimensions():
    with pytest.raises(GeometryError):
        QuadRule(TRI, 1, [SymOrbit(OrbitKind.S1, (), 1.0, dim=3)])


@pytest.mark.parametrize("simplex", [TRI, TET], ids=["tri", "tet"])
def test_barycentric_round_trip_on_random_points(simplex):
    rng = np.random.default_rng(2024)
    lam = rng.dirichlet(np.ones(simplex.dim + 1), size=1000)
    back = cartesian_to_barycentric(barycentric_to_cartesian(lam, simplex), simplex)
    assert np.max(np.abs(back - lam)) <= 1e-14


# Parameter ranges keep every orbit interior with distinct coordinate groups
ORBIT_PARAMS = {
    (2, OrbitKind.S1): (),
    (2, OrbitKind.S21): ((0.02, 0.3),),
    (2, OrbitKind.S111): ((0.01, 0.1), (0.15, 0.3)),
    (3, OrbitKind.S1): (),
    (3, OrbitKind.S31): ((0.02, 0.2),),
    (3, OrbitKind.S22): ((0.02, 0.2),),
    (3, OrbitKind.S211): ((0.02, 0.1), (0.15, 0.25)),
    (3, OrbitKind.S1111): ((0.01, 0.08), (0.1, 0.18), (0.2, 0.3)),
}


@st.composite
def orbits(draw):
    dim, kind = draw(st.sampled_from(sorted(ORBIT_PARAMS, key=lambda key: (key[0], key[1].value))))
    params = tuple(draw(st.floats(min_value=low, max_value=high)) for low, high in ORBIT_PARAMS[(dim, kind)])
    return SymOrbit(kind, params, 0.1, dim=dim)


def sorted_rows(rows):
    return rows[np.lexsort(rows.T[::-1])]


@settings(max_examples=100, deadline=None)
@given(orbit=orbits())
def test_expanded_orbit_is_invariant_under_vertex_permutations(orbit):
    lam = orbit.expand_barycentric()
    assert len({tuple(row) for row in lam}) == orbit.cardinality
    reference = sorted_rows(lam)
    for perm in itertools.permutations(range(orbit.dim + 1)):
        assert np.array_equal(sorted_rows(lam[:, list(perm)]), reference)


@settings(max_examples=100, deadline=None)
@given(orbit=orbits())
def test_every_expanded_node_classifies_as_its_orbit(orbit):
    for node in orbit.expand_barycentric():
        kind, params = classify_orbit(node)
        assert kind is orbit.kind
        assert params == pytest.approx(orbit.params, abs=1e-14)
    assert canonical_orbit(orbit) == orbit
