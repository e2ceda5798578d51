"""
Tests for the line-LG initial guess generator.
"""
import numpy as np
import pytest

from modules.errors import GenerationError, NumericError
from modules.geometry import OrbitKind
from modules.initgen import (
    corner_map,
    generate_initial_guess,
    half_line_lg_nodes,
    legendre_roots,
    line_lg_seed,
    predict_orbit_counts,
    predicted_node_count,
    select_n1,
)


@pytest.mark.parametrize("domain, q, n1", [
    ("tri", 1, 1), ("tri", 2, 2), ("tri", 3, 3), ("tri", 5, 3), ("tri", 7, 5),
    ("tri", 8, 5), ("tri", 31, 16), ("tet", 2, 2), ("tet", 3, 3), ("tet", 4, 3),
    ("tet", 11, 7), ("tet", 20, 11),
])
def test_select_n1(domain, q, n1):
    assert select_n1(domain, q) == n1


def test_select_n1_rejects_bad_input():
    with pytest.raises(GenerationError):
        select_n1("tri", 0)
    with pytest.raises(GenerationError):
        select_n1("hex", 3)


@pytest.mark.parametrize("n", [1, 2, 5, 12, 25])
def test_legendre_roots_match_numpy(n):
    expected, _ = np.polynomial.legendre.leggauss(n)
    np.testing.assert_allclose(legendre_roots(n), np.sort(expected), atol=1e-14)


def test_legendre_roots_need_positive_count():
    with pytest.raises(NumericError):
        legendre_roots(0)


def test_half_line_nodes():
    np.testing.assert_allclose(half_line_lg_nodes(3), [-np.sqrt(0.6), 0.0], atol=1e-15)
    assert half_line_lg_nodes(3)[-1] == 0.0
    assert len(half_line_lg_nodes(6)) == 3
    assert all(x < 0 for x in half_line_lg_nodes(6))


def test_seed_split():
    seed = line_lg_seed("tri", 8)
    assert (seed.n1, seed.m, seed.n_r) == (5, 1, 2)
    with pytest.raises(GenerationError):
        line_lg_seed("tri", 8, n1=0)


def test_corner_map_hits_vertex_and_centroid():
    lam = corner_map(np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0]]), 2)
    np.testing.assert_allclose(lam[0], [1.0, 0.0, 0.0])
    np.testing.assert_allclose(lam[1], [1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_allclose(lam[2], [0.5, 0.5, 0.0])
    np.testing.assert_allclose(corner_map(np.ones((1, 3)), 3)[0], [0.25] * 4)


@pytest.mark.parametrize("n1", range(2, 17))
def test_triangle_orbit_counts_follow_the_formula(n1):
    rule = generate_initial_guess("tri", 2 * n1, n1=n1)
    assert rule.orbit_counts() == predict_orbit_counts("tri", n1)
    assert rule.num_nodes == predicted_node_count("tri", n1)


@pytest.mark.parametrize("n1", range(2, 9))
def test_tetrahedron_orbit_counts_follow_the_formula(n1):
    rule = generate_initial_guess("tet", 2 * n1, n1=n1)
    assert rule.orbit_counts() == predict_orbit_counts("tet", n1)


def test_known_orbit_counts():
    assert predict_orbit_counts("tri", 5) == {OrbitKind.S1: 1, OrbitKind.S21: 4, OrbitKind.S111: 1}
    assert predicted_node_count("tri", 5) == 19
    assert predict_orbit_counts("tet", 3) == {
        OrbitKind.S1: 1, OrbitKind.S31: 2, OrbitKind.S22: 1, OrbitKind.S211: 0, OrbitKind.S1111: 0,
    }


def test_guess_is_interior_with_uniform_weights():
    rule = generate_initial_guess("tet", 6)
    lam = rule.barycentric_nodes()
    assert lam.min() > 0.0
    np.testing.assert_allclose(lam.sum(axis=1), 1.0, atol=1e-14)
    assert {orbit.weight for orbit in rule.orbits} == {(2 / 6) ** 3}


def test_degree_one_guess_is_the_centroid():
    rule = generate_initial_guess("tri", 1)
    assert len(rule.orbits) == 1
    assert rule.orbits[0].kind is OrbitKind.S1
    assert rule.orbits[0].weight == 8.0


def test_degree_two_guess_is_a_single_three_point_orbit():
    rule = generate_initial_guess("tri", 2)
    assert [o.kind for o in rule.orbits] == [OrbitKind.S21]
    assert 0.1 < rule.orbits[0].params[0] < 0.25


def test_guess_is_deterministic():
    assert generate_initial_guess("tri", 9) == generate_initial_guess("tri", 9)
