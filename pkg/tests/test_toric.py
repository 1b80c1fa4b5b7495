"""Fan validation, toric intersection data, and the delta/alpha estimators.

Frozen values below were derived by hand from the lattice-point sums
(levels 1 and 2 on the blow-up are small enough to enumerate on paper)
and from polygon barycenters.
"""

from fractions import Fraction

import pytest

import kahlerlab.intersect as ix
import kahlerlab.toric as tc
from kahlerlab.errors import (
    EmptyPolytope,
    NoSections,
    NotComplete,
    NotNef,
    NotSmooth,
    WrongArity,
)
from toric_oracle import min_reciprocal, monomial_basis_divisor, pick_count

P2 = ((1, 0), (0, 1), (-1, -1))
P1XP1 = ((1, 0), (0, 1), (-1, 0), (0, -1))
BL1P2 = ((1, 0), (1, 1), (0, 1), (-1, -1))
F2 = ((1, 0), (0, 1), (-1, 2), (0, -1))
F3 = ((1, 0), (0, 1), (-1, 3), (0, -1))

ALL_NEF = [P2, P1XP1, BL1P2, F2]


def fan(rays):
    return tc.ToricSurfaceFan(tuple(rays))


# -- fan validation -----------------------------------------------------------


def test_fan_rejects_non_primitive_ray():
    with pytest.raises(NotSmooth):
        fan([(2, 0), (0, 1), (-1, -1)])


def test_fan_rejects_singular_cone():
    # det((1,0),(1,2)) = 2: a quadric cone singularity
    with pytest.raises(NotSmooth):
        fan([(1, 0), (1, 2), (-1, -1)])


def test_fan_rejects_clockwise_order():
    with pytest.raises(NotComplete):
        fan([(1, 0), (0, -1), (-1, 1)])


def test_fan_rejects_duplicates_and_short_lists():
    with pytest.raises(NotComplete):
        fan([(1, 0), (0, 1)])
    with pytest.raises(NotComplete):
        fan([(1, 0), (0, 1), (1, 0), (0, -1)])


def test_self_intersections_bl1p2():
    f = fan(BL1P2)
    assert [f.self_intersection(i) for i in range(4)] == [0, -1, 0, 1]


# -- intersection data --------------------------------------------------------


def test_noether_formula_across_corpus():
    for rays in ALL_NEF:
        d = tc.build_intersection_data(fan(rays))
        K = d.canonical_class
        c1sq = ix.intersection_number(d, [K, K])
        assert c1sq + ix.c2_pairing(d, []) == 12


def test_p2_chern_numbers():
    d = tc.build_intersection_data(fan(P2))
    assert ix.intersection_number(d, [d.c1, d.c1]) == 9
    assert ix.c2_pairing(d, []) == 3
    # every ray divisor is the hyperplane class, hence ample
    assert d.ample >= {"D1", "D2", "D3"}


def test_p1xp1_chern_numbers_and_rulings():
    d = tc.build_intersection_data(fan(P1XP1))
    assert ix.intersection_number(d, [d.c1, d.c1]) == 8
    assert ix.c2_pairing(d, []) == 4
    D1, D2 = d.vector("D1"), d.vector("D2")
    assert ix.intersection_number(d, [D1, D1]) == 0
    assert ix.intersection_number(d, [D1, D2]) == 1
    # no ruler is ample
    assert d.ample == {"A"}


def test_bl1p2_exceptional_curve():
    d = tc.build_intersection_data(fan(BL1P2))
    E = d.vector("D2")
    assert ix.intersection_number(d, [E, E]) == -1
    assert ix.intersection_number(d, [d.c1, d.c1]) == 8
    assert ix.c2_pairing(d, []) == 4


def test_constructed_ample_class_is_positive():
    for rays in ALL_NEF + [F3]:
        f = fan(rays)
        d = tc.build_intersection_data(f)
        A = d.vector("A")
        assert ix.intersection_number(d, [A, A]) > 0
        for i in range(f.m):
            Di = d.vector("D%d" % (i + 1))
            assert ix.intersection_number(d, [A, Di]) > 0
        assert ix.numerical_dimension(d, A, A) == 2


def test_my_quantity_nonnegative_on_nef_corpus():
    vals = [tc.build_intersection_data(fan(r)) for r in ALL_NEF]
    assert [ix.my_quantity(d) for d in vals] == [0, 8, 8, 8]


# -- polytopes ----------------------------------------------------------------


def test_anticanonical_polytope_p2():
    p = tc.anticanonical_polytope(fan(P2))
    assert set(p.vertices) == {(-1, -1), (2, -1), (-1, 2)}
    assert tc.area(p) == Fraction(9, 2)
    assert tc.barycenter(p) == (0, 0)


def test_anticanonical_polytope_p1xp1_square():
    p = tc.anticanonical_polytope(fan(P1XP1))
    assert set(p.vertices) == {(1, 1), (-1, 1), (-1, -1), (1, -1)}
    assert tc.barycenter(p) == (0, 0)


def test_anticanonical_polytope_bl1p2_truncated():
    p = tc.anticanonical_polytope(fan(BL1P2))
    assert set(p.vertices) == {(2, -1), (-1, 2), (-1, 0), (0, -1)}
    assert tc.area(p) == 4
    assert tc.barycenter(p) == (Fraction(1, 12), Fraction(1, 12))


def test_anticanonical_polytope_f2_tangent_facet():
    # -K meets the -2 curve in zero: its facet degenerates to a vertex
    p = tc.anticanonical_polytope(fan(F2))
    assert set(p.vertices) == {(-1, -1), (3, 1), (-1, 1)}


def test_anticanonical_polytope_f3_not_nef():
    with pytest.raises(NotNef):
        tc.anticanonical_polytope(fan(F3))


def test_polytope_empty():
    with pytest.raises(EmptyPolytope):
        tc.polytope(fan(P2), [-5, -5, -5])


def test_polytope_offset_arity():
    with pytest.raises(WrongArity):
        tc.polytope(fan(P2), [1, 1])


def test_vertices_are_counterclockwise():
    for rays in ALL_NEF:
        p = tc.anticanonical_polytope(fan(rays))
        assert tc.area(p) > 0
        v = p.vertices
        for i in range(len(v)):
            a, b, c = v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]
            cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            assert cross > 0


def test_lattice_point_counts():
    assert len(tc.lattice_points(tc.anticanonical_polytope(fan(P2)))) == 10
    assert len(tc.lattice_points(tc.anticanonical_polytope(fan(P1XP1)))) == 9
    assert len(tc.lattice_points(tc.anticanonical_polytope(fan(BL1P2)))) == 9
    assert len(tc.lattice_points(tc.anticanonical_polytope(fan(BL1P2)), 2)) == 25


def test_pick_formula_on_dilations():
    for rays in ALL_NEF:
        p = tc.anticanonical_polytope(fan(rays))
        for k in (1, 2, 3):
            assert len(tc.lattice_points(p, k)) == pick_count(p.vertices, k)


# -- basis-type coefficients and delta ----------------------------------------


def test_basis_type_p2_symmetric():
    p = tc.anticanonical_polytope(fan(P2))
    nk, coeffs = tc.basis_type_coefficients(p, 1)
    assert nk == 10
    assert coeffs == (1, 1, 1)


def test_basis_type_square_symmetric():
    p = tc.anticanonical_polytope(fan(P1XP1))
    nk, coeffs = tc.basis_type_coefficients(p, 1)
    assert nk == 9
    assert coeffs == (1, 1, 1, 1)


def test_basis_type_bl1p2_level_one():
    p = tc.anticanonical_polytope(fan(BL1P2))
    nk, coeffs = tc.basis_type_coefficients(p, 1)
    assert nk == 9
    assert coeffs == (
        Fraction(10, 9),
        Fraction(11, 9),
        Fraction(10, 9),
        Fraction(7, 9),
    )


def test_basis_type_class_matches_polarization():
    # sum a_i D_i must be linearly equivalent to -K = sum D_i
    for rays in ALL_NEF:
        f = fan(rays)
        p = tc.anticanonical_polytope(f)
        for k in (1, 2):
            _, coeffs = tc.basis_type_coefficients(p, k)
            assert tc.same_divisor_class(f, coeffs, [1] * f.m)


def test_same_divisor_class_negative():
    f = fan(BL1P2)
    assert not tc.same_divisor_class(f, [1, 1, 1, 1], [1, 1, 1, 2])


def test_delta_k_fano_values():
    for rays in (P2, P1XP1):
        p = tc.anticanonical_polytope(fan(rays))
        for k in (1, 2, 4):
            assert tc.delta_k(p, k) == 1


def test_delta_k_bl1p2_frozen_values():
    p = tc.anticanonical_polytope(fan(BL1P2))
    assert tc.delta_k(p, 1) == Fraction(9, 11)
    assert tc.delta_k(p, 2) == Fraction(5, 6)
    for k in (2, 4, 8):
        assert tc.delta_k(p, k) < 1


def test_delta_k_f2_level_one():
    # coefficients (13/9, 13/9, 13/9, 5/9): three facets tie
    p = tc.anticanonical_polytope(fan(F2))
    assert tc.delta_k(p, 1) == Fraction(9, 13)


def test_delta_limit_values():
    assert tc.delta_limit(tc.anticanonical_polytope(fan(P2))) == 1
    assert tc.delta_limit(tc.anticanonical_polytope(fan(P1XP1))) == 1
    assert tc.delta_limit(tc.anticanonical_polytope(fan(BL1P2))) == Fraction(6, 7)
    assert tc.delta_limit(tc.anticanonical_polytope(fan(F2))) == Fraction(3, 4)


def test_delta_k_trend_to_limit():
    # gaps shrink like C/k; k*gap grows toward C, so the constant fitted on
    # the two largest levels dominates the smallest
    p = tc.anticanonical_polytope(fan(BL1P2))
    lim = tc.delta_limit(p)
    gaps = {k: abs(tc.delta_k(p, k) - lim) for k in (4, 8, 16)}
    assert tc.delta_k(p, 4) < tc.delta_k(p, 8) < tc.delta_k(p, 16) < lim
    C = max(8 * gaps[8], 16 * gaps[16])
    assert gaps[4] <= Fraction(C, 4)


# -- alpha --------------------------------------------------------------------


def test_alpha_p2():
    p = tc.anticanonical_polytope(fan(P2))
    assert tc.alpha_k(p, 1) == Fraction(1, 3)


def test_alpha_p1xp1():
    p = tc.anticanonical_polytope(fan(P1XP1))
    assert tc.alpha_k(p, 1) == Fraction(1, 2)


def test_alpha_single_interior_point():
    # only lattice point is the origin, interior: alpha = 1/lambda_max
    p = tc.polytope(fan(P2), [Fraction(1, 2)] * 3)
    assert tc.lattice_points(p) == [(0, 0)]
    assert tc.alpha_k(p, 1) == 2


def test_no_sections_on_empty_dilation():
    p = tc.polytope(fan(P2), [Fraction(1, 2)] * 3)
    est = tc.delta_estimate(p, 1)
    assert est.N_k == 1
    with pytest.raises(NoSections):
        tc.lattice_points(p, 0)


# -- BJ bounds ----------------------------------------------------------------


def test_bj_bounds_cases():
    # single-section lower bound for alpha can fail the ample-case form
    assert not tc.check_bj_bounds(Fraction(1, 3), 1, 2, ample=True)
    assert tc.check_bj_bounds(Fraction(1, 3), 1, 2, ample=False)
    assert tc.check_bj_bounds(Fraction(2, 5), Fraction(2, 5), 7, ample=True)
    assert tc.check_bj_bounds(0, 0, 2, ample=True)
    with pytest.raises(ValueError):
        tc.check_bj_bounds(-1, 0, 2, ample=False)


def test_bj_bounds_limit_values_corpus():
    for rays in ALL_NEF:
        p = tc.anticanonical_polytope(fan(rays))
        assert tc.check_bj_bounds(tc.alpha_k(p, 1), tc.delta_limit(p), 2, ample=False)


# -- oracle agreement ---------------------------------------------------------


def test_monomial_basis_oracle_agreement():
    for rays in ALL_NEF:
        p = tc.anticanonical_polytope(fan(rays))
        for k in range(1, 9):
            nk, coeffs = tc.basis_type_coefficients(p, k)
            onk, ocoeffs = monomial_basis_divisor(p.inequalities, k)
            assert nk == onk
            assert list(coeffs) == ocoeffs
            assert tc.delta_k(p, k) == min_reciprocal(ocoeffs)


# -- serialization ------------------------------------------------------------


def test_fan_json_round_trip():
    f = fan(BL1P2)
    assert tc.fan_from_dict(tc.fan_to_dict(f)) == f


def test_delta_report_dict():
    p = tc.anticanonical_polytope(fan(BL1P2))
    doc = tc.delta_report_dict(p, 2)
    assert doc == {
        "k": 2,
        "N_k": 25,
        "coefficients": ["11/10", "6/5", "11/10", "4/5"],
        "delta_k": "5/6",
        "alpha_k": doc["alpha_k"],
        "delta_limit": "6/7",
    }
    assert Fraction(doc["alpha_k"]) <= Fraction(doc["delta_k"])
