import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from optlab import linalg as la
from optlab.cones import (
    ConeH,
    ConeV,
    DDLimitError,
    NotInConeError,
    cone_decompose,
    cone_member,
    dd_convert,
    face_support_aggregate,
    face_support_lp,
    irredundant,
    is_extreme_ray,
    minimal_face,
)
from optlab.lp import eq, ge, le, lp_feasible, lp_maximize, verify_farkas
from optlab.rational import ONE, ZERO, fmt, fmt_short, mat_from_json, mat_to_json, q

from oracles import face_support_bruteforce, polytope_vertices, subset_rank

QUADRANT = ConeV(2, [(1, 0), (0, 1)])
SQUARE_BASE = ConeV(3, [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)])

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6).map(lambda f: q(f.numerator, f.denominator))


# -- scalars -----------------------------------------------------------------


def test_rationals_are_canonical():
    assert q(3, 6) == q(1, 2)
    assert fmt(q(3, 6)) == "1/2"
    assert fmt(q(2)) == "2/1"
    assert fmt_short(q(2)) == "2"
    assert q("-4/6").denominator == 3


@given(small_q, small_q, small_q)
def test_field_axioms_exact(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a + b) - b == a
    if b != 0:
        assert (a / b) * b == a


@given(st.lists(st.lists(small_q, min_size=3, max_size=3), min_size=1, max_size=4))
def test_matrix_json_round_trip(rows):
    assert mat_from_json(mat_to_json(rows)) == [list(r) for r in rows]


def test_linalg_dimension_errors():
    with pytest.raises(la.DimensionError):
        la.dot((1, 2), (1, 2, 3))
    with pytest.raises(la.DimensionError):
        la.solve([[1, 0], [0, 1]], [1])


def test_int_inputs_stay_exact():
    c = la.coordinates([(1, 0, 0), (0, 3, 0)], (2, 1, 0))
    assert c == (q(2), q(1, 3))
    assert la.inverse([[2, 0], [0, 4]])[1][1] == q(1, 4)


# -- linear programming ---------------------------------------------------------


def test_lp_interval_witness():
    r = lp_feasible([ge([1], 0), le([1], 1), eq([1], q(1, 2))], 1)
    assert r.feasible and r.x == (q(1, 2),)


def test_lp_empty_interval_farkas():
    cons = [ge([1], 1), le([1], 0)]
    r = lp_feasible(cons, 1)
    assert not r.feasible
    assert verify_farkas(cons, 1, r.farkas)


def test_lp_maximize_textbook():
    r = lp_maximize([1, 1], [le([1, 2], 4), le([3, 1], 6)], 2)
    assert r.status == "optimal"
    assert r.value == q(14, 5) and r.x == (q(8, 5), q(6, 5))


def test_lp_unbounded_and_free_variables():
    assert lp_maximize([1], [ge([1], 0)], 1).status == "unbounded"
    r = lp_feasible([eq([1], -3)], 1, free=(0,))
    assert r.x == (q(-3),)
    assert not lp_feasible([eq([1], -3)], 1).feasible


def test_lp_dimension_mismatch():
    with pytest.raises((la.DimensionError, ValueError)):
        lp_feasible([eq([1, 2], 1)], 3)


def _random_system(rng, m=6, n=4):
    A = [[q(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)]
    b = [q(rng.randint(-3, 6)) for _ in range(m)]
    box = [[ONE if j == i else ZERO for j in range(n)] for i in range(n)]
    return A + box, b + [q(5)] * n


@pytest.mark.parametrize("seed", range(40))
def test_lp_agrees_with_vertex_enumeration(seed):
    rng = random.Random(seed)
    A, b = _random_system(rng)
    n = len(A[0])
    cons = [le(r, c) for r, c in zip(A, b)]
    verts = polytope_vertices(A, b)
    res = lp_feasible(cons, n)
    assert res.feasible == bool(verts)
    if not res.feasible:
        assert verify_farkas(cons, n, res.farkas)
        return
    assert all(c.holds(res.x) for c in cons)
    obj = [q(rng.randint(-3, 3)) for _ in range(n)]
    best = max(la.dot(obj, v) for v in verts)
    opt = lp_maximize(obj, cons, n)
    assert opt.status == "optimal" and opt.value == best


# -- cones ----------------------------------------------------------------------


def test_quadrant_membership():
    assert cone_member(QUADRANT, (1, 1))
    assert not cone_member(QUADRANT, (1, -1))
    with pytest.raises(la.DimensionError):
        cone_member(QUADRANT, (1, 1, 1))


def test_quadrant_h_form():
    H = dd_convert(QUADRANT)
    assert sorted(H.inequalities) == [(0, 1), (1, 0)]


def test_square_base_has_four_facets():
    H = dd_convert(SQUARE_BASE)
    assert len(H.inequalities) == 4
    for g in SQUARE_BASE.generators:
        assert sum(1 for a in H.inequalities if la.dot(a, g) == 0) == 2


def test_simplex_cone_round_trip():
    K = ConeV(4, [la.unit_vector(4, i) for i in range(4)])
    H = dd_convert(K)
    assert len(H.inequalities) == 4
    V = dd_convert(H)
    assert sorted(la.primitive(g) for g in V.generators) == sorted(K.generators)


def test_dd_dimension_cap():
    big = ConeV(65, [la.unit_vector(65, 0)])
    with pytest.raises(DDLimitError):
        dd_convert(big)


def test_minimal_faces_on_quadrant():
    f = minimal_face(QUADRANT, (1, 0))
    assert f.support == {0} and f.dim == 1
    assert minimal_face(QUADRANT, (1, 1)).dim == 2
    assert is_extreme_ray(QUADRANT, (0, 3))
    assert not is_extreme_ray(QUADRANT, (1, 1))
    with pytest.raises(NotInConeError):
        minimal_face(QUADRANT, (-1, 0))


def test_square_base_edge_point():
    edge = la.vadd(SQUARE_BASE.generators[0], SQUARE_BASE.generators[1])
    f = minimal_face(SQUARE_BASE, edge)
    assert f.dim == 2 and f.support == {0, 1}
    apex_adjacent = SQUARE_BASE.generators[2]
    assert minimal_face(SQUARE_BASE, apex_adjacent).dim == 1
    assert minimal_face(SQUARE_BASE, (1, 0, 0)).dim == 3


def test_irredundant_drops_interior_generators():
    K = ConeV(2, [(1, 0), (0, 1), (1, 1), (2, 0)])
    R = irredundant(K)
    assert sorted(la.primitive(g) for g in R.generators) == [(0, 1), (1, 0)]


def random_pointed_cone(rng, d=None, n=None):
    d = d or rng.randint(2, 4)
    n = n or rng.randint(d, d + 3)
    gens = []
    while len(gens) < n:
        g = (q(rng.randint(1, 3)),) + tuple(q(rng.randint(-2, 2)) for _ in range(d - 1))
        if g not in gens:
            gens.append(g)
    return ConeV(d, gens)


def random_point_in(rng, K):
    k = rng.randint(1, len(K.generators))
    idx = rng.sample(range(len(K.generators)), k)
    x = tuple(ZERO for _ in range(K.ambient_dim))
    for i in idx:
        x = la.vadd(x, la.vscale(q(rng.randint(1, 4)), K.generators[i]))
    return x


@pytest.mark.parametrize("seed", range(30))
def test_minimal_face_matches_subset_oracle(seed):
    rng = random.Random(1000 + seed)
    K = random_pointed_cone(rng)
    x = random_point_in(rng, K)
    expected = face_support_bruteforce(K.generators, x)
    for method in ("lp", "aggregate"):
        f = minimal_face(K, x, method=method)
        assert f.support == expected
        assert f.dim == subset_rank(K.generators, expected)
    assert face_support_lp(K, x) == face_support_aggregate(K, x)


@pytest.mark.parametrize("seed", range(30))
def test_h_form_membership_cross_check(seed):
    rng = random.Random(2000 + seed)
    K = random_pointed_cone(rng, d=3, n=5)
    H = dd_convert(K)
    assert all(H.contains(g) for g in K.generators)
    V = dd_convert(H)
    for _ in range(10):
        p = tuple(q(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3))
        assert cone_member(K, p) == H.contains(p) == cone_member(V, p)


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=5))
def test_decomposition_is_a_certificate(coeffs):
    K = SQUARE_BASE
    x = tuple(ZERO for _ in range(3))
    for i, c in enumerate(coeffs[0] + (1,)):
        x = la.vadd(x, la.vscale(q(c), K.generators[i % 4]))
    c = cone_decompose(K, x)
    assert c is not None and all(v >= 0 for v in c)
    rebuilt = tuple(ZERO for _ in range(3))
    for v, g in zip(c, K.generators):
        rebuilt = la.vadd(rebuilt, la.vscale(v, g))
    assert rebuilt == x


@given(st.integers(1, 5), st.integers(1, 5))
def test_face_of_sum_contains_both(a, b):
    K = SQUARE_BASE
    x = la.vadd(la.vscale(q(a), K.generators[0]), la.vscale(q(b), K.generators[3]))
    f = minimal_face(K, x)
    assert {0, 3} <= f.support
    assert f.dim == subset_rank(K.generators, f.support)


def test_cone_h_rejects_bad_length():
    with pytest.raises(la.DimensionError):
        ConeH(2, [(1, 0, 0)])
    with pytest.raises(ValueError):
        ConeV(2, [(0, 0)])
