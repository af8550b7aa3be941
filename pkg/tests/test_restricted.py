import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from optlab import checkers as ck
from optlab import restricted as rs
from optlab.core import TestSpec, transf_equal, tsum
from optlab.rational import HALF, ONE, ZERO, q
from optlab.systems import TRIVIAL, compose
from optlab.verdict import InconsistencyError
from optlab.zoo import get_theory

from scenarios import collapse_instances, decoherence_pair, monotonicity_walk, qubit_pools

D0 = (ONE, ZERO)
D1 = (ZERO, ONE)


@pytest.fixture(scope="module")
def cbit():
    th = get_theory("classical2")
    return th, th.system(1)


@pytest.fixture(scope="module")
def qubit():
    th = get_theory("quantum2")
    return th, th.system(1)


# -- refinement spans ---------------------------------------------------------


def test_refinement_spans_classical(cbit):
    th, C = cbit
    assert len(rs.refinement_span(th, (HALF, HALF), C)) == 2
    assert len(rs.refinement_span(th, D0, C)) == 1


def test_refinement_span_of_pure_qubit(qubit):
    th, Q = qubit
    k0 = th.ket_state(th.basis_vec(2, 0), Q)
    assert len(rs.refinement_span(th, k0, Q)) == 1
    mixed = th.normalise(th.unit_effect(Q), Q)
    assert len(rs.refinement_span(th, mixed, Q)) == 4


# -- equality upon ------------------------------------------------------------


def test_parity_equals_identity_upon_every_local_state():
    th = get_theory("fermionic3")
    N = th.system(2)
    cg = tsum(th.parity_projectors(2).events)
    I = th.identity(N)
    rng = random.Random(3)
    for rho in th.sample_states(N, rng, 4) + [th.normalise(th.unit_effect(N), N)]:
        assert rs.equal_upon_rho(th, cg, I, rho)
    pair = rs.RestrictionPair.build(th, N, [(th.system(1), th.psi3())], None)
    assert not rs.equal_upon(th, cg, I, pair)


@pytest.mark.parametrize("name", ["classical2", "quantum2", "prbox-max"])
def test_reflexive_equality(name):
    th = get_theory(name)
    A = th.system(1)
    for T in th.sample_transformations(A, A, random.Random(0), 3):
        for rho in th.sample_states(A, random.Random(1), 2):
            assert rs.equal_upon_rho(th, T, T, rho)


def test_equality_upon_mismatched_systems(qubit):
    th, Q = qubit
    T = th.identity(Q)
    S = th.identity(compose(Q, Q))
    with pytest.raises(ValueError):
        rs.equal_upon_rho(th, T, S, th.normalise(th.unit_effect(Q), Q))


def _agreeing_pairs(th, A, rho_index, rng, count):
    """Map pairs that agree on one basis state and differ elsewhere."""
    readout = next(t for t in th.test_catalog(A) if t.name in ("readout", "computational"))
    E_keep, E_other = readout.events
    maps = th.sample_transformations(A, A, rng, count)
    out = []
    for k, T in enumerate(maps):
        S = maps[(k + 1) % len(maps)]
        keep, other = (E_keep, E_other) if rho_index == 0 else (E_other, E_keep)
        out.append((T, th.seq(T, keep) + th.seq(S, other)))
        out.append((T, S))
    return out


@pytest.mark.parametrize("name", ["classical2", "quantum2"])
def test_state_and_dilation_routes_agree(name):
    th = get_theory(name)
    A = th.system(1)
    rng = random.Random(11)
    if name == "classical2":
        rho = D0
    else:
        rho = th.ket_state(th.basis_vec(2, 0), A)
    dil = rs.dilations_of(th, rho, A)
    pair = rs.RestrictionPair.build(th, A, dil, None)
    seen = set()
    for T1, T2 in _agreeing_pairs(th, A, 0, rng, 10):
        a = rs.equal_upon_rho(th, T1, T2, rho)
        b = rs.equal_upon(th, T1, T2, pair)
        assert a == b
        seen.add(a)
    assert seen == {True, False}


def test_restricted_outputs_hide_decoherence(qubit):
    th, Q = qubit
    I, dec = decoherence_pair(th)
    xs, ys = qubit_pools(th)
    everything = rs.RestrictionPair.build(th, Q, xs, ys)
    assert not rs.equal_upon(th, I, dec, everything)
    diagonal = rs.RestrictionPair.build(th, Q, xs, ys[:2])
    assert rs.equal_upon(th, I, dec, diagonal)


def test_full_pair_reduces_to_unrestricted_equality(qubit):
    th, Q = qubit
    I, dec = decoherence_pair(th)
    full = rs.RestrictionPair.full(th, Q)
    assert rs.equal_upon(th, I, dec, full) == transf_equal(th, I, dec) is False
    assert rs.equal_upon(th, I, I, full)


@pytest.mark.parametrize("name", ["classical2", "quantum2", "fermionic2"])
def test_collapse_to_unrestricted(name):
    checked, tests = collapse_instances(get_theory(name), 12, seed=5)
    assert checked == 12 and tests > 0


def test_monotonicity_short_walk(qubit):
    th, _ = qubit
    steps, equal_seen = monotonicity_walk(th, 40, seed=1)
    assert 0 < equal_seen < steps


# -- atomicity upon -------------------------------------------------------------


def test_identity_on_bit_atomic_upon_single_point(cbit):
    th, C = cbit
    CC = compose(C, C)
    pair = rs.RestrictionPair.build(th, C, [(TRIVIAL, D0), (C, th.product_state(D0, C, D1, C))], None)
    assert rs.atomic_upon(th, th.identity(C), pair)
    assert not rs.atomic_upon(th, th.identity(C), rs.RestrictionPair.full(th, C))
    assert th.dim(CC) == 4


def test_qubit_identity_atomic_upon_any_pair(qubit):
    th, Q = qubit
    xs, ys = qubit_pools(th)
    rng = random.Random(2)
    for _ in range(5):
        X = rng.sample(xs, rng.randint(1, len(xs)))
        Y = rng.sample(ys, rng.randint(1, len(ys)))
        assert rs.atomic_upon(th, th.identity(Q), rs.RestrictionPair.build(th, Q, X, Y))


# -- disturbance and information upon ---------------------------------------------


def test_fermionic_local_scenario():
    sc = rs.fermionic_local_scenario()
    assert sc["nondisturbing_local"] is True
    assert sc["noinfo_local"].result is False
    assert sc["nondisturbing_with_dilation"] is False
    assert sc["unrestricted"].result is False


@pytest.mark.parametrize("name", ["classical2", "quantum2", "fermionic2"])
def test_coin_toss_upon_any_pair(name):
    th = get_theory(name)
    A = th.system(1)
    I = th.identity(A)
    coin = TestSpec.of([I.scale(HALF), I.scale(HALF)], ["h", "t"], "coin")
    rng = random.Random(4)
    X = [(TRIVIAL, s) for s in th.sample_states(A, rng, 2)]
    for pair in (rs.RestrictionPair.full(th, A), rs.RestrictionPair.build(th, A, X, None)):
        assert rs.nondisturbing_upon(th, coin, pair)
        v = rs.noinfo_upon(th, coin, pair)
        assert v.result


def test_noinfo_factors_are_reported(cbit):
    th, C = cbit
    I = th.identity(C)
    t = TestSpec.of([I.scale(q(1, 3)), I.scale(q(2, 3))], ["a", "b"], "thirds")
    v = rs.noinfo_upon(th, t, rs.RestrictionPair.full(th, C))
    assert v.certificate["r"] == [q(1, 3), q(2, 3)]


# -- NIWD upon ----------------------------------------------------------------------


def test_classical_niwd_upon_a_point(cbit):
    th, C = cbit
    point = rs.RestrictionPair.build(th, C, [(TRIVIAL, D0)], None)
    assert rs.niwd_upon(th, C, point).result is True
    assert rs.niwd_upon(th, C, rs.RestrictionPair.full(th, C)).result is False


@pytest.mark.parametrize("name", ["quantum2", "realquantum2", "prbox-max"])
def test_niwd_upon_full_matches_niwd(name):
    th = get_theory(name)
    A = th.system(1)
    v = rs.niwd_upon(th, A, rs.RestrictionPair.full(th, A))
    assert v.result == bool(ck.tri_consistency(th, A).result)
    assert v.crosschecks["enumeration"] == v.result


def test_local_fermionic_restriction_has_information_without_disturbance():
    sc = rs.fermionic_local_scenario()
    th = get_theory("fermionic3")
    v = rs.niwd_upon(th, th.system(2), sc["local_pair"], extra_tests=[sc["test"]])
    assert v.result is False
    assert v.crosschecks["enumeration"] is False
    names = {t["test"]: t["no_information"] for t in v.certificate["nondisturbing_tests"]}
    assert names["parity"] is False


def test_niwd_upon_route_disagreement_raises(cbit, monkeypatch):
    th, C = cbit
    monkeypatch.setattr(rs, "noinfo_upon", lambda *a, **k: ck.Verdict("x", "t", ("C",), True))
    with pytest.raises(InconsistencyError):
        rs.niwd_upon(th, C, rs.RestrictionPair.full(th, C))


# -- pairs as data --------------------------------------------------------------------


def test_pair_json_round_trip(qubit):
    th, Q = qubit
    xs, ys = qubit_pools(th)
    pair = rs.RestrictionPair.build(th, Q, xs[:3], ys[:2])
    again = rs.RestrictionPair.from_json(th, pair.to_json())
    assert again == pair
    assert again.describe() == pair.describe()


def test_completion_contains_the_original(cbit):
    th, C = cbit
    pair = rs.RestrictionPair.build(th, C, [(TRIVIAL, (HALF, ZERO))], [(TRIVIAL, D0)])
    comp = pair.completed()
    assert (HALF, ZERO) in comp.completion_x[TRIVIAL] or any(
        s == (HALF, ZERO) for s in comp.completion_x[TRIVIAL])
    effects = comp.completion_y[TRIVIAL]
    assert D0 in effects and (ZERO, ONE) in effects


def test_subnormalised_input_required(cbit):
    th, C = cbit
    with pytest.raises(ValueError):
        rs.RestrictionPair.build(th, C, [(TRIVIAL, (ONE, ONE))], None)


@given(st.integers(1, 6), st.integers(1, 6))
def test_enlarging_inputs_never_creates_equality(a, b):
    th = get_theory("quantum2")
    Q = th.system(1)
    I, dec = decoherence_pair(th)
    xs, ys = qubit_pools(th)
    X = xs[: min(a, len(xs))]
    small = rs.RestrictionPair.build(th, Q, X, None)
    big = small.enlarge(xs[min(a, len(xs)):min(a + b, len(xs))])
    if rs.equal_upon(th, I, dec, big):
        assert rs.equal_upon(th, I, dec, small)


# -- faithfulness and inclusion ---------------------------------------------------------


def test_maximally_entangled_state_is_faithful_upon_full_pair(qubit):
    th, Q = qubit
    full = rs.RestrictionPair.full(th, Q)
    psi = th.max_entangled(Q)
    assert rs.faithful_upon(th, psi, Q, full)
    k0 = th.ket_state(th.basis_vec(2, 0), Q)
    assert not rs.faithful_upon(th, th.product_state(k0, Q, k0, Q), Q, full)


@pytest.mark.parametrize("name,rho", [("classical2", (HALF, HALF)), ("quantum2", None)])
def test_refinement_inclusions(name, rho):
    th = get_theory(name)
    A = th.system(1)
    rho = rho or th.normalise(th.unit_effect(A), A)
    v = rs.refinement_inclusion_check(th, rho, A)
    assert v.result
    assert v.certificate["refinements_checked"] > 0
