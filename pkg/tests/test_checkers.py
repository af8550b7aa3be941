import pytest
from hypothesis import given
from hypothesis import strategies as st

from optlab import checkers as ck
from optlab.core import TestSpec, tsum
from optlab.rational import HALF, ONE, q
from optlab.systems import TRIVIAL, compose
from optlab.verdict import InconsistencyError, Verdict
from optlab.zoo import get_theory


def _catalog(th, name, A=None):
    A = A or th.system(1)
    return next(t for t in th.test_catalog(A) if t.name == name)


def _proportional_test(th, A, weights):
    I = th.identity(A)
    total = sum(weights)
    return TestSpec.of([I.scale(q(w, total)) for w in weights], [str(k) for k in range(len(weights))], "coin")


# -- disturbance and information ------------------------------------------------------


@pytest.mark.parametrize("name", ["classical2", "quantum2", "fermionic2", "prbox-max"])
def test_coin_toss_is_harmless(name):
    th = get_theory(name)
    t = _catalog(th, "halves")
    assert ck.check_non_disturbing(th, t).result
    assert ck.check_no_information(th, t).result


def test_classical_readout_disturbs_nothing_and_informs():
    th = get_theory("classical2")
    t = _catalog(th, "readout")
    assert ck.check_non_disturbing(th, t).result
    assert not ck.check_no_information(th, t).result


def test_fermionic_parity_is_informative_even_on_local_probes():
    th = get_theory("fermionic2")
    FF = th.system(2)
    parity = th.parity_projectors(2)
    assert not ck.check_non_disturbing(th, parity).result
    v = ck.check_no_information(th, parity, ancillas=[TRIVIAL])
    assert v.result is False


@given(st.lists(st.integers(1, 9), min_size=1, max_size=4))
def test_identity_proportional_tests_are_no_information(weights):
    for name in ("classical2", "quantum2"):
        th = get_theory(name)
        t = _proportional_test(th, th.system(1), weights)
        assert ck.check_non_disturbing(th, t).result
        v = ck.check_no_information(th, t)
        assert v.result
        assert ck.weak_strong_factorization_check(th, t).result


# -- atomicity of the identity ---------------------------------------------------------


@pytest.mark.parametrize(
    "name,atomic",
    [
        ("classical2", False),
        ("detclassical2", False),
        ("quantum2", True),
        ("realquantum2", True),
        ("fermionic1", True),
        ("fermionic2", True),
        ("prbox-max", True),
        ("prbox-min", True),
    ],
)
def test_identity_atomicity(name, atomic):
    th = get_theory(name)
    assert bool(ck.check_identity_atomic(th, th.system(1)).result) == atomic


@pytest.mark.parametrize("name", ["classical2", "quantum2", "fermionic1", "prbox-max"])
def test_tri_consistency_routes_agree(name):
    th = get_theory(name)
    v = ck.tri_consistency(th, th.system(1))
    assert v.crosschecks["enumeration"] == bool(v.result) == v.crosschecks["reversibles"]


def test_route_disagreement_is_a_hard_failure(monkeypatch):
    th = get_theory("classical2")
    C = th.system(1)
    lie = Verdict("identity-atomic", th.name, ("C",), True)
    monkeypatch.setattr(ck, "check_identity_atomic", lambda theory, A: lie)
    with pytest.raises(InconsistencyError):
        ck.tri_consistency(th, C)


def test_reversible_conditions_on_classical_bit():
    th = get_theory("classical2")
    v = ck.check_reversible_conditions(th, th.system(1))
    assert v.result is False
    assert v.certificate["refinable"] == ["perm0", "perm1"]


def test_niwd_summary_verdict():
    v = ck.niwd_verdict(get_theory("quantum2"))
    assert v.result is True and v.prop == "niwd"
    assert set(v.systems) == {"Q", "Q*Q"}


# -- structure of the identity -------------------------------------------------------


@pytest.mark.parametrize("name,system,blocks", [("classical2", 1, 2), ("classical3", 1, 3), ("classical2", 2, 4)])
def test_classical_identity_splits_into_point_projections(name, system, blocks):
    th = get_theory(name)
    A = th.system(system)
    v = ck.atomic_refinement_of_identity(th, A)
    assert len(v.result) == blocks
    c = v.certificate
    assert c["sum_is_identity"] and c["idempotent"] and c["atomic"] and c["unique"]
    assert tsum(v.result).data == th.identity(A).data
    b = ck.block_decomposition(th, A)
    assert b.certificate["dims"] == [1] * blocks
    assert b.certificate["direct_sum"] and b.certificate["annihilation"]


def test_product_blocks_on_classical_pair():
    th = get_theory("classical2")
    C = th.system(1)
    b = ck.block_decomposition(th, C, C)
    assert b.certificate["sum_dims"] == b.certificate["total_dim"] == 4
    assert b.certificate["index"] == [[0, 0], [0, 1], [1, 0], [1, 1]]


@pytest.mark.parametrize("name", ["quantum2", "quantum3", "realquantum2", "fermionic1", "prbox-max"])
def test_atomic_identity_refines_to_itself(name):
    th = get_theory(name)
    A = th.system(1)
    v = ck.atomic_refinement_of_identity(th, A)
    assert v.result == [th.identity(A)]


# -- local discriminability ------------------------------------------------------------


@pytest.mark.parametrize(
    "name,degree,dim_ab,products",
    [
        ("classical2", 1, 4, 4),
        ("quantum2", 1, 16, 16),
        ("realquantum2", 2, 10, 9),
        ("fermionic2", 2, 8, 4),
        ("prbox-max", 1, 9, 9),
        ("prbox-min", 1, 9, 9),
    ],
)
def test_local_discriminability_degree(name, degree, dim_ab, products):
    th = get_theory(name)
    A = th.system(1)
    v = ck.check_local_discriminability(th, A, A)
    assert v.result == degree
    assert v.certificate["dim_AB"] == dim_ab
    assert v.certificate["product_rank"] == products


# -- purification --------------------------------------------------------------------


def test_qubit_states_purify():
    th = get_theory("quantum2")
    v = ck.check_states_purification(th, th.system(1))
    assert v.result
    assert all(ex["ancilla"] for ex in v.certificate["examples"])


def test_classical_mixtures_do_not_purify():
    th = get_theory("classical2")
    v = ck.check_states_purification(th, th.system(1))
    assert v.result is False


def test_min_tensor_center_state_has_no_pure_dilation():
    th = get_theory("prbox-min")
    v = ck.check_states_purification(th, th.system(1))
    assert v.result is False
    assert v.certificate["role"] == "center"
    assert v.certificate["state"] == (ONE, 0, 0)


def test_no_effect_purification_in_causal_operator_theories():
    th = get_theory("quantum2")
    v = ck.check_effects_purification(th, th.system(1))
    assert v.result is False and v.certificate["trace"] == 2


def test_purification_meta_check_is_never_violated():
    for name in ("quantum2", "classical2", "realquantum2"):
        v = ck.purification_implies_niwd_crosscheck(get_theory(name))
        assert v.result


# -- classicality and full information -------------------------------------------------


def test_classical_bit_is_discriminable():
    th = get_theory("classical2")
    v = ck.check_classical_system(th, th.system(1))
    assert v.result
    assert len(v.certificate["effects"]) == 2


@pytest.mark.parametrize("name", ["quantum2", "prbox-max", "fermionic2"])
def test_non_classical_systems(name):
    th = get_theory(name)
    assert not ck.check_classical_system(th, th.system(1)).result


@pytest.mark.parametrize("name,expected", [("classical2", True), ("detclassical2", True), ("quantum2", False)])
def test_full_information_without_disturbance(name, expected):
    assert ck.fiwd_check(get_theory(name)).result is expected


# -- factorization and atomicity of products -----------------------------------------


def test_informative_test_breaks_factorization():
    th = get_theory("quantum2")
    informative = [t for t in th.test_catalog(th.system(1)) if not ck.check_no_information(th, t).result]
    assert informative
    v = ck.weak_strong_factorization_check(th, informative[0])
    assert v.result is False
    assert v.crosschecks["identity_proportional"] is False


def test_parallel_composition_of_atomic_events():
    th = get_theory("quantum2")
    Q = th.system(1)
    v = ck.parallel_atomicity_check(th, Q, Q)
    assert v.result


def test_classify_row_for_quantum():
    row = ck.classify(get_theory("quantum2"))
    assert row["niwd"] and row["states_purification"] and not row["all_systems_classical"]
    assert row["local_discriminability"] == 1


def test_only_mixed_states_fail_over_the_trivial_system():
    th = get_theory("classical2")
    v = ck.check_states_purification(th, th.system(1), dilations=[TRIVIAL])
    assert v.result is False
    assert v.certificate["role"] == "center"
    det = get_theory("detclassical2")
    assert ck.check_states_purification(det, det.system(1), dilations=[TRIVIAL]).result is True


def test_unenumerable_dilations_leave_purification_undecided():
    th = get_theory("prbox-max")
    SS = th.system(2)
    v = ck.check_purification(th, SS)
    assert v.result is None
    st = v.certificate["states"]["certificate"]
    assert st["not_enumerable"] == ["S*S*S"]


@pytest.mark.parametrize(
    "values,both,either",
    [([True, True], True, True), ([True, None], None, True), ([False, None], False, None),
     ([None, None], None, None), ([False, True], False, True), ([], True, False)],
)
def test_three_valued_logic(values, both, either):
    from optlab.verdict import conjunction, disjunction

    assert conjunction(values) is both
    assert disjunction(values) is either


def test_point_mass_readout_breaks_factorization_across_circuits():
    th = get_theory("detclassical2")
    readout = _catalog(th, "readout")
    v = ck.weak_strong_factorization_check(th, readout)
    assert v.result is False
    assert v.certificate["q_i"] != v.certificate["q_i_first_circuit"]
