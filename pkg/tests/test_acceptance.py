"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json
import random
import time
from pathlib import Path

import pytest

from optlab import checkers as ck
from optlab import linalg as la
from optlab import restricted as rs
from optlab.cones import ConeV, cone_member, dd_convert, minimal_face
from optlab.core import TestSpec, distinguishing_witness, transf_equal, tsum
from optlab.dsl import evaluate, load_file
from optlab.rational import HALF, ONE, ZERO, q
from optlab.report import CLASSIFICATION, classification_row, jsonable, replay_certificate
from optlab.systems import TRIVIAL, compose, fmt_system
from optlab.zoo import BUILTINS, get_theory

from oracles import face_support_bruteforce, subset_rank
from scenarios import COLLAPSE_THEORIES, collapse_instances, monotonicity_walk, qubit_pools

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "optlab" / "data" / "circuits"


@pytest.fixture
def verdict(capsys):
    """Print one line per criterion, outside pytest's capture, then assert."""

    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nacceptance {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def _walk(node):
    if isinstance(node, dict):
        if {"property", "certificate", "result"} <= set(node):
            yield node
        for v in node.values():
            yield from _walk(v)
    elif isinstance(node, list):
        for v in node:
            yield from _walk(v)


# -- 1 ---------------------------------------------------------------------------


def test_criterion_1_fermionic_counterexample(verdict):
    start = time.perf_counter()
    prog = load_file(FIXTURES / "fermi_parity.opt")
    dist = evaluate(prog.circuits["main"], prog.theory)
    fair = dist.probs == {("e",): HALF, ("o",): HALF}

    th = get_theory("fermionic3")
    F1, N, F3 = th.system(1), th.system(2), th.system(3)
    cg = tsum(th.parity_projectors(2).events)
    I = th.identity(N)
    d = th.dim(N)
    generators = [la.unit_vector(d, k) for k in range(d)]
    local_equal = all(th.apply_at(cg, v, TRIVIAL, TRIVIAL) == v for v in generators)
    unequal = not transf_equal(th, cg, I) and distinguishing_witness(th, cg, I) is not None

    psi = th.psi3()
    after = th.apply_at(cg, psi, TRIVIAL, F1)
    witnessed = after != th.apply_at(I, psi, TRIVIAL, F1)
    re, im = th.mat(after, F3)
    expected = la.zeros(8, 8)
    expected[0][0] = expected[3][3] = HALF
    decohered = re == expected and im == la.zeros(8, 8)
    elapsed = time.perf_counter() - start

    ok = fair and local_equal and unequal and witnessed and decohered and elapsed < 1.0
    verdict(1, ok, f"p=(1/2,1/2) {fair}, identity on {d} local generators {local_equal}, "
                   f"not equal {unequal}, psi3 witness {witnessed}, decohered exactly {decohered}, "
                   f"{elapsed:.2f}s < 1s")


# -- 2 ---------------------------------------------------------------------------


def _distinct_systems():
    """Every built theory/system, without the Fermionic duplicates (20 in all)."""
    skip = {("fermionic3", "F"), ("fermionic3", "F*F"), ("fermionic1", "F")}
    out = []
    for name in sorted(BUILTINS):
        th = get_theory(name)
        for A in th.registered_systems():
            if (name, fmt_system(A)) not in skip:
                out.append((th, A))
    return out


def test_criterion_2_tri_consistency(verdict):
    start = time.perf_counter()
    pairs = _distinct_systems()
    disagreements = []
    for th, A in pairs:
        try:
            v = ck.tri_consistency(th, A)
        except Exception as exc:  # any exception counts against the criterion
            disagreements.append(f"{th.name}/{fmt_system(A)}: {exc!r}")
            continue
        atomic = bool(ck.check_identity_atomic(th, A).result)
        enum = bool(ck.enumeration_niwd(th, A).result)
        rev = bool(ck.check_reversible_conditions(th, A).result)
        if not (atomic == enum == rev == bool(v.result)):
            disagreements.append(f"{th.name}/{fmt_system(A)}")
    elapsed = time.perf_counter() - start
    ok = len(pairs) == 20 and not disagreements and elapsed < 60
    verdict(2, ok, f"{len(pairs)} systems, {len(disagreements)} disagreements/exceptions "
                   f"{disagreements[:3]}, {elapsed:.1f}s < 60s")


# -- 3 ---------------------------------------------------------------------------


REFINABLE = [("classical2", 1), ("classical3", 1), ("classical2", 2), ("fermionic1", 1)]
SINGLETON = [("quantum2", 1), ("quantum3", 1), ("realquantum2", 1), ("prbox-max", 1)]


def _refinement_holds(th, A):
    v = ck.atomic_refinement_of_identity(th, A)
    events = v.result
    I = th.identity(A)
    total = tsum(events) == I or transf_equal(th, tsum(events), I)
    orth = all(
        (th.seq(a, b).data == a.data) if i == j else th.seq(a, b).is_zero()
        for i, a in enumerate(events) for j, b in enumerate(events)
    )
    c = v.certificate
    blocks = ck.block_decomposition(th, A).certificate
    dims_ok = blocks["sum_dims"] == blocks["total_dim"] == th.dim(A) and blocks["direct_sum"]
    return events, total and orth and c["unique"] and c["atomic"] and dims_ok


def test_criterion_3_structure_of_the_identity(verdict):
    details, ok = [], True
    for name, n in REFINABLE:
        th = get_theory(name)
        events, good = _refinement_holds(th, th.system(n))
        details.append(f"{name}/{fmt_system(th.system(n))}:{len(events)}")
        ok = ok and good
    th = get_theory("classical2")
    C = th.system(1)
    pair = ck.block_decomposition(th, C, C).certificate
    ok = ok and pair["sum_dims"] == pair["total_dim"] == 4 and pair["annihilation"]
    for name, n in SINGLETON:
        th = get_theory(name)
        A = th.system(n)
        events, good = _refinement_holds(th, A)
        ok = ok and good and events == [th.identity(A)]
        details.append(f"{name}:{{I}}")
    verdict(3, ok, "refinements " + ", ".join(details) + "; sum, orthogonality, uniqueness, block dimensions exact")


# -- 4 ---------------------------------------------------------------------------


EXPECTED_TABLE = {
    "QT": {"niwd": True, "local_discriminability": 1, "purification": True},
    "CT": {"niwd": False, "local_discriminability": 1, "purification": False, "all_systems_classical": True},
    "DCT": {"niwd": False, "purification": True},
    "RQT": {"niwd": True, "local_discriminability": 2, "states_purification": True},
    "FQT": {"niwd": True, "local_discriminability": 2, "states_purification": True},
    "PR": {"niwd": True, "local_discriminability": 1, "purification": False},
    "PR-Min": {"niwd": True, "purification": False},
}


@pytest.fixture(scope="module")
def classification():
    start = time.perf_counter()
    rows = {}
    for label, name in CLASSIFICATION:
        rows[label] = classification_row(label, get_theory(name))
    return rows, time.perf_counter() - start


def _backing(row, verdicts, th):
    """Every cell has a verdict, and every typed certificate replays."""
    doc = jsonable(verdicts)
    found = list(_walk(doc))
    props = {v["property"] for v in found}
    needed = {"niwd", "classical"} | ({"local-discriminability"} if row.local_discriminability is not None else set())
    replays = [replay_certificate(th, v) for v in found]
    typed = [r for r in replays if r is not None]
    return needed <= props and all(typed), len(typed)


def test_criterion_4_classification_table(verdict, classification):
    rows, elapsed = classification
    mismatches, replayed, unbacked = [], 0, []
    for label, name in CLASSIFICATION:
        row, verdicts = rows[label]
        got = row.to_json()
        for key, want in EXPECTED_TABLE[label].items():
            if got[key] != want:
                mismatches.append(f"{label}.{key}={got[key]} (want {want})")
        backed, n = _backing(row, verdicts, get_theory(name))
        replayed += n
        if not backed:
            unbacked.append(label)
    # rerunning one row reproduces it bit for bit
    again = classification_row("CT", get_theory("classical2"))
    same = json.dumps(jsonable(again[1]), sort_keys=True) == json.dumps(jsonable(rows["CT"][1]), sort_keys=True)
    ok = not mismatches and not unbacked and same and elapsed < 300
    verdict(4, ok, f"{len(rows)} rows, mismatches {mismatches}, {replayed} certificates replayed, "
                   f"unbacked {unbacked}, rerun identical {same}, {elapsed:.1f}s < 300s")


# -- 5 ---------------------------------------------------------------------------


def test_criterion_5_dimension_witnesses(verdict):
    parts = []
    ok = True
    for name, product in (("realquantum2", 9), ("fermionic2", 4)):
        th = get_theory(name)
        A = th.system(1)
        span = th.dim(compose(A, A))
        v = ck.check_local_discriminability(th, A, A)
        good = span > product == th.dim(A) ** 2 and v.result == 2 and v.certificate["dim_AB"] == span
        good = good and v.certificate["product_rank"] == product
        ok = ok and good
        parts.append(f"{name}: span {span} > {product}, degree {v.result}")
    verdict(5, ok, "; ".join(parts))


# -- 6 ---------------------------------------------------------------------------


def test_criterion_6_purification_implies_niwd(verdict, classification):
    rows, _ = classification
    counterexamples, antecedent = [], []
    done = {name for _, name in CLASSIFICATION}
    metas = {name: rows[label][1]["purification_implies_niwd"] for label, name in CLASSIFICATION}
    for name in sorted(BUILTINS):
        if name in done:
            continue
        try:
            metas[name] = ck.purification_implies_niwd_crosscheck(get_theory(name))
        except Exception as exc:
            counterexamples.append(f"{name}: {exc!r}")
    for name, v in sorted(metas.items()):
        if not v.result:
            counterexamples.append(name)
        if not v.certificate["vacuous"]:
            antecedent.append(name)
    ok = not counterexamples and len(metas) == len(BUILTINS) and antecedent
    verdict(6, ok, f"{len(metas)} theories, {len(antecedent)} convex with purification "
                   f"({', '.join(antecedent)}), counterexamples {counterexamples}")


# -- 7 ---------------------------------------------------------------------------


ROUTE_THEORIES = ["classical2", "detclassical2", "quantum2", "realquantum2", "fermionic2", "prbox-max"]


def _route_checks(rng):
    """NIWD upon a pair, decided by face atomicity and by test enumeration, on many pairs."""
    count = 0
    for name in ROUTE_THEORIES:
        th = get_theory(name)
        A = th.system(1)
        pairs = [rs.RestrictionPair.full(th, A)]
        states = th.sample_states(A, rng, 4)
        for k in range(1, len(states) + 1):
            pairs.append(rs.RestrictionPair.build(th, A, [(TRIVIAL, s) for s in states[:k]], None))
        for pair in pairs:
            v = rs.niwd_upon(th, A, pair)
            if v.result != v.crosschecks["enumeration"]:
                return count, f"{name}: {pair.describe()}"
            count += 1
    th = get_theory("quantum2")
    Q = th.system(1)
    xs, ys = qubit_pools(th)
    for _ in range(10):
        X = rng.sample(xs, rng.randint(1, len(xs)))
        Y = rng.sample(ys, rng.randint(1, len(ys)))
        v = rs.niwd_upon(th, Q, rs.RestrictionPair.build(th, Q, X, Y))
        if v.result != v.crosschecks["enumeration"]:
            return count, "quantum2 random pair"
        count += 1
    return count, None


def test_criterion_7_restricted_suite(verdict):
    theories = COLLAPSE_THEORIES + ["prbox-min"]
    collapsed = {}
    for name in theories:
        n, _tests = collapse_instances(get_theory(name), 50, seed=7)
        collapsed[name] = n
    collapse_ok = all(n == 50 for n in collapsed.values())

    steps, equal_seen = monotonicity_walk(get_theory("quantum2"), 200, seed=0)
    walk_ok = steps == 200 and 0 < equal_seen < steps

    routes, disagreement = _route_checks(random.Random(17))

    sc = rs.fermionic_local_scenario()
    th = get_theory("fermionic3")
    upon = rs.niwd_upon(th, th.system(2), sc["local_pair"], extra_tests=[sc["test"]])
    scenario_ok = (
        sc["nondisturbing_local"] is True
        and sc["noinfo_local"].result is False
        and sc["nondisturbing_with_dilation"] is False
        and upon.result is False
        and upon.crosschecks["enumeration"] is False
    )
    ok = collapse_ok and walk_ok and disagreement is None and scenario_ok
    verdict(7, ok, f"collapse {sum(collapsed.values())} instances over {len(theories)} theories, "
                   f"200-step walk ({equal_seen} equal, monotone), {routes} route checks "
                   f"(disagreement {disagreement}), local parity scenario {scenario_ok}")


# -- 8 ---------------------------------------------------------------------------


FACTOR_THEORIES = ["classical2", "classical3", "detclassical2", "quantum2", "realquantum2", "fermionic2",
                   "prbox-max", "prbox-min"]


def test_criterion_8_factorization(verdict):
    proportional_ok, informative_ok, bad = 0, 0, []
    for name in FACTOR_THEORIES:
        th = get_theory(name)
        A = th.system(1)
        I = th.identity(A)
        tests = list(th.test_catalog(A))
        if th.convex:
            for weights in ((1, 1), (1, 2), (1, 1, 2), (3, 1, 1, 1)):
                total = sum(weights)
                tests.append(TestSpec.of([I.scale(q(w, total)) for w in weights],
                                         [str(k) for k in range(len(weights))], f"coin{weights}"))
        for t in tests:
            v = ck.weak_strong_factorization_check(th, t)
            if v.crosschecks["identity_proportional"]:
                if v.result is True and v.certificate["circuits"] > 0:
                    proportional_ok += 1
                else:
                    bad.append(f"{name}:{t.name} proportional but not factorized")
            elif not ck.check_no_information(th, t).result:
                if v.result is False:
                    informative_ok += 1
                else:
                    bad.append(f"{name}:{t.name} informative but factorized")
    ok = not bad and proportional_ok > 0 and informative_ok > 0
    verdict(8, ok, f"{proportional_ok} identity-proportional tests factorize exactly, "
                   f"{informative_ok} informative tests violate it, failures {bad[:3]}")


# -- 9 ---------------------------------------------------------------------------


def _random_cone(rng):
    d = rng.randint(2, 5)
    n = rng.randint(d, d + 4)
    gens = []
    while len(gens) < n:
        g = (q(rng.randint(1, 3)),) + tuple(q(rng.randint(-2, 2)) for _ in range(d - 1))
        if g not in gens:
            gens.append(g)
    return ConeV(d, gens)


def _random_point(rng, K):
    idx = rng.sample(range(len(K.generators)), rng.randint(1, len(K.generators)))
    x = tuple(ZERO for _ in range(K.ambient_dim))
    for i in idx:
        x = la.vadd(x, la.vscale(q(rng.randint(1, 4)), K.generators[i]))
    return x


def test_criterion_9_geometry_kernel(verdict):
    start = time.perf_counter()
    rng = random.Random(9)
    face_bad, member_bad, probes = 0, 0, 0
    for _ in range(500):
        K = _random_cone(rng)
        x = _random_point(rng, K)
        support = face_support_bruteforce(K.generators, x)
        for method in ("lp", "aggregate"):
            f = minimal_face(K, x, method=method)
            if f.support != support or f.dim != subset_rank(K.generators, support):
                face_bad += 1
        H = dd_convert(K)
        V = dd_convert(H)
        for p in [x] + [tuple(q(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(K.ambient_dim))
                        for _ in range(6)]:
            probes += 1
            if not (cone_member(K, p) == H.contains(p) == cone_member(V, p)):
                member_bad += 1
    elapsed = time.perf_counter() - start
    ok = face_bad == 0 and member_bad == 0 and elapsed < 120
    verdict(9, ok, f"500 cones, {face_bad} face mismatches, {member_bad}/{probes} membership mismatches "
                   f"after round trip, {elapsed:.1f}s < 120s")
