"""Randomized restriction scenarios shared by the restricted-I/O and acceptance tests."""

import random

from optlab import linalg as la
from optlab.core import transf_equal, tsum
from optlab.restricted import (
    RestrictionPair,
    atomic_upon,
    equal_upon,
    noinfo_upon,
    nondisturbing_upon,
)
from optlab import checkers as ck
from optlab.core import TestSpec
from optlab.rational import q
from optlab.systems import TRIVIAL, compose

COLLAPSE_THEORIES = ["classical2", "detclassical2", "quantum2", "realquantum2", "fermionic2", "prbox-max"]


def qubit_pools(th):
    """Candidate inputs and outputs for a qubit, local and dilated on a second qubit."""
    Q = th.system(1)

    def ket(*amp, system=Q):
        v = th.ket_state((tuple(q(a) for a in amp), (q(0),) * len(amp)), system)
        return th.normalise(v, system)

    k0, k1, plus = ket(1, 0), ket(0, 1), ket(1, 1)
    mixed = th.normalise(th.unit_effect(Q), Q)
    QQ = compose(Q, Q)
    bell = ket(1, 0, 0, 1, system=QQ)
    xs = [(TRIVIAL, k0), (TRIVIAL, k1), (TRIVIAL, mixed), (TRIVIAL, plus),
          (Q, th.product_state(k0, Q, k1, Q)), (Q, th.product_state(k1, Q, plus, Q)), (Q, bell)]
    ys = [(TRIVIAL, k0), (TRIVIAL, k1), (TRIVIAL, plus), (TRIVIAL, th.unit_effect(Q)),
          (Q, th.product_effect(k0, Q, k0, Q)), (Q, bell), (Q, th.unit_effect(QQ))]
    return xs, ys


def decoherence_pair(th):
    """Identity and the coarse-grained computational test: equal only on some restrictions."""
    Q = th.system(1)
    comp = next(t for t in th.test_catalog(Q) if t.name == "computational")
    return th.identity(Q), tsum(comp.events)


def monotonicity_walk(th, steps, seed=0):
    """Shrink/grow walk over restriction pairs; returns (checked, equal_count)."""
    rng = random.Random(seed)
    Q = th.system(1)
    xs_pool, ys_pool = qubit_pools(th)
    T1, T2 = decoherence_pair(th)
    X = set(rng.sample(range(len(xs_pool)), 3))
    Y = set(rng.sample(range(len(ys_pool)), 3))
    cache = {}

    def equal(Xi, Yi):
        key = (frozenset(Xi), frozenset(Yi))
        if key not in cache:
            pair = RestrictionPair.build(th, Q, [xs_pool[i] for i in sorted(Xi)], [ys_pool[i] for i in sorted(Yi)])
            cache[key] = equal_upon(th, T1, T2, pair)
        return cache[key]

    equal_seen = 0
    for _ in range(steps):
        side = rng.choice("XY")
        cur, pool = (X, xs_pool) if side == "X" else (Y, ys_pool)
        grow = len(cur) <= 1 or (len(cur) < len(pool) and rng.random() < 0.5)
        nxt = set(cur)
        if grow:
            nxt.add(rng.choice([i for i in range(len(pool)) if i not in cur]))
        else:
            nxt.discard(rng.choice(sorted(cur)))
        newX, newY = (nxt, Y) if side == "X" else (X, nxt)
        small, big = ((X, Y), (newX, newY)) if grow else ((newX, newY), (X, Y))
        if equal(*big):
            assert equal(*small), "equality upon a larger pair must survive shrinking"
        equal_seen += equal(newX, newY)
        X, Y = newX, newY
    return steps, equal_seen


def collapse_instances(th, count, seed=0):
    """Restricted checks with X and Y unrestricted against their unrestricted versions."""
    rng = random.Random(seed)
    A = th.system(1)
    full = RestrictionPair.full(th, A)
    maps = th.sample_transformations(A, A, rng, max(4, count // 4))
    maps += [E for t in th.test_catalog(A) for E in t.events] + [th.identity(A)]
    done = 0
    while done < count:
        T1, T2 = rng.choice(maps), rng.choice(maps)
        if rng.random() < 0.3:
            T2 = T1
        assert equal_upon(th, T1, T2, full) == transf_equal(th, T1, T2)
        assert atomic_upon(th, T1, full) == th.is_atomic(T1)
        done += 1
    tests = list(th.test_catalog(A))
    I = th.identity(A)
    for k in range(2, 5):
        tests.append(TestSpec.of([I.scale(q(1, k))] * k, [str(i) for i in range(k)], f"coin{k}"))
    for t in tests:
        assert nondisturbing_upon(th, t, full) == bool(ck.check_non_disturbing(th, t).result)
        assert bool(noinfo_upon(th, t, full).result) == bool(ck.check_no_information(th, t).result)
    return done, len(tests)
