import itertools
import random

import pytest

from fedbrst.brst import BRST
from fedbrst.phasealg import PhaseRing, random_su2
from fedbrst.reduce import (
    NonCocycleError,
    NonInvariantError,
    ReduceConfig,
    Reducer,
    WindowError,
    invariant_generators,
    invariant_products,
)

RING = PhaseRing(1, 2)
RED = Reducer(RING, 6)
TR, P2, PS = invariant_generators(RING)
J = RING.moment_components


@pytest.mark.parametrize("N", [1, 2])
def test_generators_are_group_invariant(N):
    ring = PhaseRing(N, 1)
    rng = random.Random(0)
    for f in invariant_generators(ring):
        for _ in range(3):
            g = random_su2(rng)
            assert ring.group_action(g, f).normalize() == f.normalize()


def test_generators_are_classically_invariant():
    for f in (TR, P2, PS):
        assert RED.invariance_report(f).passed
    assert not RED.invariance_report(RING.a(0, 0, 0)).passed


def test_invariant_products_deduplicated():
    prods = invariant_products(RING, 2)
    keys = [f.dumps() for f in prods]
    assert len(keys) == len(set(keys)) == 10


def test_deformed_rest_of_ext_is_identity():
    rng = random.Random(1)
    for _ in range(5):
        f = RED.rest(RING.random_poly(rng, 2, 2))
        assert RED.deformed_rest(RED.ext(f)) == f


def test_deformed_rest_of_ideal_is_order_lambda():
    rng = random.Random(2)
    for _ in range(5):
        u = RING.random_poly(rng, 1, 1, terms=2)
        x = RED.deformed_rest(J[0] * u)
        assert 0 not in x.lam_orders()


def test_deformed_rest_kills_quantum_koszul_image():
    rng = random.Random(3)
    for _ in range(5):
        q = [RING.random_poly(rng, 1, 1, terms=2) for _ in range(3)]
        assert RED.deformed_rest(RED.qkoszul1(q)).is_zero()


def test_deformed_rest_ghost_input():
    b = BRST(RING)
    assert RED.deformed_rest(b.scalar(TR)) == RED.rest(TR)
    with pytest.raises(ValueError):
        RED.deformed_rest(b.word((0,)))


@pytest.mark.parametrize("pair", list(itertools.combinations_with_replacement(range(3), 2)))
def test_certificates(pair):
    gens = [RING.one(), TR, P2]
    f, g = (gens[i] for i in pair)
    cert = RED.star_certificates(f, g)
    for k in ("classical_limit", "first_order", "cocycle"):
        assert cert[k].passed, (k, cert[k].witness)


def test_representative_independence():
    u = RING.p(1) + RING.a(0, 0, 1)
    assert RED.reduced_star(TR + J[0] * u, P2) == RED.reduced_star(TR, P2)


def test_non_cocycle_refused():
    with pytest.raises(NonCocycleError):
        RED.reduced_star(TR * P2, RING.one())


def test_window_refused():
    red = Reducer(RING, 3)
    with pytest.raises(WindowError):
        red.reduced_star(P2, P2)
    assert red.window()["deg_cap"] == 3


def test_non_invariant_refused():
    with pytest.raises(NonInvariantError):
        RED.reduced_poisson(RING.a(0, 0, 0), TR)


def test_reduced_associativity_small():
    gens = [TR, P2]
    for f, g, h in itertools.product(gens, repeat=3):
        red = Reducer(RING, 8)
        lhs = red.reduced_star(red.reduced_star(f, g, check=False), h, check=False)
        rhs = red.reduced_star(f, red.reduced_star(g, h, check=False), check=False)
        assert lhs == rhs


def test_from_config():
    red = Reducer.from_config(ReduceConfig(N=1, K=2, deg_cap=5))
    assert red.ring == RING and red.cap == 5
