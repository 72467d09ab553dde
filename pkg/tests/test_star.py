import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedbrst.phasealg import PhaseRing, random_su2
from fedbrst.scalars import GaussQ
from fedbrst.star import MAX_M, bm_closed_form, build_bm, check_invariance, commutator, rho, star
from fedbrst.sympgeo import poisson

R1 = PhaseRing(1, 2)
R1K3 = PhaseRing(1, 3)
R2 = PhaseRing(2, 2)
seeds = st.integers(0, 10**6)
MINUS_I = GaussQ(0, -1)


def _rand(ring, seed, e=2, f=2, terms=3):
    return ring.random_poly(random.Random(seed), e, f, terms=terms)


def test_b1_on_momenta():
    # B_1(p_1, p_2) = ½ [E_1, E_2]~ = ½ p_3
    r = PhaseRing(1, 3)
    assert build_bm(r, 1).apply(r.p(0), r.p(1)) == r.p(2) * Fraction(1, 2)


@pytest.mark.parametrize("m", [0, 1, 2])
@pytest.mark.parametrize("N", [1, 2])
def test_enumerated_bm_equals_closed_form(m, N):
    r = PhaseRing(N, 3)
    assert build_bm(r, m).normalized() == bm_closed_form(r, m).normalized()


def test_b2_sign_control_differs():
    r = PhaseRing(1, 3)
    assert build_bm(r, 2).normalized() != bm_closed_form(r, 2, b2_sign=-1).normalized()


def test_bm_cap():
    with pytest.raises(ValueError, match="resource cap"):
        build_bm(R1, MAX_M + 1)


@given(seeds)
def test_unit(s):
    f = _rand(R1K3, s)
    one = R1K3.one()
    assert star(one, f) == f
    assert star(f, one) == f


@given(seeds, seeds)
def test_classical_limit(s1, s2):
    f, g = _rand(R2, s1), _rand(R2, s2)
    assert star(f, g).lam_part(0) == (f * g).lam_part(0)


@given(seeds, seeds)
def test_first_order_commutator_is_bracket(s1, s2):
    # f ⋆ g - g ⋆ f = -iλ {f, g} + O(λ²)
    f, g = _rand(R1, s1), _rand(R1, s2)
    assert commutator(f, g).lam_part(1) == poisson(f, g) * MINUS_I


@given(seeds, seeds, seeds)
def test_associativity_random(s1, s2, s3):
    f, g, h = (_rand(R1K3, s, 2, 2, 2) for s in (s1, s2, s3))
    assert star(star(f, g), h) == star(f, star(g, h))


@given(seeds, seeds, seeds)
def test_associativity_two_copies(s1, s2, s3):
    f, g, h = (_rand(R2, s, 1, 2, 2) for s in (s1, s2, s3))
    assert star(star(f, g), h) == star(f, star(g, h))


def test_associativity_fails_with_wrong_b2():
    r = PhaseRing(1, 2)
    ops = [build_bm(r, 0), build_bm(r, 1), bm_closed_form(r, 2, b2_sign=-1)]
    gens = [r.p(i) for i in range(3)] + [r.p(i) * r.p(j) for i in range(3) for j in range(i, 3)]
    bad = [
        (f, g, h)
        for f, g, h in itertools.product(gens, repeat=3)
        if star(star(f, g, ops), h, ops) != star(f, star(g, h, ops), ops)
    ]
    assert bad


def test_covariance():
    r = PhaseRing(1, 3)
    J = r.moment_components
    for j, k in itertools.product(range(3), repeat=2):
        br = r.moment_component([r.lie.C[j][k][l] for l in range(3)])
        lhs = commutator(J[j], J[k]).normalize()
        assert lhs == br.times_lam(1).times_i().normalize()


def test_group_invariance():
    rng = random.Random(9)
    for _ in range(3):
        g = random_su2(rng)
        f, h = R2.random_poly(rng, 2, 2), R2.random_poly(rng, 2, 2)
        assert check_invariance(g, f, h).passed


def test_rho_on_momentum_is_derivation():
    # ρ(p_I) ψ = (λ/i) E_I ψ
    r = PhaseRing(1, 3)
    psi = r.a(0, 0, 1) * r.a(0, 1, 0) + r.a(0, 0, 0) ** 2
    for I_ in range(3):
        assert rho(r.p(I_))(psi) == psi.left_invariant_derive(I_).times_lam(1) * MINUS_I


def test_rho_rejects_fiber_argument():
    with pytest.raises(ValueError):
        rho(R1.one())(R1.p(0))


@given(seeds, seeds, seeds)
def test_rho_is_homomorphism(s1, s2, s3):
    r = R1K3
    f, g = _rand(r, s1, 1, 2, 2), _rand(r, s2, 1, 2, 2)
    psi = _rand(r, s3, 2, 0, 2)
    assert rho(star(f, g))(psi) == rho(f)(rho(g)(psi))
