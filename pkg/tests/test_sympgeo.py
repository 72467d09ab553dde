import itertools
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from fedbrst.liealg import ad_star, bracket
from fedbrst.phasealg import PhaseRing, StdVectorField, random_su2
from fedbrst.scalars import GaussQ
from fedbrst.sympgeo import (
    Field,
    bnw_covariant_derivative,
    bnw_fields,
    bnw_invariance_check,
    df_eval,
    fundamental_field,
    hamiltonian_vf,
    horizontal_lift,
    omega_eval,
    omega_matrix,
    poisson,
    standard_frame,
    theta_eval,
    vertical_lift,
)

from conftest import gauss_to_sympy, random_point

R1 = PhaseRing(1, 0)
R2 = PhaseRing(2, 0)
seeds = st.integers(0, 10**6)


def _rand(ring, s, terms=3):
    return ring.random_poly(random.Random(s), 2, 2, terms=terms)


@given(seeds, seeds)
def test_poisson_antisymmetric_and_leibniz(s1, s2):
    f, g, h = _rand(R1, s1), _rand(R1, s2), _rand(R1, s1 + s2)
    assert poisson(f, g) == -poisson(g, f)
    assert poisson(f, g * h) == poisson(f, g) * h + g * poisson(f, h)


@given(seeds)
def test_jacobi(s):
    f, g, h = (_rand(R2, s + k, 2) for k in range(3))
    jac = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
    assert jac.is_zero()


def test_momentum_brackets():
    J = R1.moment_components
    C = R1.lie.C
    for I_, J_ in itertools.product(range(3), repeat=2):
        taut = sum((R1.p(K) * C[I_][J_][K] for K in range(3)), R1.zero())
        assert poisson(R1.p(I_), R1.p(J_)) == taut


@pytest.mark.parametrize("ring", [R1, R2], ids=["N1", "N2"])
def test_moment_brackets(ring):
    # {J_B, J_C} = -J_[B,C]
    J = ring.moment_components
    for j, k in itertools.product(range(3), repeat=2):
        br = ring.moment_component([ring.lie.C[j][k][l] for l in range(3)])
        assert poisson(J[j], J[k]).normalize() == (-br).normalize()


def test_hamiltonian_field_contracts_to_minus_df():
    rng = random.Random(0)
    for _ in range(5):
        f = R1.random_poly(rng, 2, 2)
        pt = random_point(rng, R1)
        Xf = hamiltonian_vf(f, pt)
        for v in standard_frame(R1.alg):
            assert omega_eval(pt, Xf, v) == -df_eval(f, pt, v)


def test_poisson_is_omega_of_hamiltonian_fields():
    rng = random.Random(1)
    for _ in range(5):
        f, g = R2.random_poly(rng, 2, 2), R2.random_poly(rng, 2, 2)
        pt = random_point(rng, R2)
        assert poisson(f, g).evaluate_scalar(pt) == omega_eval(pt, hamiltonian_vf(f, pt), hamiltonian_vf(g, pt))


def test_moment_map_equation():
    # dJ_B = -ω(B_M, ·)
    rng = random.Random(2)
    for _ in range(3):
        pt = random_point(rng, R2)
        for k in range(3):
            B = [int(j == k) for j in range(3)]
            BM = fundamental_field(R2, B, pt)
            for v in standard_frame(R2.alg):
                assert df_eval(R2.moment_components[k], pt, v) == -omega_eval(pt, BM, v)


def test_omega_nondegenerate_and_antisymmetric():
    rng = random.Random(3)
    pt = random_point(rng, R1)
    M = sp.Matrix([[gauss_to_sympy(x) for x in row] for row in omega_matrix(pt, R1.alg)])
    assert M == -M.T
    assert M.det() != 0


def test_omega_standard_values():
    # ω((X,0),(0,ξ)) = ±ξ(X) pairing and ω of two vertical fields vanishes
    rng = random.Random(4)
    pt = random_point(rng, R1)
    fr = standard_frame(R1.alg)
    for a, b in itertools.product(range(3, 6), repeat=2):
        assert omega_eval(pt, fr[a], fr[b]) == GaussQ(0)
    pair = {omega_eval(pt, fr[a], fr[3 + a]) for a in range(3)}
    assert len(pair) == 1 and pair.pop() in (GaussQ(1), GaussQ(-1))


def test_theta_is_tautological():
    rng = random.Random(5)
    pt = random_point(rng, R1)
    for k, v in enumerate(standard_frame(R1.alg)[:3]):
        assert theta_eval(pt, v) == pt.alpha[k]


# --- BNW connection ---


def _std(ring, rng):
    X = ring.alg.vector([rng.randint(-2, 2) for _ in range(ring.alg.dim)])
    xi = ring.alg.covector([rng.randint(-2, 2) for _ in range(ring.alg.dim)])
    return StdVectorField(X, xi)


def test_torsion_free_on_standard_fields():
    rng = random.Random(6)
    for _ in range(10):
        pt = random_point(rng, R2)
        v, w = _std(R2, rng), _std(R2, rng)
        a = bnw_covariant_derivative(v, w, pt)
        b = bnw_covariant_derivative(w, v, pt)
        assert a.X - b.X == bracket(v.X, w.X)
        assert a.xi - b.xi == R2.alg.covector([0] * 6)


def test_torsion_control_detects_asymmetric_term():
    rng = random.Random(7)
    bad = lambda v, w, al: ad_star(v.X, ad_star(w.X, al)) * (GaussQ(1) / 12)
    hits = 0
    for _ in range(10):
        pt = random_point(rng, R1)
        v, w = _std(R1, rng), _std(R1, rng)
        a = bnw_covariant_derivative(v, w, pt, bad)
        b = bnw_covariant_derivative(w, v, pt, bad)
        hits += a.xi - b.xi != R1.alg.covector([0] * 3)
    assert hits


def test_invariance():
    rng = random.Random(8)
    g = random_su2(rng)
    pts = [random_point(rng, R1) for _ in range(3)]
    assert bnw_invariance_check(g, R1, pts).passed


def _lie(U, V, f):
    return U.apply(V.apply(f)) - V.apply(U.apply(f))


def _coords(ring):
    return [ring.var(v) for v in range(ring.nvars)]


@pytest.mark.parametrize("pair", list(itertools.combinations(range(3), 2)))
def test_symbolic_torsion_free_horizontal_lifts(pair):
    r = PhaseRing(1, 0)
    U, V = (horizontal_lift(r, r.alg.basis(k)) for k in pair)
    T = bnw_fields(r, U, V) - bnw_fields(r, V, U)
    for f in _coords(r):
        assert T.apply(f) == _lie(U, V, f)


def test_symbolic_torsion_free_mixed_lifts():
    r = PhaseRing(1, 0)
    U = horizontal_lift(r, r.alg.basis(0))
    V = vertical_lift(r, r.alg.covector([0, 1, 0])).scale(r.p(2))
    T = bnw_fields(r, U, V) - bnw_fields(r, V, U)
    for f in _coords(r):
        assert T.apply(f) == _lie(U, V, f)
