import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from fedbrst.phasealg import InexactError, PhasePoly, PhaseRing, StdVectorField, flow_stdvf, random_su2, random_torus
from fedbrst.liealg import mat_det, quaternion_matrix

from conftest import LAM, gauss_to_sympy, random_point, ring_symbols, to_sympy

R1 = PhaseRing(1, 2)
R2 = PhaseRing(2, 2)
seeds = st.integers(0, 10**6)


def _rand(ring, seed, **kw):
    return ring.random_poly(random.Random(seed), **kw)


def _trunc(expr, K):
    p = sp.Poly(expr, LAM)
    return sp.expand(sum(c * LAM ** m for (m,), c in p.terms() if m <= K))


@pytest.mark.parametrize("ring", [R1, R2], ids=["N1", "N2"])
@given(seeds, seeds)
def test_arithmetic_matches_sympy(ring, s1, s2):
    f = _rand(ring, s1) + ring.lam(1) * _rand(ring, s1 + 1, terms=2)
    g = _rand(ring, s2)
    F, G = to_sympy(f), to_sympy(g)
    assert to_sympy(f + g) == sp.expand(F + G)
    assert to_sympy(f * g) == _trunc(sp.expand(F * G), ring.K)
    assert to_sympy(f ** 2) == _trunc(sp.expand(F * F), ring.K)


@given(seeds)
def test_derivative_matches_sympy(s):
    f = _rand(R1, s)
    xs = ring_symbols(R1)
    for v in range(R1.nvars):
        assert to_sympy(f.derive_var(v)) == sp.expand(sp.diff(to_sympy(f), xs[v]))


@given(seeds)
def test_json_roundtrip(s):
    f = _rand(R2, s) * R2.i_unit_poly + R2.lam(2)
    assert PhasePoly.from_json(R2, f.dumps()) == f
    assert PhasePoly.from_json(R2, f.to_json()).dumps() == f.dumps()


@given(seeds)
def test_normalize_is_reduction_mod_det(s):
    f = _rand(R1, s, entry_deg=3)
    g = f.normalize()
    xs = ring_symbols(R1)
    det = xs[0] * xs[3] - xs[1] * xs[2] - 1
    q, r = sp.div(sp.expand(to_sympy(f) - to_sympy(g)), det, *xs)
    assert r == 0
    # normal form has no a12*a21
    assert all(min(e[1], e[2]) == 0 for e, _, _ in g.monomial_list())


def test_normalize_values_at_points():
    rng = random.Random(5)
    for _ in range(10):
        f = R2.random_poly(rng, 3, 2)
        pt = random_point(rng, R2)
        assert f.evaluate(pt) == f.normalize().evaluate(pt)


def test_group_action_is_pullback():
    rng = random.Random(11)
    for _ in range(10):
        f = R2.random_poly(rng, 2, 2)
        g = random_su2(rng)
        pt = random_point(rng, R2)
        assert R2.group_action(g, f).evaluate(pt) == f.evaluate(pt.act(g, R2))


def test_group_action_rejects_nonunimodular():
    g = quaternion_matrix(1, 1, 0, 0)
    with pytest.raises(ValueError):
        R1.group_action(g, R1.one())


@pytest.mark.parametrize("ring", [R1, R2], ids=["N1", "N2"])
def test_moment_polynomial_matches_pointwise_moment(ring):
    rng = random.Random(3)
    for _ in range(5):
        pt = random_point(rng, ring)
        assert tuple(J.evaluate_scalar(pt) for J in ring.moment_components) == pt.moment(ring)


def test_moment_equivariance():
    # J(Ψ_g pt) = Ad*(g) J(pt), checked against the moment polynomial pulled back
    rng = random.Random(4)
    for _ in range(5):
        g = random_su2(rng)
        pt = random_point(rng, R2)
        lhs = pt.act(g, R2).moment(R2)
        rhs = tuple(R2.group_action(g, J).evaluate_scalar(pt) for J in R2.moment_components)
        assert lhs == rhs


def test_moment_vanishes_at_identity():
    from fedbrst.phasealg import PhasePoint

    one = quaternion_matrix(1, 0, 0, 0)
    pt = PhasePoint((one,), (2, -1, 3))
    assert all(not x for x in pt.moment(R1))


@pytest.mark.parametrize("gen", [random_su2, random_torus])
def test_random_group_elements(gen):
    rng = random.Random(0)
    for _ in range(20):
        g = gen(rng)
        assert mat_det(g) == 1
        adj = [[g[c][r].conj() for c in range(2)] for r in range(2)]
        prod = [[sum((adj[r][k] * g[k][c] for k in range(2)), 0 * g[0][0]) for c in range(2)] for r in range(2)]
        assert [[gauss_to_sympy(x) for x in row] for row in prod] == [[1, 0], [0, 1]]


def test_flow_exact_only_at_zero():
    rng = random.Random(1)
    pt = random_point(rng, R1)
    v = StdVectorField(R1.alg.basis(0), R1.alg.covector([1, 0, 0]))
    assert flow_stdvf(v, 0, pt) == pt
    with pytest.raises(InexactError):
        flow_stdvf(v, 1, pt)


def test_flow_numeric_stays_on_group():
    np = pytest.importorskip("numpy")
    rng = random.Random(2)
    pt = random_point(rng, R1)
    v = StdVectorField(R1.alg.basis(1), R1.alg.covector([0, 2, 0]))
    a, alpha = flow_stdvf(v, 0.3, pt, mode="numeric")
    assert np.allclose(a[0].conj().T @ a[0], np.eye(2))
    assert np.isclose(np.linalg.det(a[0]), 1)
    assert np.isclose(alpha[1], float(gauss_to_sympy(pt.alpha[1])) + 0.6)


def test_i_unit_squares_to_minus_one():
    i = R1.i_unit_poly
    assert i * i == -R1.one()


def test_lambda_truncation():
    assert R1.lam(3).is_zero()
    assert (R1.lam(1) * R1.lam(2)).is_zero()
    assert not (R1.lam(1) * R1.lam(1)).is_zero()
