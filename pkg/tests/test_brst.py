import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedbrst.brst import BRST, GhostPoly
from fedbrst.phasealg import PhaseRing
from fedbrst.suites import random_ghost

R1 = PhaseRing(1, 2)
B1 = BRST(R1)
R2 = PhaseRing(2, 1)
B2 = BRST(R2)
seeds = st.integers(0, 10**6)


def _ghost(b, s, **kw):
    return random_ghost(random.Random(s), b, **kw)


def _zero(x):
    return x.normalize().is_zero()


def _words(b):
    d = b.d
    for g in range(d + 1):
        for a in range(d + 1):
            for gs in itertools.combinations(range(d), g):
                for as_ in itertools.combinations(range(d), a):
                    yield gs, as_


def test_right_insertion_sign():
    # j(v) x = (-1)^{n+1} i(v) x on words of length n
    b = BRST(PhaseRing(1, 0))
    for gs, as_ in _words(b):
        x = b.word(gs, as_)
        n = len(gs) + len(as_)
        for kind, l in itertools.product(("E", "eps"), range(3)):
            lhs = b.insert_right(kind, l, x)
            rhs = b.insert_left(kind, l, x).scale((-1) ** (n + 1))
            assert (lhs - rhs).is_zero()


def test_koszul_on_antighost_is_moment():
    for l in range(3):
        assert (B1.koszul_d(B1.word((), (l,))) - B1.scalar(R1.moment_components[l])).is_zero()


def test_ce_on_ghost_is_minus_structure_constants():
    # δ(ε^l)(E_j, E_k) = -C_jk^l
    C = R1.lie.C
    for l in range(3):
        want = GhostPoly.make(R1, {})
        for j, k in itertools.combinations(range(3), 2):
            if C[j][k][l]:
                want = want + B1.word((j, k)).scale(-C[j][k][l])
        assert _zero(B1.ce_delta(B1.word((l,))) - want)


def test_ce_on_functions_is_classical_rep():
    f = R1.random_poly(random.Random(0), 2, 2)
    got = B1.ce_delta(B1.scalar(f))
    want = GhostPoly.make(R1, {})
    for l in range(3):
        want = want + B1.word((l,), (), B1.classical_rep(l, f))
    assert _zero(got - want)


def test_classical_rep_is_representation():
    rng = random.Random(1)
    C = R1.lie.C
    for _ in range(3):
        f = R1.random_poly(rng, 2, 2)
        for j, k in itertools.product(range(3), repeat=2):
            L = B1.classical_rep
            lhs = L(j, L(k, f)) - L(k, L(j, f))
            rhs = sum((L(l, f) * C[j][k][l] for l in range(3) if C[j][k][l]), R1.zero())
            assert (lhs - rhs).normalize().is_zero()


@pytest.mark.parametrize("b", [B1, B2], ids=["N1", "N2"])
@given(seeds)
def test_classical_differentials_square_to_zero(b, s):
    x = _ghost(b, s)
    kd, ce, D = b.koszul_d, b.ce_delta, b.classical_brst_d
    assert _zero(kd(kd(x)))
    assert _zero(ce(ce(x)))
    assert _zero(ce(kd(x)) + kd(ce(x)))
    assert _zero(D(D(x)))


@given(seeds, seeds, seeds)
def test_classical_product_associative_and_graded(s1, s2, s3):
    x, y, z = (_ghost(B1, s) for s in (s1, s2, s3))
    assert _zero(B1.mul(B1.mul(x, y), z) - B1.mul(x, B1.mul(y, z)))
    for dx, xc in x.components().items():
        for dy, yc in y.components().items():
            assert _zero(B1.mul(xc, yc) - B1.mul(yc, xc).scale(-1 if (dx * dy) % 2 else 1))


@given(seeds, seeds, seeds)
def test_quantum_product_associative(s1, s2, s3):
    x, y, z = (_ghost(B1, s, terms=2) for s in (s1, s2, s3))
    q = B1.quantum_product
    assert _zero(q(q(x, y), z) - q(x, q(y, z)))


@given(seeds, seeds)
def test_quantum_product_classical_limit(s1, s2):
    x, y = _ghost(B1, s1), _ghost(B1, s2)
    diff = B1.quantum_product(x, y) - B1.mul(x, y)
    assert all(0 not in c.lam_orders() for _, c in diff.normalize().terms)


def test_charges():
    th = B1.classical_charge()
    assert _zero(B1.brst_poisson(th, th))
    qth = B1.quantum_charge()
    assert _zero(B1.quantum_product(qth, qth))


def test_opposite_exponent_sign_control():
    bad = BRST(R1, exp_sign=-1)
    qth = bad.quantum_charge()
    assert not _zero(bad.quantum_product(qth, qth))


@given(seeds)
def test_classical_d_is_charge_bracket(s):
    x = _ghost(B1, s)
    th = B1.classical_charge()
    assert _zero(B1.classical_brst_d(x) - B1.brst_poisson(th, x))


@given(seeds)
def test_quantum_d_squared(s):
    x = _ghost(B1, s)
    qD = B1.quantum_brst_d
    assert _zero(qD(qD(x)).truncate(R1.K))


def test_quantum_d_is_ad_charge_on_generators():
    gens = [B1.word((l,)) for l in range(3)] + [B1.word((), (l,)) for l in range(3)]
    gens += [B1.scalar(R1.var(v)) for v in range(R1.nvars)]
    for g in gens:
        assert _zero((B1.quantum_brst_d(g) - B1.ad_charge(g)).truncate(R1.K - 1))


def test_modular_form_vanishes():
    assert not any(B1.Delta)
    assert B1.modular_element().is_zero()


def test_quantized_rep_classical_limit():
    rng = random.Random(2)
    r = PhaseRing(1, 3)
    b = BRST(r)
    for _ in range(3):
        f = r.random_poly(rng, 2, 2)
        for l in range(3):
            X = [int(k == l) for k in range(3)]
            assert (b.quantized_rep(X, f).lam_part(0) - b.classical_rep(l, f)).normalize().is_zero()


@given(seeds)
def test_json_roundtrip(s):
    x = _ghost(B2, s)
    assert (GhostPoly.from_json(R2, x.to_json()) - x).is_zero()
    assert GhostPoly.from_json(R2, x.dumps()).dumps() == x.dumps()
