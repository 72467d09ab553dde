import itertools
import json
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from fedbrst import hypotheses as hyp
from fedbrst.liealg import (
    Ad_matrix,
    LieData,
    LieDataError,
    ProductLieData,
    ad_star,
    bch_term,
    bracket,
    kr_index_set,
    quaternion_matrix,
    su2,
    trace_dual,
)
from fedbrst.scalars import GaussQ

from conftest import gauss_to_sympy

SU2 = su2()
ALG = ProductLieData(SU2, 1)


def test_su2_validates():
    SU2.validate()
    assert SU2.modular_form == (0, 0, 0)


@pytest.mark.parametrize(
    "C,msg",
    [
        ([[[0, 1], [0, 0]], [[0, 0], [0, 0]]], "antisymmetry"),
    ],
)
def test_bad_structure_constants(C, msg):
    with pytest.raises(LieDataError, match=msg):
        LieData(2, C, [[1, 0], [0, 1]])


def test_degenerate_pairing_rejected():
    C = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    with pytest.raises(LieDataError, match="degenerate"):
        LieData(3, C, [[1, 0, 0], [0, 0, 0], [0, 0, 1]])


def test_json_roundtrip_and_malformed():
    doc = json.dumps(SU2.to_json())
    assert LieData.from_json(doc).C == SU2.C
    with pytest.raises(LieDataError, match="malformed"):
        LieData.from_json({"dim": 3})


def test_ad_star_pairing_sign():
    # <ad*(E_1) ε^2, E_3> = -C_13^2
    xi = ad_star(ALG.basis(0), ALG.dual_basis(1))
    assert xi(ALG.basis(2)) == -GaussQ(SU2.C[0][2][1])


def test_ad_star_is_minus_transpose():
    for i, j, k in itertools.product(range(3), repeat=3):
        lhs = ad_star(ALG.basis(i), ALG.dual_basis(j))(ALG.basis(k))
        assert lhs == -ALG.dual_basis(j)(bracket(ALG.basis(i), ALG.basis(k)))


def test_rep_matrices_satisfy_brackets():
    E = SU2.rep
    mul = lambda a, b: [[sum((a[r][k] * b[k][c] for k in range(2)), GaussQ(0)) for c in range(2)] for r in range(2)]
    for i, j in itertools.product(range(3), repeat=2):
        comm = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(mul(E[i], E[j]), mul(E[j], E[i]))]
        rhs = [[sum((E[k][r][c] * SU2.C[i][j][k] for k in range(3)), GaussQ(0)) for c in range(2)] for r in range(2)]
        assert comm == rhs


def test_ad_matrix_rational_orthogonal():
    a = quaternion_matrix(Fraction(3, 5), Fraction(4, 5), 0, 0)
    M = Ad_matrix(SU2, a)
    for i, j in itertools.product(range(3), repeat=2):
        assert sum((M[k][i] * M[k][j] for k in range(3)), GaussQ(0)) == GaussQ(int(i == j))


quats = st.tuples(*[st.fractions(-3, 3, max_denominator=4)] * 3)


def _unit(u):
    s = sum(x * x for x in u)
    return ((s - 1) / (s + 1),) + tuple(2 * x / (s + 1) for x in u)


@given(quats)
def test_ad_matrix_matches_quaternion_rotation(u):
    # E_k = -(i/2)σ_k sends the quaternion q to the matrix of its conjugate, so Ad(q) = R(q)^T
    q = _unit(u)
    M = sp.Matrix([[gauss_to_sympy(x) for x in row] for row in Ad_matrix(SU2, quaternion_matrix(*q))])
    assert M == sp.Matrix(hyp.ad_matrix(q)).T


# --- BCH ---


def _brute_kr(r):
    out = set()
    for kappa in range(r):
        for flat in itertools.product(range(r), repeat=2 * kappa):
            k1, k2 = flat[:kappa], flat[kappa:]
            if any(a + b == 0 for a, b in zip(k1, k2)):
                continue
            k = r - 1 - sum(flat)
            if k >= 0:
                out.add((k1, k2, k))
    return out


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_kr_index_set_matches_brute_force(r):
    s = kr_index_set(r)
    assert len(s) == len(set(s))
    assert set(s) == _brute_kr(r)


def test_kr_index_set_r2_exact():
    assert sorted(kr_index_set(2)) == sorted([((1,), (0,), 0), ((0,), (1,), 0), ((), (), 1)])


def test_bch_2_and_3():
    X, Y = ALG.basis(0), ALG.basis(1)
    assert bch_term(2, X, Y) == bracket(X, Y) * GaussQ(Fraction(1, 2))
    want = bracket(X, bracket(X, Y)) * GaussQ(Fraction(1, 12)) + bracket(Y, bracket(Y, X)) * GaussQ(Fraction(1, 12))
    assert bch_term(3, X, Y) == want


def _mat(v):
    return sp.Matrix(2, 2, lambda r, c: sum(gauss_to_sympy(v.coeffs[k] * SU2.rep[k][r][c]) for k in range(3)))


def _log_exp_series(X, Y, order):
    """Coefficients of s^r in log(exp(sX) exp(sY)), by truncated matrix series."""
    s = sp.Symbol("s")

    def trunc(M):
        return M.applyfunc(lambda e: sp.series(sp.expand(e), s, 0, order + 1).removeO())

    def expm(A):
        out, term = sp.eye(2), sp.eye(2)
        for k in range(1, order + 1):
            term = trunc(term * A * s / k)
            out += term
        return out

    M = trunc(expm(X) * expm(Y)) - sp.eye(2)
    log, power = sp.zeros(2), sp.eye(2)
    for k in range(1, order + 1):
        power = trunc(power * M)
        log += power * sp.Rational((-1) ** (k + 1), k)
    log = trunc(log)
    return [log.applyfunc(lambda e: sp.expand(e).coeff(s, r)) for r in range(order + 1)]


vecs = st.tuples(*[st.integers(-2, 2)] * 3)


@given(vecs, vecs)
def test_bch_terms_against_log_oracle(x, y):
    X, Y = ALG.vector(list(x)), ALG.vector(list(y))
    coeffs = _log_exp_series(_mat(X), _mat(Y), 4)
    assert coeffs[1] == _mat(X) + _mat(Y)
    for r in (2, 3, 4):
        assert sp.simplify(coeffs[r] - _mat(bch_term(r, X, Y))) == sp.zeros(2)


def test_trace_dual_recovers_coordinates():
    td = trace_dual(SU2)
    for k in range(3):
        assert td.coords(SU2.rep[k]) == [GaussQ(int(j == k)) for j in range(3)]
