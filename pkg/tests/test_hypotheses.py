import itertools
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from sympy.algebras.quaternion import Quaternion

from fedbrst import hypotheses as hyp
from fedbrst.hypotheses import T, TPoly, tgcd

seeds = st.integers(0, 10**6)
coeffs = st.lists(st.fractions(-5, 5, max_denominator=4), min_size=0, max_size=5)
t = sp.Symbol("t")


def _sym(p: TPoly):
    return sum((sp.Rational(c.numerator, c.denominator) * t**k for k, c in enumerate(p.c)), sp.Integer(0))


def _rat(x):
    x = Fraction(x)
    return sp.Rational(x.numerator, x.denominator)


@given(coeffs, coeffs)
def test_tpoly_ring_ops(a, b):
    A, B = TPoly(a), TPoly(b)
    assert sp.expand(_sym(A * B) - _sym(A) * _sym(B)) == 0
    assert sp.expand(_sym(A + B) - _sym(A) - _sym(B)) == 0
    if not B.is_zero():
        q, r = A.divmod(B)
        assert (q * B + r) == A
        assert r.is_zero() or r.deg < B.deg


@given(coeffs, coeffs, coeffs)
def test_tgcd_matches_sympy(a, b, c):
    A, B, C = TPoly(a) * TPoly(c), TPoly(b) * TPoly(c), TPoly(c)
    g = tgcd(A, B)
    want = sp.gcd(_sym(A), _sym(B))
    if want == 0:
        assert g.is_zero()
    else:
        assert sp.expand(_sym(g.monic()) - sp.Poly(want, t).monic().as_expr()) == 0


def test_tpoly_monomial_and_eval():
    p = T * T * 3
    assert p.is_monomial() and p.deg == 2 and p(Fraction(1, 2)) == Fraction(3, 4)
    assert not (T + 1).is_monomial()


def _unit(rng):
    return hyp.random_unit_quaternion(rng)


def test_ad_matrix_is_quaternion_rotation():
    rng = random.Random(0)
    for _ in range(10):
        q = _unit(rng)
        Q = Quaternion(*map(_rat, q))
        R = sp.Matrix(hyp.ad_matrix(q))
        for k in range(3):
            v = [0, 0, 0]
            v[k] = 1
            rot = Q * Quaternion(0, *v) * Q.inverse()
            assert list(R[:, k]) == [rot.b, rot.c, rot.d]
        assert R.T * R == sp.eye(3) and R.det() == 1


@pytest.mark.parametrize(
    "a,cls",
    [
        ([(1, 0, 0, 0)], "G"),
        ([(-1, 0, 0, 0), (1, 0, 0, 0)], "G"),
        ([(Fraction(3, 5), Fraction(4, 5), 0, 0)], "T"),
        ([(Fraction(3, 5), Fraction(4, 5), 0, 0), (-1, 0, 0, 0)], "T"),
        ([(Fraction(3, 5), Fraction(4, 5), 0, 0), (Fraction(3, 5), 0, Fraction(4, 5), 0)], "Z"),
    ],
)
def test_stabilizer_classes(a, cls):
    a = [tuple(map(Fraction, q)) for q in a]
    assert hyp.stabilizer_class(a) == cls


def test_slice_moment_T_along_axis():
    q = (Fraction(3, 5), Fraction(4, 5), Fraction(0), Fraction(0))
    S = hyp.SliceModel((q, q))
    rng = random.Random(1)
    X, Y = S.random_V(rng), S.random_V(rng)
    m = S.moment(X, Y)
    assert m[1] == m[2] == 0
    assert m[0] == sum(hyp.cross(x, y)[0] for x, y in zip(X, Y))


def test_slice_rejects_points_outside_V():
    q = (Fraction(3, 5), Fraction(4, 5), Fraction(0), Fraction(0))
    with pytest.raises(hyp.SliceError):
        hyp.slice_moment([q], [(0, 1, 0)], [(0, 0, 0)])


def test_moment_jacobian_matches_sympy():
    N = 2
    xs = sp.symbols(f"x0:{3 * N}")
    ys = sp.symbols(f"y0:{3 * N}")
    X = [sp.Matrix(xs[3 * i : 3 * i + 3]) for i in range(N)]
    Y = [sp.Matrix(ys[3 * i : 3 * i + 3]) for i in range(N)]
    J = sum((x.cross(y) for x, y in zip(X, Y)), sp.zeros(3, 1))
    order = [v for i in range(N) for v in (*xs[3 * i : 3 * i + 3], *ys[3 * i : 3 * i + 3])]
    jac = J.jacobian(order)
    rng = random.Random(2)
    vals = {v: _rat(Fraction(rng.randint(-4, 4), rng.randint(1, 3))) for v in order}
    Xn = [tuple(Fraction(str(vals[v])) for v in xs[3 * i : 3 * i + 3]) for i in range(N)]
    Yn = [tuple(Fraction(str(vals[v])) for v in ys[3 * i : 3 * i + 3]) for i in range(N)]
    got = sp.Matrix([[_rat(x) for x in row] for row in hyp.moment_jacobian(Xn, Yn)])
    assert got == jac.subs(vals)


def test_jprime_is_derivative_of_moment():
    # d/ds J(a exp(sX), A + sY) at s = 0, with Ad(exp(sX)) = exp(s·(X×))
    rng = random.Random(3)
    s = sp.Symbol("s")
    for N in (1, 2):
        a = [_unit(rng) for _ in range(N)]
        A = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(3)) for _ in range(N)]
        M = sp.Matrix(hyp.jprime_matrix(a, A))
        for col in range(6 * N):
            i, rest = divmod(col, 6)
            Xv = [0] * 3
            Yv = [0] * 3
            (Xv if rest < 3 else Yv)[rest % 3] = 1
            total = sp.zeros(3, 1)
            for j in range(N):
                R = sp.Matrix(hyp.ad_matrix(a[j]))
                Aj = sp.Matrix([_rat(x) for x in A[j]])
                if j == i:
                    x = sp.Matrix(Xv)
                    W = sp.Matrix([[0, -x[2], x[1]], [x[2], 0, -x[0]], [-x[1], x[0], 0]])
                    Aj_s = Aj + s * sp.Matrix(Yv)
                    total += R * (sp.eye(3) + s * W) * Aj_s - Aj_s
                else:
                    total += R * Aj - Aj
            assert sp.diff(total, s).subs(s, 0) == M[:, col]


def test_minors_gcd_matches_sympy():
    rows = [[T, 0, 1, T * T], [0, T, T, 1], [1, 1, 0, T]]
    M = sp.Matrix([[_sym(TPoly.lift(x)) for x in r] for r in rows])
    g = 0
    for cols in itertools.combinations(range(4), 3):
        g = sp.gcd(g, M[:, list(cols)].det())
    got = hyp.minors_gcd(rows)
    assert sp.expand(_sym(got) - sp.Poly(g, t).monic().as_expr()) == 0


def test_rank_off_zero_detects_common_root():
    rows = [[T - 1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert not hyp.rank_generic_off_zero(rows)
    rows = [[T, 0, 0], [0, 1, 0], [0, 0, T * T]]
    assert hyp.rank_generic_off_zero(rows)


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("branch", ["xi1_ups2", "xi1_only", "ups2_only", "neither"])
def test_erz_curves(N, branch):
    rng = random.Random(4)
    for _ in range(3):
        X, Y, av, bv = hyp.sample_parallel(rng, N, branch)
        info = hyp.check_erz_curve(X, Y, av, bv)
        assert info["ok"] and info["branch"] == branch


def test_erz_needs_two_copies():
    with pytest.raises(hyp.WitnessError):
        hyp.erz_curve_G([(1, 0, 0)], [(2, 0, 0)], (1, 0, 0), (0, 1, 0))


@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("branch", hyp.AZY_BRANCHES)
def test_azy_paths(N, branch):
    rng = random.Random(5)
    for _ in range(3):
        a, A = hyp.sample_azy(rng, N, branch)
        info = hyp.check_azy_path(a, A)
        assert info["ok"], info


def test_azy_single_copy_has_no_path():
    q = (Fraction(3, 5), Fraction(4, 5), Fraction(0), Fraction(0))
    with pytest.raises(hyp.WitnessError):
        hyp.azy_path([q], [(Fraction(1), Fraction(0), Fraction(0))])


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("mode", ["random", "alpha_minus", "origin"])
def test_T_witnesses(N, mode):
    rng = random.Random(6)
    for _ in range(3):
        a, X, Y = hyp.sample_T_point(rng, N, mode)
        info = hyp.witness_curves_T(a, X, Y)
        assert info["ok"]
        if N == 1:
            assert info["branch"] == "vanishes"


def test_lemmas():
    rng = random.Random(7)
    for _ in range(10):
        a1, a2 = hyp.random_torus_quaternion(rng), hyp.random_torus_quaternion(rng)
        B1 = tuple(Fraction(rng.randint(-3, 3)) for _ in range(3))
        assert hyp.lemma_azy2(a1, a2, B1)["ok"]
        a = [_unit(rng) for _ in range(2)]
        A = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(3)) for _ in range(2)]
        assert hyp.lemma_azy1(a, A)["ok"]


def test_lemma2_rejects_central():
    with pytest.raises(ValueError):
        hyp.lemma_azy2((1, 0, 0, 0), (Fraction(3, 5), Fraction(4, 5), 0, 0), (0, 1, 0))


@pytest.mark.parametrize("case", hyp.CASES)
def test_density_suite_n2(case):
    res = hyp.jacobian_rank_density(case, 20, 7, 2)
    assert not res["failures"]
    assert sum(res["branches"].values()) == 20


def test_density_full_fails_for_single_copy():
    res = hyp.jacobian_rank_density("full", 10, 7, 1)
    assert res["failures"]
