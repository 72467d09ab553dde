"""Exact checks of the slice-model witnesses for G = SU(2) acting on G^N by diagonal conjugation.

su(2) is modelled as R³ with the cross product; a group element is a rational unit quaternion
q = (w, x, y, z) and Ad(q) is the rotation v ↦ q v q̄.  The torus T is {(w, x, 0, 0)}, its Lie
algebra the e_1-axis.  Curves and paths are vectors of TPoly (polynomials in one parameter t
over Q); "for all t" claims are polynomial identities, "for all t ≠ 0" rank claims are decided by
the gcd of all maximal minors being c·t^k.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

__all__ = [
    "TPoly",
    "T",
    "Quat",
    "ad_matrix",
    "random_unit_quaternion",
    "random_torus_quaternion",
    "is_central",
    "kernel_basis",
    "rank",
    "same_span",
    "stabilizer_basis",
    "stabilizer_class",
    "SliceModel",
    "SliceError",
    "slice_moment",
    "witness_curves_T",
    "WitnessError",
    "erz_curve_G",
    "azy_path",
    "minors_gcd",
    "rank_generic_off_zero",
    "lemma_azy1",
    "lemma_azy2",
    "jacobian_rank_density",
    "check_suite",
    "CASES",
]

Quat = tuple  # (w, x, y, z) of Fractions, w²+x²+y²+z² = 1
CASES = ("T", "G", "full", "lemma1", "lemma2")


# --- univariate polynomials in t ---


class TPoly:
    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @staticmethod
    def lift(x) -> "TPoly":
        return x if isinstance(x, TPoly) else TPoly((x,))

    def __add__(self, o):
        o = TPoly.lift(o)
        n = max(len(self.c), len(o.c))
        return TPoly([(self.c[i] if i < len(self.c) else 0) + (o.c[i] if i < len(o.c) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return TPoly([-x for x in self.c])

    def __sub__(self, o):
        return self + (-TPoly.lift(o))

    def __rsub__(self, o):
        return TPoly.lift(o) - self

    def __mul__(self, o):
        o = TPoly.lift(o)
        if not self.c or not o.c:
            return TPoly()
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    out[i + j] += a * b
        return TPoly(out)

    __rmul__ = __mul__

    def __eq__(self, o):
        return self.c == TPoly.lift(o).c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "TPoly(" + ", ".join(str(x) for x in self.c) + ")"

    def is_zero(self) -> bool:
        return not self.c

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def __call__(self, t):
        acc = Fraction(0)
        for x in reversed(self.c):
            acc = acc * t + x
        return acc

    def divmod(self, o: "TPoly"):
        if o.is_zero():
            raise ZeroDivisionError
        r = list(self.c)
        q = [Fraction(0)] * max(len(r) - len(o.c) + 1, 0)
        lc = o.c[-1]
        for k in range(len(r) - len(o.c), -1, -1):
            f = r[k + len(o.c) - 1] / lc
            q[k] = f
            if f:
                for j, b in enumerate(o.c):
                    r[k + j] -= f * b
        return TPoly(q), TPoly(r)

    def monic(self) -> "TPoly":
        return TPoly([x / self.c[-1] for x in self.c]) if self.c else self

    def is_monomial(self) -> bool:
        """Nonzero and of the form c·t^k."""
        return bool(self.c) and sum(1 for x in self.c if x) == 1

    def to_json(self) -> list:
        return [str(x) for x in self.c]


def tgcd(a: TPoly, b: TPoly) -> TPoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


T = TPoly((0, 1))


# --- R³ helpers (entries Fraction or TPoly) ---


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(s, u):
    return tuple(s * a for a in u)


def cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def matvec(M, v):
    return tuple(M[r][0] * v[0] + M[r][1] * v[1] + M[r][2] * v[2] for r in range(3))


def cross_matrix(w):
    """[w]_× with [w]_× v = w × v."""
    return ((0, -w[2], w[1]), (w[2], 0, -w[0]), (-w[1], w[0], 0))


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, TPoly) else x == 0


def vzero(u) -> bool:
    return all(_is_zero(a) for a in u)


E1, E2, E3 = (Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0)), (Fraction(0), Fraction(0), Fraction(1))
ZERO3 = (Fraction(0),) * 3
ROT_E1 = ((1, 0, 0), (0, 0, -1), (0, 1, 0))  # rotation by π/2 about e_1: e_2 ↦ e_3


# --- quaternions ---


def ad_matrix(q: Quat):
    w, x, y, z = (Fraction(v) for v in q)
    n = w * w + x * x + y * y + z * z
    if n != 1:
        raise ValueError("not a unit quaternion")
    return (
        (w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z),
    )


def _rat(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_unit_quaternion(rng: random.Random, bound: int = 3) -> Quat:
    """Inverse stereographic projection of a rational point of R³."""
    u = [_rat(rng, bound) for _ in range(3)]
    s = sum(c * c for c in u)
    return ((s - 1) / (s + 1),) + tuple(2 * c / (s + 1) for c in u)


def random_torus_quaternion(rng: random.Random, central: bool = False, bound: int = 4) -> Quat:
    if central:
        return (Fraction(rng.choice((1, -1))), Fraction(0), Fraction(0), Fraction(0))
    while True:
        s = _rat(rng, bound)
        if s:
            return ((1 - s * s) / (1 + s * s), 2 * s / (1 + s * s), Fraction(0), Fraction(0))


def is_central(q: Quat) -> bool:
    return q[1] == q[2] == q[3] == 0


def _rand_vec(rng, bound=3):
    return tuple(_rat(rng, bound) for _ in range(3))


# --- exact linear algebra over Q ---


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    M = [list(map(Fraction, r)) for r in rows]
    piv, r = [], 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], piv


def rank(rows, ncols: int | None = None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    return len(_rref(rows, ncols or len(rows[0]))[1])


def kernel_basis(rows, ncols: int) -> list:
    R, piv = _rref(list(rows), ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        out.append(tuple(v))
    return out


def same_span(A: list, B: list, n: int) -> bool:
    ra, rb = rank(A, n) if A else 0, rank(B, n) if B else 0
    return ra == rb and (rank(list(A) + list(B), n) if (A or B) else 0) == ra


def solve(rows, rhs, ncols: int):
    """One solution x of rows·x = rhs, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = _rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv):
        x[c] = R[i][ncols]
    return tuple(x)


# --- stabilizers and slices ---


def _minus_id(M):
    return tuple(tuple(M[r][c] - (1 if r == c else 0) for c in range(3)) for r in range(3))


def stabilizer_basis(a: Sequence[Quat]) -> list:
    """Basis of ⋂ C(a_i) = {B : Ad(a_i)B = B}."""
    rows = [row for q in a for row in _minus_id(ad_matrix(q))]
    return kernel_basis(rows, 3)


def stabilizer_class(a: Sequence[Quat]) -> str:
    return {0: "Z", 1: "T", 3: "G"}[len(stabilizer_basis(a))]


class SliceError(ValueError):
    pass


@dataclass
class SliceModel:
    """V = {(X, Y) : Σ Ad(a_i)X_i - X_i = 0 = Σ Ad(a_i)Y_i - Y_i}, J^V(X, Y) = proj_{g_a} Σ X_i × Y_i."""

    a: tuple
    tag: str = field(init=False)
    Va: list = field(init=False)  # basis of V_a ⊂ R^{3N}
    stab: list = field(init=False)

    def __post_init__(self):
        self.a = tuple(tuple(Fraction(v) for v in q) for q in self.a)
        self.stab = stabilizer_basis(self.a)
        self.tag = {0: "Z", 1: "T", 3: "G"}[len(self.stab)]
        self.Va = kernel_basis(self._constraint_rows(), 3 * self.N)

    @property
    def N(self) -> int:
        return len(self.a)

    def _constraint_rows(self):
        mats = [_minus_id(ad_matrix(q)) for q in self.a]
        return [tuple(x for M in mats for x in M[r]) for r in range(3)]

    def constraint(self, X) -> tuple:
        """Σ Ad(a_i)X_i - X_i (entries may be TPoly)."""
        out = (0, 0, 0)
        for q, x in zip(self.a, X):
            out = vadd(out, matvec(_minus_id(ad_matrix(q)), x))
        return out

    def in_V(self, X, Y) -> bool:
        return vzero(self.constraint(X)) and vzero(self.constraint(Y))

    def raw_moment(self, X, Y):
        out = (0, 0, 0)
        for x, y in zip(X, Y):
            out = vadd(out, cross(x, y))
        return out

    def moment(self, X, Y):
        """Orthogonal projection of Σ X_i × Y_i onto the stabilizer algebra."""
        m = self.raw_moment(X, Y)
        if self.tag == "G":
            return m
        if self.tag == "Z":
            return (0, 0, 0)
        u = self.stab[0]
        return vscale(dot(m, u) / dot(u, u), u)

    def split(self, v: tuple) -> tuple:
        return tuple(tuple(v[3 * i : 3 * i + 3]) for i in range(self.N))

    def random_V(self, rng, bound=3) -> tuple:
        v = [Fraction(0)] * (3 * self.N)
        for b in self.Va:
            c = _rat(rng, bound)
            v = [x + c * y for x, y in zip(v, b)]
        return self.split(tuple(v))


def slice_moment(a: Sequence[Quat], X, Y):
    S = SliceModel(tuple(a))
    if not S.in_V(X, Y):
        raise SliceError("(X, Y) is not in the slice V")
    return S.moment(X, Y)


# --- stabilizer T: nonpositivity witnesses ---


class WitnessError(ValueError):
    pass


def _curve_eval(curve, t):
    return tuple(tuple(c(t) if isinstance(c, TPoly) else c for c in x) for x in curve)


def _sign_witnesses(alpha: Fraction, beta: Fraction, eps: Fraction, sign: int):
    """t_neg, t_pos in (-eps, eps) \\ {0} with α t + sign·β t² negative resp. positive."""
    if alpha:
        s = min(eps / 2, abs(alpha) / (2 * beta)) if beta else eps / 2
        tp = s if alpha > 0 else -s
        return -tp, tp
    s = eps / 2
    return (None, s) if sign > 0 else (s, None)


def witness_curves_T(a: Sequence[Quat], X, Y, eps: Fraction = Fraction(1, 1000)) -> dict:
    """γ_±(t) = (X + t(e_2,…,e_2,x), Y ± t(e_3,…,e_3,Rx)) and the sign analysis of J^V_{e_1}∘γ_±."""
    S = SliceModel(tuple(a))
    if S.tag != "T" or any(q[2] or q[3] for q in S.a):
        raise WitnessError("base point must lie in the standard torus with stabilizer T")
    X = tuple(tuple(map(Fraction, x)) for x in X)
    Y = tuple(tuple(map(Fraction, y)) for y in Y)
    if not S.in_V(X, Y) or dot(S.raw_moment(X, Y), E1) != 0:
        raise WitnessError("point is not in the zero set of J^V")
    N = S.N
    if N == 1:
        # V = t ⊕ t, J^V vanishes on V
        ok = all(dot(cross(tuple(u), tuple(v)), E1) == 0 for u in S.Va for v in S.Va)
        return {"branch": "vanishes", "ok": ok, "order": [0]}
    order = list(range(N))
    j = next((i for i in reversed(range(N)) if not is_central(S.a[i])), None)
    order[j], order[N - 1] = order[N - 1], order[j]
    aa = [S.a[i] for i in order]
    Xo, Yo = [X[i] for i in order], [Y[i] for i in order]
    M = [_minus_id(ad_matrix(q)) for q in aa]
    rhs = (0, 0, 0)
    for i in range(N - 1):
        rhs = vsub(rhs, matvec(M[i], E2))
    # x in the e_2-e_3 plane
    sol = solve([(M[-1][r][1], M[-1][r][2]) for r in range(3)], rhs, 2)
    if sol is None:
        raise WitnessError("no x solving the first slice equation")
    x = (Fraction(0), sol[0], sol[1])
    Rx = matvec(ROT_E1, x)
    eq2 = vadd(sum_vec(matvec(M[i], E3) for i in range(N - 1)), matvec(M[-1], Rx))
    dirs_X = [E2] * (N - 1) + [x]
    dirs_Y = [E3] * (N - 1) + [Rx]
    curves = {}
    info = {"x": [str(c) for c in x], "order": order, "eq2": vzero(eq2)}
    beta = N + dot(x, x) - 1
    alpha = {}
    for s, name in ((1, "+"), (-1, "-")):
        GX = [vadd(Xo[i], vscale(T, dirs_X[i])) for i in range(N)]
        GY = [vadd(Yo[i], vscale(s * T, dirs_Y[i])) for i in range(N)]
        inv = [0] * N
        for k, i in enumerate(order):
            inv[i] = k
        GX, GY = [GX[inv[i]] for i in range(N)], [GY[inv[i]] for i in range(N)]
        curves[name] = (tuple(GX), tuple(GY))
        jv = dot(S.raw_moment(GX, GY), E1)
        a_pr = sum((dot(E3, Yo[i]) + s * dot(E2, Xo[i]) for i in range(N - 1)), Fraction(0))
        a_pr += dot(cross(E1, x), Yo[-1]) + s * dot(cross(Rx, E1), Xo[-1])
        alpha[name] = a_pr
        info["in_V" + name] = S.in_V(GX, GY)
        info["poly" + name] = jv.to_json() if isinstance(jv, TPoly) else [str(jv)]
        info["matches" + name] = TPoly.lift(jv) == TPoly((0, a_pr, s * beta))
        info["start" + name] = _curve_eval(GX, 0) == X and _curve_eval(GY, 0) == Y
    if alpha["+"]:
        branch, use, sgn = "alpha_plus", "+", 1
    elif alpha["-"]:
        branch, use, sgn = "alpha_minus", "-", -1
    else:
        branch, use, sgn = "both_zero", None, 1
    wit = {}
    if use:
        tn, tp = _sign_witnesses(alpha[use], beta, eps, sgn)
        wit = {"neg": (use, tn), "pos": (use, tp)}
    else:
        s = eps / 2
        wit = {"pos": ("+", s), "neg": ("-", s)}
    signs_ok = True
    for want, (cname, tv) in wit.items():
        GX, GY = curves[cname]
        v = dot(S.raw_moment(_curve_eval(GX, tv), _curve_eval(GY, tv)), E1)
        signs_ok &= (v > 0) if want == "pos" else (v < 0)
        signs_ok &= 0 < abs(tv) < eps
    info.update(
        branch=branch,
        alpha_plus=str(alpha["+"]),
        alpha_minus=str(alpha["-"]),
        beta=str(beta),
        beta_positive=beta > 0,
        witnesses={k: [c, str(v)] for k, (c, v) in wit.items()},
        signs_ok=signs_ok,
        curves=curves,
    )
    info["ok"] = all(info[k] for k in ("eq2", "in_V+", "in_V-", "matches+", "matches-", "start+", "start-", "beta_positive", "signs_ok"))
    return info


def sum_vec(vs):
    out = (0, 0, 0)
    for v in vs:
        out = vadd(out, v)
    return out


# --- rank off t = 0 ---


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def minors_gcd(rows: Sequence[Sequence]) -> TPoly:
    """gcd of all 3×3 minors of a 3×n matrix (entries Fraction or TPoly); zero polynomial if rank < 3."""
    rows = [[TPoly.lift(x) for x in r] for r in rows]
    if len(rows) != 3:
        raise ValueError("expects three rows")
    n = len(rows[0])
    g = TPoly()
    for cols in itertools.combinations(range(n), 3):
        d = _det3([[rows[r][c] for c in cols] for r in range(3)])
        if d.is_zero():
            continue
        g = tgcd(g, d) if not g.is_zero() else d.monic()
        if g.deg == 0:
            break
    return g


def rank_generic_off_zero(rows) -> bool:
    """Rank 3 for every complex t ≠ 0."""
    g = minors_gcd(rows)
    return g.is_monomial()


def _transpose(M):
    return [list(c) for c in zip(*M)]


# --- stabilizer G: regularizing curves ---


def erz_curve_G(X, Y, avec, bvec) -> tuple[str, tuple]:
    """Curve γ with γ(0) = (X, Y) for X_i = ξ_i a, Y_i = υ_i a (all parallel), N ≥ 2."""
    N = len(X)
    if N < 2:
        raise WitnessError("the regularizing curves need N ≥ 2")
    xi = [_coef(x, avec) for x in X]
    ups = [_coef(y, avec) for y in Y]
    X = [tuple(map(TPoly.lift, x)) for x in X]
    Y = [tuple(map(TPoly.lift, y)) for y in Y]
    GX, GY = list(X), list(Y)
    one_t = 1 - T
    if xi[0] and ups[1]:
        branch = "xi1_ups2"
        GX[1] = vadd(vscale(T * xi[0], bvec), vscale(one_t, X[1]))
        GY[0] = vadd(vscale(T * ups[1], bvec), vscale(one_t, Y[0]))
    elif xi[0]:
        branch = "xi1_only"
        GX[1] = vadd(vscale(T * xi[0], bvec), vscale(one_t, X[1]))
        GY[0] = vadd(vscale(T * T, bvec), vscale(one_t, Y[0]))
        GY[1] = vscale(T, avec)
    elif ups[1]:
        branch = "ups2_only"
        GX[0] = vscale(T, avec)
        GX[1] = vadd(vscale(T * T, bvec), vscale(one_t, X[1]))
        GY[0] = vadd(vscale(T * ups[1], bvec), vscale(one_t, Y[0]))
    else:
        branch = "neither"
        GX[0] = vscale(T, avec)
        GX[1] = vadd(vscale(T, bvec), vscale(one_t, X[1]))
        GY[0] = vadd(vscale(T, bvec), vscale(one_t, Y[0]))
        GY[1] = vscale(T, avec)
    return branch, (tuple(GX), tuple(GY))


def _coef(v, avec) -> Fraction:
    """ξ with v = ξ a (raises if not parallel)."""
    k = next(i for i in range(3) if avec[i] != 0)
    c = Fraction(v[k]) / avec[k]
    if any(Fraction(v[i]) != c * avec[i] for i in range(3)):
        raise WitnessError("vector not parallel to a")
    return c


def moment_jacobian(X, Y) -> list:
    """3 × 6N matrix of d(Σ X_i × Y_i)_k: rows k, columns (X_1, Y_1, X_2, Y_2, …)."""
    rows = [[], [], []]
    for x, y in zip(X, Y):
        for k, ek in enumerate((E1, E2, E3)):
            rows[k].extend(cross(y, ek))  # ∂/∂X_i
            rows[k].extend(cross(ek, x))  # ∂/∂Y_i
    return rows


def check_erz_curve(X, Y, avec, bvec) -> dict:
    branch, (GX, GY) = erz_curve_G(X, Y, avec, bvec)
    J = sum_vec(cross(x, y) for x, y in zip(GX, GY))
    start = _curve_eval(GX, 0) == tuple(tuple(map(Fraction, x)) for x in X) and _curve_eval(GY, 0) == tuple(
        tuple(map(Fraction, y)) for y in Y
    )
    ident = vzero(tuple(TPoly.lift(c) for c in J))
    reg = rank_generic_off_zero(moment_jacobian(GX, GY))
    return {"branch": branch, "identically_zero": ident, "start": start, "rank3_off_zero": reg, "ok": ident and start and reg}


# --- acyclicity: regularizing paths ---


def full_moment(a, A):
    """J(a, A) = Σ Ad(a_i)A_i - A_i."""
    return sum_vec(matvec(_minus_id(ad_matrix(q)), x) for q, x in zip(a, A))


def centralizer_rows(a, A) -> list:
    """Rows whose common kernel is I(a, A) = ⋂ C(a_i) ∩ ⋂ C(Ad(a_i)A_i)."""
    rows = []
    for q, x in zip(a, A):
        rows.extend(_minus_id(ad_matrix(q)))
        rows.extend(cross_matrix(matvec(ad_matrix(q), x)))
    return rows


def jprime_matrix(a, A) -> list:
    """3 × 6N matrix of J'_{(a,A)}(L'_a X, Y) = Σ Ad(a_i)[X_i, A_i] + Ad(a_i)Y_i - Y_i."""
    rows = [[], [], []]
    for q, x in zip(a, A):
        R = ad_matrix(q)
        RX = [[sum(R[r][k] * (-cross_matrix(x)[k][c]) for k in range(3)) for c in range(3)] for r in range(3)]
        MY = _minus_id(R)
        for r in range(3):
            rows[r].extend(RX[r])
            rows[r].extend(MY[r])
    return rows


def _not_in(u_basis, n=3):
    """A standard basis vector outside span(u_basis)."""
    for e in (E1, E2, E3):
        if rank(list(u_basis) + [e], n) > rank(list(u_basis), n):
            return e
    raise ValueError("span is everything")


def azy_path(a: Sequence[Quat], A) -> tuple[str, tuple]:
    """Path A(t) with A(0) = A, J(a, A(t)) ≡ 0 and I(a, A(t)) = 0 for t ≠ 0 (a_i in the standard torus)."""
    a = [tuple(map(Fraction, q)) for q in a]
    A = [tuple(map(Fraction, x)) for x in A]
    N = len(a)
    I = kernel_basis(centralizer_rows(a, A), 3)
    if not I:
        return "regular", tuple(tuple(map(TPoly.lift, x)) for x in A)
    if N < 2:
        raise WitnessError("no regularizing path: N = 1")
    P = [tuple(map(TPoly.lift, x)) for x in A]
    if len(I) == 3:
        if any(not is_central(q) for q in a) or any(x != ZERO3 for x in A):
            raise WitnessError("I = g requires central a_i and A = 0")
        B1, B2 = E1, E2
        P[0], P[1] = vscale(T, B1), vscale(T, B2)
        return "I=g", tuple(P)
    if any(q[2] or q[3] for q in a) or any(x[1] or x[2] for x in A):
        raise WitnessError("I = t expects a_i in T and A_i in t")
    central = [is_central(q) for q in a]
    B = E2  # ∉ t
    if all(central):
        j = next(i for i in range(N) if A[i] != ZERO3)
        k = next(i for i in range(N) if i != j)
        P[k] = vadd(P[k], vscale(T, B))
        return "t_central", tuple(P)
    if any(central):
        k = central.index(True)
        P[k] = vadd(P[k], vscale(T, B))
        return "t_mixed", tuple(P)
    B1 = B
    B2 = lemma_azy2(a[0], a[1], B1)["B2"]
    P[0] = vadd(P[0], vscale(T, B1))
    P[1] = vadd(P[1], vscale(T, B2))
    return "t_noncentral", tuple(P)


def check_azy_path(a, A) -> dict:
    branch, P = azy_path(a, A)
    start = _curve_eval(P, 0) == tuple(tuple(map(Fraction, x)) for x in A)
    J = full_moment(a, P)
    ident = vzero(tuple(TPoly.lift(c) for c in J))
    if branch == "regular":
        reg = len(kernel_basis(centralizer_rows(a, A), 3)) == 0
        surj = rank(jprime_matrix(a, A), 6 * len(a)) == 3
        return {"branch": branch, "start": start, "identically_zero": ident, "I_zero_off_zero": reg, "surjective_off_zero": surj, "ok": start and ident and reg and surj}
    # I(t) = 0 ⟺ the stacked rows have rank 3 ⟺ its transpose has nonzero maximal minors
    reg = rank_generic_off_zero(_transpose(centralizer_rows(a, P)))
    surj = rank_generic_off_zero(jprime_matrix(a, P))
    return {"branch": branch, "start": start, "identically_zero": ident, "I_zero_off_zero": reg, "surjective_off_zero": surj, "ok": start and ident and reg and surj}


# --- lemmas ---


def lemma_azy1(a, A) -> dict:
    """(im J')^⊥ versus ⋂ C(a_i) ∩ ⋂ C(Ad(a_i)A_i), both as exact subspaces of R³."""
    Jp = jprime_matrix(a, A)
    perp = kernel_basis(_transpose(Jp), 3)
    inter = kernel_basis(centralizer_rows(a, A), 3)
    return {"complement": perp, "intersection": inter, "ok": same_span(perp, inter, 3), "dim": len(inter)}


def lemma_azy2(a1: Quat, a2: Quat, B1) -> dict:
    """B_2 with Ad(a_1)B_1 - B_1 + Ad(a_2)B_2 - B_2 = 0 for a_1, a_2 ∈ T \\ {±1}.

    On the e_2-e_3 plane λAd(a) is multiplication by z = v_1/v_2 (plane read as C); the e_1 part of
    B_2 is free (it lies in ker(Ad(a_2) - 1)) and is set to 0.
    """
    for q in (a1, a2):
        if q[2] or q[3] or is_central(q):
            raise ValueError("a_1, a_2 must lie in T \\ {±1}")
    B1 = tuple(map(Fraction, B1))
    R1, R2 = ad_matrix(a1), ad_matrix(a2)
    v1 = vsub(matvec(R1, B1), B1)
    if vzero(v1):
        B2 = ZERO3
        branch = "B1_in_t"
        z = None
    else:
        v2 = vsub(matvec(R2, B1), B1)
        c1, c2 = complex_plane(v1), complex_plane(v2)
        z = cdiv(c1, c2)
        w = cmul(z, complex_plane(B1))
        B2 = (Fraction(0), -w[0], -w[1])
        branch = "rotate_scale"
    res = vadd(vsub(matvec(R1, B1), B1), vsub(matvec(R2, B2), B2))
    out = {"B2": B2, "branch": branch, "ok": vzero(res)}
    if z is not None:
        out["lambda_sq"] = z[0] * z[0] + z[1] * z[1]
    return out


def complex_plane(v):
    return (v[1], v[2])


def cmul(p, q):
    return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])


def cdiv(p, q):
    n = q[0] * q[0] + q[1] * q[1]
    return ((p[0] * q[0] + p[1] * q[1]) / n, (p[1] * q[0] - p[0] * q[1]) / n)


# --- samplers ---


def sample_T_point(rng: random.Random, N: int, mode: str):
    """Standard-torus base point with stabilizer T and a point of the zero set of J^V."""
    while True:
        a = [random_torus_quaternion(rng, central=rng.random() < 0.3) for _ in range(N)]
        if not all(is_central(q) for q in a):
            break
    S = SliceModel(tuple(a))
    zero = tuple(ZERO3 for _ in range(N))
    if mode == "origin":
        return a, zero, zero
    X = S.random_V(rng)
    basis = [S.split(b) for b in S.Va]
    # Y = Σ c_k basis_k with J^V(X, Y) = 0 (and α_+ = 0 when mode == "alpha_minus")
    rows = [[dot(S.raw_moment(X, b), E1) for b in basis]]
    rhs = [Fraction(0)]
    if mode == "alpha_minus" and N > 1:
        info = _alpha_parts(S, a)
        if info is None:
            return sample_T_point(rng, N, "random")
        u_row, vX = info[0], info[1](X)
        if vX == 0:
            return sample_T_point(rng, N, "random")
        rows.append([u_row(b) for b in basis])
        rhs.append(-vX)
    free = [_rat(rng, 3) for _ in basis]
    # particular + random homogeneous part
    sol = solve(rows, rhs, len(basis))
    if sol is None:
        return a, X, zero
    hom = kernel_basis(rows, len(basis))
    c = list(sol)
    for h in hom:
        s = free.pop() if free else Fraction(1)
        c = [x + s * y for x, y in zip(c, h)]
    Y = zero
    for ck, b in zip(c, basis):
        Y = tuple(vadd(y, vscale(ck, bb)) for y, bb in zip(Y, b))
    return a, X, Y


def _alpha_parts(S: SliceModel, a):
    """α_± = u(Y) ± v(X) for the curve data of the reordered base point."""
    N = S.N
    try:
        info = witness_curves_T(a, tuple(ZERO3 for _ in range(N)), tuple(ZERO3 for _ in range(N)))
    except WitnessError:
        return None
    order = info["order"]
    x = tuple(Fraction(c) for c in info["x"])
    Rx = matvec(ROT_E1, x)
    last = order[N - 1]
    others = [order[i] for i in range(N - 1)]

    def u(Y):
        return sum((dot(E3, Y[i]) for i in others), Fraction(0)) + dot(cross(E1, x), Y[last])

    def v(X):
        return sum((dot(E2, X[i]) for i in others), Fraction(0)) + dot(cross(Rx, E1), X[last])

    return u, v


def sample_parallel(rng: random.Random, N: int, branch: str):
    if N < 2:
        raise WitnessError("the regularizing curves need N ≥ 2")
    while True:
        avec = _rand_vec(rng)
        if not vzero(avec):
            break
    while True:
        bvec = _rand_vec(rng)
        if not vzero(cross(avec, bvec)):
            break
    xi = [_rat(rng, 3) for _ in range(N)]
    ups = [_rat(rng, 3) for _ in range(N)]

    def nz(r):
        while True:
            v = _rat(rng, 3)
            if v:
                return v

    need = {"xi1_ups2": (True, True), "xi1_only": (True, False), "ups2_only": (False, True), "neither": (False, False)}[branch]
    xi[0] = nz(rng) if need[0] else Fraction(0)
    ups[1] = nz(rng) if need[1] else Fraction(0)
    X = tuple(vscale(c, avec) for c in xi)
    Y = tuple(vscale(c, avec) for c in ups)
    return X, Y, avec, bvec


AZY_BRANCHES = ("I=g", "t_central", "t_mixed", "t_noncentral", "regular")


def sample_azy(rng: random.Random, N: int, branch: str):
    if branch == "I=g":
        return [random_torus_quaternion(rng, central=True) for _ in range(N)], [ZERO3] * N
    if branch == "regular":
        a = [random_unit_quaternion(rng) for _ in range(N)]
        rows = [[x for q in a for x in _minus_id(ad_matrix(q))[r]] for r in range(3)]
        hom = kernel_basis(rows, 3 * N)
        v = [Fraction(0)] * (3 * N)
        for h in hom:
            c = _rat(rng, 3)
            v = [x + c * y for x, y in zip(v, h)]
        return a, [tuple(v[3 * i : 3 * i + 3]) for i in range(N)]
    if branch == "t_central":
        a = [random_torus_quaternion(rng, central=True) for _ in range(N)]
    elif branch == "t_mixed":
        if N < 2:
            raise WitnessError("a mixed central/non-central base point needs N ≥ 2")
        while True:
            flags = [rng.random() < 0.5 for _ in range(N)]
            if any(flags) and not all(flags):
                break
        a = [random_torus_quaternion(rng, central=f) for f in flags]
    else:
        a = [random_torus_quaternion(rng) for _ in range(N)]
    A = [(_rat(rng, 3), Fraction(0), Fraction(0)) for _ in range(N)]
    if branch == "t_central" and all(x == ZERO3 for x in A):
        A[0] = E1
    return a, A


# --- suites ---


def jacobian_rank_density(case: str, samples: int, seed: int, N: int = 2) -> dict:
    """For each sampled degenerate point an explicit regularizing curve/path is built and checked exactly."""
    rng = random.Random(seed)
    branches: dict = {}
    failures: list = []

    def record(br, ok, detail):
        branches[br] = branches.get(br, 0) + 1
        if not ok:
            failures.append(detail)

    for s in range(samples):
        if case == "T":
            mode = ("random", "alpha_minus", "origin")[s % 3]
            a, X, Y = sample_T_point(rng, N, mode)
            try:
                info = witness_curves_T(a, X, Y)
                record(info["branch"], info["ok"], {"sample": s, "branch": info["branch"]})
            except WitnessError as e:
                record("error", False, {"sample": s, "error": str(e)})
        elif case == "G":
            br = ("xi1_ups2", "xi1_only", "ups2_only", "neither")[s % 4]
            try:
                X, Y, av, bv = sample_parallel(rng, N, br)
                info = check_erz_curve(X, Y, av, bv)
                record(info["branch"], info["ok"], {"sample": s, **{k: v for k, v in info.items()}})
            except WitnessError as e:
                record("error", False, {"sample": s, "error": str(e)})
        elif case == "full":
            br = AZY_BRANCHES[s % len(AZY_BRANCHES)]
            try:
                a, A = sample_azy(rng, N, br)
                info = check_azy_path(a, A)
                record(info["branch"], info["ok"], {"sample": s, **info})
            except WitnessError as e:
                record("error", False, {"sample": s, "sampled": br, "error": str(e)})
        elif case == "lemma1":
            br = AZY_BRANCHES[s % len(AZY_BRANCHES)]
            if br == "t_mixed" and N < 2:
                br = "t_noncentral"
            if br == "regular":
                a = [random_unit_quaternion(rng) for _ in range(N)]
                A = [_rand_vec(rng) for _ in range(N)]
            else:
                a, A = sample_azy(rng, N, br)
            info = lemma_azy1(a, A)
            record("dim%d" % info["dim"], info["ok"], {"sample": s})
        elif case == "lemma2":
            a1, a2 = random_torus_quaternion(rng), random_torus_quaternion(rng)
            B1 = (_rat(rng, 3), Fraction(0), Fraction(0)) if s % 5 == 0 else _rand_vec(rng)
            info = lemma_azy2(a1, a2, B1)
            record(info["branch"], info["ok"], {"sample": s})
        else:
            raise ValueError(f"unknown case {case!r}")
    return {
        "case": case,
        "N": N,
        "samples": samples,
        "seed": seed,
        "branches": dict(sorted(branches.items())),
        "failures": failures,
        "statement": "for each sampled degenerate point an explicit regularizing path was constructed",
    }


def check_suite(samples: int, seed: int, N: int = 2, cases: Sequence[str] = CASES) -> dict:
    return {c: jacobian_rank_density(c, samples, seed, N) for c in cases}
