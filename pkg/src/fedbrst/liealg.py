"""Lie-algebraic core: structure constants, g^N, (co)adjoint actions, BCH terms."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Sequence

from gmpy2 import mpq

from .scalars import GaussQ, ONE, ZERO, I, to_mpq

__all__ = [
    "LieDataError",
    "LieData",
    "su2",
    "ProductLieData",
    "LieVector",
    "LieCovector",
    "bracket",
    "ad_star",
    "Ad",
    "Ad_star",
    "Ad_matrix",
    "kr_index_set",
    "bch_term",
    "mat_mul",
    "mat_adj",
    "mat_det",
    "quaternion_matrix",
]


class LieDataError(ValueError):
    """Raised when structure constants or pairing violate a defining identity."""


Matrix2 = tuple[tuple[GaussQ, GaussQ], tuple[GaussQ, GaussQ]]


def mat_mul(a, b):
    n, m, q = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(m)), ZERO) for j in range(q)) for i in range(n)
    )


def mat_adj(a):
    """Adjugate of a 2x2 matrix (equals the inverse when det = 1)."""
    return ((a[1][1], -a[0][1]), (-a[1][0], a[0][0]))


def mat_det(a) -> GaussQ:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def mat_trace(a) -> GaussQ:
    return sum((a[i][i] for i in range(len(a))), ZERO)


def quaternion_matrix(w, x, y, z) -> Matrix2:
    """w + i(x σ1 + y σ2 + z σ3) as a 2x2 complex matrix; unitary iff w²+x²+y²+z² = 1."""
    w, x, y, z = (to_mpq(v) if not isinstance(v, GaussQ) else v for v in (w, x, y, z))
    w, x, y, z = (GaussQ.coerce(v) for v in (w, x, y, z))
    return ((w + I * z, y + I * x), (-y + I * x, w - I * z))


@dataclass(frozen=True)
class LieData:
    """Structure constants C[i][j][k] ([E_i,E_j] = Σ_k C[i][j][k] E_k) and an invariant pairing.

    ``rep`` optionally holds matrices of a faithful representation (needed for
    group-entry coordinates); for su(2) this is E_k = -(i/2) σ_k.
    """

    dim: int
    C: tuple
    pairing: tuple
    rep: tuple | None = None
    name: str = "custom"

    def __post_init__(self):
        d = self.dim
        C = tuple(tuple(tuple(to_mpq(self.C[i][j][k]) for k in range(d)) for j in range(d)) for i in range(d))
        g = tuple(tuple(to_mpq(self.pairing[i][j]) for j in range(d)) for i in range(d))
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "pairing", g)
        self.validate()

    def validate(self) -> None:
        d, C, g = self.dim, self.C, self.pairing
        if d <= 0:
            raise LieDataError("dim must be positive")
        for i, j, k in itertools.product(range(d), repeat=3):
            if C[i][j][k] != -C[j][i][k]:
                raise LieDataError(f"antisymmetry fails: C[{i}][{j}][{k}] != -C[{j}][{i}][{k}]")
        for i, j, k, l in itertools.product(range(d), repeat=4):
            s = sum(C[i][j][m] * C[m][k][l] + C[j][k][m] * C[m][i][l] + C[k][i][m] * C[m][j][l] for m in range(d))
            if s != 0:
                raise LieDataError(f"Jacobi identity fails at (i,j,k,l)=({i},{j},{k},{l})")
        for i, j in itertools.product(range(d), repeat=2):
            if g[i][j] != g[j][i]:
                raise LieDataError(f"pairing not symmetric at ({i},{j})")
        if _det_q([list(r) for r in g]) == 0:
            raise LieDataError("pairing is degenerate")
        # <[E_x,E_y],E_z> + <E_y,[E_x,E_z]> = 0
        for x, y, z in itertools.product(range(d), repeat=3):
            s = sum(C[x][y][m] * g[m][z] + g[y][m] * C[x][z][m] for m in range(d))
            if s != 0:
                raise LieDataError(f"pairing not ad-invariant at ({x},{y},{z})")

    @cached_property
    def bracket_table(self) -> tuple:
        """bracket_table[i][j] = ((k, C_ij^k), ...) with nonzero entries only."""
        d = self.dim
        return tuple(
            tuple(tuple((k, self.C[i][j][k]) for k in range(d) if self.C[i][j][k]) for j in range(d))
            for i in range(d)
        )

    @cached_property
    def modular_form(self) -> tuple:
        """Δ(E_i) = tr ad(E_i) = Σ_k C_ik^k."""
        return tuple(sum((self.C[i][k][k] for k in range(self.dim)), mpq(0)) for i in range(self.dim))

    @cached_property
    def fingerprint(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "C": [[[str(x) for x in row] for row in plane] for plane in self.C],
            "pairing": [[str(x) for x in row] for row in self.pairing],
        }

    @classmethod
    def from_json(cls, doc: dict | str) -> "LieData":
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            d = int(doc["dim"])
            C = doc["C"]
            g = doc["pairing"]
        except (KeyError, TypeError) as exc:
            raise LieDataError(f"malformed LieData document: {exc}") from exc
        conv = lambda v: to_mpq(v) if not isinstance(v, str) else to_mpq(v)
        C = [[[conv(C[i][j][k]) for k in range(d)] for j in range(d)] for i in range(d)]
        g = [[conv(g[i][j]) for j in range(d)] for i in range(d)]
        return cls(d, C, g)


def _det_q(m: list[list]) -> mpq:
    """Exact determinant by fraction-free-ish elimination over Q."""
    m = [[to_mpq(x) for x in row] for row in m]
    n = len(m)
    det = mpq(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def su2() -> LieData:
    """su(2) with E_k = -(i/2)σ_k, so [E_i,E_j] = ε_ijk E_k and <X,Y> = -2 tr(XY) is orthonormal."""
    d = 3
    C = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i, j, k in itertools.permutations(range(3)):
        C[i][j][k] = _levi_civita(i, j, k)
    g = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    h = GaussQ(mpq(-1, 2))
    rep = (
        ((ZERO, I * h), (I * h, ZERO)),  # -(i/2)σ1
        ((ZERO, h), (-h, ZERO)),  # -(i/2)σ2
        ((I * h, ZERO), (ZERO, -I * h)),  # -(i/2)σ3
    )
    return LieData(d, C, g, rep=rep, name="su2")


def _levi_civita(i, j, k) -> int:
    return (i - j) * (j - k) * (k - i) // 2


@dataclass(frozen=True)
class ProductLieData:
    """g^N with flat index I = n*d + i for (copy n, basis i)."""

    base: LieData
    N: int

    def __post_init__(self):
        if self.N <= 0:
            raise LieDataError("number of copies must be positive")

    @property
    def d(self) -> int:
        return self.base.dim

    @property
    def dim(self) -> int:
        return self.N * self.base.dim

    def index(self, n: int, i: int) -> int:
        return n * self.base.dim + i

    def split(self, I_: int) -> tuple[int, int]:
        return divmod(I_, self.base.dim)

    @cached_property
    def bracket_table(self) -> tuple:
        """Block-diagonal structure constants: table[I][J] = ((K, C_IJ^K), ...)."""
        d = self.d
        bt = self.base.bracket_table
        out = []
        for I_ in range(self.dim):
            n, i = divmod(I_, d)
            row = []
            for J in range(self.dim):
                m, j = divmod(J, d)
                row.append(tuple((n * d + k, c) for k, c in bt[i][j]) if n == m else ())
            out.append(tuple(row))
        return tuple(out)

    def C(self, I_: int, J: int, K: int) -> mpq:
        for k, c in self.bracket_table[I_][J]:
            if k == K:
                return c
        return mpq(0)

    def vector(self, coeffs) -> "LieVector":
        return LieVector(self, tuple(GaussQ.coerce(c) for c in coeffs))

    def covector(self, coeffs) -> "LieCovector":
        return LieCovector(self, tuple(GaussQ.coerce(c) for c in coeffs))

    def basis(self, I_: int) -> "LieVector":
        return self.vector([1 if J == I_ else 0 for J in range(self.dim)])

    def dual_basis(self, I_: int) -> "LieCovector":
        return self.covector([1 if J == I_ else 0 for J in range(self.dim)])

    def zero(self) -> "LieVector":
        return self.vector([0] * self.dim)

    def zero_covector(self) -> "LieCovector":
        return self.covector([0] * self.dim)


@dataclass(frozen=True)
class LieVector:
    alg: ProductLieData
    coeffs: tuple

    def _same(self, o):
        if not isinstance(o, LieVector) or o.alg != self.alg or len(o.coeffs) != len(self.coeffs):
            raise ValueError("dimension mismatch between Lie vectors")

    def __add__(self, o):
        self._same(o)
        return LieVector(self.alg, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o):
        self._same(o)
        return LieVector(self.alg, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        return LieVector(self.alg, tuple(-a for a in self.coeffs))

    def __mul__(self, s):
        s = GaussQ.coerce(s)
        return LieVector(self.alg, tuple(a * s for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __getitem__(self, I_):
        return self.coeffs[I_]


@dataclass(frozen=True)
class LieCovector:
    alg: ProductLieData
    coeffs: tuple

    def _same(self, o):
        if not isinstance(o, LieCovector) or o.alg != self.alg:
            raise ValueError("dimension mismatch between Lie covectors")

    def __add__(self, o):
        self._same(o)
        return LieCovector(self.alg, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o):
        self._same(o)
        return LieCovector(self.alg, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        return LieCovector(self.alg, tuple(-a for a in self.coeffs))

    def __mul__(self, s):
        s = GaussQ.coerce(s)
        return LieCovector(self.alg, tuple(a * s for a in self.coeffs))

    __rmul__ = __mul__

    def __call__(self, X: LieVector) -> GaussQ:
        if X.alg != self.alg:
            raise ValueError("dimension mismatch in dual pairing")
        return sum((a * b for a, b in zip(self.coeffs, X.coeffs)), ZERO)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __getitem__(self, I_):
        return self.coeffs[I_]


def bracket(X: LieVector, Y: LieVector) -> LieVector:
    X._same(Y)
    bt = X.alg.bracket_table
    out = [ZERO] * X.alg.dim
    for I_, x in enumerate(X.coeffs):
        if not x:
            continue
        for J, y in enumerate(Y.coeffs):
            if not y:
                continue
            xy = x * y
            for K, c in bt[I_][J]:
                out[K] = out[K] + xy * c
    return LieVector(X.alg, tuple(out))


def ad_star(X: LieVector, xi: LieCovector) -> LieCovector:
    """<ad*(X)ξ, Y> = -<ξ, [X,Y]>."""
    if X.alg != xi.alg:
        raise ValueError("dimension mismatch")
    bt = X.alg.bracket_table
    out = [ZERO] * X.alg.dim
    for I_, x in enumerate(X.coeffs):
        if not x:
            continue
        for J in range(X.alg.dim):
            acc = ZERO
            for K, c in bt[I_][J]:
                acc = acc + xi.coeffs[K] * c
            if acc:
                out[J] = out[J] - x * acc
    return LieCovector(X.alg, tuple(out))


# --- group actions (requires a matrix representation of the base algebra) ---


class _TraceDual:
    """Coordinates X^k of a rep matrix X via the inverse trace form."""

    def __init__(self, rep):
        self.rep = rep
        d = len(rep)
        T = [[mat_trace(mat_mul(rep[i], rep[j])) for j in range(d)] for i in range(d)]
        self.Tinv = _inverse_gauss(T)

    def coords(self, M) -> list[GaussQ]:
        d = len(self.rep)
        tr = [mat_trace(mat_mul(self.rep[j], M)) for j in range(d)]
        return [sum((self.Tinv[k][j] * tr[j] for j in range(d)), ZERO) for k in range(d)]


def _inverse_gauss(m):
    n = len(m)
    a = [[GaussQ.coerce(x) for x in row] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            raise LieDataError("trace form of the representation is degenerate")
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c].inverse()
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


_TRACE_DUAL_CACHE: dict = {}


def trace_dual(base: LieData) -> _TraceDual:
    if base.rep is None:
        raise LieDataError("this LieData carries no matrix representation")
    key = base.fingerprint
    td = _TRACE_DUAL_CACHE.get(key)
    if td is None:
        td = _TRACE_DUAL_CACHE[key] = _TraceDual(base.rep)
    return td


def _check_unimodular(a) -> None:
    if mat_det(a) != ONE:
        raise ValueError("group point is not unimodular (det != 1)")


def Ad_matrix(base: LieData, a) -> list[list[GaussQ]]:
    """Matrix of Ad(a) on the basis: Ad(a)E_j = Σ_k M[k][j] E_k."""
    _check_unimodular(a)
    td = trace_dual(base)
    ainv = mat_adj(a)
    cols = [td.coords(mat_mul(mat_mul(a, E), ainv)) for E in base.rep]
    d = base.dim
    return [[cols[j][k] for j in range(d)] for k in range(d)]


def Ad(a_list: Sequence, X: LieVector) -> LieVector:
    """Componentwise Ad on g^N; a_list holds one 2x2 matrix per copy."""
    alg = X.alg
    d = alg.d
    out = []
    for n in range(alg.N):
        M = Ad_matrix(alg.base, a_list[n])
        x = X.coeffs[n * d : (n + 1) * d]
        out.extend(sum((M[k][j] * x[j] for j in range(d)), ZERO) for k in range(d))
    return LieVector(alg, tuple(out))


def Ad_star(a_list: Sequence, xi: LieCovector) -> LieCovector:
    """<Ad*(a)ξ, Y> = <ξ, Ad(a^{-1})Y>; a_list holds one matrix per copy."""
    alg = xi.alg
    d = alg.d
    out = []
    for n in range(alg.N):
        Minv = Ad_matrix(alg.base, mat_adj(a_list[n]))
        x = xi.coeffs[n * d : (n + 1) * d]
        # (Ad*(a)ξ)_j = Σ_k ξ_k Minv[k][j]
        out.extend(sum((x[k] * Minv[k][j] for k in range(d)), ZERO) for j in range(d))
    return LieCovector(alg, tuple(out))


# --- BCH via K_r enumeration ---


def _compositions_positive_pairs(total: int, kappa: int):
    """All (k1, k2) in N^kappa x N^kappa with k1i + k2i > 0 and |k1|+|k2| = total."""
    if kappa == 0:
        if total == 0:
            yield (), ()
        return
    for s in range(1, total - (kappa - 1) + 1):
        for a in range(s + 1):
            for r1, r2 in _compositions_positive_pairs(total - s, kappa - 1):
                yield (a,) + r1, (s - a,) + r2


def kr_index_set(r: int) -> list[tuple[tuple, tuple, int]]:
    """The index set K_r of triples (k1, k2, k) with k1i+k2i > 0 and |k1|+|k2|+k = r-1."""
    if r < 2:
        raise ValueError("K_r is defined for r >= 2")
    out = []
    for k in range(r):
        rest = r - 1 - k
        for kappa in range(rest + 1):
            for k1, k2 in _compositions_positive_pairs(rest, kappa):
                out.append((k1, k2, k))
    return out


def kr_coefficient(triple) -> mpq:
    k1, k2, k = triple
    kappa = len(k1)
    den = (kappa + 1) * (sum(k2) + 1) * factorial(k)
    for a, b in zip(k1, k2):
        den *= factorial(a) * factorial(b)
    return mpq((-1) ** kappa, den)


def kr_word(triple) -> tuple[str, ...]:
    """The ad-word 'X'/'Y' letters, applied right-to-left to the final Y."""
    k1, k2, k = triple
    w: list[str] = []
    for a, b in zip(k1, k2):
        w += ["X"] * a + ["Y"] * b
    w += ["X"] * k
    return tuple(w)


def bch_term(r: int, X: LieVector, Y: LieVector) -> LieVector:
    """Degree-r BCH term H_r(X,Y) by direct K_r enumeration."""
    X._same(Y)
    total = X.alg.zero()
    for triple in kr_index_set(r):
        v = Y
        for letter in reversed(kr_word(triple)):
            v = bracket(X if letter == "X" else Y, v)
            if v.is_zero():
                break
        if not v.is_zero():
            total = total + v * GaussQ(kr_coefficient(triple))
    return total
