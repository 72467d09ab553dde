"""Classical and quantum BRST algebra over the phase-space polynomial ring.

Ghosts c^l (degree +1) and antighosts b_l (degree -1) are odd generators of one
exterior algebra.  A word is a bitmask over 2d bits: bit l is c^l, bit d+l is b_l;
the canonical order is increasing bit index (all ghosts, then all antighosts).

The formal parameter of the quantum side is ν = iλ, so that J_X ⋆ J_Y - J_Y ⋆ J_X = ν J_[X,Y].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial
from typing import Callable, Iterable

from gmpy2 import mpq

from .phasealg import PhasePoly, PhaseRing
from .report import Report
from .scalars import GaussQ
from .star import star
from .sympgeo import poisson

__all__ = [
    "GhostPoly",
    "BRST",
    "nu_power",
    "word_mul",
    "left_derivative",
    "right_derivative",
]


# --- word arithmetic ---


def nu_power(c: PhasePoly, k: int) -> PhasePoly:
    """c · ν^k with ν = iλ (k may be negative when the division is exact)."""
    c = c.times_lam(k) if k >= 0 else c.div_lam(-k)
    for _ in range(k % 4):
        c = c.times_i()
    return c


def _popcount(x: int) -> int:
    return bin(x).count("1")


def word_mul(A: int, B: int) -> tuple[int, int]:
    """(sign, A∧B) for canonical words; sign 0 if they overlap."""
    if A & B:
        return 0, 0
    inv = 0
    b = B
    while b:
        low = b & -b
        inv += _popcount(A & ~((low << 1) - 1))
        b ^= low
    return (-1 if inv & 1 else 1), A | B


def left_derivative(M: int, k: int) -> tuple[int, int]:
    if not (M >> k) & 1:
        return 0, 0
    return (-1 if _popcount(M & ((1 << k) - 1)) & 1 else 1), M ^ (1 << k)


def right_derivative(M: int, k: int) -> tuple[int, int]:
    if not (M >> k) & 1:
        return 0, 0
    return (-1 if _popcount(M >> (k + 1)) & 1 else 1), M ^ (1 << k)


@dataclass(frozen=True)
class GhostPoly:
    """Σ coefficient(PhasePoly) · word."""

    ring: PhaseRing
    terms: tuple  # sorted ((mask, PhasePoly), ...)

    @classmethod
    def make(cls, ring: PhaseRing, d: dict) -> "GhostPoly":
        return cls(ring, tuple(sorted(((m, c) for m, c in d.items() if not c.is_zero()), key=lambda x: x[0])))

    @classmethod
    def scalar(cls, f: PhasePoly) -> "GhostPoly":
        return cls.make(f.ring, {0: f})

    @property
    def d(self) -> int:
        return self.ring.d

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, o: "GhostPoly") -> "GhostPoly":
        out = self.as_dict()
        for m, c in o.terms:
            out[m] = out[m] + c if m in out else c
        return GhostPoly.make(self.ring, out)

    def __neg__(self):
        return GhostPoly.make(self.ring, {m: -c for m, c in self.terms})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, s) -> "GhostPoly":
        if isinstance(s, PhasePoly):
            return GhostPoly.make(self.ring, {m: s * c for m, c in self.terms})
        s = GaussQ.coerce(s)
        return GhostPoly.make(self.ring, {m: c * s for m, c in self.terms})

    def map_coeffs(self, fn: Callable[[PhasePoly], PhasePoly]) -> "GhostPoly":
        return GhostPoly.make(self.ring, {m: fn(c) for m, c in self.terms})

    def times_nu(self, k: int = 1) -> "GhostPoly":
        return self.map_coeffs(lambda c: nu_power(c, k))

    def div_nu(self, k: int = 1) -> "GhostPoly":
        return self.map_coeffs(lambda c: nu_power(c, -k))

    def normalize(self) -> "GhostPoly":
        return self.map_coeffs(lambda c: c.normalize())

    def truncate(self, K: int) -> "GhostPoly":
        return self.map_coeffs(lambda c: c.truncate(K))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, o):
        return isinstance(o, GhostPoly) and self.ring == o.ring and self.terms == o.terms

    def __hash__(self):
        return hash(self.terms)

    def degree_of(self, mask: int) -> int:
        d = self.d
        return _popcount(mask & ((1 << d) - 1)) - _popcount(mask >> d)

    def components(self) -> dict[int, "GhostPoly"]:
        out: dict = {}
        for m, c in self.terms:
            out.setdefault(self.degree_of(m), {})[m] = c
        return {k: GhostPoly.make(self.ring, v) for k, v in out.items()}

    def lam_orders(self) -> list[int]:
        return sorted({o for _, c in self.terms for o in c.lam_orders()})

    def to_json(self) -> list:
        d = self.d
        return [
            {
                "coefficient": c.to_json(),
                "ghosts": [l for l in range(d) if (m >> l) & 1],
                "antighosts": [l for l in range(d) if (m >> (d + l)) & 1],
            }
            for m, c in self.terms
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, ring: PhaseRing, doc) -> "GhostPoly":
        if isinstance(doc, str):
            doc = json.loads(doc)
        d = ring.d
        out: dict = {}
        for t in doc:
            g, a = sorted(t["ghosts"]), sorted(t["antighosts"])
            if len(set(g)) != len(g) or len(set(a)) != len(a):
                continue
            # the listed order may be noncanonical: reorder with the permutation sign
            sign, m = 1, 0
            for l in t["ghosts"]:
                s, m = word_mul(m, 1 << l)
                sign *= s
            for l in t["antighosts"]:
                s, m = word_mul(m, 1 << (d + l))
                sign *= s
            c = PhasePoly.from_json(ring, t["coefficient"]) * GaussQ(sign)
            out[m] = out[m] + c if m in out else c
        return cls.make(ring, out)

    def __repr__(self):
        d = self.d
        parts = []
        for m, c in self.terms:
            w = [f"c{l + 1}" for l in range(d) if (m >> l) & 1] + [f"b{l + 1}" for l in range(d) if (m >> (d + l)) & 1]
            parts.append(f"({c!r})" + ("*" + "*".join(w) if w else ""))
        return " + ".join(parts) if parts else "0"


def _lin(x: GhostPoly, fn) -> GhostPoly:
    """Apply a word-level map fn(mask) -> [(sign, mask')] with coefficients carried along."""
    out: dict = {}
    for m, c in x.terms:
        for s, m2 in fn(m):
            if s:
                cc = c if s == 1 else -c
                out[m2] = out[m2] + cc if m2 in out else cc
    return GhostPoly.make(x.ring, out)


class BRST:
    """Operators for the BRST algebra of the diagonal action on T*G^N."""

    def __init__(self, ring: PhaseRing, exp_sign: int = 1):
        self.ring = ring
        self.exp_sign = exp_sign  # v · w = μ(exp(2 exp_sign ν P)(v ⊗ w))
        self.d = ring.d
        self.lie = ring.lie
        self.J = ring.moment_components
        C = ring.lie.C
        d = self.d
        self.Delta = tuple(sum((C[l][k][k] for k in range(d)), mpq(0)) for l in range(d))
        self._one = ring.one()

    # generators
    def ghost(self, l: int) -> int:
        return 1 << l

    def antighost(self, l: int) -> int:
        return 1 << (self.d + l)

    def word(self, ghosts: Iterable[int] = (), antighosts: Iterable[int] = (), coeff: PhasePoly | None = None) -> GhostPoly:
        sign, m = 1, 0
        for l in ghosts:
            s, m = word_mul(m, self.ghost(l))
            sign *= s
        for l in antighosts:
            s, m = word_mul(m, self.antighost(l))
            sign *= s
        c = self._one if coeff is None else coeff
        if not sign:
            return GhostPoly.make(self.ring, {})
        return GhostPoly.make(self.ring, {m: c * GaussQ(sign)})

    def scalar(self, f: PhasePoly) -> GhostPoly:
        return GhostPoly.scalar(f)

    # --- insertions ---
    def _gen_of(self, kind: str, l: int) -> int:
        """i(E_l) contracts the ghost c^l; i(ε^l) contracts the antighost b_l."""
        return l if kind == "E" else self.d + l

    def insert_left(self, kind: str, l: int, x: GhostPoly) -> GhostPoly:
        k = self._gen_of(kind, l)
        return _lin(x, lambda m: [left_derivative(m, k)])

    def insert_right(self, kind: str, l: int, x: GhostPoly) -> GhostPoly:
        k = self._gen_of(kind, l)
        return _lin(x, lambda m: [right_derivative(m, k)])

    # --- products ---
    def mul(self, x: GhostPoly, y: GhostPoly) -> GhostPoly:
        """Classical graded-commutative product μ."""
        out: dict = {}
        for m1, c1 in x.terms:
            for m2, c2 in y.terms:
                s, m = word_mul(m1, m2)
                if s:
                    c = c1 * c2 if s == 1 else -(c1 * c2)
                    out[m] = out[m] + c if m in out else c
        return GhostPoly.make(self.ring, out)

    def _P_pairs(self, V: int, W: int, star_: bool) -> list:
        """(P or P*)(V ⊗ W) on words; the two insertions act factorwise with no extra tensor sign."""
        d = self.d
        out = []
        for l in range(d):
            if star_:
                s1, V2 = right_derivative(V, l)           # j(E_l): ghost c^l
                s2, W2 = left_derivative(W, d + l) if s1 else (0, 0)  # i(ε^l): antighost b_l
            else:
                s1, V2 = right_derivative(V, d + l)       # j(ε^l): antighost b_l
                s2, W2 = left_derivative(W, l) if s1 else (0, 0)      # i(E_l): ghost c^l
            if s1 and s2:
                out.append((s1 * s2, V2, W2))
        return out

    def ghost_bracket_words(self, V: int, W: int) -> list:
        """μ((P + P*)(V ⊗ W)) as [(sign, mask)]."""
        res = []
        for star_ in (False, True):
            for s, V2, W2 in self._P_pairs(V, W, star_):
                s2, m = word_mul(V2, W2)
                if s2:
                    res.append((s * s2, m))
        return res

    def brst_poisson(self, x: GhostPoly, y: GhostPoly) -> GhostPoly:
        """{f v, g w} = {f,g}_M μ(v,w) + 2 f g μ((P + P*)(v ⊗ w)) with {f,g}_M = -{f,g}."""
        out: dict = {}

        def acc(m, c):
            out[m] = out[m] + c if m in out else c

        for m1, c1 in x.terms:
            for m2, c2 in y.terms:
                s, m = word_mul(m1, m2)
                if s:
                    pb = poisson(c1, c2)
                    acc(m, -pb if s == 1 else pb)
                bw = self.ghost_bracket_words(m1, m2)
                if bw:
                    prod = c1 * c2
                    for s2, m3 in bw:
                        acc(m3, prod * GaussQ(2 * s2))
        return GhostPoly.make(self.ring, out)

    def _dot_words(self, V: int, W: int, K: int) -> list:
        """v · w = μ(exp(±2νP)(v ⊗ w)) as [(ν power n, rational factor, mask)]."""
        res = []
        layer = {(V, W): 1}
        n = 0
        while layer and n <= K:
            fac = mpq((2 * self.exp_sign) ** n, factorial(n))
            for (a, b), s in layer.items():
                s2, m = word_mul(a, b)
                if s2:
                    res.append((n, fac * s * s2, m))
            nxt: dict = {}
            for (a, b), s in layer.items():
                for s3, a2, b2 in self._P_pairs(a, b, False):
                    nxt[(a2, b2)] = nxt.get((a2, b2), 0) + s * s3
            layer = {k: v for k, v in nxt.items() if v}
            n += 1
        return res

    def quantum_product(self, x: GhostPoly, y: GhostPoly) -> GhostPoly:
        """(f v) * (g w) = (f ⋆ g)(v · w), truncated at λ^K."""
        K = self.ring.K
        out: dict = {}
        for m1, c1 in x.terms:
            for m2, c2 in y.terms:
                words = self._dot_words(m1, m2, K)
                if not words:
                    continue
                fg = star(c1, c2)
                for n, fac, m in words:
                    c = nu_power(fg, n) * GaussQ(fac)
                    out[m] = out[m] + c if m in out else c
        return GhostPoly.make(self.ring, out).truncate(K)

    # --- Koszul differentials ---
    def koszul_d(self, x: GhostPoly) -> GhostPoly:
        """∂ = Σ_l J_l i(ε^l)."""
        out = GhostPoly.make(self.ring, {})
        for l in range(self.d):
            out = out + self.insert_left("eps", l, x).scale(self.J[l])
        return out

    def _ghost_split(self, m: int) -> tuple[int, int]:
        gm = m & ((1 << self.d) - 1)
        return gm, m ^ gm

    def quantum_koszul_d(self, x: GhostPoly) -> GhostPoly:
        """f v ↦ Σ (f ⋆ J_l) i(ε^l) v + (ν/2) f (Σ C^l_jk E_l ∧ i(ε^j) i(ε^k) v + i(Δ) v).

        Extended to ghosts as an odd derivation vanishing on them: ω ∧ Z ↦ (-1)^{|ω|} ω ∧ ∂Z.
        """
        d, C = self.d, self.lie.C
        out: dict = {}

        def acc(m, c):
            out[m] = out[m] + c if m in out else c

        for m, f in x.terms:
            gm, am = self._ghost_split(m)
            gsign = -1 if _popcount(gm) & 1 else 1
            parts: list = []  # (coeff, antighost mask)
            for l in range(d):
                s, a2 = left_derivative(am, d + l)
                if s:
                    parts.append((star(f, self.J[l]) * GaussQ(s), a2))
            corr: dict = {}
            for k in range(d):
                s1, a1 = left_derivative(am, d + k)
                if not s1:
                    continue
                if self.Delta[k]:
                    corr[a1] = corr.get(a1, 0) + s1 * self.Delta[k]
                for j in range(d):
                    s2, a2 = left_derivative(a1, d + j)  # i(ε^j) i(ε^k) v
                    if not s2:
                        continue
                    for l in range(d):
                        c = C[j][k][l]
                        if not c:
                            continue
                        s3, a3 = word_mul(1 << (d + l), a2)
                        if s3:
                            corr[a3] = corr.get(a3, 0) + s1 * s2 * s3 * c
            for a, c in corr.items():
                if c:
                    parts.append((nu_power(f, 1) * GaussQ(mpq(c) / 2), a))
            for c, a in parts:
                s, mm = word_mul(gm, a)
                acc(mm, c * GaussQ(s * gsign))
        return GhostPoly.make(self.ring, out).truncate(self.ring.K)

    # --- Chevalley-Eilenberg ---
    def classical_rep(self, l: int, f: PhasePoly) -> PhasePoly:
        """L_{E_l} f = {J_l, f}_M = -{J_l, f} = {f, J_l}."""
        return poisson(f, self.J[l])

    def quantized_rep(self, X, f: PhasePoly) -> PhasePoly:
        """𝑳_X f = (1/ν)(J_X ⋆ f - f ⋆ J_X); raises if the λ⁰ part does not vanish."""
        JX = self.ring.moment_component(X)
        com = (star(JX, f) - star(f, JX)).normalize()
        if 0 in com.lam_orders():
            raise ArithmeticError("commutator with J_X has a nonzero λ⁰ part")
        return nu_power(com, -1)

    def _quantum_rep_basis(self, l: int, f: PhasePoly) -> PhasePoly:
        X = [0] * self.d
        X[l] = 1
        return self.quantized_rep(X, f)

    def _ce(self, x: GhostPoly, rep: Callable[[int, PhasePoly], PhasePoly]) -> GhostPoly:
        """δ = Σ_l c^l ∧ L̂_{E_l} - ½ Σ C^l_jk c^j c^k ∂/∂c^l, L̂ acting on coefficients by rep and on antighosts by ad."""
        d, C = self.d, self.lie.C
        out: dict = {}

        def acc(m, c):
            out[m] = out[m] + c if m in out else c

        for m, f in x.terms:
            for l in range(d):
                # coefficient part
                Lf = rep(l, f)
                s, mm = word_mul(1 << l, m)
                if s and not Lf.is_zero():
                    acc(mm, Lf if s == 1 else -Lf)
                # ad(E_l) on antighosts: b_m -> Σ_n C_lm^n b_n, as an even derivation
                for mi in range(d):
                    s1, m1 = left_derivative(m, d + mi)
                    if not s1:
                        continue
                    for n in range(d):
                        c = C[l][mi][n]
                        if not c:
                            continue
                        s2, m2 = word_mul(1 << (d + n), m1)
                        if not s2:
                            continue
                        s3, m3 = word_mul(1 << l, m2)
                        if s3:
                            acc(m3, f * GaussQ(s1 * s2 * s3 * c))
            for l in range(d):
                s1, m1 = left_derivative(m, l)
                if not s1:
                    continue
                for j in range(d):
                    for k in range(d):
                        c = C[j][k][l]
                        if not c:
                            continue
                        s2, m2 = word_mul(1 << k, m1)
                        if not s2:
                            continue
                        s3, m3 = word_mul(1 << j, m2)
                        if s3:
                            acc(m3, f * GaussQ(-mpq(c) / 2 * s1 * s2 * s3))
        return GhostPoly.make(self.ring, out)

    def ce_delta(self, x: GhostPoly) -> GhostPoly:
        return self._ce(x, self.classical_rep)

    def quantum_ce_delta(self, x: GhostPoly) -> GhostPoly:
        return self._ce(x, self._quantum_rep_basis).truncate(self.ring.K)

    def classical_brst_d(self, x: GhostPoly) -> GhostPoly:
        """𝒟 = δ + 2∂."""
        return self.ce_delta(x) + self.koszul_d(x).scale(2)

    def quantum_brst_d(self, x: GhostPoly) -> GhostPoly:
        """𝒑𝒟 = 𝒑δ + 2𝒑∂."""
        return self.quantum_ce_delta(x) + self.quantum_koszul_d(x).scale(2)

    # --- charges ---
    def bracket_element(self) -> GhostPoly:
        """[-,-] = Σ_{i,j,k} C^k_ij c^i c^j b_k."""
        d, C = self.d, self.lie.C
        out = GhostPoly.make(self.ring, {})
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    if C[i][j][k]:
                        out = out + self.word((i, j), (k,)).scale(C[i][j][k])
        return out

    def moment_element(self) -> GhostPoly:
        """J = Σ_l J_l c^l."""
        out = GhostPoly.make(self.ring, {})
        for l in range(self.d):
            out = out + self.word((l,), (), self.J[l])
        return out

    def modular_element(self) -> GhostPoly:
        out = GhostPoly.make(self.ring, {})
        for l in range(self.d):
            if self.Delta[l]:
                out = out + self.word((l,)).scale(self.Delta[l])
        return out

    def classical_charge(self) -> GhostPoly:
        """θ = -¼[-,-] + J."""
        return self.bracket_element().scale(mpq(-1, 4)) + self.moment_element()

    def quantum_charge(self) -> GhostPoly:
        """𝜽 = -¼[-,-] + J + (ν/2)Δ."""
        return self.classical_charge() + self.modular_element().times_nu(1).scale(mpq(1, 2))

    def graded_commutator(self, x: GhostPoly, y: GhostPoly, prod=None) -> GhostPoly:
        """x*y - (-1)^{|x||y|} y*x for homogeneous parts."""
        prod = prod or self.quantum_product
        out = GhostPoly.make(self.ring, {})
        for dx, xc in x.components().items():
            for dy, yc in y.components().items():
                t = prod(xc, yc)
                u = prod(yc, xc)
                out = out + (t + u if (dx * dy) % 2 else t - u)
        return out

    def ad_charge(self, x: GhostPoly) -> GhostPoly:
        """(1/ν) ad_*(𝜽) x."""
        com = self.graded_commutator(self.quantum_charge(), x).normalize()
        if any(0 in c.lam_orders() for _, c in com.terms):
            raise ArithmeticError("ad_*(θ) has a nonzero λ⁰ part")
        return com.div_nu(1)
