"""Polynomial functions on T*G^N in the left trivialization G^N x (g*)^N.

Variables per copy n: the four entries a[n][r][c] of a 2x2 matrix, then the
momenta p[(n,k)], k < d.  Coefficients are Gaussian rationals and each
polynomial may carry powers of λ up to the ring's truncation order K.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import _kernel as kr
from .liealg import (
    Ad_matrix,
    LieCovector,
    LieData,
    LieVector,
    ProductLieData,
    mat_adj,
    mat_det,
    mat_mul,
    quaternion_matrix,
    su2,
    trace_dual,
)
from .scalars import GaussQ, ONE, ZERO, Series, to_mpq

__all__ = [
    "PhaseRing",
    "PhasePoly",
    "PhasePoint",
    "StdVectorField",
    "InexactError",
    "random_su2",
    "random_torus",
    "random_rational",
    "flow_stdvf",
]


class InexactError(ValueError):
    """An exact-mode operation would need a transcendental value."""


def _gauss_terms(g: GaussQ, key: int, lay: kr.Layout) -> dict:
    out = {}
    if g.re:
        out[key] = g.re
    if g.im:
        out[key + lay.i_unit] = g.im
    return out


class PhaseRing:
    """Context object: number of copies N, truncation order K and the Lie data."""

    def __init__(self, N: int = 1, K: int = 3, lie: LieData | None = None):
        lie = su2() if lie is None else lie
        if lie.rep is None or len(lie.rep[0]) != 2:
            raise ValueError("phase algebra needs a 2x2 matrix representation of the Lie algebra")
        self.lie = lie
        self.alg = ProductLieData(lie, N)
        self.N = N
        self.K = K
        self.d = lie.dim
        self.n_entry = 4 * N
        self.nvars = 4 * N + N * self.d
        self.lay = kr.Layout(self.nvars)

    # --- identity ---
    def __eq__(self, o):
        return isinstance(o, PhaseRing) and (o.N, o.K, o.lie.fingerprint) == (self.N, self.K, self.lie.fingerprint)

    def __hash__(self):
        return hash((self.N, self.K, self.lie.fingerprint))

    def with_K(self, K: int) -> "PhaseRing":
        return PhaseRing(self.N, K, self.lie)

    def __repr__(self):
        return f"PhaseRing(N={self.N}, K={self.K}, d={self.d})"

    # --- variable bookkeeping ---
    def entry_var(self, n: int, r: int, c: int) -> int:
        return 4 * n + 2 * r + c

    def p_var(self, I_: int) -> int:
        return self.n_entry + I_

    @cached_property
    def p_vars(self) -> tuple:
        return tuple(range(self.n_entry, self.nvars))

    @cached_property
    def entry_vars(self) -> tuple:
        return tuple(range(self.n_entry))

    def var_name(self, v: int) -> str:
        if v < self.n_entry:
            n, rc = divmod(v, 4)
            r, c = divmod(rc, 2)
            return f"a[{n + 1}][{r + 1}][{c + 1}]"
        n, k = divmod(v - self.n_entry, self.d)
        return f"p[{n + 1}][{k + 1}]"

    # --- constructors ---
    def poly(self, terms: dict) -> "PhasePoly":
        return PhasePoly(self, terms)

    def zero(self) -> "PhasePoly":
        return PhasePoly(self, {})

    def one(self) -> "PhasePoly":
        return PhasePoly(self, {0: mpq(1)})

    def const(self, c) -> "PhasePoly":
        if isinstance(c, Series):
            out = {}
            for m, x in enumerate(c.c[: self.K + 1]):
                out.update(_gauss_terms(x, m * self.lay.lam_unit, self.lay))
            return PhasePoly(self, out)
        return PhasePoly(self, _gauss_terms(GaussQ.coerce(c), 0, self.lay))

    def var(self, v: int) -> "PhasePoly":
        return PhasePoly(self, {self.lay.units[v]: mpq(1)})

    def a(self, n: int, r: int, c: int) -> "PhasePoly":
        """Entry (r,c) of copy n (all 0-based)."""
        return self.var(self.entry_var(n, r, c))

    def p(self, I_: int) -> "PhasePoly":
        return self.var(self.p_var(I_))

    def lam(self, m: int = 1) -> "PhasePoly":
        if m > self.K:
            return self.zero()
        return PhasePoly(self, {m * self.lay.lam_unit: mpq(1)})

    @cached_property
    def i_unit_poly(self) -> "PhasePoly":
        return PhasePoly(self, {self.lay.i_unit: mpq(1)})

    def entry_matrix(self, n: int) -> list[list[dict]]:
        return [[{self.lay.units[self.entry_var(n, r, c)]: mpq(1)} for c in range(2)] for r in range(2)]

    # --- derivation tables ---
    @cached_property
    def _E_tables(self) -> tuple:
        """Table of the left-invariant derivation E_I: a_{rc} -> (a E_i)_{rc} on copy n."""
        lay = self.lay
        tabs = []
        for I_ in range(self.alg.dim):
            n, i = divmod(I_, self.d)
            E = self.lie.rep[i]
            table = []
            for r in range(2):
                for c in range(2):
                    v = self.entry_var(n, r, c)
                    row = []
                    for s in range(2):
                        e = E[s][c]
                        if not e:
                            continue
                        delta = lay.units[self.entry_var(n, r, s)] - lay.units[v]
                        if e.re:
                            row.append((delta, e.re))
                        if e.im:
                            row.append((delta + lay.i_unit, e.im))
                    if row:
                        table.append((v, row))
            tabs.append(tuple(table))
        return tuple(tabs)

    # --- moment map ---
    def _matrix_terms_mul(self, A, B):
        lay = self.lay
        out = [[{} for _ in range(2)] for _ in range(2)]
        for r in range(2):
            for c in range(2):
                acc: dict = {}
                for s in range(2):
                    kr.add_into(acc, kr.mul(A[r][s], B[s][c], lay, None))
                out[r][c] = acc
        return out

    def _const_matrix(self, M):
        return [[_gauss_terms(M[r][c], 0, self.lay) for c in range(2)] for r in range(2)]

    def _adj_terms(self, A):
        neg = lambda t: kr.scale(t, mpq(-1))
        return [[A[1][1], neg(A[0][1])], [neg(A[1][0]), A[0][0]]]

    @cached_property
    def _Ad_inv_entries(self) -> tuple:
        """coef[n][k][j]: coordinate j of Ad(a_n^{-1}) E_k as an entry polynomial."""
        td = trace_dual(self.lie)
        out = []
        for n in range(self.N):
            A = self.entry_matrix(n)
            Aadj = self._adj_terms(A)
            rows = []
            for k in range(self.d):
                M = self._matrix_terms_mul(self._matrix_terms_mul(Aadj, self._const_matrix(self.lie.rep[k])), A)
                tr = []
                for j in range(self.d):
                    Ej = self._const_matrix(self.lie.rep[j])
                    P = self._matrix_terms_mul(Ej, M)
                    tr.append(kr.add(P[0][0], P[1][1]))
                coords = []
                for j in range(self.d):
                    acc: dict = {}
                    for l in range(self.d):
                        acc = kr.add(acc, kr.mul(_gauss_terms(td.Tinv[j][l], 0, self.lay), tr[l], self.lay, None))
                    coords.append(acc)
                rows.append(tuple(coords))
            out.append(tuple(rows))
        return tuple(out)

    @cached_property
    def moment_components(self) -> tuple:
        """J_k = Σ_n Σ_j p_(n,j) ((Ad(a_n^{-1}) E_k)^j - δ_jk), k < d."""
        lay = self.lay
        comps = []
        for k in range(self.d):
            acc: dict = {}
            for n in range(self.N):
                for j in range(self.d):
                    coef = dict(self._Ad_inv_entries[n][k][j])
                    if j == k:
                        kr.add_into(coef, {0: mpq(-1)})
                    pv = lay.units[self.p_var(self.alg.index(n, j))]
                    kr.add_into(acc, kr.shift(coef, pv, lay))
            comps.append(PhasePoly(self, acc))
        return tuple(comps)

    def moment_component(self, B) -> "PhasePoly":
        """J_B for B given as d coordinates in g (the diagonal action's algebra)."""
        coeffs = B.coeffs if isinstance(B, LieVector) else tuple(B)
        if len(coeffs) != self.d:
            raise ValueError("moment_component expects an element of g (d coordinates)")
        out = self.zero()
        for k, c in enumerate(coeffs):
            c = GaussQ.coerce(c)
            if c:
                out = out + self.moment_components[k] * c
        return out

    # --- group action ---
    def group_action_images(self, g) -> dict:
        """Substitution a_n -> g a_n g^{-1}, p_(n,.) -> Ad*(g) p_(n,.)."""
        if mat_det(g) != ONE:
            raise ValueError("group element must be unimodular")
        lay = self.lay
        G = self._const_matrix(g)
        Gi = self._const_matrix(mat_adj(g))
        Minv = Ad_matrix(self.lie, mat_adj(g))
        images = {}
        for n in range(self.N):
            A = self.entry_matrix(n)
            M = self._matrix_terms_mul(self._matrix_terms_mul(G, A), Gi)
            for r in range(2):
                for c in range(2):
                    images[self.entry_var(n, r, c)] = M[r][c]
            for j in range(self.d):
                acc: dict = {}
                for k in range(self.d):
                    x = Minv[k][j]
                    if x:
                        acc = kr.add(acc, _gauss_terms(x, lay.units[self.p_var(self.alg.index(n, k))], lay))
                images[self.p_var(self.alg.index(n, j))] = acc
        return images

    def group_action(self, g, f: "PhasePoly") -> "PhasePoly":
        """Pullback Ψ_g^* f = f ∘ Ψ_g with Ψ_g(a, α) = (g a g^{-1}, Ad*(g) α)."""
        f._check(self)
        return PhasePoly(self, kr.substitute_linear(f.t, self.group_action_images(g), self.lay, self.K))

    # --- Hamiltonian ---
    def hamiltonian(self, kappa, delta, plaquettes: Sequence[Sequence[tuple[int, int]]]) -> "PhasePoly":
        """(κ²/2δ) Σ p_I² - (1/κ²δ) Σ_plaq (tr a(p) + conj tr a(p)).

        A plaquette is a word of (copy index, ±1); inverses use the adjugate, and
        for SU(2) conj(tr a) = tr(a^{-1}) so the sum is polynomial in entries.
        """
        kappa, delta = GaussQ.coerce(to_mpq(kappa)), GaussQ.coerce(to_mpq(delta))
        kin = self.zero()
        for I_ in range(self.alg.dim):
            kin = kin + self.p(I_) * self.p(I_)
        H = kin * (kappa * kappa / (delta * 2))
        pot = self.zero()
        for word in plaquettes:
            if not word:
                raise ValueError("empty plaquette word")
            M = None
            for n, s in word:
                A = self.entry_matrix(n)
                if s == -1:
                    A = self._adj_terms(A)
                elif s != 1:
                    raise ValueError("orientation must be +1 or -1")
                M = A if M is None else self._matrix_terms_mul(M, A)
            tr = PhasePoly(self, kr.add(M[0][0], M[1][1]))
            Minv = self._adj_terms(M)
            tr_inv = PhasePoly(self, kr.add(Minv[0][0], Minv[1][1]))
            pot = pot + tr + tr_inv
        return H - pot * (ONE / (kappa * kappa * delta))

    # --- random elements ---
    def random_poly(self, rng: random.Random, entry_deg: int = 2, fiber_deg: int = 2, terms: int = 4,
                    coeff_range: int = 3, gaussian: bool = True, lam_max: int = 0) -> "PhasePoly":
        lay = self.lay
        out: dict = {}
        for _ in range(terms):
            ed = rng.randint(0, entry_deg)
            fd = rng.randint(0, fiber_deg)
            ex = [0] * self.nvars
            for _ in range(ed):
                ex[rng.randrange(self.n_entry)] += 1
            for _ in range(fd):
                ex[self.n_entry + rng.randrange(self.N * self.d)] += 1
            lam = rng.randint(0, lam_max)
            key = lay.pack(ex, lam)
            c = GaussQ(rng.randint(-coeff_range, coeff_range), rng.randint(-coeff_range, coeff_range) if gaussian else 0)
            kr.add_into(out, _gauss_terms(c, key, lay))
        return PhasePoly(self, out)

    def monomials(self, entry_deg: int, fiber_deg: int, copies: Iterable[int] | None = None) -> list["PhasePoly"]:
        """All monomials with entry degree <= entry_deg and fiber degree <= fiber_deg."""
        copies = range(self.N) if copies is None else copies
        ev = [self.entry_var(n, r, c) for n in copies for r in range(2) for c in range(2)]
        pv = [self.p_var(self.alg.index(n, k)) for n in copies for k in range(self.d)]
        out = []
        for e_exps in _exps_upto(len(ev), entry_deg):
            for p_exps in _exps_upto(len(pv), fiber_deg):
                ex = [0] * self.nvars
                for v, e in zip(ev, e_exps):
                    ex[v] = e
                for v, e in zip(pv, p_exps):
                    ex[v] = e
                out.append(PhasePoly(self, {self.lay.pack(ex): mpq(1)}))
        return out


def _exps_upto(n: int, deg: int):
    if n == 0:
        yield ()
        return
    for e in range(deg + 1):
        for rest in _exps_upto(n - 1, deg - e):
            yield (e,) + rest


class PhasePoly:
    """Sparse polynomial in entries, momenta and λ with Gaussian-rational coefficients."""

    __slots__ = ("ring", "t")

    def __init__(self, ring: PhaseRing, terms: dict):
        self.ring = ring
        self.t = terms

    def _check(self, ring: PhaseRing):
        if self.ring is not ring and self.ring != ring:
            raise ValueError("polynomials live in different phase rings")

    def _coerce(self, o) -> "PhasePoly":
        if isinstance(o, PhasePoly):
            o._check(self.ring)
            return o
        return self.ring.const(o)

    # --- arithmetic ---
    def __add__(self, o):
        o = self._coerce(o)
        return PhasePoly(self.ring, kr.add(self.t, o.t))

    __radd__ = __add__

    def __sub__(self, o):
        o = self._coerce(o)
        return PhasePoly(self.ring, kr.sub(self.t, o.t))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __neg__(self):
        return PhasePoly(self.ring, kr.scale(self.t, mpq(-1)))

    def __mul__(self, o):
        if isinstance(o, PhasePoly):
            o._check(self.ring)
            return PhasePoly(self.ring, kr.mul(self.t, o.t, self.ring.lay, self.ring.K))
        if isinstance(o, (int, Fraction)) or type(o) is type(mpq(0)):
            return PhasePoly(self.ring, kr.scale(self.t, to_mpq(o)))
        return self * self.ring.const(o)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return PhasePoly(self.ring, kr.power(self.t, n, self.ring.lay, self.ring.K))

    def times_lam(self, m: int = 1) -> "PhasePoly":
        return PhasePoly(self.ring, kr.shift(self.t, m * self.ring.lay.lam_unit, self.ring.lay, self.ring.K))

    def div_lam(self, m: int = 1) -> "PhasePoly":
        """Exact division by λ^m; raises if a lower-order term is present."""
        lay = self.ring.lay
        out = {}
        for k, c in self.t.items():
            if lay.lam(k) < m:
                raise ValueError("division by λ is not exact: λ-order too low")
            out[k - m * lay.lam_unit] = c
        return PhasePoly(self.ring, out)

    def times_i(self) -> "PhasePoly":
        return PhasePoly(self.ring, kr.shift(self.t, self.ring.lay.i_unit, self.ring.lay))

    # --- comparisons ---
    def __eq__(self, o):
        if isinstance(o, PhasePoly):
            return self.ring == o.ring and self.t == o.t
        try:
            return self == self.ring.const(o)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    def is_zero(self) -> bool:
        return not self.t

    def __bool__(self):
        return bool(self.t)

    def equals_mod_det(self, o) -> bool:
        return (self - o).normalize().is_zero()

    # --- structure ---
    def lam_orders(self) -> list[int]:
        lay = self.ring.lay
        return sorted({lay.lam(k) for k in self.t})

    def lam_order(self) -> int | None:
        o = self.lam_orders()
        return o[0] if o else None

    def lam_part(self, m: int) -> "PhasePoly":
        """Coefficient of λ^m (as a λ-free polynomial)."""
        lay = self.ring.lay
        sh = m * lay.lam_unit
        return PhasePoly(self.ring, {k - sh: c for k, c in self.t.items() if lay.lam(k) == m})

    def truncate(self, K: int) -> "PhasePoly":
        return PhasePoly(self.ring, kr.truncate(self.t, self.ring.lay, K))

    def fiber_degree(self) -> int:
        lay, pv = self.ring.lay, self.ring.p_vars
        return max((lay.degree(k, pv) for k in self.t), default=-1)

    def entry_degree(self) -> int:
        lay, ev = self.ring.lay, self.ring.entry_vars
        return max((lay.degree(k, ev) for k in self.t), default=-1)

    def total_degree(self) -> int:
        lay = self.ring.lay
        return max((lay.degree(k) for k in self.t), default=-1)

    def fiber_parts(self) -> dict[int, "PhasePoly"]:
        lay, pv = self.ring.lay, self.ring.p_vars
        parts: dict[int, dict] = {}
        for k, c in self.t.items():
            parts.setdefault(lay.degree(k, pv), {})[k] = c
        return {deg: PhasePoly(self.ring, t) for deg, t in sorted(parts.items())}

    def coefficient(self, exps: Sequence[int], lam: int = 0) -> GaussQ:
        lay = self.ring.lay
        k = lay.pack(exps, lam)
        return GaussQ(self.t.get(k, 0), self.t.get(k + lay.i_unit, 0))

    def conj(self) -> "PhasePoly":
        """Complex conjugation of coefficients only (variables untouched)."""
        lay = self.ring.lay
        return PhasePoly(self.ring, {k: (-c if lay.iflag(k) else c) for k, c in self.t.items()})

    # --- derivations ---
    def derive_var(self, v: int) -> "PhasePoly":
        return PhasePoly(self.ring, kr.derive(self.t, v, self.ring.lay))

    def fiber_derive(self, I_: int) -> "PhasePoly":
        """∂/∂p_I."""
        return self.derive_var(self.ring.p_var(I_))

    def left_invariant_derive(self, I_: int) -> "PhasePoly":
        """Derivative along the standard field (E_I, 0)."""
        return PhasePoly(self.ring, kr.linear_derivation(self.t, self.ring._E_tables[I_], self.ring.lay))

    # --- det normal form ---
    def normalize(self) -> "PhasePoly":
        """Reduce modulo det a_n - 1 by rewriting a12 a21 -> a11 a22 - 1 in every copy."""
        ring = self.ring
        lay = ring.lay
        t = self.t
        for n in range(ring.N):
            v11, v12, v21, v22 = (ring.entry_var(n, r, c) for r in range(2) for c in range(2))
            u11, u12, u21, u22 = (lay.units[v] for v in (v11, v12, v21, v22))
            out: dict = {}
            for k, c in t.items():
                m = min(lay.exp(k, v12), lay.exp(k, v21))
                if not m:
                    kr.add_into(out, {k: c})
                    continue
                base = k - m * (u12 + u21)
                for j in range(m + 1):
                    coeff = c * comb(m, j) * (-1) ** (m - j)
                    kr.add_into(out, {base + j * (u11 + u22): mpq(coeff)})
            t = out
        return PhasePoly(ring, t)

    # --- evaluation ---
    def evaluate(self, pt: "PhasePoint") -> Series:
        ring, lay = self.ring, self.ring.lay
        vals = pt.variable_values(ring)
        out = [ZERO] * (ring.K + 1)
        for k, c in self.t.items():
            val = GaussQ(c)
            for v in range(ring.nvars):
                e = lay.exp(k, v)
                if e:
                    val = val * (vals[v] ** e)
            if lay.iflag(k):
                val = val * GaussQ(0, 1)
            m = lay.lam(k)
            out[m] = out[m] + val
        return Series(out, ring.K)

    def evaluate_scalar(self, pt: "PhasePoint") -> GaussQ:
        s = self.evaluate(pt)
        if any(s.c[1:]):
            raise ValueError("polynomial has λ-dependent value")
        return s.c[0]

    # --- serialization ---
    def monomial_list(self) -> list[tuple[tuple, int, GaussQ]]:
        ring, lay = self.ring, self.ring.lay
        merged: dict = {}
        for k, c in self.t.items():
            base = k & ~(lay.i_unit * 3)
            re, im = merged.get(base, (mpq(0), mpq(0)))
            if lay.iflag(k):
                im += c
            else:
                re += c
            merged[base] = (re, im)
        out = []
        for base, (re, im) in merged.items():
            if re or im:
                out.append((lay.exps(base), lay.lam(base), GaussQ(re, im)))
        out.sort(key=lambda x: (x[0], x[1]))
        return out

    def to_json(self) -> dict:
        ring = self.ring
        terms = []
        for exps, lam, c in self.monomial_list():
            ent = [list(exps[4 * n : 4 * n + 4]) for n in range(ring.N)]
            mom = [list(exps[ring.n_entry + ring.d * n : ring.n_entry + ring.d * (n + 1)]) for n in range(ring.N)]
            terms.append({"entries": ent, "p": mom, "lambda": lam, "coeff": c.to_json()})
        return {"N": ring.N, "K": ring.K, "d": ring.d, "terms": terms}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, ring: PhaseRing, doc: dict | str) -> "PhasePoly":
        if isinstance(doc, str):
            doc = json.loads(doc)
        lay = ring.lay
        out: dict = {}
        for t in doc["terms"]:
            exps = [e for row in t["entries"] for e in row] + [e for row in t["p"] for e in row]
            if len(exps) != ring.nvars:
                raise ValueError("monomial length does not match the ring")
            key = lay.pack(exps, t.get("lambda", 0))
            kr.add_into(out, _gauss_terms(GaussQ.from_json(t["coeff"]), key, lay))
        return cls(ring, kr.truncate(out, lay, ring.K))

    def __repr__(self):
        if not self.t:
            return "0"
        ring = self.ring
        parts = []
        for exps, lam, c in self.monomial_list():
            mon = [ring.var_name(v) + (f"^{e}" if e > 1 else "") for v, e in enumerate(exps) if e]
            if lam:
                mon.append("λ" + (f"^{lam}" if lam > 1 else ""))
            parts.append(f"{c}" + ("*" + "*".join(mon) if mon else ""))
        return " + ".join(parts)


@dataclass(frozen=True)
class PhasePoint:
    """A point (a_1..a_N, α) with exact unimodular unitary a_n and α ∈ (g*)^N."""

    a: tuple
    alpha: tuple

    def __post_init__(self):
        for m in self.a:
            if mat_det(m) != ONE:
                raise ValueError("group part is not unimodular")
            adag = tuple(tuple(m[c][r].conj() for c in range(2)) for r in range(2))
            prod = mat_mul(adag, m)
            if prod != ((ONE, ZERO), (ZERO, ONE)):
                raise ValueError("group part is not unitary")
        object.__setattr__(self, "alpha", tuple(GaussQ.coerce(x) for x in self.alpha))

    def variable_values(self, ring: PhaseRing) -> list[GaussQ]:
        if len(self.a) != ring.N or len(self.alpha) != ring.N * ring.d:
            raise ValueError("point does not match the ring dimensions")
        vals = [ZERO] * ring.nvars
        for n, m in enumerate(self.a):
            for r in range(2):
                for c in range(2):
                    vals[ring.entry_var(n, r, c)] = m[r][c]
        for I_, x in enumerate(self.alpha):
            vals[ring.p_var(I_)] = x
        return vals

    def covector(self, alg: ProductLieData) -> LieCovector:
        return alg.covector(self.alpha)

    def act(self, g, ring: PhaseRing) -> "PhasePoint":
        """Ψ_g(a, α) = (g a g^{-1}, Ad*(g) α)."""
        from .liealg import Ad_star

        gi = mat_adj(g)
        a = tuple(mat_mul(mat_mul(g, m), gi) for m in self.a)
        al = Ad_star([g] * ring.N, ring.alg.covector(self.alpha))
        return PhasePoint(a, al.coeffs)

    def moment(self, ring: PhaseRing) -> tuple:
        """J(pt) = Σ_n (Ad*(a_n) α_n - α_n) as d coordinates."""
        d = ring.d
        out = [ZERO] * d
        for n, m in enumerate(self.a):
            Minv = Ad_matrix(ring.lie, mat_adj(m))
            al = self.alpha[n * d : (n + 1) * d]
            for j in range(d):
                out[j] = out[j] + sum((al[k] * Minv[k][j] for k in range(d)), ZERO) - al[j]
        return tuple(out)


@dataclass(frozen=True)
class StdVectorField:
    """Standard vector field (X, ξ): left-invariant in the group, constant in the fiber."""

    X: LieVector
    xi: LieCovector

    def apply(self, f: PhasePoly) -> PhasePoly:
        out = f.ring.zero()
        for I_, x in enumerate(self.X.coeffs):
            if x:
                out = out + f.left_invariant_derive(I_) * x
        for I_, x in enumerate(self.xi.coeffs):
            if x:
                out = out + f.fiber_derive(I_) * x
        return out


def flow_stdvf(v: StdVectorField, t, pt: PhasePoint, mode: str = "exact"):
    """Flow (a exp(tX), α + tξ).  Exact mode supports only t = 0."""
    if mode == "exact":
        if GaussQ.coerce(t):
            raise InexactError("exp(tX) is not exactly representable; use mode='numeric'")
        return pt
    if mode != "numeric":
        raise ValueError("mode must be 'exact' or 'numeric'")
    import numpy as np
    from scipy.linalg import expm

    alg = v.X.alg
    d = alg.d
    rep = [np.array([[complex(x.to_complex()) for x in row] for row in E]) for E in alg.base.rep]
    tf = complex(GaussQ.coerce(t).to_complex()) if not isinstance(t, (float, complex)) else complex(t)
    a_new = []
    for n, m in enumerate(pt.a):
        A = np.array([[x.to_complex() for x in row] for row in m])
        Xn = sum(v.X.coeffs[n * d + i].to_complex() * rep[i] for i in range(d))
        a_new.append(A @ expm(tf * Xn))
    alpha = [x.to_complex() + tf * y.to_complex() for x, y in zip(pt.alpha, v.xi.coeffs)]
    return a_new, np.array(alpha)


def random_rational(rng: random.Random, bound: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_su2(rng: random.Random, bound: int = 3):
    """Rational unit quaternion via inverse stereographic projection, as a 2x2 matrix."""
    u = [random_rational(rng, bound) for _ in range(3)]
    s = sum(x * x for x in u)
    w = (s - 1) / (s + 1)
    x, y, z = (2 * c / (s + 1) for c in u)
    return quaternion_matrix(w, x, y, z)


def random_torus(rng: random.Random, bound: int = 4, avoid_center: bool = True):
    """diag(w+iz, w-iz) with rational (w,z) on the unit circle."""
    while True:
        t = random_rational(rng, bound)
        w = (1 - t * t) / (1 + t * t)
        z = 2 * t / (1 + t * t)
        if avoid_center and z == 0:
            continue
        return quaternion_matrix(w, 0, 0, z)
