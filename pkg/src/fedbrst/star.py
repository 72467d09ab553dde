"""Standard-ordered star product on T*G^N.

B_m is assembled from the BCH series: its symbol is the coefficient of t^m in
exp(Σ_{r≥2} t^{r-1} α(H_r(X,Y))), a polynomial in p and in commuting symbols
X^I, Y^J which stand for ∂/∂p_I on the first and second argument.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import _kernel as kr
from .liealg import kr_coefficient, kr_index_set, kr_word
from .phasealg import PhasePoly, PhaseRing
from .report import Report
from .scalars import GaussQ
from .sympgeo import poisson

__all__ = [
    "BiDiffOp",
    "build_bm",
    "bm_closed_form",
    "bm_symbol",
    "star",
    "commutator",
    "rho",
    "RhoOperator",
    "check_invariance",
    "check_strong_invariance",
    "MAX_M",
]

MAX_M = 4


@dataclass(frozen=True)
class BiDiffOp:
    """Σ c(p) ∂^α(·) ∂^β(·); terms are (α, β, coefficient terms in the ring layout)."""

    ring_key: tuple
    terms: tuple  # ((alpha tuple, beta tuple, coeff dict), ...)

    def apply(self, f: PhasePoly, g: PhasePoly) -> PhasePoly:
        ring = f.ring
        fd, gd = _DerivTable(f), _DerivTable(g)
        out: dict = {}
        for alpha, beta, c in self.terms:
            F = fd.get(alpha)
            if not F:
                continue
            G = gd.get(beta)
            if not G:
                continue
            kr.add_into(out, kr.mul(kr.mul(F, G, ring.lay, ring.K), c, ring.lay, ring.K))
        return PhasePoly(ring, out)

    def term_list(self, ring: PhaseRing) -> list[dict]:
        rows = []
        for alpha, beta, c in self.terms:
            rows.append({"slot1": list(alpha), "slot2": list(beta), "coeff": PhasePoly(ring, dict(c)).to_json()["terms"]})
        rows.sort(key=lambda r: (r["slot1"], r["slot2"]))
        return rows

    def normalized(self) -> dict:
        return {(a, b): frozenset(c.items()) for a, b, c in self.terms}

    def __eq__(self, o):
        return isinstance(o, BiDiffOp) and self.normalized() == o.normalized()

    def __hash__(self):
        return hash(frozenset(self.normalized().items()))


class _DerivTable:
    """Memoized fiber derivatives ∂^α h of one polynomial."""

    def __init__(self, h: PhasePoly):
        self.h = h
        self.ring = h.ring
        self.D = h.ring.alg.dim
        self.memo: dict = {(0,) * self.D: h.t}
        self.maxdeg = h.fiber_degree()

    def get(self, alpha: tuple) -> dict:
        r = self.memo.get(alpha)
        if r is not None:
            return r
        if sum(alpha) > self.maxdeg:
            self.memo[alpha] = {}
            return {}
        I_ = next(i for i, a in enumerate(alpha) if a)
        prev = alpha[:I_] + (alpha[I_] - 1,) + alpha[I_ + 1 :]
        base = self.get(prev)
        r = kr.derive(base, self.ring.p_var(I_), self.ring.lay) if base else {}
        self.memo[alpha] = r
        return r


# --- symbols ---


class _SymbolSpace:
    """Polynomials in X^I (vars 0..D-1), Y^I (D..2D-1), p_I (2D..3D-1)."""

    def __init__(self, ring: PhaseRing):
        self.D = ring.alg.dim
        self.lay = kr.Layout(3 * self.D)
        self.bt = ring.alg.bracket_table

    def X(self, I_):
        return self.lay.units[I_]

    def Y(self, I_):
        return self.lay.units[self.D + I_]

    def p(self, I_):
        return self.lay.units[2 * self.D + I_]

    def ad(self, which: str, v: list) -> list:
        """ad(X) or ad(Y) applied to a vector with symbol-polynomial coefficients."""
        D, lay = self.D, self.lay
        out = [dict() for _ in range(D)]
        for I_ in range(D):
            u = self.X(I_) if which == "X" else self.Y(I_)
            for J in range(D):
                if not v[J] or not self.bt[I_][J]:
                    continue
                sh = kr.shift(v[J], u, lay)
                for K, c in self.bt[I_][J]:
                    kr.add_into(out[K], sh, c)
        return out


def _alpha_H(space: _SymbolSpace, r: int) -> dict:
    """α(H_r(X,Y)) as a polynomial in (X, Y, p), via K_r enumeration."""
    D, lay = space.D, space.lay
    Yvec = [{space.Y(J): mpq(1)} for J in range(D)]
    memo: dict = {(): Yvec}

    def word_apply(word: tuple) -> list:
        r_ = memo.get(word)
        if r_ is None:
            inner = word_apply(word[1:])
            r_ = space.ad(word[0], inner) if any(inner) else inner
            memo[word] = r_
        return r_

    H = [dict() for _ in range(D)]
    for triple in kr_index_set(r):
        vec = word_apply(kr_word(triple))
        c = kr_coefficient(triple)
        for K in range(D):
            if vec[K]:
                kr.add_into(H[K], vec[K], c)
    out: dict = {}
    for K in range(D):
        if H[K]:
            kr.add_into(out, kr.shift(H[K], space.p(K), lay))
    return out


def _partitions_weighted(m: int, max_part: int | None = None):
    """Sequences n_r (r >= 2) with Σ (r-1) n_r = m, as dicts {r: n_r}."""
    if m == 0:
        yield {}
        return
    max_part = m if max_part is None else max_part
    for s in range(min(m, max_part), 0, -1):  # s = r - 1
        for cnt in range(1, m // s + 1):
            for rest in _partitions_weighted(m - s * cnt, s - 1):
                d = dict(rest)
                d[s + 1] = cnt
                yield d


_SYMBOL_CACHE: dict = {}
_BM_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def bm_symbol(ring: PhaseRing, m: int) -> tuple[_SymbolSpace, dict]:
    """Σ*_n Π_r α(H_r)^{n_r} / n_r!  (the factor B_n/|n|! equals Π 1/n_r!)."""
    key = (ring.lie.fingerprint, ring.N, m)
    with _CACHE_LOCK:
        hit = _SYMBOL_CACHE.get(key)
    if hit is not None:
        return hit
    space = _SymbolSpace(ring)
    A = {r: _alpha_H(space, r) for r in range(2, m + 2)}
    total: dict = {}
    for ns in _partitions_weighted(m):
        prod = {0: mpq(1)}
        den = 1
        for r, n in ns.items():
            prod = kr.mul(prod, kr.power(A[r], n, space.lay, None), space.lay, None)
            den *= factorial(n)
        kr.add_into(total, prod, mpq(1, den))
    with _CACHE_LOCK:
        _SYMBOL_CACHE.setdefault(key, (space, total))
        return _SYMBOL_CACHE[key]


def _symbol_to_op(ring: PhaseRing, space: _SymbolSpace, sym: dict) -> BiDiffOp:
    D = space.D
    grouped: dict = {}
    lay = ring.lay
    for k, c in sym.items():
        ex = space.lay.exps(k)
        alpha, beta, gamma = ex[:D], ex[D : 2 * D], ex[2 * D :]
        ck = lay.pack([0] * ring.n_entry + list(gamma))
        kr.add_into(grouped.setdefault((alpha, beta), {}), {ck: c})
    terms = tuple(sorted(((a, b, c) for (a, b), c in grouped.items() if c), key=lambda x: (x[0], x[1])))
    return BiDiffOp((ring.lie.fingerprint, ring.N), terms)


def build_bm(ring: PhaseRing, m: int) -> BiDiffOp:
    """B_m from the BCH enumeration; cached per (Lie data, N, m)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > MAX_M:
        raise ValueError(f"resource cap exceeded: m = {m} > {MAX_M}")
    key = (ring.lie.fingerprint, ring.N, m)
    with _CACHE_LOCK:
        hit = _BM_CACHE.get(key)
    if hit is not None:
        return hit
    space, sym = bm_symbol(ring, m)
    op = _symbol_to_op(ring, space, sym)
    with _CACHE_LOCK:
        return _BM_CACHE.setdefault(key, op)


def bm_closed_form(ring: PhaseRing, m: int, b2_sign: int = 1) -> BiDiffOp:
    """Closed forms for m <= 2.

    B_0 = μ, B_1 = ½ [E_I,E_J]~ ∂_I ⊗ ∂_J and, for B_2,
    (1/12)[E_I,[E_J,E_K]]~ (∂_I∂_J ⊗ ∂_K + b2_sign ∂_K ⊗ ∂_I∂_J) + (1/8)[E_I,E_J]~[E_K,E_L]~ ∂_I∂_K ⊗ ∂_J∂_L.
    ``b2_sign = -1`` gives the alternative reading of the mixed term (negative control).
    """
    space = _SymbolSpace(ring)
    D, lay, bt = space.D, space.lay, space.bt
    if m == 0:
        return _symbol_to_op(ring, space, {0: mpq(1)})

    def taut2(I_, J):  # [E_I,E_J]~ as p-polynomial
        out: dict = {}
        for K, c in bt[I_][J]:
            kr.add_into(out, {space.p(K): c})
        return out

    def taut3(I_, J, K):  # [E_I,[E_J,E_K]]~
        out: dict = {}
        for L, c in bt[J][K]:
            for M, c2 in bt[I_][L]:
                kr.add_into(out, {space.p(M): c * c2})
        return out

    sym: dict = {}
    if m == 1:
        for I_, J in itertools.product(range(D), repeat=2):
            t = taut2(I_, J)
            if t:
                kr.add_into(sym, kr.shift(t, space.X(I_) + space.Y(J), lay), mpq(1, 2))
        return _symbol_to_op(ring, space, sym)
    if m == 2:
        for I_, J, K in itertools.product(range(D), repeat=3):
            t = taut3(I_, J, K)
            if not t:
                continue
            kr.add_into(sym, kr.shift(t, space.X(I_) + space.X(J) + space.Y(K), lay), mpq(1, 12))
            kr.add_into(sym, kr.shift(t, space.Y(I_) + space.Y(J) + space.X(K), lay), mpq(b2_sign, 12))
        for I_, J, K, L in itertools.product(range(D), repeat=4):
            t1, t2 = taut2(I_, J), taut2(K, L)
            if t1 and t2:
                mon = space.X(I_) + space.X(K) + space.Y(J) + space.Y(L)
                kr.add_into(sym, kr.shift(kr.mul(t1, t2, lay, None), mon, lay), mpq(1, 8))
        return _symbol_to_op(ring, space, sym)
    raise ValueError("closed forms are available for m <= 2 only")


# --- the product ---


def _lam_over_i(m: int, lay: kr.Layout) -> tuple[int, mpq]:
    """(λ/i)^m = (-i)^m λ^m as (key delta, sign)."""
    delta = m * lay.lam_unit + (lay.i_unit if m % 2 else 0)
    sign = mpq((1, -1, -1, 1)[m % 4])
    return delta, sign


def _multisets(D: int, n: int):
    """Multi-indices μ with |μ| = n as exponent tuples."""
    for combo in itertools.combinations_with_replacement(range(D), n):
        mu = [0] * D
        for c in combo:
            mu[c] += 1
        yield tuple(mu), combo


def _distinct_orderings(combo: tuple) -> set:
    return set(itertools.permutations(combo))


class _EWords:
    """Memoized E_{w1}(E_{w2}(... E_{wn} g)) for words w."""

    def __init__(self, g: PhasePoly):
        self.g = g
        self.memo: dict = {(): g.t}
        self.tabs = g.ring._E_tables
        self.lay = g.ring.lay

    def get(self, word: tuple) -> dict:
        r = self.memo.get(word)
        if r is None:
            inner = self.get(word[1:])
            r = kr.linear_derivation(inner, self.tabs[word[0]], self.lay) if inner else {}
            self.memo[word] = r
        return r

    def symmetrized(self, combo: tuple) -> dict:
        out: dict = {}
        for w in _distinct_orderings(combo):
            kr.add_into(out, self.get(w))
        return out


def star(f: PhasePoly, g: PhasePoly, ops: Sequence[BiDiffOp] | None = None) -> PhasePoly:
    """f ⋆ g = Σ_m (λ/i)^m Σ_{n≤m} (1/n!) B_{m-n}(∂_{J1..Jn} f, E_{J1}..E_{Jn} g), truncated at λ^K.

    ``ops`` replaces the operators B_0..B_K (used for negative controls).
    """
    f._check(g.ring)
    ring = f.ring
    K, lay, D = ring.K, ring.lay, ring.alg.dim
    if not f.t or not g.t:
        return ring.zero()
    lam_f = min(lay.lam(k) for k in f.t)
    lam_g = min(lay.lam(k) for k in g.t)
    budget = K - lam_f - lam_g
    if budget < 0:
        return ring.zero()
    if ops is None:
        ops = [build_bm(ring, m) for m in range(min(budget, MAX_M) + 1)]
    fd = _DerivTable(f)
    ew = _EWords(g)
    degf, degg = f.fiber_degree(), g.fiber_degree()
    out: dict = {}
    for n in range(0, min(budget, degf) + 1):
        inv_nfact = mpq(1, factorial(n))
        for mu, combo in _multisets(D, n):
            Fmu = fd.get(mu)
            if not Fmu:
                continue
            S = ew.symmetrized(combo) if n else g.t
            if not S:
                continue
            sd = _DerivTable(PhasePoly(ring, S))
            for k in range(0, budget - n + 1):
                if k > degf - n + degg or k >= len(ops):
                    break
                m = n + k
                delta, sign = _lam_over_i(m, lay)
                acc: dict = {}
                for alpha, beta, c in ops[k].terms:
                    a2 = tuple(x + y for x, y in zip(alpha, mu))
                    F = fd.get(a2)
                    if not F:
                        continue
                    G = sd.get(beta)
                    if not G:
                        continue
                    kr.add_into(acc, kr.mul(kr.mul(F, G, lay, K - m), c, lay, K - m))
                if acc:
                    kr.add_into(out, kr.shift(acc, delta, lay, K), sign * inv_nfact)
    return PhasePoly(ring, out)


def commutator(f: PhasePoly, g: PhasePoly) -> PhasePoly:
    return star(f, g) - star(g, f)


# --- standard-order representation ---


class RhoOperator:
    """ρ(f) = Σ (λ/i)^l f^{J1..Jl} E_{J1}..E_{Jl} with symmetric ordering, acting on entry polynomials."""

    def __init__(self, f: PhasePoly):
        self.f = f
        ring = f.ring
        lay = ring.lay
        pmask = 0
        for v in ring.p_vars:
            pmask |= kr.FMAX << (kr.W * v)
        self.parts: dict = {}
        for k, c in f.t.items():
            pk = k & pmask
            self.parts.setdefault(pk, {})[k - pk] = c

    def apply(self, psi: PhasePoly) -> PhasePoly:
        ring = psi.ring
        lay, K = ring.lay, ring.K
        if psi.fiber_degree() > 0:
            raise ValueError("ρ acts on functions of the base (no momentum variables)")
        ew = _EWords(psi)
        out: dict = {}
        for pk, phi in self.parts.items():
            mu = tuple(lay.exp(pk, v) for v in ring.p_vars)
            l = sum(mu)
            combo = tuple(I_ for I_, e in enumerate(mu) for _ in range(e))
            S = ew.symmetrized(combo) if l else psi.t
            if not S:
                continue
            mufact = 1
            for e in mu:
                mufact *= factorial(e)
            delta, sign = _lam_over_i(l, lay)
            term = kr.mul(phi, S, lay, K)
            kr.add_into(out, kr.shift(term, delta, lay, K), sign * mpq(mufact, factorial(l)))
        return PhasePoly(ring, out)

    def __call__(self, psi: PhasePoly) -> PhasePoly:
        return self.apply(psi)


def rho(f: PhasePoly) -> RhoOperator:
    return RhoOperator(f)


# --- invariance reports ---


def check_invariance(g, f: PhasePoly, h: PhasePoly, ops: Sequence[BiDiffOp] | None = None) -> Report:
    """L_g^*(f ⋆ h) = L_g^* f ⋆ L_g^* h, compared modulo det - 1."""
    ring = f.ring
    lhs = ring.group_action(g, star(f, h, ops))
    rhs = star(ring.group_action(g, f), ring.group_action(g, h), ops)
    diff = (lhs - rhs).normalize()
    if diff.is_zero():
        return Report("star_invariance", True)
    return Report("star_invariance", False, {"residual": diff.dumps(), "lambda_orders": diff.lam_orders()})


def check_strong_invariance(B: Sequence, f: PhasePoly) -> Report:
    """Residual (J_B ⋆ f - f ⋆ J_B) - iλ{f, J_B}; covariance alone does not force it to vanish."""
    ring = f.ring
    JB = ring.moment_component(B)
    first = poisson(f, JB).times_lam(1).times_i()
    res = (commutator(JB, f) - first).normalize()
    return Report(
        "strong_invariance_residual",
        True,
        {"residual_zero": res.is_zero(), "lambda_orders": res.lam_orders()},
        {"residual": res.dumps()},
    )
