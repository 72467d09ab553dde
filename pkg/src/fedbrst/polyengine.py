"""Gröbner bases, division with cofactors, syzygies and Koszul homotopies over Q(i).

Polynomials here are λ-free: dict packed-key -> GaussQ in the ring layout.
Order: grevlex with variable 0 largest (entries before momenta); for a copy n the
leading monomial of det a_n - 1 is a12 a21, matching PhasePoly.normalize.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import _kernel as kr
from .phasealg import PhasePoly, PhaseRing
from .report import Report
from .scalars import GaussQ, ONE, ZERO

__all__ = [
    "CapExceeded",
    "NotKoszulError",
    "GB",
    "from_phase",
    "to_phase",
    "groebner",
    "moment_ideal",
    "normal_form",
    "divide_with_quotients",
    "syzygies",
    "koszul_syzygies",
    "check_syzygy",
    "det_poly",
    "ModuleGB",
    "module_groebner",
    "KoszulHomotopy",
    "cache_dir",
    "side_condition_report",
]

CACHE_ENV = "FEDBRST_CACHE_DIR"


class CapExceeded(RuntimeError):
    """A degree cap would truncate the computation; carries the partial state."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class NotKoszulError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# --- polynomials over Q(i) ---


def from_phase(f: PhasePoly) -> dict:
    lay = f.ring.lay
    out: dict = {}
    for k, c in f.t.items():
        if lay.lam(k):
            raise ValueError("polyengine works with λ-free polynomials")
        base = k & lay.var_mask
        g = GaussQ(0, c) if lay.iflag(k) else GaussQ(c)
        v = out.get(base, ZERO) + g
        if v:
            out[base] = v
        else:
            out.pop(base, None)
    return out


def to_phase(ring: PhaseRing, f: dict) -> PhasePoly:
    t: dict = {}
    iu = ring.lay.i_unit
    for k, c in f.items():
        if c.re:
            t[k] = c.re
        if c.im:
            t[k + iu] = c.im
    return PhasePoly(ring, t)


class Order:
    """grevlex on packed keys."""

    def __init__(self, lay: kr.Layout):
        self.lay = lay
        self.nv = lay.nvars
        self.M = (1 << (kr.W * self.nv)) - 1
        self.shift = kr.W * self.nv + 8

    def key(self, k: int) -> int:
        return (self.lay.degree(k) << self.shift) + (self.M - k)

    def lead(self, f: dict) -> int:
        return max(f, key=self.key)


def _padd(a: dict, b: dict, s: GaussQ | None = None) -> dict:
    out = dict(a)
    for k, c in b.items():
        if s is not None:
            c = c * s
        v = out.get(k)
        if v is None:
            out[k] = c
        else:
            v = v + c
            if v:
                out[k] = v
            else:
                del out[k]
    return out


def _pmul_term(a: dict, mon: int, c: GaussQ) -> dict:
    return {k + mon: v * c for k, v in a.items()}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            v = out.get(k, ZERO) + ca * cb
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _pdeg(f: dict, lay) -> int:
    return max((lay.degree(k) for k in f), default=-1)


def _lcm(a: int, b: int, nv: int) -> int:
    out = 0
    for v in range(nv):
        sh = kr.W * v
        out |= max((a >> sh) & kr.FMAX, (b >> sh) & kr.FMAX) << sh
    return out


def _coprime(a: int, b: int, nv: int) -> bool:
    for v in range(nv):
        sh = kr.W * v
        if (a >> sh) & kr.FMAX and (b >> sh) & kr.FMAX:
            return False
    return True


# --- Gröbner basis with cofactor tracking ---


@dataclass
class GB:
    """Reduced Gröbner basis; cofactors[j][l] expresses basis[j] = Σ_l cofactors[j][l] gens[l]."""

    ring: PhaseRing
    gens: list
    basis: list
    cofactors: list
    cap: int | None
    complete: bool
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.order = Order(self.ring.lay)
        self.leads = [self.order.lead(g) for g in self.basis]

    def fingerprint(self) -> str:
        return _fingerprint(self.ring, self.gens, self.cap)

    def to_json(self) -> dict:
        enc = lambda f: [[list(self.ring.lay.exps(k)), c.to_json()] for k, c in sorted(f.items())]
        return {
            "N": self.ring.N,
            "lie": self.ring.lie.fingerprint,
            "cap": self.cap,
            "complete": self.complete,
            "gens": [enc(g) for g in self.gens],
            "basis": [enc(g) for g in self.basis],
            "cofactors": [[enc(c) for c in row] for row in self.cofactors],
        }

    @classmethod
    def from_json(cls, ring: PhaseRing, doc: dict) -> "GB":
        dec = lambda rows: {ring.lay.pack(e): GaussQ.from_json(c) for e, c in rows}
        return cls(
            ring,
            [dec(g) for g in doc["gens"]],
            [dec(g) for g in doc["basis"]],
            [[dec(c) for c in row] for row in doc["cofactors"]],
            doc["cap"],
            doc["complete"],
        )


def _fingerprint(ring: PhaseRing, gens: list, cap) -> str:
    enc = [sorted((k, c.to_json()) for k, c in g.items()) for g in gens]
    blob = json.dumps({"N": ring.N, "lie": ring.lie.fingerprint, "cap": cap, "gens": enc}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def cache_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _reduce_full(f: dict, basis: list, leads: list, order: Order, track: bool):
    """Top-down full reduction with the first-divisor rule; returns (remainder, quotients or None)."""
    lay = order.lay
    f = dict(f)
    r: dict = {}
    q = [dict() for _ in basis] if track else None
    lc = [g[l] for g, l in zip(basis, leads)]
    inv = [c.inverse() for c in lc]
    while f:
        m = order.lead(f)
        c = f[m]
        for j, L in enumerate(leads):
            if lay.divides(L, m):
                mon = m - L
                s = -(c * inv[j])
                f = _padd(f, _pmul_term(basis[j], mon, s))
                if track:
                    q[j] = _padd(q[j], {mon: c * inv[j]})
                break
        else:
            r[m] = c
            del f[m]
    return r, q


def groebner(ring: PhaseRing, gens: Sequence, cap: int | None = None, use_cache: bool = True) -> GB:
    """Buchberger with cofactor tracking; S-pairs with lcm degree above ``cap`` are skipped and flagged."""
    gens = [from_phase(g) if isinstance(g, PhasePoly) else dict(g) for g in gens]
    gens = [g for g in gens if g]
    fp = _fingerprint(ring, gens, cap)
    cd = cache_dir() if use_cache else None
    if cd is not None:
        path = cd / f"gb-{fp}.json"
        if path.exists():
            return GB.from_json(ring, json.loads(path.read_text()))
    order = Order(ring.lay)
    nv = ring.lay.nvars
    m = len(gens)
    basis: list = []
    cof: list = []
    leads: list = []

    def unit(l):
        v = [dict() for _ in range(m)]
        v[l] = {0: ONE}
        return v

    def add_elem(f, c):
        lead = order.lead(f)
        s = f[lead].inverse()
        f = {k: v * s for k, v in f.items()}
        c = [{k: v * s for k, v in x.items()} for x in c]
        basis.append(f)
        cof.append(c)
        leads.append(lead)

    for l, g in enumerate(gens):
        r, q = _reduce_full(g, basis, leads, order, True)
        if r:
            c = unit(l)
            for j, qj in enumerate(q):
                if qj:
                    for t in range(m):
                        if cof[j][t]:
                            c[t] = _padd(c[t], _pmul(qj, cof[j][t]), GaussQ(-1))
            add_elem(r, c)
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    skipped = 0
    spolys = 0
    done = set()
    while pairs:
        pairs.sort(key=lambda ij: (order.key(_lcm(leads[ij[0]], leads[ij[1]], nv)), ij))
        i, j = pairs.pop(0)
        done.add((i, j))
        Li, Lj = leads[i], leads[j]
        if _coprime(Li, Lj, nv):
            continue
        L = _lcm(Li, Lj, nv)
        if cap is not None and ring.lay.degree(L) > cap:
            skipped += 1
            continue
        # chain criterion
        if any(
            k not in (i, j)
            and ring.lay.divides(leads[k], L)
            and (min(i, k), max(i, k)) in done
            and (min(j, k), max(j, k)) in done
            for k in range(len(basis))
        ):
            continue
        mi, mj = L - Li, L - Lj
        s = _padd(_pmul_term(basis[i], mi, ONE), _pmul_term(basis[j], mj, GaussQ(-1)))
        sc = [_padd(_pmul_term(cof[i][t], mi, ONE), _pmul_term(cof[j][t], mj, GaussQ(-1))) for t in range(m)]
        spolys += 1
        r, q = _reduce_full(s, basis, leads, order, True)
        if not r:
            continue
        for jj, qj in enumerate(q):
            if qj:
                for t in range(m):
                    if cof[jj][t]:
                        sc[t] = _padd(sc[t], _pmul(qj, cof[jj][t]), GaussQ(-1))
        add_elem(r, sc)
        n = len(basis) - 1
        pairs.extend((k, n) for k in range(n))
    # interreduce
    keep = [j for j in range(len(basis)) if not any(k != j and ring.lay.divides(leads[k], leads[j]) and (leads[k] != leads[j] or k < j) for k in range(len(basis)))]
    basis = [basis[j] for j in keep]
    cof = [cof[j] for j in keep]
    leads = [leads[j] for j in keep]
    for j in range(len(basis)):
        others = [basis[k] for k in range(len(basis)) if k != j]
        oleads = [leads[k] for k in range(len(basis)) if k != j]
        ocof = [cof[k] for k in range(len(basis)) if k != j]
        tail = dict(basis[j])
        lead_c = tail.pop(leads[j])
        r, q = _reduce_full(tail, others, oleads, order, True)
        new = dict(r)
        new[leads[j]] = lead_c
        c = [dict(x) for x in cof[j]]
        for k, qk in enumerate(q):
            if qk:
                for t in range(m):
                    if ocof[k][t]:
                        c[t] = _padd(c[t], _pmul(qk, ocof[k][t]), GaussQ(-1))
        basis[j], cof[j] = new, c
    idx = sorted(range(len(basis)), key=lambda j: order.key(leads[j]))
    gb = GB(ring, gens, [basis[j] for j in idx], [cof[j] for j in idx], cap, skipped == 0,
            {"spolys": spolys, "skipped_pairs": skipped})
    if cd is not None:
        cd.mkdir(parents=True, exist_ok=True)
        tmp = cd / f"gb-{fp}.json.tmp{os.getpid()}"
        tmp.write_text(json.dumps(gb.to_json(), sort_keys=True))
        tmp.replace(cd / f"gb-{fp}.json")
    return gb


def det_poly(ring: PhaseRing, n: int) -> dict:
    u = ring.lay.units
    a = lambda r, c: u[ring.entry_var(n, r, c)]
    return {a(0, 0) + a(1, 1): ONE, a(0, 1) + a(1, 0): GaussQ(-1), 0: GaussQ(-1)}


_IDEAL_CACHE: dict = {}
_IDEAL_LOCK = threading.Lock()


def moment_ideal(ring: PhaseRing, cap: int | None = None) -> GB:
    """Gröbner basis of (J_1..J_d, det a_n - 1); generator order J first, then the det relations."""
    key = (ring.lie.fingerprint, ring.N, cap)
    with _IDEAL_LOCK:
        hit = _IDEAL_CACHE.get(key)
    if hit is not None:
        return hit
    gens = [from_phase(J) for J in ring.moment_components] + [det_poly(ring, n) for n in range(ring.N)]
    gb = groebner(ring, gens, cap)
    with _IDEAL_LOCK:
        return _IDEAL_CACHE.setdefault(key, gb)


def normal_form(f, gb: GB):
    """rest: remainder of f modulo the basis (input PhasePoly or dict; output of the same kind)."""
    if isinstance(f, PhasePoly):
        if f.lam_orders() and max(f.lam_orders()) > 0:
            parts = [to_phase(gb.ring, normal_form(from_phase(f.lam_part(m)), gb)).times_lam(m) for m in f.lam_orders()]
            out = gb.ring.zero()
            for p in parts:
                out = out + p
            return out
        return to_phase(gb.ring, normal_form(from_phase(f), gb))
    r, _ = _reduce_full(f, gb.basis, gb.leads, gb.order, False)
    return r


def divide_with_quotients(f, gb: GB) -> tuple[list, dict]:
    """f = Σ_l q_l gens_l + r with q expressed against the original generators."""
    fd = from_phase(f) if isinstance(f, PhasePoly) else f
    r, q = _reduce_full(fd, gb.basis, gb.leads, gb.order, True)
    m = len(gb.gens)
    out = [dict() for _ in range(m)]
    for j, qj in enumerate(q):
        if qj:
            for t in range(m):
                if gb.cofactors[j][t]:
                    out[t] = _padd(out[t], _pmul(qj, gb.cofactors[j][t]))
    return out, r


# --- syzygies ---


def koszul_syzygies(gens: list) -> list:
    """e_j g_k - e_k g_j for j < k."""
    m = len(gens)
    out = []
    for j in range(m):
        for k in range(j + 1, m):
            v = [dict() for _ in range(m)]
            v[j] = dict(gens[k])
            v[k] = {kk: -c for kk, c in gens[j].items()}
            out.append(v)
    return out


def syzygies(gb: GB) -> list:
    """Generators of the syzygy module of gb.gens (Schreyer S-pair syzygies plus the I - BA columns)."""
    ring, order = gb.ring, gb.order
    nv = ring.lay.nvars
    n, m = len(gb.basis), len(gb.gens)
    A = gb.cofactors  # basis_j = Σ_l A[j][l] gens_l
    out = []

    def to_gens(svec):  # syzygy on basis -> syzygy on gens
        v = [dict() for _ in range(m)]
        for j, s in enumerate(svec):
            if s:
                for l in range(m):
                    if A[j][l]:
                        v[l] = _padd(v[l], _pmul(s, A[j][l]))
        return v

    for i in range(n):
        for j in range(i + 1, n):
            Li, Lj = gb.leads[i], gb.leads[j]
            L = _lcm(Li, Lj, nv)
            if gb.cap is not None and ring.lay.degree(L) > gb.cap:
                continue
            mi, mj = L - Li, L - Lj
            s = _padd(_pmul_term(gb.basis[i], mi, ONE), _pmul_term(gb.basis[j], mj, GaussQ(-1)))
            r, q = _reduce_full(s, gb.basis, gb.leads, order, True)
            if r:
                raise CapExceeded("S-polynomial does not reduce to zero: basis incomplete")
            svec = [dict() for _ in range(n)]
            svec[i] = {mi: ONE}
            svec[j] = {mj: GaussQ(-1)}
            for k, qk in enumerate(q):
                if qk:
                    svec[k] = _padd(svec[k], qk, GaussQ(-1))
            v = to_gens(svec)
            if any(v):
                out.append(v)
    # gens_l - Σ_j B[l][j] basis_j = 0 rewritten on gens
    for l in range(m):
        q, r = _reduce_full(gb.gens[l], gb.basis, gb.leads, order, True)[::-1]
        v = to_gens(q)
        v[l] = _padd(v[l], {0: GaussQ(-1)})
        if any(v):
            out.append([{k: -c for k, c in x.items()} for x in v])
    return out


def check_syzygy(gens: list, s: list, gb: GB | None = None) -> bool:
    acc: dict = {}
    for g, c in zip(gens, s):
        if c:
            acc = _padd(acc, _pmul(g, c))
    if gb is not None:
        acc = normal_form(acc, gb)
    return not acc


# --- module Gröbner bases (position-over-nothing: TOP order) ---


class ModuleGB:
    """Gröbner basis of a submodule of R^m (term-over-position), optionally tracking generator cofactors."""

    def __init__(self, ring: PhaseRing, gens: list, cap: int | None = None, track: bool = True):
        self.ring = ring
        self.order = Order(ring.lay)
        self.m = len(gens[0]) if gens else 0
        self.gens = [self._vec(g) for g in gens]
        self.cap = cap
        self.track = track
        self.complete = True
        self._build()

    @staticmethod
    def _vec(v) -> dict:
        """list of polys -> dict (component, key) -> coeff"""
        if isinstance(v, dict):
            return dict(v)
        out = {}
        for comp, p in enumerate(v):
            for k, c in p.items():
                out[(comp, k)] = c
        return out

    def _key(self, t):
        comp, k = t
        return (self.order.key(k), -comp)

    def lead(self, v: dict):
        return max(v, key=self._key)

    def _divides(self, a, b) -> bool:
        return a[0] == b[0] and self.ring.lay.divides(a[1], b[1])

    def _reduce(self, v: dict, track: bool):
        v = dict(v)
        r = {}
        q = [dict() for _ in self.basis] if track else None
        while v:
            t = self.lead(v)
            c = v[t]
            for j, L in enumerate(self.leads):
                if self._divides(L, t):
                    mon = t[1] - L[1]
                    s = c * self.inv[j]
                    for (comp, k), cc in self.basis[j].items():
                        key = (comp, k + mon)
                        val = v.get(key, ZERO) - cc * s
                        if val:
                            v[key] = val
                        else:
                            v.pop(key, None)
                    if track:
                        q[j] = _padd(q[j], {mon: s})
                    break
            else:
                r[t] = c
                del v[t]
        return r, q

    def _build(self):
        lay = self.ring.lay
        nv = lay.nvars
        ng = len(self.gens)
        self.basis, self.cof, self.leads, self.inv = [], [], [], []

        def add(v, c):
            L = self.lead(v)
            s = v[L].inverse()
            self.basis.append({k: x * s for k, x in v.items()})
            self.cof.append([{k: x * s for k, x in p.items()} for p in c] if self.track else None)
            self.leads.append(L)
            self.inv.append(ONE)

        def fold(c, q):
            if not self.track:
                return c
            for j, qj in enumerate(q):
                if qj:
                    for t in range(ng):
                        if self.cof[j][t]:
                            c[t] = _padd(c[t], _pmul(qj, self.cof[j][t]), GaussQ(-1))
            return c

        for l, g in enumerate(self.gens):
            r, q = self._reduce(g, self.track)
            if r:
                c = [dict() for _ in range(ng)] if self.track else None
                if self.track:
                    c[l] = {0: ONE}
                    c = fold(c, q)
                add(r, c)
        pairs = [(i, j) for j in range(len(self.basis)) for i in range(j) if self.leads[i][0] == self.leads[j][0]]
        while pairs:
            pairs.sort(key=lambda ij: (self.order.key(_lcm(self.leads[ij[0]][1], self.leads[ij[1]][1], nv)), ij))
            i, j = pairs.pop(0)
            Li, Lj = self.leads[i], self.leads[j]
            L = _lcm(Li[1], Lj[1], nv)
            if self.cap is not None and lay.degree(L) > self.cap:
                self.complete = False
                continue
            mi, mj = L - Li[1], L - Lj[1]
            s = {}
            for (comp, k), c in self.basis[i].items():
                s[(comp, k + mi)] = c
            for (comp, k), c in self.basis[j].items():
                key = (comp, k + mj)
                val = s.get(key, ZERO) - c
                if val:
                    s[key] = val
                else:
                    s.pop(key, None)
            r, q = self._reduce(s, self.track)
            if not r:
                continue
            c = None
            if self.track:
                c = [_padd(_pmul_term(self.cof[i][t], mi, ONE), _pmul_term(self.cof[j][t], mj, GaussQ(-1))) for t in range(ng)]
                c = fold(c, q)
            add(r, c)
            n = len(self.basis) - 1
            pairs.extend((k, n) for k in range(n) if self.leads[k][0] == self.leads[n][0])

    def reduce(self, v) -> dict:
        r, _ = self._reduce(self._vec(v), False)
        return r

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def express(self, v) -> list | None:
        """Cofactors c with v = Σ c_t gens_t, or None if v is not in the module."""
        if not self.track:
            raise ValueError("module basis built without tracking")
        r, q = self._reduce(self._vec(v), True)
        if r:
            return None
        ng = len(self.gens)
        out = [dict() for _ in range(ng)]
        for j, qj in enumerate(q):
            if qj:
                for t in range(ng):
                    if self.cof[j][t]:
                        out[t] = _padd(out[t], _pmul(qj, self.cof[j][t]))
        return out


def module_groebner(ring, gens, cap=None, track=True) -> ModuleGB:
    return ModuleGB(ring, gens, cap, track)


# --- Koszul homotopies ---


class KoszulHomotopy:
    """ext, rest, h_0 and h_1 for the Koszul complex of J over R = Q(i)[a,p]/(det - 1).

    K_1 elements are lists (q_1..q_d) meaning Σ q_l E_l, K_2 elements dicts {(j,k): c} with j < k.
    Convention: ∂h_0 + ext∘rest = id on K_0 and ∂h_1 + h_0∂ = id on K_1.
    """

    def __init__(self, ring: PhaseRing, cap: int | None = None):
        self.ring = ring
        self.cap = cap
        self.gb = moment_ideal(ring, None)
        self.d = ring.d
        self.J = [from_phase(J) for J in ring.moment_components]
        self._kmod = None

    # degree 0
    def rest(self, f: PhasePoly) -> PhasePoly:
        return normal_form(f, self.gb)

    def ext(self, f: PhasePoly) -> PhasePoly:
        return f

    def _window(self, f: dict):
        if self.cap is not None and _pdeg(f, self.ring.lay) > self.cap:
            raise CapExceeded(f"degree {_pdeg(f, self.ring.lay)} exceeds the window {self.cap}")

    def h0(self, f: PhasePoly) -> list:
        """Σ q_l E_l with Σ q_l J_l = f - rest(f) in R (det cofactors dropped, quotients det-normalized)."""
        if f.lam_orders() and max(f.lam_orders()) > 0:
            out = [self.ring.zero() for _ in range(self.d)]
            for m in f.lam_orders():
                part = self.h0(f.lam_part(m))
                out = [o + p.times_lam(m) for o, p in zip(out, part)]
            return out
        fd = from_phase(f)
        self._window(fd)
        q, _ = divide_with_quotients(fd, self.gb)
        return [to_phase(self.ring, q[l]).normalize() for l in range(self.d)]

    def d1(self, v: Sequence[PhasePoly]) -> PhasePoly:
        out = self.ring.zero()
        for l, q in enumerate(v):
            out = out + q * self.ring.moment_components[l]
        return out

    def d2(self, w: dict) -> list:
        Jc = self.ring.moment_components
        out = [self.ring.zero() for _ in range(self.d)]
        for (j, k), c in w.items():
            # ∂(E_j ∧ E_k) = J_j E_k - J_k E_j
            out[k] = out[k] + c * Jc[j]
            out[j] = out[j] - c * Jc[k]
        return out

    def koszul_module(self) -> ModuleGB:
        if self._kmod is None:
            gens = koszul_syzygies(self.J)
            for n in range(self.ring.N):
                dp = det_poly(self.ring, n)
                for l in range(self.d):
                    v = [dict() for _ in range(self.d)]
                    v[l] = dict(dp)
                    gens.append(v)
            self._kmod = ModuleGB(self.ring, gens, self.cap, True)
        return self._kmod

    def h1(self, v: Sequence[PhasePoly]) -> dict:
        """w = v - h_0(∂v) is a syzygy; write it through Koszul syzygies (raises NotKoszulError otherwise)."""
        hv = self.h0(self.d1(v).normalize())
        w = [(a - b).normalize() for a, b in zip(v, hv)]
        if all(x.is_zero() for x in w):
            return {}
        wd = [from_phase(x) for x in w]
        c = self.koszul_module().express(wd)
        if c is None:
            raise NotKoszulError("syzygy outside the Koszul module", witness=[x.dumps() for x in w])
        out: dict = {}
        idx = 0
        for j in range(self.d):
            for k in range(j + 1, self.d):
                if c[idx]:
                    out[(j, k)] = to_phase(self.ring, c[idx]).normalize()
                idx += 1
        return out

    def homotopy_check(self, f: PhasePoly) -> Report:
        """∂h_0(f) + ext(rest(f)) = f in R."""
        lhs = (self.d1(self.h0(f)) + self.ext(self.rest(f)) - f).normalize()
        if lhs.is_zero():
            return Report("koszul_homotopy_0", True)
        return Report("koszul_homotopy_0", False, {"residual": lhs.dumps()})

    def centralizer_syzygy(self, n: int = 0) -> list:
        """s = coordinates of a_n - ½ tr(a_n) in the basis E_k; J_s = (det a_n - 1)⟨p_n, s⟩ for N = 1."""
        from .liealg import trace_dual

        ring = self.ring
        td = trace_dual(ring.lie)
        A = ring.entry_matrix(n)
        lay = ring.lay
        out = []
        for j in range(self.d):
            acc: dict = {}
            for l in range(self.d):
                E = ring.lie.rep[l]
                # tr(E_l (a - ½ tr a)) = tr(E_l a) since tr E_l = 0
                tr: dict = {}
                for r in range(2):
                    for c in range(2):
                        if E[r][c]:
                            tr = _padd(tr, from_phase(PhasePoly(ring, A[c][r])), E[r][c])
                acc = _padd(acc, tr, td.Tinv[j][l])
            out.append(acc)
        return out

    def classify_syzygy(self, comp: list) -> str:
        """'koszul' (explicit module membership), 'outside_ideal' (some component not in I, hence not Koszul),
        'non_koszul' (complete module basis, nonzero remainder) or 'undecided' (truncated module basis)."""
        for c in comp:
            if c and normal_form(c, self.gb):
                return "outside_ideal"
        kmod = self.koszul_module()
        if kmod.contains(comp):
            return "koszul"
        return "non_koszul" if kmod.complete else "undecided"

    def is_syzygy(self, comp: list) -> bool:
        acc: dict = {}
        for g, c in zip(self.J, comp):
            if c:
                acc = _padd(acc, _pmul(g, c))
        return not normal_form_det(self.ring, acc)

    def syzygy_report(self, max_deg: int, extra: Sequence | None = None) -> Report:
        """Every syzygy generator of (J_1..J_d) in R of component degree <= max_deg lies in the Koszul module."""
        lay = self.ring.lay
        d = self.d
        cands = [(s[:d], False) for s in syzygies(self.gb)] + [(list(e), True) for e in (extra or [])]
        verdicts: dict = {}
        bad = []
        checked = skipped = 0
        for s, offered in cands:
            comp = [normal_form_det(self.ring, s[l]) for l in range(d)]
            if not any(comp):
                continue
            # Σ s_l J_l = 0 in R, i.e. modulo det - 1 only (modulo I every vector passes)
            if not self.is_syzygy(comp):
                if offered:
                    skipped += 1
                    continue
                raise ArithmeticError("syzygy generator fails Σ s_l J_l = 0")
            deg = max(_pdeg(c, lay) for c in comp if c)
            if deg > max_deg:
                continue
            checked += 1
            v = self.classify_syzygy(comp)
            verdicts[v] = verdicts.get(v, 0) + 1
            if v != "koszul":
                bad.append({"verdict": v, "degree": deg, "components": [to_phase(self.ring, c).dumps() for c in comp]})
        bad.sort(key=lambda b: (b["degree"], b["components"]))
        return Report(
            "acyclicity_syzygies",
            not bad,
            bad[:3] if bad else None,
            {"generators_checked": checked, "max_degree": max_deg, "verdicts": verdicts, "extra_not_syzygies": skipped},
        )


def normal_form_det(ring: PhaseRing, f: dict) -> dict:
    return from_phase(to_phase(ring, f).normalize())


def side_condition_report(kh: KoszulHomotopy, samples: Sequence[PhasePoly]) -> Report:
    """Flags for h_0∘ext = 0 and h_1∘h_0 = 0 on samples, before and after the standard correction.

    Correction: h_0' = h_0 ∘ normalize ∘ (id - ext∘rest), i.e. divide the det-normal representative of
    the class, so that h_0' is a map on R. On raw representatives h_0 picks up det cofactors and
    h_0 f - h_0 ∂h_0 f can be a non-Koszul syzygy, where h_1 is undefined (flag None).
    rest∘h = 0 holds trivially since h lands in degree 1.
    """
    ring = kh.ring

    def flags(h0):
        hi = all(all(x.is_zero() for x in h0(kh.ext(kh.rest(f)))) for f in samples)
        hh = True
        for f in samples:
            try:
                if kh.h1(h0(f)):
                    hh = False
            except NotKoszulError:
                hh = None
                break
        return {"h0_ext": hi, "h1_h0": hh}

    def h0_fixed(f):
        return kh.h0((f.normalize() - kh.ext(kh.rest(f))).normalize())

    before = flags(kh.h0)
    after = before if before["h0_ext"] and before["h1_h0"] is True else flags(h0_fixed)
    ok = after["h0_ext"] and after["h1_h0"] is True
    return Report("koszul_side_conditions", ok, None if ok else after, {"before": before, "after": after, "samples": len(samples)})
