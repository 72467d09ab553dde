"""Classical and quantum reduction at bounded degree.

Degree-0 objects are plain PhasePoly (the ghost-free, antighost-free part of the BRST algebra).
ext is the inclusion of Gröbner normal forms, rest the normal form, h_0 the division quotients.
The deformed restriction is 𝒃rest = rest ∘ (id + (𝒑∂_1 - ∂_1) h_0)^{-1}, evaluated as a finite
Neumann sum since (𝒑∂_1 - ∂_1) h_0 raises the λ-order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .brst import BRST, GhostPoly
from .phasealg import PhasePoly, PhaseRing
from .polyengine import CapExceeded, KoszulHomotopy, to_phase
from .report import Report
from .star import star

__all__ = [
    "ReduceConfig",
    "Reducer",
    "WindowError",
    "NonInvariantError",
    "NonCocycleError",
    "LOCKED_SIGN",
    "invariant_generators",
    "invariant_products",
]

# λ¹ of (f ~⋆ g - g ~⋆ f) equals LOCKED_SIGN · i · {f, g}_{M//G}
LOCKED_SIGN = 1


class WindowError(CapExceeded):
    pass


class NonInvariantError(ValueError):
    pass


class NonCocycleError(ValueError):
    pass


@dataclass(frozen=True)
class ReduceConfig:
    N: int = 1
    K: int = 2
    deg_cap: int = 6
    check_inputs: bool = True


def _deg(f: PhasePoly) -> int:
    return max(f.total_degree(), 0)


@dataclass
class Reducer:
    ring: PhaseRing
    cap: int | None = 6
    kh: KoszulHomotopy = field(init=False)
    brst: BRST = field(init=False)
    max_degree_seen: int = field(init=False, default=0)

    def __post_init__(self):
        self.kh = KoszulHomotopy(self.ring, self.cap)
        self.brst = BRST(self.ring)

    @classmethod
    def from_config(cls, cfg: ReduceConfig) -> "Reducer":
        return cls(PhaseRing(cfg.N, cfg.K), cfg.deg_cap)

    @property
    def K(self) -> int:
        return self.ring.K

    def window(self) -> dict:
        return {"deg_cap": self.cap, "max_degree_seen": self.max_degree_seen, "K": self.K}

    def _see(self, f: PhasePoly):
        if not f.t:
            return
        dg = _deg(f)
        self.max_degree_seen = max(self.max_degree_seen, dg)
        if self.cap is not None and dg > self.cap:
            raise WindowError(f"degree {dg} exceeds the window {self.cap}")

    # --- classical retract in degree 0 ---
    def rest(self, f: PhasePoly) -> PhasePoly:
        return self.kh.rest(f)

    def ext(self, f: PhasePoly) -> PhasePoly:
        return self.kh.ext(f)

    def h0(self, f: PhasePoly) -> list:
        self._see(f)
        try:
            return self.kh.h0(f)
        except CapExceeded as e:
            raise WindowError(str(e)) from e

    # --- deformation ---
    def qkoszul1(self, q: list) -> PhasePoly:
        """𝒑∂_1(Σ q_l E_l) = Σ q_l ⋆ J_l."""
        out = self.ring.zero()
        for l, x in enumerate(q):
            if x.t:
                out = out + star(x, self.ring.moment_components[l])
        return out

    def t_h0(self, f: PhasePoly) -> PhasePoly:
        """(𝒑∂_1 - ∂_1) h_0 f."""
        q = self.h0(f)
        return (self.qkoszul1(q) - self.kh.d1(q)).normalize()

    def _neumann(self, x: PhasePoly) -> PhasePoly:
        out, term = x, x
        for _ in range(self.K):
            term = -self.t_h0(term)
            if term.is_zero():
                break
            out = out + term
        return out.truncate(self.K)

    def deformed_rest(self, x) -> PhasePoly:
        if isinstance(x, GhostPoly):
            bad = [m for m, _ in x.terms if m]
            if bad:
                raise ValueError("deformed_rest expects a ghost-degree-0, antighost-free element")
            x = x.terms[0][1] if x.terms else self.ring.zero()
        return self.rest(self._neumann(x.normalize()))

    def deformed_h0(self, x: PhasePoly) -> list:
        return self.h0(self._neumann(x.normalize()))

    # --- representations on the quotient ---
    def L0(self, l: int, f: PhasePoly) -> PhasePoly:
        """Classical L⁰_l f = rest(L_{E_l} ext f)."""
        return self.rest(self.brst.classical_rep(l, self.ext(f)))

    def bL(self, l: int, f: PhasePoly) -> PhasePoly:
        X = [0] * self.ring.d
        X[l] = 1
        return self.brst.quantized_rep(X, self.ext(f)).truncate(self.K - 1)

    def bL0(self, l: int, f: PhasePoly) -> PhasePoly:
        """Deformed 𝑳⁰_l f = 𝒃rest 𝑳_{E_l} ext f, valid mod λ^K."""
        return self.deformed_rest(self.bL(l, f)).truncate(self.K - 1)

    def invariance_report(self, f: PhasePoly) -> Report:
        bad = [l for l in range(self.ring.d) if not self.L0(l, f).is_zero()]
        return Report("invariant", not bad, {"basis": bad} if bad else None)

    def cocycle_report(self, f: PhasePoly) -> Report:
        """𝑳⁰ f = 0 mod λ^K.

        details: lowest λ-order where 𝑳 and L differ on ext f, and where 𝑳⁰ and L⁰ differ on f.
        """
        bad, disc, disc0 = [], None, None
        for l in range(self.ring.d):
            v = self.bL0(l, f)
            if not v.is_zero():
                bad.append({"basis": l, "value": v.dumps()})
            diff = (self.bL(l, f) - self.brst.classical_rep(l, self.ext(f))).normalize()
            diff0 = (v - self.L0(l, f)).normalize()
            for x, name in ((diff, "rep"), (diff0, "quot")):
                if x.is_zero():
                    continue
                o = min(x.lam_orders())
                if name == "rep":
                    disc = o if disc is None else min(disc, o)
                else:
                    disc0 = o if disc0 is None else min(disc0, o)
        return Report(
            "L0_cocycle",
            not bad,
            bad or None,
            {"mod_lambda": self.K, "discrepancy_order": disc, "quotient_discrepancy_order": disc0},
        )

    # --- reduced products ---
    def reduced_poisson(self, f: PhasePoly, g: PhasePoly, check: bool = True) -> PhasePoly:
        """rest {ext f, ext g}_𝒜, with the given representatives used as extensions."""
        if check:
            for x in (f, g):
                if not self.invariance_report(x).passed:
                    raise NonInvariantError("input is not invariant on the constraint surface")
        b = self.brst
        br = b.brst_poisson(b.scalar(f), b.scalar(g))
        return self.rest(br.terms[0][1] if br.terms else self.ring.zero())

    def reduced_star(self, f: PhasePoly, g: PhasePoly, check: bool = True) -> PhasePoly:
        """f ~⋆ g = 𝒃rest(ext f ⋆ ext g) for classes f, g in C(M_0)[[λ]], mod λ^{K+1}."""
        F, G = self.ext(self.rest(f)), self.ext(self.rest(g))
        self._see(F)
        self._see(G)
        if self.cap is not None and F.t and G.t and _deg(F) + _deg(G) > self.cap:
            raise WindowError(f"product degree {_deg(F) + _deg(G)} exceeds the window {self.cap}")
        if check:
            for x in (F, G):
                rep = self.cocycle_report(x)
                if not rep.passed:
                    raise NonCocycleError(f"input is not an L0-cocycle mod λ^{self.K}: {rep.witness}")
        return self.deformed_rest(star(F, G))

    def star_certificates(self, f: PhasePoly, g: PhasePoly) -> dict:
        """Checks that accompany a reduced product: classical limit, first-order bracket, cocycle output."""
        r = self.reduced_star(f, g)
        rs = self.reduced_star(g, f, check=False)
        F, G = self.rest(f), self.rest(g)
        c0 = (r.lam_part(0) - self.rest(F * G)).normalize()
        anti = (r - rs).lam_part(1)
        pb = self.reduced_poisson(F, G, check=False).times_i()
        c1 = (anti - pb * LOCKED_SIGN).normalize()
        return {
            "result": r,
            "classical_limit": Report("reduced_star_lambda0", c0.is_zero(), c0.dumps() if c0.t else None),
            "first_order": Report("reduced_star_lambda1", c1.is_zero(), c1.dumps() if c1.t else None),
            "cocycle": self.cocycle_report(r),
        }


# --- invariant functions ---


def invariant_generators(ring: PhaseRing) -> list:
    """tr a_n, Σ_k p_{n,k}², ⟨p_n, s(a_n)⟩ with s(a) = vector part of a, for each copy n."""
    kh = KoszulHomotopy(ring, None)
    out = []
    for n in range(ring.N):
        out.append(ring.a(n, 0, 0) + ring.a(n, 1, 1))
        d = ring.d
        out.append(sum((ring.p(n * d + k) * ring.p(n * d + k) for k in range(d)), ring.zero()))
        s = kh.centralizer_syzygy(n)
        out.append(sum((to_phase(ring, s[k]) * ring.p(n * d + k) for k in range(d)), ring.zero()))
    return out


def invariant_products(ring: PhaseRing, max_factors: int = 2) -> list:
    """Products of at most max_factors invariant generators (with 1), deduplicated, in a fixed order."""
    gens = invariant_generators(ring)
    seen, out = set(), []
    for r in range(0, max_factors + 1):
        for combo in itertools.combinations_with_replacement(range(len(gens)), r):
            f = ring.one()
            for i in combo:
                f = f * gens[i]
            key = f.normalize().dumps()
            if key not in seen:
                seen.add(key)
                out.append(f.normalize())
    return out
