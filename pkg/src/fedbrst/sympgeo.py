"""Canonical symplectic structure on T*G^N and the BNW lift of the Levi-Civita connection.

Sign conventions: X_f ⌟ ω = -df, {f, g} = ω(X_f, X_g) = X_f g, which gives
{p_I, p_J} = C_IJ^K p_K and {J_C, J_B} = J_[B,C].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .liealg import LieCovector, LieVector, ProductLieData, ad_star, bracket, Ad, Ad_star
from .phasealg import PhasePoint, PhasePoly, PhaseRing, StdVectorField
from .report import Report
from .scalars import GaussQ, ZERO

__all__ = [
    "theta_eval",
    "omega_eval",
    "omega_matrix",
    "differential",
    "df_eval",
    "hamiltonian_vf",
    "poisson",
    "fundamental_field",
    "bnw_covariant_derivative",
    "bnw_invariance_check",
    "Field",
    "horizontal_lift",
    "vertical_lift",
    "standard_field",
    "bnw_fields",
    "push_forward",
]


def _alpha(pt: PhasePoint, alg: ProductLieData) -> LieCovector:
    return alg.covector(pt.alpha)


def theta_eval(pt: PhasePoint, v: StdVectorField) -> GaussQ:
    return _alpha(pt, v.X.alg)(v.X)


def omega_eval(pt: PhasePoint, v: StdVectorField, w: StdVectorField) -> GaussQ:
    """ω((X,ξ),(Y,ζ)) = ξ(Y) - ζ(X) - α([X,Y])."""
    al = _alpha(pt, v.X.alg)
    return v.xi(w.X) - w.xi(v.X) - al(bracket(v.X, w.X))


def standard_frame(alg: ProductLieData) -> list[StdVectorField]:
    zX, zxi = alg.zero(), alg.zero_covector()
    return [StdVectorField(alg.basis(I_), zxi) for I_ in range(alg.dim)] + [
        StdVectorField(zX, alg.dual_basis(I_)) for I_ in range(alg.dim)
    ]


def omega_matrix(pt: PhasePoint, alg: ProductLieData) -> list[list[GaussQ]]:
    fr = standard_frame(alg)
    return [[omega_eval(pt, v, w) for w in fr] for v in fr]


def differential(f: PhasePoly) -> tuple[list[PhasePoly], list[PhasePoly]]:
    """(d_G f, d_{g*} f) as coefficient lists: (E_I f)_I and (∂_{p_I} f)_I."""
    D = f.ring.alg.dim
    return [f.left_invariant_derive(I_) for I_ in range(D)], [f.fiber_derive(I_) for I_ in range(D)]


def _point_diffs(f: PhasePoly, pt: PhasePoint):
    alg = f.ring.alg
    dG, dP = differential(f)
    return (
        alg.covector([g.evaluate_scalar(pt) for g in dG]),
        alg.vector([g.evaluate_scalar(pt) for g in dP]),
    )


def df_eval(f: PhasePoly, pt: PhasePoint, v: StdVectorField) -> GaussQ:
    """df(X, ξ) = <d_G f, X> + <ξ, d_{g*} f>."""
    dG, dP = _point_diffs(f, pt)
    return dG(v.X) + v.xi(dP)


def hamiltonian_vf(f: PhasePoly, pt: PhasePoint) -> StdVectorField:
    """X_f = (d_{g*} f, -ad*(d_{g*} f) α - d_G f)."""
    alg = f.ring.alg
    dG, dP = _point_diffs(f, pt)
    return StdVectorField(dP, -ad_star(dP, _alpha(pt, alg)) - dG)


def poisson(f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """{f,g} = <d_G g, d_{g*} f> - <d_G f, d_{g*} g> + α([d_{g*} f, d_{g*} g])."""
    f._check(g.ring)
    ring = f.ring
    D = ring.alg.dim
    dPf = [f.fiber_derive(I_) for I_ in range(D)]
    dPg = [g.fiber_derive(I_) for I_ in range(D)]
    out = ring.zero()
    for I_ in range(D):
        if dPf[I_]:
            out = out + g.left_invariant_derive(I_) * dPf[I_]
        if dPg[I_]:
            out = out - f.left_invariant_derive(I_) * dPg[I_]
    bt = ring.alg.bracket_table
    for I_ in range(D):
        if not dPf[I_]:
            continue
        for J in range(D):
            if not dPg[J] or not bt[I_][J]:
                continue
            taut = ring.zero()
            for K, c in bt[I_][J]:
                taut = taut + ring.p(K) * c
            out = out + dPf[I_] * dPg[J] * taut
    return out


def fundamental_field(ring: PhaseRing, B: Sequence, pt: PhasePoint) -> StdVectorField:
    """Generator of t -> Ψ_{exp(tB)}(pt) in the left trivialization: (Ad(a^{-1})B - B, ad*(B) α).

    B is given by d coordinates in g and acts diagonally.
    """
    from .liealg import mat_adj

    alg = ring.alg
    Bd = alg.vector(list(B) * ring.N)
    ainv = [mat_adj(m) for m in pt.a]
    U = Ad(ainv, Bd) - Bd
    return StdVectorField(U, ad_star(Bd, _alpha(pt, alg)))


# --- BNW connection on standard fields ---

Perturbation = Callable[[StdVectorField, StdVectorField, LieCovector], LieCovector]


def bnw_covariant_derivative(v: StdVectorField, w: StdVectorField, pt: PhasePoint,
                             perturbation: Perturbation | None = None) -> StdVectorField:
    """Closed form of ∇_{(X,ξ)}(Y,υ) for standard fields at pt.

    ``perturbation`` adds an extra fiber term (used only as a negative control).
    """
    X, xi, Y, ups = v.X, v.xi, w.X, w.xi
    al = _alpha(pt, X.alg)
    half = GaussQ(1) / 2
    sixth = GaussQ(1) / 6
    fib = ad_star(X, ups) * half + ad_star(Y, xi) * half
    fib = fib + (ad_star(X, ad_star(Y, al)) + ad_star(Y, ad_star(X, al))) * sixth
    if perturbation is not None:
        fib = fib + perturbation(v, w, al)
    return StdVectorField(bracket(X, Y) * half, fib)


def push_forward(g, v: StdVectorField, N: int) -> StdVectorField:
    """Tangent map of Ψ_g on a standard field: (X, ξ) -> (Ad(g)X, Ad*(g)ξ)."""
    return StdVectorField(Ad([g] * N, v.X), Ad_star([g] * N, v.xi))


def bnw_invariance_check(g, ring: PhaseRing, points: Sequence[PhasePoint],
                         perturbation: Perturbation | None = None) -> Report:
    """Verify Ψ_g-invariance of ∇ on all pairs of standard frame fields at the given points."""
    alg = ring.alg
    frame = standard_frame(alg)
    for pt in points:
        gpt = pt.act(g, ring)
        for (a, v), (b, w) in itertools.product(enumerate(frame), repeat=2):
            lhs = bnw_covariant_derivative(push_forward(g, v, ring.N), push_forward(g, w, ring.N), gpt, perturbation)
            rhs = push_forward(g, bnw_covariant_derivative(v, w, pt, perturbation), ring.N)
            if lhs != rhs:
                return Report("bnw_invariance", False, {"frame_pair": [a, b], "alpha": pt.alpha,
                                                        "lhs": [lhs.X.coeffs, lhs.xi.coeffs],
                                                        "rhs": [rhs.X.coeffs, rhs.xi.coeffs]})
    return Report("bnw_invariance", True, None, {"points": len(points), "pairs": len(frame) ** 2})


# --- symbolic vector fields (polynomial coefficients in the standard frame) ---


@dataclass(frozen=True)
class Field:
    """Σ_I X_I (E_I, 0) + Σ_I ξ_I (0, ε^I) with PhasePoly coefficients."""

    X: tuple
    xi: tuple

    def __add__(self, o: "Field") -> "Field":
        return Field(tuple(a + b for a, b in zip(self.X, o.X)), tuple(a + b for a, b in zip(self.xi, o.xi)))

    def __sub__(self, o: "Field") -> "Field":
        return Field(tuple(a - b for a, b in zip(self.X, o.X)), tuple(a - b for a, b in zip(self.xi, o.xi)))

    def scale(self, f: PhasePoly) -> "Field":
        return Field(tuple(a * f for a in self.X), tuple(a * f for a in self.xi))

    def apply(self, f: PhasePoly) -> PhasePoly:
        out = f.ring.zero()
        for I_, c in enumerate(self.X):
            if c:
                out = out + f.left_invariant_derive(I_) * c
        for I_, c in enumerate(self.xi):
            if c:
                out = out + f.fiber_derive(I_) * c
        return out

    def __eq__(self, o):
        return isinstance(o, Field) and self.X == o.X and self.xi == o.xi

    def __hash__(self):
        return hash((self.X, self.xi))


def _taut_cov(ring: PhaseRing) -> list[PhasePoly]:
    return [ring.p(I_) for I_ in range(ring.alg.dim)]


def _ad_star_sym(ring: PhaseRing, X: Sequence, xi: Sequence[PhasePoly]) -> list[PhasePoly]:
    """ad*(X) ξ with scalar X coefficients and polynomial ξ coefficients."""
    D = ring.alg.dim
    bt = ring.alg.bracket_table
    out = [ring.zero() for _ in range(D)]
    for I_, x in enumerate(X):
        x = GaussQ.coerce(x)
        if not x:
            continue
        for J in range(D):
            for K, c in bt[I_][J]:
                if xi[K]:
                    out[J] = out[J] - xi[K] * (x * c)
    return out


def standard_field(ring: PhaseRing, X: LieVector, xi: LieCovector) -> Field:
    return Field(tuple(ring.const(c) for c in X.coeffs), tuple(ring.const(c) for c in xi.coeffs))


def horizontal_lift(ring: PhaseRing, X: LieVector) -> Field:
    """h X = (X, -½ ad*(X) α)."""
    fib = _ad_star_sym(ring, X.coeffs, _taut_cov(ring))
    return Field(tuple(ring.const(c) for c in X.coeffs), tuple(f * (GaussQ(-1) / 2) for f in fib))


def vertical_lift(ring: PhaseRing, xi: LieCovector) -> Field:
    return Field(tuple(ring.zero() for _ in xi.coeffs), tuple(ring.const(c) for c in xi.coeffs))


def _nabla_basis(ring: PhaseRing, a: int, b: int) -> Field:
    """∇_{S_a} S_b for standard frame fields, symbolic in α (α_I = p_I)."""
    alg = ring.alg
    D = alg.dim
    fr = standard_frame(alg)
    v, w = fr[a], fr[b]
    half = GaussQ(1) / 2
    al = _taut_cov(ring)
    X = [c for c in v.X.coeffs]
    Y = [c for c in w.X.coeffs]
    fib = [ring.const(c * half) for c in ad_star(v.X, w.xi).coeffs]
    fib = [f + ring.const(c * half) for f, c in zip(fib, ad_star(w.X, v.xi).coeffs)]
    t1 = _ad_star_sym(ring, X, _ad_star_sym(ring, Y, al))
    t2 = _ad_star_sym(ring, Y, _ad_star_sym(ring, X, al))
    fib = [f + (u + s) * (GaussQ(1) / 6) for f, u, s in zip(fib, t1, t2)]
    br = bracket(v.X, w.X) * half
    return Field(tuple(ring.const(c) for c in br.coeffs), tuple(fib))


def bnw_fields(ring: PhaseRing, U: Field, V: Field) -> Field:
    """∇_U V for polynomial-coefficient fields, extending the closed form tensorially in U
    and by the Leibniz rule in V."""
    D = ring.alg.dim
    cache: dict = {}

    def nb(a, b):
        if (a, b) not in cache:
            cache[(a, b)] = _nabla_basis(ring, a, b)
        return cache[(a, b)]

    zero = Field(tuple(ring.zero() for _ in range(D)), tuple(ring.zero() for _ in range(D)))
    out = zero
    Ucoef = list(U.X) + list(U.xi)
    Vcoef = list(V.X) + list(V.xi)
    frame_fields = []
    for s in range(2 * D):
        X = [ring.zero() for _ in range(D)]
        xi = [ring.zero() for _ in range(D)]
        (X if s < D else xi)[s % D] = ring.one()
        frame_fields.append(Field(tuple(X), tuple(xi)))
    for a, u in enumerate(Ucoef):
        if not u:
            continue
        Sa = frame_fields[a]
        for b, f in enumerate(Vcoef):
            if not f:
                continue
            df = Sa.apply(f)
            term = nb(a, b).scale(f)
            if df:
                term = term + frame_fields[b].scale(df)
            out = out + term.scale(u)
    return out
