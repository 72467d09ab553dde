"""Identity suites: each check returns a Report, each suite an ordered list of Reports."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from . import hypotheses as hyp
from .brst import BRST, GhostPoly
from .hpt import perturb, random_perturbation, random_retract, validate_retract
from .liealg import bracket
from .phasealg import PhasePoly, PhaseRing, random_su2
from .polyengine import CapExceeded, KoszulHomotopy, side_condition_report
from .reduce import NonCocycleError, Reducer, WindowError, invariant_products
from .report import Report
from .star import bm_closed_form, build_bm, check_invariance, rho, star

__all__ = [
    "SuiteConfig",
    "SUITES",
    "run_suite",
    "generating_set",
    "associativity_triples",
    "random_ghost",
    "check_bm_fidelity",
    "check_associativity",
    "check_covariance",
    "check_group_invariance",
    "check_rho_homomorphism",
    "check_brst_identities",
    "check_quantized_rep",
    "check_perturbation",
    "check_koszul_window",
    "check_syzygies",
    "check_hypotheses",
    "check_reduction",
]


@dataclass(frozen=True)
class SuiteConfig:
    K: int = 2
    N: int = 1
    deg_cap: int = 6
    seed: int = 0
    samples: int = 100


def _first(bad: list, limit: int = 3):
    return bad[:limit] if bad else None


# --- generating sets ---


def generating_set(ring: PhaseRing, entry_deg: int = 2, fiber_deg: int = 2, total: int | None = 2) -> list:
    """Monomials with entry degree <= entry_deg and fiber degree <= fiber_deg (and total degree <= total)."""
    out = ring.monomials(entry_deg, fiber_deg)
    if total is not None:
        out = [m for m in out if m.total_degree() <= total]
    return out


def associativity_triples(ring: PhaseRing, rng: random.Random, extra: int = 1000) -> list:
    """All triples of the exhaustive set (total degree <= 2 for N = 1, <= 1 otherwise) plus ``extra``
    random triples from the full spanning set (entry degree <= 2, fiber degree <= 2)."""
    base = generating_set(ring, total=2 if ring.N == 1 else 1)
    full = ring.monomials(2, 2)
    out = list(itertools.product(base, repeat=3))
    out += [tuple(rng.choice(full) for _ in range(3)) for _ in range(extra)]
    return out


def random_ghost(rng: random.Random, b: BRST, terms: int = 3, entry_deg: int = 1, fiber_deg: int = 1) -> GhostPoly:
    ring = b.ring
    out = GhostPoly.make(ring, {})
    for _ in range(terms):
        m = rng.randrange(1 << (2 * b.d))
        c = ring.random_poly(rng, entry_deg, fiber_deg, terms=2, coeff_range=2)
        out = out + GhostPoly.make(ring, {m: c})
    return out


# --- star product ---


def check_bm_fidelity(ring: PhaseRing, fiber_deg: int = 3) -> Report:
    """build_bm(m) equals the closed forms for m <= 2, as operators and on all pairs of momentum monomials."""
    mons = ring.monomials(0, fiber_deg)
    bad = []
    pairs = 0
    for m in range(3):
        A, B = build_bm(ring, m), bm_closed_form(ring, m)
        if A != B:
            bad.append({"m": m, "level": "operator"})
            continue
        for f, g in itertools.product(mons, repeat=2):
            pairs += 1
            if A.apply(f, g) != B.apply(f, g):
                bad.append({"m": m, "f": f.dumps(), "g": g.dumps()})
                break
    control = build_bm(ring, 2) != bm_closed_form(ring, 2, b2_sign=-1)
    return Report(
        "bm_fidelity",
        not bad and control,
        _first(bad),
        {"N": ring.N, "fiber_deg": fiber_deg, "pairs": pairs, "flipped_b2_differs": control},
    )


def check_associativity(ring: PhaseRing, gens: list, triples=None) -> Report:
    """(f⋆g)⋆h = f⋆(g⋆h) mod λ^{K+1} on the given triples (default: all triples of gens)."""
    triples = itertools.product(gens, repeat=3) if triples is None else triples
    cache: dict = {}

    def st(f, g):
        key = (f.dumps(), g.dumps())
        if key not in cache:
            cache[key] = star(f, g)
        return cache[key]

    n, bad = 0, []
    for f, g, h in triples:
        n += 1
        if (star(st(f, g), h) - star(f, st(g, h))).normalize().t:
            bad.append([f.dumps(), g.dumps(), h.dumps()])
            if len(bad) >= 3:
                break
    return Report("associativity", not bad, _first(bad), {"N": ring.N, "K": ring.K, "triples": n})


def check_covariance(ring: PhaseRing) -> Report:
    """J_B ⋆ J_C - J_C ⋆ J_B = iλ J_[B,C] for all basis pairs."""
    lie = ring.lie
    alg = ring.alg
    bad = []
    for b, c in itertools.product(range(ring.d), repeat=2):
        B = [0] * ring.d
        C = [0] * ring.d
        B[b], C[c] = 1, 1
        JB, JC = ring.moment_component(B), ring.moment_component(C)
        base = type(alg)(lie, 1)
        BC = bracket(base.basis(b), base.basis(c))
        rhs = ring.moment_component(BC).times_lam(1).times_i()
        if (star(JB, JC) - star(JC, JB) - rhs).normalize().t:
            bad.append([b, c])
    return Report("covariance", not bad, _first(bad), {"N": ring.N, "K": ring.K, "pairs": ring.d ** 2})


def check_group_invariance(ring: PhaseRing, rng: random.Random, groups: int = 10, pairs: int = 2) -> Report:
    bad, n = [], 0
    for _ in range(groups):
        g = random_su2(rng)
        for _ in range(pairs):
            f = ring.random_poly(rng, 2, 2)
            h = ring.random_poly(rng, 2, 2)
            n += 1
            r = check_invariance(g, f, h)
            if not r.passed:
                bad.append(r.witness)
    return Report("group_invariance", not bad, _first(bad), {"N": ring.N, "K": ring.K, "groups": groups, "checks": n})


def check_rho_homomorphism(ring: PhaseRing, gens: list, psis: list) -> Report:
    """ρ(f⋆g)ψ = ρ(f)(ρ(g)ψ) for all pairs of gens and all ψ."""
    bad, n = [], 0
    rs = {f.dumps(): rho(f) for f in gens}
    for f, g in itertools.product(gens, repeat=2):
        lhs_op = rho(star(f, g))
        rf, rg = rs[f.dumps()], rs[g.dumps()]
        for psi in psis:
            n += 1
            if (lhs_op(psi) - rf(rg(psi))).normalize().t:
                bad.append([f.dumps(), g.dumps(), psi.dumps()])
                break
    return Report("rho_homomorphism", not bad, _first(bad), {"N": ring.N, "K": ring.K, "checks": n})


# --- BRST ---


def check_brst_identities(ring: PhaseRing, rng: random.Random, samples: int = 4) -> list:
    """Classical identities exactly; quantum ones mod λ^{K+1}."""
    b = BRST(ring)
    xs = [random_ghost(rng, b) for _ in range(samples)]
    out = []

    def zero_on(name, fn):
        bad = []
        for x in xs:
            y = fn(x).normalize()
            if not y.is_zero():
                bad.append(x.dumps())
        out.append(Report(name, not bad, _first(bad, 1), {"samples": len(xs)}))

    kd, ce, D = b.koszul_d, b.ce_delta, b.classical_brst_d
    zero_on("koszul_d_squared", lambda x: kd(kd(x)))
    zero_on("ce_delta_squared", lambda x: ce(ce(x)))
    zero_on("delta_koszul_anticommute", lambda x: ce(kd(x)) + kd(ce(x)))
    zero_on("brst_d_squared", lambda x: D(D(x)))
    th = b.classical_charge()
    out.append(Report("charge_bracket", b.brst_poisson(th, th).normalize().is_zero()))
    qth = b.quantum_charge()
    out.append(Report("quantum_charge_square", b.quantum_product(qth, qth).normalize().is_zero(), None, {"K": ring.K}))
    qD = b.quantum_brst_d
    zero_on("quantum_brst_d_squared", lambda x: qD(qD(x)).truncate(ring.K))
    gens = [b.word((l,)) for l in range(b.d)] + [b.word((), (l,)) for l in range(b.d)]
    gens += [b.scalar(ring.var(v)) for v in range(ring.nvars)]
    bad = [g.dumps() for g in gens if not (qD(g) - b.ad_charge(g)).truncate(ring.K - 1).normalize().is_zero()]
    out.append(Report("quantum_brst_d_is_ad_charge", not bad, _first(bad, 1), {"generators": len(gens), "mod_lambda": ring.K}))
    out.append(Report("modular_form_zero", not any(b.Delta), None, {"Delta": [str(x) for x in b.Delta]}))
    return out


def check_quantized_rep(ring: PhaseRing, rng: random.Random, samples: int = 3) -> Report:
    """[𝑳_X, 𝑳_Y] f = 𝑳_[X,Y] f mod λ^{K}, all basis pairs; the ring needs K >= 2 for the comparison mod λ²."""
    b = BRST(ring)
    base = type(ring.alg)(ring.lie, 1)
    bad, n = [], 0
    top = ring.K - 1
    for _ in range(samples):
        f = ring.random_poly(rng, 2, 2)
        for x, y in itertools.product(range(ring.d), repeat=2):
            X = [0] * ring.d
            Y = [0] * ring.d
            X[x], Y[y] = 1, 1
            LX = lambda g: b.quantized_rep(X, g).truncate(top)
            LY = lambda g: b.quantized_rep(Y, g).truncate(top)
            XY = bracket(base.basis(x), base.basis(y))
            lhs = LX(LY(f)) - LY(LX(f))
            rhs = b.quantized_rep(XY, f).truncate(top)
            n += 1
            # 𝑳 loses one λ-order per application: compare mod λ^{K-1}
            if (lhs - rhs).truncate(top - 1).normalize().t:
                bad.append({"basis": [x, y], "f": f.dumps()})
    return Report("quantized_representation", not bad, _first(bad), {"checks": n, "mod_lambda": top})


# --- perturbation lemma ---


def check_perturbation(rng: random.Random, count: int = 50, K: int = 2) -> list:
    out = []
    for side in ("i", "p"):
        bad, n = [], 0
        for _ in range(count):
            r, split = random_retract(rng, K, rng.randint(1, 3), rng.randint(1, 3))
            if not validate_retract(r).passed:
                bad.append({"stage": "input", "retract": r.to_json()})
                continue
            t = random_perturbation(rng, r, split, side)
            r2, _ = perturb(r, t, side)
            n += 1
            rep = validate_retract(r2)
            if not rep.passed or not r2.side_conditions:
                bad.append({"stage": "output", "witness": rep.witness})
        out.append(Report(f"perturbation_side_{side}", not bad, _first(bad, 1), {"retracts": n, "K": K}))
    return out


# --- Koszul window ---


def check_koszul_window(ring: PhaseRing, rng: random.Random, cap: int = 6, samples: int = 100) -> list:
    kh = KoszulHomotopy(ring, cap)
    fs, skipped, bad = [], 0, []
    while len(fs) < samples:
        f = ring.random_poly(rng, 3, 3, terms=4)
        try:
            rep = kh.homotopy_check(f)
        except CapExceeded:
            skipped += 1
            continue
        fs.append(f)
        if not rep.passed:
            bad.append(rep.witness)
    return [
        Report("koszul_homotopy_0", not bad, _first(bad, 1), {"samples": len(fs), "out_of_window": skipped, "cap": cap}),
        side_condition_report(kh, fs[:20]),
    ]


def check_syzygies(ring: PhaseRing, max_deg: int = 4, cap: int = 6) -> Report:
    kh = KoszulHomotopy(ring, cap)
    extra = [kh.centralizer_syzygy(n) for n in range(ring.N)]
    return kh.syzygy_report(max_deg, extra)


# --- hypotheses ---


def check_hypotheses(samples: int, seed: int, N: int = 2, cases=hyp.CASES) -> list:
    out = []
    for case in cases:
        res = hyp.jacobian_rank_density(case, samples, seed, N)
        out.append(Report(f"hypotheses_{case}", not res["failures"], _first(res["failures"], 1), {
            "N": N, "samples": samples, "seed": seed, "branches": res["branches"],
        }))
    return out


# --- reduction ---


def check_reduction(ring: PhaseRing, rng: random.Random, cap: int = 6, min_pairs: int = 20) -> list:
    red = Reducer(ring, cap)
    prods = invariant_products(ring)
    counts = {"pairs": 0, "out_of_window": 0, "non_cocycle": 0, "checked": 0}
    bad: dict = {"reduced_star_lambda0": [], "reduced_star_lambda1": [], "L0_cocycle": [], "representative_independence": []}
    J = ring.moment_components
    for f, g in itertools.combinations_with_replacement(prods, 2):
        counts["pairs"] += 1
        try:
            cert = red.star_certificates(f, g)
        except WindowError:
            counts["out_of_window"] += 1
            continue
        except NonCocycleError:
            counts["non_cocycle"] += 1
            continue
        counts["checked"] += 1
        for k in ("classical_limit", "first_order", "cocycle"):
            r = cert[k]
            if not r.passed:
                bad[r.check].append([f.dumps(), g.dumps()])
        u = ring.random_poly(rng, 1, 1, terms=2)
        l = rng.randrange(ring.d)
        try:
            shifted = red.reduced_star((f + J[l] * u).normalize(), g)
        except WindowError:
            continue
        if (shifted - cert["result"]).normalize().t:
            bad["representative_independence"].append([f.dumps(), g.dumps(), u.dumps()])
    out = []
    for name, b in bad.items():
        ok = not b and counts["checked"] >= min_pairs
        out.append(Report(name, ok, _first(b, 1), dict(counts, K=ring.K, N=ring.N, cap=cap)))
    return out


# --- suites ---


def _star_suite(cfg: SuiteConfig) -> list:
    ring = PhaseRing(cfg.N, cfg.K)
    rng = random.Random(cfg.seed)
    psis = ring.monomials(2, 0)
    return [
        check_bm_fidelity(ring),
        check_associativity(ring, [], associativity_triples(ring, rng, cfg.samples)),
        check_covariance(ring),
        check_group_invariance(ring, rng),
        check_rho_homomorphism(ring, generating_set(ring, total=2 if cfg.N == 1 else 1), psis),
    ]


def _brst_suite(cfg: SuiteConfig) -> list:
    ring = PhaseRing(cfg.N, cfg.K)
    rng = random.Random(cfg.seed)
    return check_brst_identities(ring, rng) + [check_quantized_rep(PhaseRing(cfg.N, max(cfg.K, 2)), rng)]


def _hpt_suite(cfg: SuiteConfig) -> list:
    return check_perturbation(random.Random(cfg.seed), cfg.samples, cfg.K)


def _hyp_suite(cfg: SuiteConfig) -> list:
    return check_hypotheses(cfg.samples, cfg.seed, max(cfg.N, 2))


def _reduce_suite(cfg: SuiteConfig) -> list:
    ring = PhaseRing(cfg.N, cfg.K)
    rng = random.Random(cfg.seed)
    out = check_koszul_window(ring, rng, cfg.deg_cap, cfg.samples)
    if cfg.N == 1:
        out.append(check_syzygies(ring, 4, cfg.deg_cap))
    return out + check_reduction(ring, rng, cfg.deg_cap)


SUITES = {
    "star-identities": _star_suite,
    "brst-identities": _brst_suite,
    "hpt": _hpt_suite,
    "hypotheses": _hyp_suite,
    "reduce": _reduce_suite,
}


def run_suite(name: str, cfg: SuiteConfig) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    reports = SUITES[name](cfg)
    return {
        "suite": name,
        "config": {"K": cfg.K, "N": cfg.N, "deg_cap": cfg.deg_cap, "seed": cfg.seed, "samples": cfg.samples},
        "status": "pass" if all(r.passed for r in reports) else "fail",
        "reports": [r.to_json() for r in reports],
    }
