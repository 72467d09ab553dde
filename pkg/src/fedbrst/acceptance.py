"""Acceptance criteria 1-11 as functions returning (passed, details)."""

from __future__ import annotations

import random
import time

from .phasealg import PhaseRing
from .suites import (
    associativity_triples,
    check_associativity,
    check_bm_fidelity,
    check_brst_identities,
    check_covariance,
    check_group_invariance,
    check_hypotheses,
    check_koszul_window,
    check_perturbation,
    check_quantized_rep,
    check_reduction,
    check_rho_homomorphism,
    check_syzygies,
    generating_set,
)

SEED = 7


def _pack(reports: list) -> tuple[bool, dict]:
    return all(r.passed for r in reports), {"reports": [r.to_json() for r in reports]}


def criterion_1():
    return _pack([check_bm_fidelity(PhaseRing(N, 3), 3) for N in (1, 2)])


def criterion_2():
    out = []
    for N in (1, 2):
        ring = PhaseRing(N, 3)
        out.append(check_associativity(ring, [], associativity_triples(ring, random.Random(SEED), 1000)))
    return _pack(out)


def criterion_3():
    return _pack([check_covariance(PhaseRing(N, 3)) for N in (1, 2)])


def criterion_4():
    return _pack([check_group_invariance(PhaseRing(N, 3), random.Random(SEED), 10, 2) for N in (1, 2)])


def criterion_5():
    out = []
    for N in (1, 2):
        ring = PhaseRing(N, 3)
        out.append(check_rho_homomorphism(ring, generating_set(ring, total=2 if N == 1 else 1), ring.monomials(2, 0)))
    return _pack(out)


def criterion_6():
    out = []
    for N in (1, 2):
        out += check_brst_identities(PhaseRing(N, 3), random.Random(SEED), 10)
    return _pack(out)


def criterion_7():
    return _pack([check_quantized_rep(PhaseRing(N, 3), random.Random(SEED), 5) for N in (1, 2)])


def criterion_8():
    return _pack(check_perturbation(random.Random(SEED), 50, 2))


def criterion_9():
    ring = PhaseRing(1, 2)
    return _pack(check_koszul_window(ring, random.Random(SEED), 6, 100) + [check_syzygies(ring, 4, 6)])


def criterion_10():
    return _pack(check_hypotheses(100, SEED, 2))


def criterion_11():
    return _pack(check_reduction(PhaseRing(1, 2), random.Random(SEED), 6, 20))


CRITERIA = {
    1: ("B-operator fidelity", criterion_1),
    2: ("associativity mod λ⁴, N = 1, 2", criterion_2),
    3: ("covariance", criterion_3),
    4: ("group invariance", criterion_4),
    5: ("ρ homomorphism", criterion_5),
    6: ("BRST identities", criterion_6),
    7: ("quantized representation", criterion_7),
    8: ("perturbation engine", criterion_8),
    9: ("Koszul homotopy window and (AC) syzygies, N = 1", criterion_9),
    10: ("hypotheses suite", criterion_10),
    11: ("reduction pipeline, N = 1, K = 2", criterion_11),
}


def run(n: int) -> dict:
    name, fn = CRITERIA[n]
    t = time.perf_counter()
    passed, details = fn()
    return {"criterion": n, "name": name, "passed": passed, "seconds": round(time.perf_counter() - t, 1), "details": details}


def line(res: dict) -> str:
    failed = [r["check"] for r in res["details"]["reports"] if r["status"] != "pass"]
    tail = f" (failing: {', '.join(failed)})" if failed else ""
    return f"criterion {res['criterion']:>2} {'PASS' if res['passed'] else 'FAIL'}  {res['name']}{tail}"
