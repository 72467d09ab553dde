import random

import pytest

from fedbrst.phasealg import PhaseRing
from fedbrst.suites import (
    SUITES,
    SuiteConfig,
    associativity_triples,
    check_koszul_window,
    generating_set,
    run_suite,
)


@pytest.mark.parametrize(
    "name,cfg",
    [
        ("star-identities", SuiteConfig(K=2, N=1, samples=2)),
        ("brst-identities", SuiteConfig(K=2, N=1, samples=2)),
        ("hpt", SuiteConfig(samples=5)),
        ("hypotheses", SuiteConfig(N=2, samples=5)),
    ],
)
def test_suites_pass(name, cfg):
    out = run_suite(name, cfg)
    assert out["status"] == "pass", [r for r in out["reports"] if r["status"] != "pass"]
    assert out["suite"] == name


def test_reduce_suite_fails_only_on_syzygies_for_one_copy():
    out = run_suite("reduce", SuiteConfig(K=2, N=1, samples=3))
    assert out["status"] == "fail"
    assert [r["check"] for r in out["reports"] if r["status"] != "pass"] == ["acyclicity_syzygies"]


def test_suite_names():
    assert set(SUITES) == {"star-identities", "brst-identities", "hpt", "hypotheses", "reduce"}
    with pytest.raises(KeyError):
        run_suite("nope", SuiteConfig())


def test_generating_set_and_triples():
    ring = PhaseRing(1, 2)
    gens = generating_set(ring, total=2)
    assert all(g.total_degree() <= 2 for g in gens)
    triples = associativity_triples(ring, random.Random(0), 10)
    assert len(triples) == len(generating_set(ring, total=2)) ** 3 + 10


def test_koszul_window_counts_out_of_window():
    reps = check_koszul_window(PhaseRing(1, 2), random.Random(0), cap=3, samples=10)
    assert reps[0].passed
    assert reps[0].details["out_of_window"] > 0
