import json
import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from fedbrst.phasealg import PhaseRing
from fedbrst.polyengine import (
    CapExceeded,
    GB,
    KoszulHomotopy,
    NotKoszulError,
    check_syzygy,
    divide_with_quotients,
    from_phase,
    groebner,
    moment_ideal,
    normal_form,
    side_condition_report,
    syzygies,
    to_phase,
)

from conftest import ring_symbols, to_sympy

R1 = PhaseRing(1, 2)
KH = KoszulHomotopy(R1, 6)
seeds = st.integers(0, 10**6)
_GB_CACHE: dict = {}


def _sym(ring, f):
    return to_sympy(to_phase(ring, f) if isinstance(f, dict) else f)


def _monic(ring, f):
    xs = ring_symbols(ring)
    p = sp.Poly(_sym(ring, f), *xs, domain="QQ_I")
    return sp.expand(p.as_expr() / p.LC(order="grevlex"))


@pytest.fixture(scope="module")
def sympy_gb():
    xs = ring_symbols(R1)
    gens = [to_sympy(J) for J in R1.moment_components] + [xs[0] * xs[3] - xs[1] * xs[2] - 1]
    return sp.groebner(gens, *xs, order="grevlex", domain="QQ_I")


def test_reduced_basis_matches_sympy(sympy_gb):
    gb = moment_ideal(R1)
    ours = {sp.expand(_monic(R1, g)) for g in gb.basis}
    theirs = {sp.expand(g) for g in sympy_gb.exprs}
    assert ours == theirs


@given(seeds)
def test_normal_form_matches_sympy(s):
    xs = ring_symbols(R1)
    gens = [to_sympy(J) for J in R1.moment_components] + [xs[0] * xs[3] - xs[1] * xs[2] - 1]
    G = _GB_CACHE.setdefault("g", sp.groebner(gens, *xs, order="grevlex", domain="QQ_I"))
    f = R1.random_poly(random.Random(s), 2, 2)
    _, r = G.reduce(to_sympy(f))
    assert to_sympy(KH.rest(f)) == sp.expand(r)



@given(seeds)
def test_division_identity(s):
    gb = moment_ideal(R1)
    f = R1.random_poly(random.Random(s), 3, 2)
    q, r = divide_with_quotients(f, gb)
    acc = to_phase(R1, r)
    for g, c in zip(gb.gens, q):
        acc = acc + to_phase(R1, g) * to_phase(R1, c)
    assert acc == f


def test_moment_components_reduce_to_zero():
    for J in R1.moment_components:
        assert KH.rest(J).is_zero()


def test_bracket_moment_reduces_to_zero():
    C = R1.lie.C
    for j in range(3):
        for k in range(3):
            B = [C[j][k][l] for l in range(3)]
            assert KH.rest(R1.moment_component(B)).is_zero()


@given(seeds, seeds)
def test_normal_form_multiplicative(s1, s2):
    rng1, rng2 = random.Random(s1), random.Random(s2)
    f, g = R1.random_poly(rng1, 2, 1), R1.random_poly(rng2, 2, 1)
    assert KH.rest(f * g) == KH.rest(KH.rest(f) * KH.rest(g))


@given(seeds, seeds)
def test_normal_form_ideal_invariance(s1, s2):
    f = R1.random_poly(random.Random(s1), 2, 2)
    u = R1.random_poly(random.Random(s2), 1, 1, terms=2)
    assert KH.rest(f + R1.moment_components[1] * u) == KH.rest(f)


def test_normal_form_lambda_linear():
    f = R1.random_poly(random.Random(3), 2, 2)
    assert KH.rest(f.times_lam(1)) == KH.rest(f).times_lam(1)


@given(seeds)
def test_homotopy_identity(s):
    f = R1.random_poly(random.Random(s), 3, 3)
    assert KH.homotopy_check(f).passed


def test_window_refusal():
    kh = KoszulHomotopy(R1, 2)
    with pytest.raises(CapExceeded, match="window"):
        kh.h0(R1.p(0) ** 3)


def test_syzygy_generators_are_syzygies():
    gb = moment_ideal(R1)
    for s in syzygies(gb):
        assert check_syzygy(gb.gens, s)


def test_centralizer_syzygy_certificate():
    s = KH.centralizer_syzygy(0)
    assert KH.is_syzygy(s)
    assert KH.classify_syzygy(s) == "outside_ideal"
    with pytest.raises(NotKoszulError):
        KH.h1([to_phase(R1, c) for c in s])


def test_centralizer_not_syzygy_for_two_copies():
    kh = KoszulHomotopy(PhaseRing(2, 1), 6)
    assert not any(kh.is_syzygy(kh.centralizer_syzygy(n)) for n in range(2))


def test_koszul_syzygies_classified_koszul():
    J = KH.J
    v = [dict(), dict(), dict()]
    v[0], v[1] = dict(J[1]), {k: -c for k, c in J[0].items()}
    assert KH.classify_syzygy(v) == "koszul"


def test_syzygy_report_n1_fails_with_witness():
    rep = KH.syzygy_report(4, [KH.centralizer_syzygy(0)])
    assert not rep.passed
    assert all(w["verdict"] == "outside_ideal" for w in rep.witness)


def test_syzygy_report_n2_passes():
    kh = KoszulHomotopy(PhaseRing(2, 1), 6)
    rep = kh.syzygy_report(4, [kh.centralizer_syzygy(n) for n in range(2)])
    assert rep.passed
    assert rep.details["extra_not_syzygies"] == 2


def test_side_conditions_after_correction():
    rng = random.Random(4)
    fs = [R1.random_poly(rng, 3, 3) for _ in range(10)]
    rep = side_condition_report(KH, fs)
    assert rep.passed
    assert rep.details["after"] == {"h0_ext": True, "h1_h0": True}


def test_gb_json_and_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("FEDBRST_CACHE_DIR", str(tmp_path))
    gens = [from_phase(J) for J in R1.moment_components]
    gb = groebner(R1, gens, cap=4)
    path = tmp_path / f"gb-{gb.fingerprint()}.json"
    path.write_text(json.dumps(gb.to_json()))
    again = groebner(R1, gens, cap=4)
    assert [sorted(g.items()) for g in again.basis] == [sorted(g.items()) for g in gb.basis]
    assert GB.from_json(R1, gb.to_json()).fingerprint() == gb.fingerprint()
