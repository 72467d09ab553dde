import random

import hypothesis
import pytest
import sympy as sp

from fedbrst.phasealg import PhaseRing

hypothesis.settings.register_profile(
    "default",
    deadline=None,
    max_examples=20,
    suppress_health_check=[hypothesis.HealthCheck.too_slow, hypothesis.HealthCheck.data_too_large],
)
hypothesis.settings.load_profile("default")

LAM = sp.Symbol("lam")


def gauss_to_sympy(c):
    return sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(
        int(c.im.numerator), int(c.im.denominator)
    )


def ring_symbols(ring):
    return [sp.Symbol(f"x{v}") for v in range(ring.nvars)]


def to_sympy(f):
    """Independent rendering of a PhasePoly as a sympy expression (λ as LAM)."""
    xs = ring_symbols(f.ring)
    out = sp.Integer(0)
    for exps, lam, c in f.monomial_list():
        term = gauss_to_sympy(c) * LAM ** lam
        for x, e in zip(xs, exps):
            term *= x ** e
        out += term
    return sp.expand(out)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def ring1():
    return PhaseRing(1, 3)


@pytest.fixture(scope="session")
def ring2():
    return PhaseRing(2, 3)


def random_point(rng, ring):
    from fedbrst.phasealg import PhasePoint, random_rational, random_su2

    a = tuple(random_su2(rng) for _ in range(ring.N))
    return PhasePoint(a, tuple(random_rational(rng) for _ in range(ring.N * ring.d)))
