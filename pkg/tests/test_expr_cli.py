import json
import random
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedbrst.cli import main
from fedbrst.expr import ParseError, parse_expr, render, tokenize
from fedbrst.phasealg import PhasePoly, PhaseRing
from fedbrst.scalars import GaussQ

R = PhaseRing(2, 2)
DATA = Path(__file__).resolve().parents[1] / "scripts" / "data"
seeds = st.integers(0, 10**6)


@given(seeds)
def test_render_parse_roundtrip(s):
    rng = random.Random(s)
    f = R.random_poly(rng, 2, 2) + R.random_poly(rng, 1, 1, terms=2).times_lam(1).times_i()
    assert parse_expr(R, render(f)) == f


@pytest.mark.parametrize(
    "text,build",
    [
        ("3/4i", lambda r: r.const(GaussQ(0, "3/4"))),
        ("(- a[1][1][2])", lambda r: -r.a(0, 0, 1)),
        ("(^ (+ p[1][1] 1) 2)", lambda r: (r.p(0) + 1) ** 2),
        ("(* i lambda p[2][3])", lambda r: r.p(5).times_lam(1).times_i()),
        ("(- a[1][1][1] 1 2)", lambda r: r.a(0, 0, 0) - 3),
        ("J[2] ; comment", lambda r: r.moment_components[1]),
        ("(^ lambda 3)", lambda r: r.zero()),
    ],
)
def test_parse_examples(text, build):
    assert parse_expr(R, text) == build(R)


@pytest.mark.parametrize(
    "text,pos",
    [
        ("(+ a[1][1][1]", 0),
        ("(* 2 $)", 5),
        ("a[3][1][1]", 0),
        ("(^ p[1][1] -1)", 11),
        ("( p[1][1])", 2),
        ("1 2", 2),
        ("p[1]", 0),
        ("1/0", 0),
        ("", 0),
    ],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as e:
        parse_expr(R, text)
    assert e.value.pos == pos
    assert f"position {pos}" in str(e.value)


def test_tokenize_positions():
    toks = tokenize("(+ p[1][2]  3)")
    assert [(k, p) for k, _, p in toks] == [("lp", 0), ("op", 1), ("var", 3), ("num", 12), ("rp", 13)]


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_star_mul_cli(capsys):
    code, out = _run(["star", "mul", "-K", "2", "p[1][1]", "p[1][2]"], capsys)
    assert code == 0
    r = PhaseRing(1, 2)
    from fedbrst.star import star

    assert PhasePoly.from_json(r, json.loads(out)) == star(r.p(0), r.p(1))


def test_parse_error_exit_code(capsys):
    code, out = _run(["star", "mul", "(+ p[1][1]", "1"], capsys)
    assert code == 2
    assert json.loads(out)["position"] == 0


def test_bm_cap_exit_code(capsys):
    code, out = _run(["star", "bm", "-m", "5"], capsys)
    assert code == 1 and "resource cap" in json.loads(out)["error"]


def test_bm_terms(capsys):
    code, out = _run(["star", "bm", "-m", "1"], capsys)
    assert code == 0 and json.loads(out)["terms"]


def test_ideal_nf(capsys):
    code, out = _run(["ideal", "nf", "(* J[1] p[1][2])"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert PhasePoly.from_json(PhaseRing(1, 2), doc["normal_form"]).is_zero()
    assert len(doc["quotients"]) == 3


def test_ideal_nf_window(capsys):
    code, _ = _run(["ideal", "nf", "--deg-cap", "2", "(^ p[1][1] 4)"], capsys)
    assert code == 1


def test_ideal_syz_fails_for_one_copy(capsys):
    code, out = _run(["ideal", "syz", "--max-deg", "2"], capsys)
    assert code == 1 and json.loads(out)["check"] == "acyclicity_syzygies"


def test_hypotheses_check(capsys):
    code, out = _run(["hypotheses", "check", "--case", "G", "--samples", "8"], capsys)
    assert code == 0 and json.loads(out)["failures"] == []
    code, _ = _run(["hypotheses", "check", "--case", "full", "--samples", "5", "-N", "1"], capsys)
    assert code == 1


def test_reduce_star(capsys):
    code, out = _run(["reduce", "star", "(+ a[1][1][1] a[1][2][2])", "1"], capsys)
    doc = json.loads(out)
    assert code == 0 and set(doc) == {"result", "window", "certificates"}
    code, out = _run(["reduce", "star", "a[1][1][1]", "1"], capsys)
    assert code == 1


@pytest.mark.parametrize("side", ["i", "p"])
def test_hpt_perturb(side, capsys):
    argv = ["hpt", "perturb", "--input", str(DATA / "r.json"), "--t", str(DATA / "t.json"), "--side", side]
    code, out = _run(argv, capsys)
    assert code == 0 and json.loads(out)["validation"]["status"] == "pass"


def test_missing_file(capsys, tmp_path):
    code, out = _run(["hpt", "perturb", "--input", str(tmp_path / "none.json"), "--t", str(tmp_path / "t.json")], capsys)
    assert code == 2 and "error" in json.loads(out)


def test_text_format(capsys):
    code, out = _run(["suite", "hpt", "--samples", "3", "--text"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "hpt: pass"


def test_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["star"])
    assert e.value.code == 2


def test_output_is_byte_identical():
    cmd = [sys.executable, "-m", "fedbrst.cli", "star", "mul", "-K", "3", "(* p[1][1] a[1][1][2])", "(^ p[1][2] 2)"]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1]
    cmd = [sys.executable, "-m", "fedbrst.cli", "suite", "hypotheses", "--samples", "5", "-N", "2", "--seed", "3"]
    runs = [subprocess.run(cmd, capture_output=True).stdout for _ in range(2)]
    assert runs[0] == runs[1] and runs[0]
