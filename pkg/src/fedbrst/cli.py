"""Command-line front end.

    fedbrst star mul -K 3 -N 1 EXPR EXPR
    fedbrst star bm -m 2 -N 1
    fedbrst hpt perturb --input r.json --t t.json -K 2 [--side i|p]
    fedbrst ideal nf -N 1 EXPR
    fedbrst ideal syz -N 1 --max-deg 4
    fedbrst hypotheses check --case T --samples 200 --seed 7
    fedbrst reduce star -K 2 -N 1 EXPR EXPR
    fedbrst suite {star-identities,brst-identities,hpt,hypotheses,reduce} [-K -N --deg-cap --seed --samples]

Exit codes: 0 success, 1 a check failed or a computation was refused, 2 usage or parse error.
The Gröbner cache directory is taken from FEDBRST_CACHE_DIR.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import hypotheses as hyp
from .expr import ParseError, parse_expr
from .hpt import FiltrationError, LamMatrix, PerturbationError, Retract, perturb, validate_retract
from .phasealg import PhaseRing
from .polyengine import CapExceeded, KoszulHomotopy
from .reduce import NonCocycleError, NonInvariantError, Reducer
from .report import jsonable
from .star import MAX_M, build_bm, star
from .suites import SUITES, SuiteConfig, run_suite


class CommandFailed(Exception):
    def __init__(self, payload: dict):
        super().__init__(payload.get("error", "failed"))
        self.payload = payload


def _dump(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _common(p: argparse.ArgumentParser, K: int = 2, N: int = 1):
    p.add_argument("-K", type=int, default=K, help="λ truncation order (results are mod λ^{K+1})")
    p.add_argument("-N", type=int, default=N, help="number of copies of SU(2)")
    p.add_argument("--deg-cap", type=int, default=6, help="polynomial degree window")
    p.add_argument("--seed", type=int, default=0)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fedbrst", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="group", required=True)

    star_p = sub.add_parser("star").add_subparsers(dest="verb", required=True)
    p = star_p.add_parser("mul")
    _common(p, K=3)
    p.add_argument("exprs", nargs=2, metavar="EXPR")
    p = star_p.add_parser("bm")
    _common(p)
    p.add_argument("-m", type=int, required=True)

    hpt_p = sub.add_parser("hpt").add_subparsers(dest="verb", required=True)
    p = hpt_p.add_parser("perturb")
    _common(p)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--t", required=True, type=Path)
    p.add_argument("--side", choices=("i", "p"), default="i")

    ideal_p = sub.add_parser("ideal").add_subparsers(dest="verb", required=True)
    p = ideal_p.add_parser("nf")
    _common(p)
    p.add_argument("expr", metavar="EXPR")
    p = ideal_p.add_parser("syz")
    _common(p)
    p.add_argument("--max-deg", type=int, default=4)

    hyp_p = sub.add_parser("hypotheses").add_subparsers(dest="verb", required=True)
    p = hyp_p.add_parser("check")
    _common(p, N=2)
    p.add_argument("--case", choices=hyp.CASES, required=True)
    p.add_argument("--samples", type=int, default=100)

    red_p = sub.add_parser("reduce").add_subparsers(dest="verb", required=True)
    p = red_p.add_parser("star")
    _common(p)
    p.add_argument("exprs", nargs=2, metavar="EXPR")

    p = sub.add_parser("suite")
    p.add_argument("name", choices=sorted(SUITES))
    _common(p)
    p.add_argument("--samples", type=int, default=100)
    return ap


# --- commands ---


def _star_mul(a) -> dict:
    ring = PhaseRing(a.N, a.K)
    f, g = (parse_expr(ring, e) for e in a.exprs)
    return star(f, g).to_json()


def _star_bm(a) -> dict:
    if a.m > MAX_M:
        raise CommandFailed({"error": f"resource cap exceeded: m = {a.m} > {MAX_M}"})
    ring = PhaseRing(a.N, a.K)
    return {"m": a.m, "N": a.N, "terms": build_bm(ring, a.m).term_list(ring)}


def _hpt_perturb(a) -> dict:
    r = Retract.from_json(json.loads(a.input.read_text()), a.K)
    t = LamMatrix.from_json(json.loads(a.t.read_text()), a.K)
    rin = validate_retract(r)
    if not rin.passed:
        raise CommandFailed({"error": "input retract is invalid", "validation": rin.to_json()})
    try:
        r2, info = perturb(r, t, a.side)
    except (PerturbationError, FiltrationError) as e:
        raise CommandFailed({"error": str(e)}) from None
    rep = validate_retract(r2)
    out = {"retract": r2.to_json(), "validation": rep.to_json(), "tau_zero": info["tau_zero"], "side": a.side}
    if not rep.passed:
        raise CommandFailed(dict(out, error="perturbed retract fails validation"))
    return out


def _ideal_nf(a) -> dict:
    ring = PhaseRing(a.N, a.K)
    kh = KoszulHomotopy(ring, a.deg_cap)
    f = parse_expr(ring, a.expr)
    try:
        q = kh.h0(f)
    except CapExceeded as e:
        raise CommandFailed({"error": str(e)}) from None
    return {"normal_form": kh.rest(f).to_json(), "quotients": [x.to_json() for x in q]}


def _ideal_syz(a) -> dict:
    ring = PhaseRing(a.N, a.K)
    kh = KoszulHomotopy(ring, a.deg_cap)
    extra = [kh.centralizer_syzygy(n) for n in range(ring.N)]
    rep = kh.syzygy_report(a.max_deg, extra)
    if not rep.passed:
        raise CommandFailed(dict(rep.to_json(), error="syzygies outside the Koszul module"))
    return rep.to_json()


def _hyp_check(a) -> dict:
    try:
        res = hyp.jacobian_rank_density(a.case, a.samples, a.seed, a.N)
    except hyp.WitnessError as e:
        raise CommandFailed({"error": str(e)}) from None
    if res["failures"]:
        raise CommandFailed(dict(res, error=f"{len(res['failures'])} failures"))
    return res


def _reduce_star(a) -> dict:
    ring = PhaseRing(a.N, a.K)
    red = Reducer(ring, a.deg_cap)
    f, g = (parse_expr(ring, e) for e in a.exprs)
    try:
        cert = red.star_certificates(f, g)
    except (CapExceeded, NonCocycleError, NonInvariantError) as e:
        raise CommandFailed({"error": str(e), "window": red.window()}) from None
    certs = {k: v.to_json() for k, v in cert.items() if k != "result"}
    out = {"result": cert["result"].to_json(), "window": red.window(), "certificates": certs}
    if not all(v["status"] == "pass" for v in certs.values()):
        raise CommandFailed(dict(out, error="certificate failed"))
    return out


def _suite(a) -> dict:
    cfg = SuiteConfig(K=a.K, N=a.N, deg_cap=a.deg_cap, seed=a.seed, samples=a.samples)
    out = run_suite(a.name, cfg)
    if out["status"] != "pass":
        raise CommandFailed(out)
    return out


COMMANDS = {
    ("star", "mul"): _star_mul,
    ("star", "bm"): _star_bm,
    ("hpt", "perturb"): _hpt_perturb,
    ("ideal", "nf"): _ideal_nf,
    ("ideal", "syz"): _ideal_syz,
    ("hypotheses", "check"): _hyp_check,
    ("reduce", "star"): _reduce_star,
}


def _text(obj) -> str:
    if isinstance(obj, dict) and "reports" in obj:
        lines = [f"{obj['suite']}: {obj['status']}"]
        lines += [f"  {r['check']}: {r['status']}" for r in obj["reports"]]
        return "\n".join(lines)
    if isinstance(obj, dict) and "error" in obj:
        return f"error: {obj['error']}"
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    fn = _suite if a.group == "suite" else COMMANDS[(a.group, a.verb)]
    emit = (lambda o: print(_text(o))) if a.fmt == "text" else (lambda o: print(_dump(o)))
    try:
        emit(fn(a))
        return 0
    except ParseError as e:
        emit({"error": str(e), "position": e.pos})
        return 2
    except CommandFailed as e:
        emit(e.payload)
        return 1
    except (OSError, ValueError, KeyError) as e:
        emit({"error": f"{type(e).__name__}: {e}"})
        return 2


if __name__ == "__main__":
    sys.exit(main())
