"""Prefix expression language for PhasePoly input.

    expr   := atom | "(" op expr+ ")"
    op     := "+" | "-" | "*" | "^"
    atom   := number | "i" | "lambda" | a[n][r][c] | p[n][k] | J[k]
    number := int | int/int, optionally suffixed by "i"   (3, -2/5, 3/4i)

Indices are 1-based.  "-" with one argument negates; "^" takes an expression and a
nonnegative integer literal.  J[k] is the k-th moment component.  Whitespace separates
tokens; ";" starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .phasealg import PhasePoly, PhaseRing
from .scalars import GaussQ

__all__ = ["ParseError", "parse_expr", "render", "tokenize"]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"parse error at position {pos}: {msg}")
        self.pos = pos
        self.msg = msg


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|;[^\n]*)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<var>[apJ](?:\[\s*-?\d+\s*\])+)
  | (?P<num>[+-]?\d+(?:/\d+)?i?)
  | (?P<word>lambda|i)
  | (?P<op>[-+*^])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    return out


def _number(tok: str, pos: int) -> GaussQ:
    imag = tok.endswith("i")
    body = tok[:-1] if imag else tok
    try:
        q = Fraction(body)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {tok!r}", pos) from None
    return GaussQ(0, q) if imag else GaussQ(q)


def _variable(ring: PhaseRing, tok: str, pos: int) -> PhasePoly:
    name = tok[0]
    idx = [int(x) for x in re.findall(r"-?\d+", tok)]
    want = {"a": 3, "p": 2, "J": 1}[name]
    if len(idx) != want:
        raise ParseError(f"{name} takes {want} indices, got {len(idx)}", pos)
    if name == "a":
        n, r, c = idx
        if not (1 <= n <= ring.N and r in (1, 2) and c in (1, 2)):
            raise ParseError(f"index out of range in {tok}", pos)
        return ring.a(n - 1, r - 1, c - 1)
    if name == "p":
        n, k = idx
        if not (1 <= n <= ring.N and 1 <= k <= ring.d):
            raise ParseError(f"index out of range in {tok}", pos)
        return ring.p(ring.alg.index(n - 1, k - 1))
    (k,) = idx
    if not 1 <= k <= ring.d:
        raise ParseError(f"index out of range in {tok}", pos)
    return ring.moment_components[k - 1]


class _Parser:
    def __init__(self, ring: PhaseRing, text: str):
        self.ring = ring
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self) -> PhasePoly:
        kind, tok, pos = self.take()
        ring = self.ring
        if kind == "num":
            return ring.const(_number(tok, pos))
        if kind == "word":
            return ring.lam(1) if tok == "lambda" else ring.const(GaussQ(0, 1))
        if kind == "var":
            return _variable(ring, tok, pos)
        if kind == "lp":
            return self.form(pos)
        if kind == "eof":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {tok!r}", pos)

    def form(self, lpos: int) -> PhasePoly:
        kind, op, pos = self.take()
        if kind != "op":
            raise ParseError("expected an operator after '('", pos)
        if op == "^":
            base = self.expr()
            k, tok, epos = self.take()
            if k != "num" or not re.fullmatch(r"\+?\d+", tok):
                raise ParseError("exponent must be a nonnegative integer literal", epos)
            self.close(lpos)
            return base ** int(tok)
        args = []
        while self.peek()[0] != "rp":
            if self.peek()[0] == "eof":
                raise ParseError("unclosed '('", lpos)
            args.append(self.expr())
        self.take()
        if not args:
            raise ParseError(f"operator {op!r} needs at least one argument", pos)
        if op == "-" and len(args) == 1:
            return -args[0]
        out = args[0]
        for a in args[1:]:
            out = out + a if op == "+" else out - a if op == "-" else out * a
        return out

    def close(self, lpos: int):
        kind, tok, pos = self.take()
        if kind != "rp":
            raise ParseError("expected ')'" if kind != "eof" else "unclosed '('", pos if kind != "eof" else lpos)


def parse_expr(ring: PhaseRing, text: str) -> PhasePoly:
    p = _Parser(ring, text)
    out = p.expr()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {tok!r}", pos)
    return out.truncate(ring.K)


def _render_scalar(c: GaussQ) -> str:
    re_, im = Fraction(int(c.re.numerator), int(c.re.denominator)), Fraction(int(c.im.numerator), int(c.im.denominator))
    if not im:
        return str(re_)
    if not re_:
        return f"{im}i"
    return f"(+ {re_} {im}i)"


def render(f: PhasePoly) -> str:
    """Inverse of parse_expr up to term order: a sum of (* coefficient factors...) forms."""
    ring = f.ring
    terms = []
    for exps, lam, c in f.monomial_list():
        fac = [_render_scalar(c)]
        for v, e in enumerate(exps):
            if e:
                name = ring.var_name(v)
                fac.append(name if e == 1 else f"(^ {name} {e})")
        if lam:
            fac.append("lambda" if lam == 1 else f"(^ lambda {lam})")
        terms.append(fac[0] if len(fac) == 1 else "(* " + " ".join(fac) + ")")
    if not terms:
        return "0"
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"
