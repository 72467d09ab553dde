"""Sparse polynomial kernels on packed monomial keys.

A monomial is one Python int: exponent of variable v sits in an 8-bit field at
bit 8*v (7 value bits plus a guard bit used for divisibility tests).  Two extra
fields follow the variables: the λ exponent and a flag for a factor of i, so a
Gaussian-rational coefficient a+bi is stored as two terms with mpq coefficients.
All dicts map key -> nonzero mpq.
"""

from __future__ import annotations

from gmpy2 import mpq

W = 8
FMAX = 0x7F

Terms = dict  # int -> mpq


class Layout:
    __slots__ = ("nvars", "lam_shift", "i_shift", "lam_unit", "i_unit", "two_i", "var_mask", "guard", "units")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.lam_shift = W * nvars
        self.i_shift = W * (nvars + 1)
        self.lam_unit = 1 << self.lam_shift
        self.i_unit = 1 << self.i_shift
        self.two_i = 2 << self.i_shift
        self.var_mask = (1 << self.lam_shift) - 1
        self.guard = sum(0x80 << (W * v) for v in range(nvars + 1))
        self.units = tuple(1 << (W * v) for v in range(nvars))

    def pack(self, exps, lam: int = 0, iflag: int = 0) -> int:
        k = 0
        for v, e in enumerate(exps):
            if e:
                if e > FMAX:
                    raise OverflowError("exponent exceeds packed field width")
                k |= e << (W * v)
        return k | (lam << self.lam_shift) | (iflag << self.i_shift)

    def exps(self, key: int) -> tuple:
        return tuple((key >> (W * v)) & FMAX for v in range(self.nvars))

    def exp(self, key: int, v: int) -> int:
        return (key >> (W * v)) & FMAX

    def lam(self, key: int) -> int:
        return (key >> self.lam_shift) & FMAX

    def iflag(self, key: int) -> int:
        return key >> self.i_shift

    def degree(self, key: int, vars_=None) -> int:
        if vars_ is None:
            vars_ = range(self.nvars)
        return sum((key >> (W * v)) & FMAX for v in vars_)

    def divides(self, a: int, b: int) -> bool:
        """Does monomial a divide monomial b (variables and λ fields only)."""
        return ((b | self.guard) - a) & self.guard == self.guard


def add_into(out: Terms, a: Terms, scale=None) -> None:
    if scale is None:
        for k, c in a.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
    else:
        for k, c in a.items():
            c = c * scale
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]


def add(a: Terms, b: Terms) -> Terms:
    out = dict(a)
    add_into(out, b)
    return out


def sub(a: Terms, b: Terms) -> Terms:
    out = dict(a)
    add_into(out, b, mpq(-1))
    return out


def scale(a: Terms, s) -> Terms:
    if not s:
        return {}
    return {k: c * s for k, c in a.items()}


def shift(a: Terms, delta: int, lay: Layout, K: int | None = None) -> Terms:
    """Multiply every term by the monomial whose packed key is ``delta`` (may carry λ and i)."""
    out = {}
    ish, two_i, lsh = lay.i_shift, lay.two_i, lay.lam_shift
    for k, c in a.items():
        k = k + delta
        if (k >> ish) & 2:
            k -= two_i
            c = -c
        if K is not None and ((k >> lsh) & FMAX) > K:
            continue
        out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c}


def mul(a: Terms, b: Terms, lay: Layout, K: int | None) -> Terms:
    """Product with λ-truncation above K (K=None: no truncation)."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    ish, two_i, lsh = lay.i_shift, lay.two_i, lay.lam_shift
    out: dict = {}
    get = out.get
    if K is None:
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                c = ca * cb
                if (k >> ish) & 2:
                    k -= two_i
                    c = -c
                v = get(k)
                out[k] = c if v is None else v + c
    else:
        buckets: dict = {}
        for kb, cb in b.items():
            buckets.setdefault((kb >> lsh) & FMAX, []).append((kb, cb))
        for ka, ca in a.items():
            room = K - ((ka >> lsh) & FMAX)
            if room < 0:
                continue
            for lb, items in buckets.items():
                if lb > room:
                    continue
                for kb, cb in items:
                    k = ka + kb
                    c = ca * cb
                    if (k >> ish) & 2:
                        k -= two_i
                        c = -c
                    v = get(k)
                    out[k] = c if v is None else v + c
    return {k: c for k, c in out.items() if c}


def truncate(a: Terms, lay: Layout, K: int) -> Terms:
    lsh = lay.lam_shift
    return {k: c for k, c in a.items() if ((k >> lsh) & FMAX) <= K}


def derive(a: Terms, v: int, lay: Layout) -> Terms:
    """Partial derivative with respect to variable v."""
    sh = W * v
    unit = 1 << sh
    out = {}
    for k, c in a.items():
        e = (k >> sh) & FMAX
        if e:
            out[k - unit] = c * e
    return out


def linear_derivation(a: Terms, table, lay: Layout) -> Terms:
    """Apply the derivation x_v -> Σ c x_w given by table[v] = [(delta_key, mpq), ...].

    ``delta_key`` is unit_w - unit_v (+ i-flag unit if the coefficient is imaginary).
    """
    ish, two_i = lay.i_shift, lay.two_i
    out: dict = {}
    get = out.get
    for v, row in table:
        sh = W * v
        for k, c in a.items():
            e = (k >> sh) & FMAX
            if not e:
                continue
            ce = c * e
            for delta, cc in row:
                kk = k + delta
                val = ce * cc
                if (kk >> ish) & 2:
                    kk -= two_i
                    val = -val
                old = get(kk)
                out[kk] = val if old is None else old + val
    return {k: c for k, c in out.items() if c}


def power(a: Terms, n: int, lay: Layout, K: int | None, one_key: int = 0) -> Terms:
    out = {one_key: mpq(1)}
    base = a
    while n:
        if n & 1:
            out = mul(out, base, lay, K)
        n >>= 1
        if n:
            base = mul(base, base, lay, K)
    return out


def substitute_linear(a: Terms, images: dict, lay: Layout, K: int | None) -> Terms:
    """Replace variable v by the polynomial images[v] (variables absent from images stay)."""
    cache: dict = {}

    def pw(v, e):
        key = (v, e)
        r = cache.get(key)
        if r is None:
            r = cache[key] = power(images[v], e, lay, K)
        return r

    out: dict = {}
    for k, c in a.items():
        rest = k
        term = None
        for v in images:
            e = (k >> (W * v)) & FMAX
            if e:
                rest -= e << (W * v)
                p = pw(v, e)
                term = p if term is None else mul(term, p, lay, K)
        if term is None:
            add_into(out, {k: c})
        else:
            add_into(out, shift(term, rest, lay, K), c)
    return out
