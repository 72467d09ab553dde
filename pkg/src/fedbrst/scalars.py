"""Exact scalars: Gaussian rationals and lambda-truncated series over them."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = ["GaussQ", "Series", "to_mpq", "I", "ONE", "ZERO", "parse_scalar"]


def to_mpq(x) -> mpq:
    """Coerce int / Fraction / mpq / decimal-free string to mpq."""
    if isinstance(x, type(mpq(0))):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, (int,)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x).numerator, Fraction(x).denominator)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class GaussQ:
    """An element re + im*i of Q(i), stored as two mpq values."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_mpq(re)
        self.im = to_mpq(im)

    @classmethod
    def coerce(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(x, 0)

    def __add__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussQ.coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, Series):
            return NotImplemented
        o = GaussQ.coerce(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def norm2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussQ":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * GaussQ.coerce(o).inverse()

    def __rtruediv__(self, o):
        return GaussQ.coerce(o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o):
        try:
            o = GaussQ.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        if not self.im:
            return f"{self.re}"
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i)"

    def to_json(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def from_json(cls, v) -> "GaussQ":
        if isinstance(v, (list, tuple)):
            return cls(str(v[0]), str(v[1]))
        return cls(str(v))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


ONE = GaussQ(1)
ZERO = GaussQ(0)
I = GaussQ(0, 1)


def parse_scalar(text: str) -> GaussQ:
    """Parse '3', '-2/5', 'i', '3/4i' style literals."""
    t = text.strip()
    if t.endswith("i"):
        body = t[:-1] or "1"
        if body in ("+", "-"):
            body += "1"
        return GaussQ(0, Fraction(body))
    return GaussQ(Fraction(t))


class Series:
    """Truncated power series c_0 + c_1 λ + ... + c_K λ^K over Q(i)."""

    __slots__ = ("c", "K")

    def __init__(self, coeffs: Iterable = (), K: int = 3):
        cs = [GaussQ.coerce(x) for x in coeffs][: K + 1]
        cs += [ZERO] * (K + 1 - len(cs))
        self.c: tuple[GaussQ, ...] = tuple(cs)
        self.K = K

    @classmethod
    def const(cls, x, K: int = 3) -> "Series":
        return cls([x], K)

    @classmethod
    def lam(cls, K: int = 3) -> "Series":
        return cls([0, 1], K)

    def _check(self, o: "Series"):
        if o.K != self.K:
            raise ValueError(f"truncation mismatch {self.K} vs {o.K}")

    def _co(self, o) -> "Series":
        if isinstance(o, Series):
            self._check(o)
            return o
        return Series.const(o, self.K)

    def __add__(self, o):
        o = self._co(o)
        return Series([a + b for a, b in zip(self.c, o.c)], self.K)

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c], self.K)

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        out = [ZERO] * (self.K + 1)
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j in range(self.K + 1 - i):
                b = o.c[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return Series(out, self.K)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        c0 = self.c[0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = c0.inverse()
        out = [inv0]
        for n in range(1, self.K + 1):
            acc = ZERO
            for k in range(1, n + 1):
                acc = acc + self.c[k] * out[n - k]
            out.append(-acc * inv0)
        return Series(out, self.K)

    def __truediv__(self, o):
        return self * self._co(o).inverse()

    def order(self) -> int | None:
        """λ-adic valuation (None for the zero series)."""
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def shift(self, m: int) -> "Series":
        """Multiply by λ^m (m may be negative if low terms vanish)."""
        if m >= 0:
            return Series([ZERO] * m + list(self.c), self.K)
        if any(self.c[: -m]):
            raise ValueError("division by λ is not exact")
        return Series(list(self.c[-m:]), self.K)

    def __eq__(self, o):
        if isinstance(o, Series):
            return self.K == o.K and self.c == o.c
        try:
            return self == Series.const(o, self.K)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def __repr__(self):
        parts = [f"{a}*λ^{i}" for i, a in enumerate(self.c) if a]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> list:
        return [a.to_json() for a in self.c]

    @classmethod
    def from_json(cls, v: Sequence, K: int | None = None) -> "Series":
        K = len(v) - 1 if K is None else K
        return cls([GaussQ.from_json(x) for x in v], K)
