"""Homological perturbation on finite graded complexes over Q(i)[λ]/(λ^{K+1}).

A complex is stored as one total space with a degree per basis vector; graded
maps are sparse matrices of truncated series whose nonzero entries respect the
degree shift.  Retract convention: p∘i = id and i∘p - id = h∘d + d∘h.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Callable

from .report import Report
from .scalars import GaussQ, Series

__all__ = [
    "LamMatrix",
    "FiniteComplex",
    "Retract",
    "FiltrationError",
    "PerturbationError",
    "validate_retract",
    "perturb",
    "neumann_inverse",
    "neumann_apply",
    "identity_retract",
    "random_retract",
    "random_perturbation",
]


class FiltrationError(ValueError):
    pass


class PerturbationError(ValueError):
    pass


class LamMatrix:
    """Sparse rows x cols matrix with Series entries (all with the same K)."""

    __slots__ = ("rows", "cols", "K", "e")

    def __init__(self, rows: int, cols: int, K: int, entries: dict | None = None):
        self.rows, self.cols, self.K = rows, cols, K
        self.e = {k: v for k, v in (entries or {}).items() if v}

    @classmethod
    def zero(cls, rows, cols, K):
        return cls(rows, cols, K)

    @classmethod
    def identity(cls, n, K):
        return cls(n, n, K, {(r, r): Series.const(1, K) for r in range(n)})

    @classmethod
    def from_rows(cls, rows: list, K: int, lam_order: int = 0) -> "LamMatrix":
        """Constant matrix (times λ^lam_order) from a list of rows of scalars."""
        e = {}
        for r, row in enumerate(rows):
            for c, x in enumerate(row):
                x = GaussQ.coerce(x)
                if x:
                    e[(r, c)] = Series.const(x, K).shift(lam_order)
        return cls(len(rows), len(rows[0]) if rows else 0, K, e)

    def _shape(self, o):
        if (self.rows, self.cols, self.K) != (o.rows, o.cols, o.K):
            raise ValueError("shape/truncation mismatch")

    def __add__(self, o: "LamMatrix") -> "LamMatrix":
        self._shape(o)
        e = dict(self.e)
        for k, v in o.e.items():
            e[k] = e[k] + v if k in e else v
        return LamMatrix(self.rows, self.cols, self.K, e)

    def __neg__(self):
        return LamMatrix(self.rows, self.cols, self.K, {k: -v for k, v in self.e.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, s) -> "LamMatrix":
        return LamMatrix(self.rows, self.cols, self.K, {k: v * s for k, v in self.e.items()})

    def __matmul__(self, o: "LamMatrix") -> "LamMatrix":
        if self.cols != o.rows or self.K != o.K:
            raise ValueError("incompatible product")
        by_row: dict = {}
        for (r, c), v in o.e.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, k), a in self.e.items():
            for c, b in by_row.get(k, ()):
                x = a * b
                if x:
                    out[(r, c)] = out[(r, c)] + x if (r, c) in out else x
        return LamMatrix(self.rows, o.cols, self.K, out)

    def order(self) -> int | None:
        """Minimal λ-order among nonzero entries (None for the zero matrix)."""
        orders = [v.order() for v in self.e.values()]
        return min(orders) if orders else None

    def lam_part(self, m: int) -> "LamMatrix":
        return LamMatrix(self.rows, self.cols, self.K, {k: Series([v.c[m]], self.K).shift(m) for k, v in self.e.items() if v.c[m]})

    def is_zero(self) -> bool:
        return not self.e

    def __eq__(self, o):
        return isinstance(o, LamMatrix) and (self.rows, self.cols, self.K) == (o.rows, o.cols, o.K) and self.e == o.e

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.e.items())))

    def first_nonzero(self):
        if not self.e:
            return None
        return min(self.e)

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "K": self.K,
            "entries": [[r, c, v.to_json()] for (r, c), v in sorted(self.e.items())],
        }

    @classmethod
    def from_json(cls, doc: dict, K: int | None = None) -> "LamMatrix":
        K = doc.get("K", 0) if K is None else K
        e = {}
        for r, c, v in doc["entries"]:
            if isinstance(v, list) and v and isinstance(v[0], list):
                e[(r, c)] = Series.from_json(v, K)
            else:
                e[(r, c)] = Series.const(GaussQ.from_json(v), K)
        return cls(doc["rows"], doc["cols"], K, e)

    def with_K(self, K: int) -> "LamMatrix":
        return LamMatrix(self.rows, self.cols, K, {k: Series(v.c, K) for k, v in self.e.items()})

    def __repr__(self):
        return f"LamMatrix({self.rows}x{self.cols}, K={self.K}, nnz={len(self.e)})"


def neumann_inverse(A: LamMatrix) -> LamMatrix:
    """Inverse of A = id + N with N strictly λ-raising, as Σ_{k≤K} (-N)^k."""
    if A.rows != A.cols:
        raise ValueError("neumann_inverse needs a square matrix")
    I = LamMatrix.identity(A.rows, A.K)
    N = A - I
    o = N.order()
    if o is not None and o < 1:
        raise FiltrationError("λ⁰ part of A is not the identity")
    out, term = I, I
    for _ in range(A.K):
        term = -(term @ N)
        if term.is_zero():
            break
        out = out + term
    return out


def neumann_apply(x, N: Callable, K: int, add: Callable, neg: Callable, is_zero: Callable):
    """Σ_{k≤K} (-N)^k x for an operator N that raises the λ-order (operator-level variant)."""
    out, term = x, x
    for _ in range(K):
        term = neg(N(term))
        if is_zero(term):
            break
        out = add(out, term)
    return out


@dataclass(frozen=True)
class FiniteComplex:
    """Cochain complex: basis vector j has degree deg[j]; d raises degree by one."""

    deg: tuple
    d: LamMatrix
    labels: tuple = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{j}" for j in range(len(self.deg))))

    @property
    def dim(self) -> int:
        return len(self.deg)

    @property
    def K(self) -> int:
        return self.d.K

    def degrees(self) -> list:
        return sorted(set(self.deg))

    def to_json(self) -> dict:
        return {"deg": list(self.deg), "labels": list(self.labels), "d": self.d.to_json()}

    @classmethod
    def from_json(cls, doc: dict, K: int | None = None) -> "FiniteComplex":
        return cls(tuple(doc["deg"]), LamMatrix.from_json(doc["d"], K), tuple(doc.get("labels", ())))

    def with_K(self, K):
        return replace(self, d=self.d.with_K(K))


@dataclass(frozen=True)
class Retract:
    """((C, δ) ⇄ (D, d), h) with i: C→D, p: D→C, h: D→D of degree -1."""

    C: FiniteComplex
    D: FiniteComplex
    i: LamMatrix
    p: LamMatrix
    h: LamMatrix
    side_conditions: bool = False

    @property
    def K(self):
        return self.D.K

    def to_json(self) -> dict:
        return {
            "C": self.C.to_json(),
            "D": self.D.to_json(),
            "i": self.i.to_json(),
            "p": self.p.to_json(),
            "h": self.h.to_json(),
            "side_conditions": self.side_conditions,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc, K: int | None = None) -> "Retract":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(
            FiniteComplex.from_json(doc["C"], K),
            FiniteComplex.from_json(doc["D"], K),
            LamMatrix.from_json(doc["i"], K),
            LamMatrix.from_json(doc["p"], K),
            LamMatrix.from_json(doc["h"], K),
            bool(doc.get("side_conditions", False)),
        )

    def with_K(self, K) -> "Retract":
        return Retract(self.C.with_K(K), self.D.with_K(K), self.i.with_K(K), self.p.with_K(K), self.h.with_K(K), self.side_conditions)


# --- validation ---


def _degree_violation(M: LamMatrix, src_deg, tgt_deg, shift):
    for (r, c) in sorted(M.e):
        if tgt_deg[r] != src_deg[c] + shift:
            return (r, c)
    return None


def _witness(name: str, M: LamMatrix, row_cx: FiniteComplex, col_cx: FiniteComplex):
    r, c = M.first_nonzero()
    v = M.e[(r, c)]
    return {
        "identity": name,
        "degree": col_cx.deg[c],
        "row": row_cx.labels[r],
        "col": col_cx.labels[c],
        "lambda_order": v.order(),
        "value": v.to_json(),
    }


def validate_retract(r: Retract) -> Report:
    """All retract identities, exact in Q(i)[λ]/(λ^{K+1}); side conditions only when flagged."""
    C, D = r.C, r.D
    Ic, Id = LamMatrix.identity(C.dim, r.K), LamMatrix.identity(D.dim, r.K)
    for name, M, sd, td, s in (
        ("deg(d_C)", C.d, C.deg, C.deg, 1),
        ("deg(d_D)", D.d, D.deg, D.deg, 1),
        ("deg(i)", r.i, C.deg, D.deg, 0),
        ("deg(p)", r.p, D.deg, C.deg, 0),
        ("deg(h)", r.h, D.deg, D.deg, -1),
    ):
        bad = _degree_violation(M, sd, td, s)
        if bad:
            return Report("retract", False, {"identity": name, "entry": list(bad)})
    checks = [
        ("d_C∘d_C = 0", C.d @ C.d, C, C),
        ("d_D∘d_D = 0", D.d @ D.d, D, D),
        ("d∘i = i∘δ", D.d @ r.i - r.i @ C.d, D, C),
        ("δ∘p = p∘d", C.d @ r.p - r.p @ D.d, C, D),
        ("p∘i = id", r.p @ r.i - Ic, C, C),
        ("i∘p - id = h∘d + d∘h", r.i @ r.p - Id - (r.h @ D.d + D.d @ r.h), D, D),
    ]
    if r.side_conditions:
        checks += [
            ("h∘h = 0", r.h @ r.h, D, D),
            ("h∘i = 0", r.h @ r.i, D, C),
            ("p∘h = 0", r.p @ r.h, C, D),
        ]
    for name, M, rc, cc in checks:
        if not M.is_zero():
            return Report("retract", False, _witness(name, M, rc, cc))
    return Report("retract", True, None, {"checked": [c[0] for c in checks]})


# --- the perturbation lemma ---


def perturb(r: Retract, t: LamMatrix, side: str = "i", opposite_convention: bool = False) -> tuple[Retract, dict]:
    """Perturb d to d + t.

    With the convention i∘p - id = hd + dh:
    side="i": H = h(id - th - ht)^{-1}, i' = i + H(ti - iτ), p' = p; requires τp = pt and p∘h = 0.
    side="p": H = (id - ht - th)^{-1} h, p' = p + (pt - τp)(id - ht - th)^{-1} h, i' = i; requires iτ = ti and h∘i = 0.
    In both cases τ = pti and the new differential on C is δ + τ.
    ``opposite_convention=True`` uses id + th + ht and i - H(ti - iτ) instead, which matches id - i∘p = hd + dh.
    """
    D, C, K = r.D, r.C, r.K
    if t.K != K or t.rows != D.dim or t.cols != D.dim:
        raise PerturbationError("perturbation has the wrong shape or truncation")
    if t.is_zero():
        return r, {"tau_zero": True}
    bad = _degree_violation(t, D.deg, D.deg, 1)
    if bad:
        raise PerturbationError(f"perturbation is not of degree +1 at entry {bad}")
    dt = D.d + t
    if not (dt @ dt).is_zero():
        raise PerturbationError("(d + t)^2 != 0")
    X = t @ r.h + r.h @ t
    o = X.order()
    if o is not None and o < 1:
        raise FiltrationError("th + ht does not raise the λ-filtration")
    tau = r.p @ t @ r.i
    sg = 1 if opposite_convention else -1
    Xinv = neumann_inverse(LamMatrix.identity(D.dim, K) + X.scale(sg))
    if side == "i":
        if not (r.p @ r.h).is_zero():
            raise PerturbationError("side condition p∘h = 0 fails")
        if not (tau @ r.p - r.p @ t).is_zero():
            raise PerturbationError("τp != pt")
        H = r.h @ Xinv
        i2 = r.i - (H @ (t @ r.i - r.i @ tau)).scale(sg)
        p2 = r.p
    elif side == "p":
        if not (r.h @ r.i).is_zero():
            raise PerturbationError("side condition h∘i = 0 fails")
        if not (r.i @ tau - t @ r.i).is_zero():
            raise PerturbationError("iτ != ti")
        H = Xinv @ r.h
        p2 = r.p - ((r.p @ t - tau @ r.p) @ Xinv @ r.h).scale(sg)
        i2 = r.i
    else:
        raise ValueError("side must be 'i' or 'p'")
    out = Retract(replace(C, d=C.d + tau), replace(D, d=dt), i2, p2, H, r.side_conditions)
    return out, {"tau_zero": tau.is_zero(), "tau": tau.to_json()}


# --- generators ---


def identity_retract(deg, d: LamMatrix) -> Retract:
    cx = FiniteComplex(tuple(deg), d)
    n = cx.dim
    I = LamMatrix.identity(n, d.K)
    return Retract(cx, cx, I, I, LamMatrix.zero(n, n, d.K), True)


def _rand_q(rng: random.Random, bound: int = 3):
    from fractions import Fraction

    return Fraction(rng.randint(-bound, bound), rng.randint(1, 2))


def _unipotent(rng, deg, K, lam_order=0, blocks=None) -> tuple[LamMatrix, LamMatrix]:
    """Random degree-preserving S = id + (strictly lower part) and its exact inverse.

    ``blocks`` (a label per basis vector) restricts off-diagonal entries to S[r][c] with blocks[r] >= blocks[c].
    """
    n = len(deg)
    order = list(range(n))
    rng.shuffle(order)
    pos = {j: k for k, j in enumerate(order)}
    e = {}
    for r in range(n):
        for c in range(n):
            if r == c or deg[r] != deg[c] or pos[r] <= pos[c]:
                continue
            if blocks is not None and blocks[r] < blocks[c]:
                continue
            if rng.random() < 0.6:
                x = _rand_q(rng)
                if x:
                    e[(r, c)] = Series.const(x, K).shift(lam_order)
    S = LamMatrix(n, n, K, e) + LamMatrix.identity(n, K)
    N = S - LamMatrix.identity(n, K)
    # N is nilpotent (strictly triangular in a permuted order)
    inv, term = LamMatrix.identity(n, K), LamMatrix.identity(n, K)
    for _ in range(n):
        term = -(term @ N)
        if term.is_zero():
            break
        inv = inv + term
    return S, inv


def random_retract(rng: random.Random, K: int = 2, n_coh: int = 2, n_pairs: int = 2, degs=(-1, 0, 1)) -> tuple[Retract, dict]:
    """Retract of a random complex onto its cohomology, built from a split form and conjugated.

    Split form: D = H ⊕ A ⊕ B with d: A → B the identity (one degree up), d = 0 on H.
    Returns the retract and the split data needed to generate compatible perturbations.
    """
    Hdeg = [rng.choice(degs) for _ in range(n_coh)]
    Adeg = [rng.choice(degs[:-1]) for _ in range(n_pairs)]
    deg = Hdeg + Adeg + [a + 1 for a in Adeg]
    nH, nA = n_coh, n_pairs
    n = len(deg)
    blocks = [0] * nH + [1] * (2 * nA)
    d0 = LamMatrix(n, n, K, {(nH + nA + k, nH + k): Series.const(1, K) for k in range(nA)})
    h0 = LamMatrix(n, n, K, {(nH + k, nH + nA + k): Series.const(-1, K) for k in range(nA)})
    i0 = LamMatrix(n, nH, K, {(k, k): Series.const(1, K) for k in range(nH)})
    p0 = LamMatrix(nH, n, K, {(k, k): Series.const(1, K) for k in range(nH)})
    S, Sinv = _unipotent(rng, deg, K)
    C = FiniteComplex(tuple(Hdeg), LamMatrix.zero(nH, nH, K), tuple(f"h{k}" for k in range(nH)))
    D = FiniteComplex(tuple(deg), S @ d0 @ Sinv, tuple(f"x{k}" for k in range(n)))
    r = Retract(C, D, S @ i0, p0 @ Sinv, S @ h0 @ Sinv, True)
    return r, {"S": S, "Sinv": Sinv, "d0": d0, "blocks": blocks, "deg": deg}


def random_perturbation(rng: random.Random, r: Retract, split: dict, side: str = "i") -> LamMatrix:
    """t = S(T d0 T^{-1} - d0)S^{-1} for a λ-raising change of basis T.

    side="i": T is block lower triangular for (H | A⊕B), which gives τp = pt.
    side="p": T is block upper triangular, which gives iτ = ti.
    side="any": no block constraint.
    """
    K = r.K
    blocks = split["blocks"]
    if side == "p":
        blocks = [1 - b for b in blocks]
    elif side == "any":
        blocks = None
    T, Tinv = _unipotent(rng, split["deg"], K, lam_order=1, blocks=blocks)
    S, Sinv, d0 = split["S"], split["Sinv"], split["d0"]
    return S @ (T @ d0 @ Tinv - d0) @ Sinv
