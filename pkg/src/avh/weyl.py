"""The rank-n Weyl algebra in normal form (all x's to the left of all d's)."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Mapping, Tuple

from .arithpoly import (
    DimensionError,
    MultiIndex,
    Polynomial,
    Q,
    ScalarLike,
    format_monomial,
    format_term,
    grlex_key,
    monomial_basis,
    parse_monomial_terms,
    zero_index,
)

WeylKey = Tuple[MultiIndex, MultiIndex]


def falling(a: int, j: int) -> int:
    """a (a-1) ... (a-j+1)."""
    out = 1
    for t in range(j):
        out *= a - t
    return out


def weyl_key_order(key: WeylKey) -> tuple:
    """Bernstein degree first, then graded-lex on (r, s)."""
    r, s = key
    return (sum(r) + sum(s), grlex_key(r + s))


@lru_cache(maxsize=None)
def _monomial_product(r: MultiIndex, s: MultiIndex, a: MultiIndex, b: MultiIndex) -> Tuple[Tuple[WeylKey, int], ...]:
    # x^r d^s . x^a d^b = sum_j prod_i C(s_i, j_i) a_i!/(a_i-j_i)!  x^{r+a-j} d^{s+b-j}
    ranges = [range(min(si, ai) + 1) for si, ai in zip(s, a)]
    out = []
    for j in itertools.product(*ranges):
        c = 1
        for si, ai, ji in zip(s, a, j):
            c *= comb(si, ji) * falling(ai, ji)
        xr = tuple(ri + ai - ji for ri, ai, ji in zip(r, a, j))
        ds = tuple(si + bi - ji for si, bi, ji in zip(s, b, j))
        out.append(((xr, ds), c))
    return tuple(out)


class WeylElement:
    """Finite sum of c * x^r d^s with exact coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[WeylKey, ScalarLike] | None = None):
        self.n = n
        clean: Dict[WeylKey, Fraction] = {}
        for (r, s), c in (terms or {}).items():
            r, s = tuple(r), tuple(s)
            if len(r) != n or len(s) != n:
                raise DimensionError(f"monomial {(r, s)} does not match n={n}")
            c = Q(c)
            if c:
                clean[(r, s)] = clean.get((r, s), 0) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def _raw(cls, n: int, terms: Dict[WeylKey, Fraction]) -> "WeylElement":
        w = cls.__new__(cls)
        w.n = n
        w.terms = terms
        return w

    @classmethod
    def zero(cls, n: int) -> "WeylElement":
        return cls._raw(n, {})

    @classmethod
    def one(cls, n: int) -> "WeylElement":
        z = zero_index(n)
        return cls._raw(n, {(z, z): Fraction(1)})

    @classmethod
    def monomial(cls, r: MultiIndex, s: MultiIndex, c: ScalarLike = 1) -> "WeylElement":
        return cls(len(r), {(tuple(r), tuple(s)): c})

    @classmethod
    def x(cls, n: int, i: int) -> "WeylElement":
        z = [0] * n
        z[i] = 1
        return cls.monomial(tuple(z), zero_index(n))

    @classmethod
    def d(cls, n: int, i: int) -> "WeylElement":
        z = [0] * n
        z[i] = 1
        return cls.monomial(zero_index(n), tuple(z))

    @classmethod
    def from_poly(cls, p: Polynomial) -> "WeylElement":
        z = zero_index(p.n)
        return cls._raw(p.n, {(k, z): c for k, c in p.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def bernstein_degree(self) -> int:
        return max((sum(r) + sum(s) for r, s in self.terms), default=-1)

    def _check(self, other: "WeylElement") -> None:
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def __add__(self, other: "WeylElement") -> "WeylElement":
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            v = terms.get(k, 0) + c
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        return WeylElement._raw(self.n, terms)

    def __neg__(self) -> "WeylElement":
        return WeylElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "WeylElement":
        c = Q(c)
        if not c:
            return WeylElement.zero(self.n)
        return WeylElement._raw(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> "WeylElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        self._check(other)
        out: Dict[WeylKey, Fraction] = {}
        for (r, s), c1 in self.terms.items():
            for (a, b), c2 in other.terms.items():
                c = c1 * c2
                for key, m in _monomial_product(r, s, a, b):
                    v = out.get(key, 0) + c * m
                    if v:
                        out[key] = v
                    else:
                        out.pop(key, None)
        return WeylElement._raw(self.n, out)

    def __rmul__(self, other) -> "WeylElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def apply(self, f: Polynomial) -> Polynomial:
        return weyl_apply(self, f)

    def sorted_terms(self) -> List[Tuple[WeylKey, Fraction]]:
        return sorted(self.terms.items(), key=lambda kc: weyl_key_order(kc[0]), reverse=True)

    def __str__(self) -> str:
        return format_weyl(self)

    def __repr__(self) -> str:
        return f"WeylElement({self.n}, {format_weyl(self)!r})"


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    return a * b


def weyl_commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return a * b - b * a


def weyl_apply(a: WeylElement, f: Polynomial) -> Polynomial:
    """Act on ``A = k[x]`` by multiplication and differentiation."""
    if a.n != f.n:
        raise DimensionError(f"ambient dimensions differ: {a.n} vs {f.n}")
    out: Dict[MultiIndex, Fraction] = {}
    for (r, s), c in a.terms.items():
        for k, ck in f.terms.items():
            if any(si > ki for si, ki in zip(s, k)):
                continue
            m = 1
            for si, ki in zip(s, k):
                m *= falling(ki, si)
            e = tuple(ki - si + ri for ki, si, ri in zip(k, s, r))
            out[e] = out.get(e, 0) + c * ck * m
    return Polynomial(f.n, out)


def bernstein_subspace(n: int, m: int) -> List[WeylElement]:
    """Basis {x^r d^s : |r|+|s| <= m} of the m-th Bernstein filtration piece."""
    if m < 0:
        raise ValueError("m must be non-negative")
    out = []
    for k in monomial_basis(2 * n, m):
        out.append(WeylElement.monomial(k[:n], k[n:]))
    return out


def parse_weyl(text: str, n: int) -> WeylElement:
    """Parse e.g. ``"x1^2 d1 d2 - 3 x2"``; ``d`` stands for a partial derivative.

    Factors are read as an already-normal-ordered monomial x^r d^s.
    """
    terms: Dict[WeylKey, Fraction] = {}
    for c, exps in parse_monomial_terms(text, n, "xd"):
        key = (exps["x"], exps["d"])
        terms[key] = terms.get(key, 0) + c
    return WeylElement(n, terms)


def format_weyl(w: WeylElement) -> str:
    if not w.terms:
        return "0"
    pieces = []
    for i, ((r, s), c) in enumerate(w.sorted_terms()):
        mono = " ".join(p for p in (format_monomial(r, "x"), format_monomial(s, "d")) if p)
        pieces.append(format_term(c, mono, i == 0))
    return "".join(pieces)
