"""Exact rationals, multi-indices and sparse multivariate polynomials over Q.

Polynomials are immutable maps ``MultiIndex -> Fraction`` with no stored
zero coefficients.  Multi-indices are plain tuples of non-negative ints.
Variable indices in the Python API are 0-based; the text syntax uses the
1-based names ``x1 .. xn``.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple, Union

Scalar = Fraction
MultiIndex = Tuple[int, ...]
ScalarLike = Union[int, Fraction, str]


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


def Q(x: ScalarLike) -> Fraction:
    """Coerce ``x`` to an exact rational; strings may be ``"num/den"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating-point scalars are not accepted")
    return Fraction(x)


def q_str(x: Fraction) -> str:
    """Serialize a rational as ``num/den`` (``num`` when integral)."""
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def grlex_key(k: MultiIndex) -> tuple:
    """Sort key for graded-lex order: by total degree, then x1 > x2 > ... ."""
    return (sum(k), tuple(-e for e in k))


def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def unit_index(n: int, i: int) -> MultiIndex:
    k = [0] * n
    k[i] = 1
    return tuple(k)


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def sub_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def leq_index(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def indices_below(k: MultiIndex) -> Iterator[MultiIndex]:
    """All m with 0 <= m <= k componentwise."""
    return itertools.product(*(range(e + 1) for e in k))


def multi_binomial(k: MultiIndex, m: MultiIndex) -> int:
    """Product of binomials C(k_i, m_i); zero unless m <= k componentwise."""
    out = 1
    for ki, mi in zip(k, m):
        if mi < 0 or mi > ki:
            return 0
        out *= comb(ki, mi)
    return out


def indices_of_degree(n: int, d: int) -> List[MultiIndex]:
    """Multi-indices of length ``n`` with entry sum ``d``, in graded-lex order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for first in range(d, -1, -1):
        for rest in indices_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


def monomial_basis(n: int, dmax: int) -> List[MultiIndex]:
    """All multi-indices with |k| <= dmax in graded-lex order."""
    if dmax < 0:
        raise ValueError("dmax must be non-negative")
    out: List[MultiIndex] = []
    for d in range(dmax + 1):
        out.extend(indices_of_degree(n, d))
    return out


class Polynomial:
    """Sparse polynomial in ``k[x1..xn]`` with exact rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[MultiIndex, ScalarLike] | None = None):
        self.n = n
        clean: Dict[MultiIndex, Fraction] = {}
        if terms:
            for k, c in terms.items():
                if len(k) != n:
                    raise DimensionError(f"exponent {k} has length {len(k)} != {n}")
                if any(e < 0 for e in k):
                    raise ValueError(f"negative exponent in {k}")
                c = Q(c)
                if c:
                    clean[tuple(k)] = clean.get(tuple(k), 0) + c
            clean = {k: c for k, c in clean.items() if c}
        self.terms = clean

    @classmethod
    def _raw(cls, n: int, terms: Dict[MultiIndex, Fraction]) -> "Polynomial":
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        return p

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, c: ScalarLike = 1) -> "Polynomial":
        return cls(n, {zero_index(n): c})

    @classmethod
    def monomial(cls, k: MultiIndex, c: ScalarLike = 1) -> "Polynomial":
        return cls(len(k), {tuple(k): c})

    @classmethod
    def var(cls, n: int, i: int) -> "Polynomial":
        return cls.monomial(unit_index(n, i))

    # -- inspection -------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(k) for k in self.terms), default=-1)

    def sorted_terms(self) -> List[Tuple[MultiIndex, Fraction]]:
        """Terms in decreasing graded-lex order."""
        return sorted(self.terms.items(), key=lambda kc: grlex_key(kc[0]), reverse=True)

    def coefficient(self, k: MultiIndex) -> Fraction:
        return self.terms.get(tuple(k), Fraction(0))

    def evaluate(self, point: Iterable[ScalarLike]) -> Fraction:
        pt = [Q(c) for c in point]
        total = Fraction(0)
        for k, c in self.terms.items():
            term = c
            for e, v in zip(k, pt):
                if e:
                    term *= v ** e
            total += term
        return total

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.n, other)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, c in other.terms.items():
            v = terms.get(k, 0) + c
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        return Polynomial._raw(self.n, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c: ScalarLike) -> "Polynomial":
        c = Q(c)
        if not c:
            return Polynomial.zero(self.n)
        return Polynomial._raw(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms: Dict[MultiIndex, Fraction] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                terms[k] = terms.get(k, 0) + ca * cb
        return Polynomial._raw(self.n, {k: c for k, c in terms.items() if c})

    def __rmul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative power")
        out = Polynomial.const(self.n, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def partial(self, i: int) -> "Polynomial":
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for n={self.n}")
        terms = {}
        for k, c in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                terms[tuple(kk)] = c * k[i]
        return Polynomial._raw(self.n, terms)

    def divide_exact(self, f: "Polynomial") -> "Polynomial | None":
        """Return ``self / f`` when ``f`` divides ``self``, else ``None``."""
        self._check(f)
        if not f:
            raise ZeroDivisionError("division by the zero polynomial")
        lead_f, lc_f = max(f.terms.items(), key=lambda kc: grlex_key(kc[0]))
        rem = self
        quot: Dict[MultiIndex, Fraction] = {}
        while rem:
            lead, lc = max(rem.terms.items(), key=lambda kc: grlex_key(kc[0]))
            if not leq_index(lead_f, lead):
                return None
            k = sub_index(lead, lead_f)
            c = lc / lc_f
            quot[k] = c
            rem = rem - Polynomial._raw(self.n, {k: c}) * f
        return Polynomial._raw(self.n, quot)

    # -- text -------------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {format_poly(self)!r})"


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def poly_partial(p: Polynomial, i: int) -> Polynomial:
    return p.partial(i)


# -- text syntax -------------------------------------------------------------

_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_FACTOR = re.compile(r"^(x|d)(\d+)(?:\^(\d+))?$")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")


def parse_monomial_terms(text: str, n: int, letters: str = "x") -> List[Tuple[Fraction, Dict[str, MultiIndex]]]:
    """Split ``text`` into (coefficient, {letter: exponent}) pairs.

    ``letters`` lists the variable prefixes allowed (``"x"`` or ``"xd"``).
    """
    text = text.strip()
    if not text:
        raise ValueError("empty expression")
    if text[0] not in "+-":
        text = "+" + text
    pieces = _TERM_SPLIT.split(text)
    out = []
    # pieces: ['', sign, body, sign, body, ...]
    if pieces[0].strip():
        raise ValueError(f"cannot parse {text!r}")
    for sign, body in zip(pieces[1::2], pieces[2::2]):
        tokens = body.replace("*", " ").split()
        if not tokens:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = Fraction(1)
        exps = {ch: [0] * n for ch in letters}
        for tok in tokens:
            if _NUMBER.match(tok):
                coeff *= Fraction(tok)
                continue
            m = _FACTOR.match(tok)
            if not m or m.group(1) not in letters:
                raise ValueError(f"bad factor {tok!r}")
            idx = int(m.group(2)) - 1
            if not 0 <= idx < n:
                raise ValueError(f"variable {tok!r} out of range for n={n}")
            exps[m.group(1)][idx] += int(m.group(3) or 1)
        if sign == "-":
            coeff = -coeff
        out.append((coeff, {ch: tuple(e) for ch, e in exps.items()}))
    return out


def parse_poly(text: str, n: int) -> Polynomial:
    """Parse e.g. ``"3/2 x1^2 x3 - x2 + 1"``."""
    terms: Dict[MultiIndex, Fraction] = {}
    for c, exps in parse_monomial_terms(text, n, "x"):
        k = exps["x"]
        terms[k] = terms.get(k, 0) + c
    return Polynomial(n, terms)


def format_monomial(k: MultiIndex, letter: str = "x") -> str:
    parts = []
    for i, e in enumerate(k):
        if e == 1:
            parts.append(f"{letter}{i + 1}")
        elif e > 1:
            parts.append(f"{letter}{i + 1}^{e}")
    return " ".join(parts)


def format_term(c: Fraction, mono: str, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if mono:
        body = mono if mag == 1 else f"{q_str(mag)} {mono}"
    else:
        body = q_str(mag)
    if first:
        return body if sign == "+" else f"-{body}"
    return f" {sign} {body}"


def format_poly(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    return "".join(
        format_term(c, format_monomial(k), i == 0) for i, (k, c) in enumerate(p.sorted_terms())
    )
