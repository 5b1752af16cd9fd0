"""PBW normal forms for U(V) and U(L_+), the smash product A#U(V) and D (x) U(L_+).

A PBW word is a tuple of letters sorted by :func:`letter_order`.  Elements
of an enveloping algebra are dicts ``word -> Fraction``.  Straightening
uses uv = vu + [u, v] on adjacent letters, with results memoized per
algebra.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .arithpoly import (
    DimensionError,
    MultiIndex,
    Polynomial,
    Q,
    ScalarLike,
    add_index,
    format_monomial,
    zero_index,
)
from .linalg import add_into, add_term_into
from .liefields import Letter, _letter_bracket, letter_order
from .weyl import WeylElement, WeylKey, _monomial_product, format_weyl

Word = Tuple[Letter, ...]
UElem = Dict[Word, Fraction]

DEFAULT_WORK_LIMIT = 2_000_000


class StraighteningLimitExceeded(RuntimeError):
    """PBW straightening needed more rewrite steps than the configured limit."""


class EnvelopingAlgebra:
    """U(V) (``plus=False``) or U(L_+) (``plus=True``) in rank ``n``."""

    def __init__(self, n: int, plus: bool, work_limit: int = DEFAULT_WORK_LIMIT):
        self.n = n
        self.plus = plus
        self.work_limit = work_limit
        self.steps = 0
        self._insert_cache: Dict[Tuple[Letter, Word], UElem] = {}
        self._mul_cache: Dict[Tuple[Word, Word], UElem] = {}

    def check_letter(self, letter: Letter) -> None:
        k, i = letter
        if len(k) != self.n or not 0 <= i < self.n:
            raise DimensionError(f"letter {letter} does not belong to rank {self.n}")
        if self.plus and sum(k) < 1:
            raise ValueError(f"letter {letter} has |k| = 0 and is not in L_+")

    def is_normal(self, word: Sequence[Letter]) -> bool:
        return all(letter_order(a) <= letter_order(b) for a, b in zip(word, word[1:]))

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.work_limit:
            self.steps = 0
            raise StraighteningLimitExceeded(
                f"PBW straightening exceeded {self.work_limit} rewrite steps"
            )

    def insert(self, letter: Letter, word: Word) -> UElem:
        """Normal form of letter * word for a normal ``word``."""
        key = (letter, word)
        hit = self._insert_cache.get(key)
        if hit is not None:
            return hit
        self._tick()
        if not word or letter_order(letter) <= letter_order(word[0]):
            out = {(letter,) + word: Fraction(1)}
        else:
            first, rest = word[0], word[1:]
            out: UElem = {}
            # letter*first*rest = first*(letter*rest) + [letter, first]*rest;
            # letter*rest may contain bracket letters below `first`
            for w, c in self.insert(letter, rest).items():
                add_into(out, self.insert(first, w), c)
            for l, c in _letter_bracket(letter, first):
                add_into(out, self.insert(l, rest), c)
        self._insert_cache[key] = out
        return out

    def normalize(self, word: Sequence[Letter]) -> UElem:
        """PBW normal form of an arbitrary word of letters."""
        for l in word:
            self.check_letter(l)
        out: UElem = {(): Fraction(1)}
        for l in reversed(tuple(word)):
            out = self.left_mul_letter(l, out)
        return out

    def left_mul_letter(self, letter: Letter, u: Mapping[Word, Fraction]) -> UElem:
        out: UElem = {}
        for w, c in u.items():
            add_into(out, self.insert(letter, w), c)
        return out

    def word_mul(self, u: Word, v: Word) -> UElem:
        key = (u, v)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        out: UElem = {v: Fraction(1)}
        for l in reversed(u):
            out = self.left_mul_letter(l, out)
        self._mul_cache[key] = out
        return out

    def mul(self, a: Mapping[Word, Fraction], b: Mapping[Word, Fraction]) -> UElem:
        out: UElem = {}
        for u, cu in a.items():
            for v, cv in b.items():
                add_into(out, self.word_mul(u, v), cu * cv)
        return out


@lru_cache(maxsize=None)
def enveloping(n: int, plus: bool) -> EnvelopingAlgebra:
    """Shared algebra instance (and straightening cache) per (n, plus)."""
    return EnvelopingAlgebra(n, plus)


def pbw_normalize(word: Sequence[Letter], n: int, plus: bool = False) -> UElem:
    return enveloping(n, plus).normalize(word)


def format_word(word: Word, upper: bool = False) -> str:
    if not word:
        return "1"
    var = "X" if upper else "x"
    d = "D" if upper else "d"
    parts = []
    for k, i in word:
        mono = format_monomial(k, var)
        parts.append(f"({mono + ' ' if mono else ''}{d}{i + 1})")
    return "".join(parts)


# -- smash product A # U(V) ----------------------------------------------------

SmashKey = Tuple[MultiIndex, Word]


def _derive_monomial(letter: Letter, a: MultiIndex) -> Tuple[MultiIndex, int] | None:
    """x^k d_i (x^a) as (exponent, coefficient), or None when zero."""
    k, i = letter
    if not a[i]:
        return None
    e = list(add_index(k, a))
    e[i] -= 1
    return tuple(e), a[i]


class SmashElement:
    """sum c * x^a # u with u a PBW word of U(V)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[SmashKey, ScalarLike] | None = None):
        self.n = n
        alg = enveloping(n, False)
        clean: Dict[SmashKey, Fraction] = {}
        for (a, w), c in (terms or {}).items():
            a, w = tuple(a), tuple(tuple((tuple(k), i)) for k, i in w)
            if len(a) != n:
                raise DimensionError(f"exponent {a} does not match n={n}")
            c = Q(c)
            if not c:
                continue
            if alg.is_normal(w):
                for l in w:
                    alg.check_letter(l)
                add_term_into(clean, (a, w), c)
            else:
                for ww, cc in alg.normalize(w).items():
                    add_term_into(clean, (a, ww), c * cc)
        self.terms = clean

    @classmethod
    def _raw(cls, n: int, terms: Dict[SmashKey, Fraction]) -> "SmashElement":
        e = cls.__new__(cls)
        e.n = n
        e.terms = terms
        return e

    @classmethod
    def zero(cls, n: int) -> "SmashElement":
        return cls._raw(n, {})

    @classmethod
    def one(cls, n: int) -> "SmashElement":
        return cls._raw(n, {(zero_index(n), ()): Fraction(1)})

    @classmethod
    def from_poly(cls, f: Polynomial) -> "SmashElement":
        return cls._raw(f.n, {(k, ()): c for k, c in f.terms.items()})

    @classmethod
    def from_letter(cls, letter: Letter, c: ScalarLike = 1) -> "SmashElement":
        n = len(letter[0])
        return cls._raw(n, {(zero_index(n), (letter,)): Q(c)})

    @classmethod
    def from_vector_field(cls, eta) -> "SmashElement":
        n = eta.n
        z = zero_index(n)
        return cls._raw(n, {(z, (l,)): c for l, c in eta.letters().items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SmashElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def _check(self, other) -> None:
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def __add__(self, other: "SmashElement") -> "SmashElement":
        self._check(other)
        return SmashElement._raw(self.n, add_into(dict(self.terms), other.terms))

    def __sub__(self, other: "SmashElement") -> "SmashElement":
        self._check(other)
        return SmashElement._raw(self.n, add_into(dict(self.terms), other.terms, -1))

    def __neg__(self) -> "SmashElement":
        return SmashElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def scale(self, c: ScalarLike) -> "SmashElement":
        c = Q(c)
        return SmashElement._raw(self.n, {k: v * c for k, v in self.terms.items()} if c else {})

    def __mul__(self, other) -> "SmashElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SmashElement):
            return NotImplemented
        return smash_mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, w), c in sorted(self.terms.items(), key=lambda t: (sum(t[0][0]), t[0][0], len(t[0][1]), t[0][1])):
            parts.append(f"({c}) {format_monomial(a) or '1'} # {format_word(w)}")
        return " + ".join(parts)

    __repr__ = __str__


_smash_letter_cache: Dict[Tuple[Letter, MultiIndex, Word], Dict[SmashKey, Fraction]] = {}


def _smash_letter_term(letter: Letter, a: MultiIndex, w: Word) -> Dict[SmashKey, Fraction]:
    """(1 # eta)(x^a # w) = eta(x^a) # w + x^a # (eta w)."""
    key = (letter, a, w)
    hit = _smash_letter_cache.get(key)
    if hit is not None:
        return hit
    out: Dict[SmashKey, Fraction] = {}
    d = _derive_monomial(letter, a)
    if d is not None:
        add_term_into(out, (d[0], w), Fraction(d[1]))
    alg = enveloping(len(a), False)
    for ww, c in alg.insert(letter, w).items():
        add_term_into(out, (a, ww), c)
    _smash_letter_cache[key] = out
    return out


def smash_left_letter(letter: Letter, b: SmashElement) -> SmashElement:
    out: Dict[SmashKey, Fraction] = {}
    for (a, w), c in b.terms.items():
        add_into(out, _smash_letter_term(letter, a, w), c)
    return SmashElement._raw(b.n, out)


def smash_mul(a: SmashElement, b: SmashElement) -> SmashElement:
    """(f # u)(g # v): peel the letters of u onto g # v right to left, then multiply by f."""
    if a.n != b.n:
        raise DimensionError(f"ambient dimensions differ: {a.n} vs {b.n}")
    out: Dict[SmashKey, Fraction] = {}
    by_word: Dict[Word, Dict[MultiIndex, Fraction]] = {}
    for (f, u), c in a.terms.items():
        by_word.setdefault(u, {})[f] = c
    for u, fs in by_word.items():
        cur = b
        for l in reversed(u):
            cur = smash_left_letter(l, cur)
        for (g, w), c in cur.terms.items():
            for f, cf in fs.items():
                add_term_into(out, (add_index(f, g), w), cf * c)
    return SmashElement._raw(a.n, out)


# -- tensor algebra D (x) U(L_+) ----------------------------------------------

TensorKey = Tuple[WeylKey, Word]


class TensorElement:
    """sum c * (x^r d^s) (x) v with v a PBW word of U(L_+)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[TensorKey, ScalarLike] | None = None):
        self.n = n
        alg = enveloping(n, True)
        clean: Dict[TensorKey, Fraction] = {}
        for ((r, s), w), c in (terms or {}).items():
            r, s = tuple(r), tuple(s)
            w = tuple((tuple(k), i) for k, i in w)
            if len(r) != n or len(s) != n:
                raise DimensionError(f"Weyl monomial {(r, s)} does not match n={n}")
            c = Q(c)
            if not c:
                continue
            for ww, cc in alg.normalize(w).items():
                add_term_into(clean, ((r, s), ww), c * cc)
        self.terms = clean

    @classmethod
    def _raw(cls, n: int, terms: Dict[TensorKey, Fraction]) -> "TensorElement":
        e = cls.__new__(cls)
        e.n = n
        e.terms = terms
        return e

    @classmethod
    def zero(cls, n: int) -> "TensorElement":
        return cls._raw(n, {})

    @classmethod
    def one(cls, n: int) -> "TensorElement":
        z = zero_index(n)
        return cls._raw(n, {((z, z), ()): Fraction(1)})

    @classmethod
    def from_weyl(cls, w: WeylElement) -> "TensorElement":
        return cls._raw(w.n, {(k, ()): c for k, c in w.terms.items()})

    @classmethod
    def from_lplus_letter(cls, letter: Letter, c: ScalarLike = 1) -> "TensorElement":
        n = len(letter[0])
        enveloping(n, True).check_letter(letter)
        z = zero_index(n)
        return cls._raw(n, {((z, z), (letter,)): Q(c)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def _check(self, other) -> None:
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        return TensorElement._raw(self.n, add_into(dict(self.terms), other.terms))

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        return TensorElement._raw(self.n, add_into(dict(self.terms), other.terms, -1))

    def __neg__(self) -> "TensorElement":
        return TensorElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def scale(self, c: ScalarLike) -> "TensorElement":
        c = Q(c)
        return TensorElement._raw(self.n, {k: v * c for k, v in self.terms.items()} if c else {})

    def __mul__(self, other) -> "TensorElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TensorElement):
            return NotImplemented
        return tensor_mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for ((r, s), w), c in self.terms.items():
            mono = " ".join(p for p in (format_monomial(r), format_monomial(s, "d")) if p) or "1"
            parts.append(f"({c}) {mono} (x) {format_word(w, upper=True)}")
        return " + ".join(sorted(parts))

    __repr__ = __str__


def tensor_mul(a: TensorElement, b: TensorElement) -> TensorElement:
    """(w1 (x) v1)(w2 (x) v2) = (w1 w2) (x) (v1 v2)."""
    if a.n != b.n:
        raise DimensionError(f"ambient dimensions differ: {a.n} vs {b.n}")
    alg = enveloping(a.n, True)
    out: Dict[TensorKey, Fraction] = {}
    for ((r, s), u), c1 in a.terms.items():
        for ((p, q), v), c2 in b.terms.items():
            uv = alg.word_mul(u, v)
            c = c1 * c2
            for wkey, m in _monomial_product(r, s, p, q):
                cm = c * m
                for w, cw in uv.items():
                    add_term_into(out, (wkey, w), cm * cw)
    return TensorElement._raw(a.n, out)


def commutator(a, b):
    return a * b - b * a
