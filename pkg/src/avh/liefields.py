"""Polynomial vector fields: V = Der(A), L, L_+ = mL and the powers m^s L_+.

A monomial vector field x^k d/dx_i is a *letter* ``(k, i)`` with ``i``
0-based.  L and V share this representation; whether the variables are
called x or X is a labelling convention handled by the callers.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .arithpoly import (
    DimensionError,
    MultiIndex,
    Polynomial,
    format_monomial,
    grlex_key,
    indices_of_degree,
    parse_monomial_terms,
)
from .linalg import EchelonBasis, Vector

Letter = Tuple[MultiIndex, int]

# Fault injection for the self-test harness: flips the sign of the second
# term of the bracket, which breaks antisymmetry and the Jacobi identity.
_FAULTS = set(filter(None, os.environ.get("AVH_FAULT", "").split(",")))


def set_fault(name: str, enabled: bool = True) -> None:
    if enabled:
        _FAULTS.add(name)
    else:
        _FAULTS.discard(name)
    _letter_bracket.cache_clear()


def letter_grade(letter: Letter) -> int:
    """Grade |k| - 1 (so d/dx_i has grade -1 and L_d has grade d)."""
    return sum(letter[0]) - 1


def letter_order(letter: Letter) -> tuple:
    """Fixed total order on letters: (|k|, direction i, graded-lex on k)."""
    k, i = letter
    return (sum(k), i, tuple(-e for e in k))


def letter_pivot_order(letter: Letter) -> tuple:
    """Pivot order for row reduction: graded-lex on (k, i), i ascending."""
    k, i = letter
    return (grlex_key(k), -i)


class VectorField:
    """sum_i f_i d/dx_i with polynomial components."""

    __slots__ = ("n", "components")

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n = comps[0].n
        if len(comps) != n or any(c.n != n for c in comps):
            raise DimensionError("vector field needs n components in n variables")
        self.n = n
        self.components = comps

    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls([Polynomial.zero(n)] * n)

    @classmethod
    def from_letters(cls, n: int, coeffs: Mapping[Letter, Fraction]) -> "VectorField":
        comps: List[Dict[MultiIndex, Fraction]] = [dict() for _ in range(n)]
        for (k, i), c in coeffs.items():
            comps[i][k] = comps[i].get(k, 0) + c
        return cls([Polynomial(n, t) for t in comps])

    @classmethod
    def letter(cls, k: MultiIndex, i: int, c=1) -> "VectorField":
        return cls.from_letters(len(k), {(tuple(k), i): Fraction(c)})

    def letters(self) -> Dict[Letter, Fraction]:
        out = {}
        for i, f in enumerate(self.components):
            for k, c in f.terms.items():
                out[(k, i)] = c
        return out

    def __bool__(self) -> bool:
        return any(self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        _check(self, other)
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return VectorField([-a for a in self.components])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scale(self, c) -> "VectorField":
        return VectorField([a.scale(c) for a in self.components])

    def times(self, f: Polynomial) -> "VectorField":
        """The A-module structure: f * eta."""
        return VectorField([f * a for a in self.components])

    def apply(self, g: Polynomial) -> Polynomial:
        """eta(g) = sum_i f_i dg/dx_i."""
        out = Polynomial.zero(self.n)
        for i, f in enumerate(self.components):
            if f:
                out = out + f * g.partial(i)
        return out

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def __str__(self) -> str:
        parts = []
        for (k, i), c in sorted(self.letters().items(), key=lambda lc: letter_order(lc[0])):
            parts.append(f"({c}) {format_monomial(k) or '1'} d{i + 1}")
        return " + ".join(parts) or "0"

    __repr__ = __str__


def _check(a: VectorField, b: VectorField) -> None:
    if a.n != b.n:
        raise DimensionError(f"ambient dimensions differ: {a.n} vs {b.n}")


def vf_bracket(eta: VectorField, mu: VectorField) -> VectorField:
    """[eta, mu]_j = sum_i (f_i d_i g_j - g_i d_i f_j)."""
    _check(eta, mu)
    n = eta.n
    sign = 1 if "bracket-sign" in _FAULTS else -1
    comps = []
    for j in range(n):
        acc = Polynomial.zero(n)
        for i in range(n):
            fi, gi = eta.components[i], mu.components[i]
            if fi:
                acc = acc + fi * mu.components[j].partial(i)
            if gi:
                acc = acc + (gi * eta.components[j].partial(i)).scale(sign)
        comps.append(acc)
    return VectorField(comps)


@lru_cache(maxsize=None)
def _letter_bracket(a: Letter, b: Letter) -> Tuple[Tuple[Letter, int], ...]:
    (k, i), (m, j) = a, b
    n = len(k)
    out: Dict[Letter, int] = {}
    sign = 1 if "bracket-sign" in _FAULTS else -1
    # x^k d_i (x^m) d_j
    if m[i]:
        e = list(k)
        for t in range(n):
            e[t] += m[t]
        e[i] -= 1
        key = (tuple(e), j)
        out[key] = out.get(key, 0) + m[i]
    # - x^m d_j (x^k) d_i
    if k[j]:
        e = list(m)
        for t in range(n):
            e[t] += k[t]
        e[j] -= 1
        key = (tuple(e), i)
        out[key] = out.get(key, 0) + sign * k[j]
    return tuple((l, c) for l, c in out.items() if c)


def letter_bracket(a: Letter, b: Letter) -> Dict[Letter, int]:
    """Bracket of two monomial vector fields as a letter -> coefficient map."""
    return dict(_letter_bracket(a, b))


def bracket_letters(u: Mapping[Letter, Fraction], v: Mapping[Letter, Fraction]) -> Dict[Letter, Fraction]:
    out: Dict[Letter, Fraction] = {}
    for a, ca in u.items():
        for b, cb in v.items():
            for l, c in _letter_bracket(a, b):
                x = out.get(l, 0) + ca * cb * c
                if x:
                    out[l] = x
                else:
                    out.pop(l, None)
    return out


def lplus_graded_basis(n: int, d: int) -> List[Letter]:
    """Basis X^k d/dX_i, |k| = d+1, of the graded piece L_d."""
    if d < 0:
        raise ValueError("grade must be non-negative")
    return [(k, i) for i in range(n) for k in indices_of_degree(n, d + 1)]


def mpow_lplus_basis(n: int, s: int, dmax: int) -> List[Letter]:
    """Basis of m^s L_+ truncated at grade dmax: all (k, i) with s+1 <= |k| <= dmax+1."""
    if s < 0:
        raise ValueError("s must be non-negative")
    out: List[Letter] = []
    for d in range(s, dmax + 1):
        out.extend(lplus_graded_basis(n, d))
    return out


def fprime_basis(n: int) -> List[Letter]:
    """The generating subspace F' = L0 + L1 (+ L2 when n = 1)."""
    top = 2 if n == 1 else 1
    out: List[Letter] = []
    for d in range(top + 1):
        out.extend(lplus_graded_basis(n, d))
    return out


class SpanResult:
    """Echelon basis of a truncated subspace of vector fields."""

    def __init__(self, n: int, dmax: int, basis: EchelonBasis, depth_reached: int):
        self.n = n
        self.dmax = dmax
        self.basis = basis
        self.depth_reached = depth_reached

    @property
    def dim(self) -> int:
        return self.basis.rank

    def contains(self, eta) -> bool:
        v = eta.letters() if isinstance(eta, VectorField) else dict(eta)
        return self.basis.contains(_truncate(v, self.dmax))

    def dim_by_grade(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for piv in self.basis.rows:
            g = letter_grade(piv)
            out[g] = out.get(g, 0) + 1
        return out

    def vectors(self) -> List[VectorField]:
        return [VectorField.from_letters(self.n, r) for r in self.basis.rows.values()]


def _truncate(v: Mapping[Letter, Fraction], dmax: int) -> Vector:
    return {l: c for l, c in v.items() if letter_grade(l) <= dmax}


def bracket_span(gens: Iterable, depth: int, dmax: int) -> SpanResult:
    """Span of all brackets of nesting depth <= ``depth`` among ``gens``.

    Brackets are left-normed, [g1,[g2,[...,gk]]], which by the Jacobi
    identity span the same space as all bracket shapes.  Components of
    grade > dmax are discarded; this is exact when every generator lies in
    L_+ (grades >= 0), since brackets never lower the grade there.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    gen_vecs = []
    n = None
    for g in gens:
        if isinstance(g, VectorField):
            n = g.n
            v = g.letters()
        elif isinstance(g, tuple) and len(g) == 2 and isinstance(g[1], int):
            n = len(g[0])
            v = {g: Fraction(1)}
        else:
            v = dict(g)
            if v:
                n = len(next(iter(v))[0])
        gen_vecs.append(_truncate(v, dmax))
    eb = EchelonBasis(letter_pivot_order)
    frontier = eb.extend(gen_vecs)
    reached = 1
    for _ in range(depth - 1):
        if not frontier:
            break
        candidates = []
        for g in gen_vecs:
            for f in frontier:
                candidates.append(_truncate(bracket_letters(g, f), dmax))
        frontier = eb.extend(candidates)
        reached += 1
    return SpanResult(n or 0, dmax, eb, reached)


def pairwise_bracket_span(basis: Sequence[Letter], dmax: int) -> SpanResult:
    """Span of [a, b] over all pairs drawn from ``basis``, truncated at grade dmax."""
    eb = EchelonBasis(letter_pivot_order)
    n = len(basis[0][0]) if basis else 0
    for x, a in enumerate(basis):
        for b in basis[x + 1:]:
            if letter_grade(a) + letter_grade(b) > dmax:
                continue
            eb.add(_truncate(bracket_letters({a: 1}, {b: 1}), dmax))
    return SpanResult(n, dmax, eb, 1)


def bracket_identity_check(n: int, s: int, grade_max: int) -> Dict:
    """Compare span [m^s L_+, m^s L_+] with m^q L_+ grade by grade.

    q = 2s for n > 1 and 2s + 1 for n = 1.  Returns a report with the
    dimensions per grade on both sides.
    """
    q = 2 * s + (1 if n == 1 else 0)
    lhs = pairwise_bracket_span(mpow_lplus_basis(n, s, grade_max), grade_max)
    by_grade = lhs.dim_by_grade()
    rows = []
    ok = True
    for g in range(0, grade_max + 1):
        expected = len(lplus_graded_basis(n, g)) if g >= q else 0
        got = by_grade.get(g, 0)
        rows.append({"grade": g, "bracket_span_dim": got, "target_dim": expected, "pass": got == expected})
        ok &= got == expected
    # grade-by-grade dimensions equal and lhs subset of target => equal spaces
    for piv in lhs.basis.rows:
        if letter_grade(piv) < q:
            ok = False
    return {"n": n, "s": s, "q": q, "grade_max": grade_max, "grades": rows, "pass": ok}


def generation_check(n: int, grade_max: int, depth: int | None = None) -> Dict:
    """Check that F' generates L_+ up to ``grade_max``."""
    if depth is None:
        depth = grade_max + 1
    span = bracket_span(fprime_basis(n), depth, grade_max)
    by_grade = span.dim_by_grade()
    rows = []
    ok = True
    for g in range(grade_max + 1):
        expected = len(lplus_graded_basis(n, g))
        got = by_grade.get(g, 0)
        rows.append({"grade": g, "span_dim": got, "target_dim": expected, "pass": got == expected})
        ok &= got == expected
    return {"n": n, "grade_max": grade_max, "depth": depth, "grades": rows, "pass": ok}


def parse_vector_field(text: str, n: int) -> VectorField:
    """Parse e.g. ``"x1^2 d1 - 2 x1 x2 d2"``; each term needs exactly one d."""
    coeffs: Dict[Letter, Fraction] = {}
    for c, exps in parse_monomial_terms(text, n, "xd"):
        d = exps["d"]
        if sum(d) != 1:
            raise ValueError("each vector-field term needs exactly one d factor")
        i = d.index(1)
        key = (exps["x"], i)
        coeffs[key] = coeffs.get(key, 0) + c
    return VectorField.from_letters(n, {k: c for k, c in coeffs.items() if c})


def lplus_dim(n: int, d: int) -> int:
    """dim L_d = n * C(d+n, n-1)."""
    return n * comb(d + n, n - 1)
