"""The isomorphism A#U(V) ~ D (x) U(L_+) and its inverse.

``phi`` and ``psi`` are given on generators and extended multiplicatively
letter by letter.  ``verify_roundtrip`` and ``verify_homomorphism`` return
lists of report entries ``{check, input, expected, got, pass}``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from .arithpoly import Polynomial, indices_below, monomial_basis, multi_binomial, sub_index, zero_index
from .enveloping import SmashElement, TensorElement, commutator, enveloping, smash_mul, tensor_mul
from .linalg import add_term_into
from .liefields import Letter, VectorField, bracket_letters, lplus_graded_basis, vf_bracket
from .weyl import WeylElement


@lru_cache(maxsize=None)
def _phi_letter(letter: Letter) -> TensorElement:
    # x^k d_p |-> x^k d_p (x) 1 + sum_{0<m<=k} C(k,m) x^{k-m} (x) X^m d/dX_p
    k, p = letter
    n = len(k)
    z = zero_index(n)
    d = [0] * n
    d[p] = 1
    terms = {((k, tuple(d)), ()): Fraction(1)}
    for m in indices_below(k):
        if not any(m):
            continue
        terms[((sub_index(k, m), z), ((m, p),))] = Fraction(multi_binomial(k, m))
    return TensorElement._raw(n, terms)


def phi_letter(letter: Letter) -> TensorElement:
    return _phi_letter(letter)


def phi(a: SmashElement) -> TensorElement:
    """Image of sum c x^a # (l1 ... lL) as phi(x^a) phi(l1) ... phi(lL)."""
    n = a.n
    z = zero_index(n)
    out = TensorElement.zero(n)
    by_word: Dict[tuple, Dict[tuple, Fraction]] = {}
    for (f, w), c in a.terms.items():
        by_word.setdefault(w, {})[f] = c
    for w, fs in by_word.items():
        img = TensorElement.one(n)
        for l in w:
            img = tensor_mul(img, _phi_letter(l))
        left = TensorElement._raw(n, {((f, z), ()): c for f, c in fs.items()})
        out = out + tensor_mul(left, img)
    return out


@lru_cache(maxsize=None)
def _psi_lplus_letter(letter: Letter) -> SmashElement:
    # X^m d/dX_p |-> sum_{0<=k<=m} (-1)^|k| C(m,k) x^k # x^{m-k} d_p
    m, p = letter
    n = len(m)
    terms: Dict = {}
    for k in indices_below(m):
        c = (-1) ** sum(k) * multi_binomial(m, k)
        add_term_into(terms, (k, ((sub_index(m, k), p),)), Fraction(c))
    return SmashElement._raw(n, terms)


def psi_lplus_letter(letter: Letter) -> SmashElement:
    enveloping(len(letter[0]), True).check_letter(letter)
    return _psi_lplus_letter(letter)


def _psi_weyl_monomial(r, s) -> SmashElement:
    # x^r d^s |-> x^r # d_1^{s_1} ... d_n^{s_n}
    n = len(r)
    z = zero_index(n)
    word = []
    for i, e in enumerate(s):
        word.extend([(z, i)] * e)
    return SmashElement._raw(n, {(tuple(r), tuple((tuple(k), i) for k, i in word)): Fraction(1)})


def psi(t: TensorElement) -> SmashElement:
    """Image of sum c (x^r d^s) (x) (l1 ... lL) as psi(x^r d^s) psi(l1) ... psi(lL)."""
    n = t.n
    out = SmashElement.zero(n)
    by_word: Dict[tuple, Dict[tuple, Fraction]] = {}
    for (wkey, v), c in t.terms.items():
        by_word.setdefault(v, {})[wkey] = c
    for v, ws in by_word.items():
        img = SmashElement.one(n)
        for l in v:
            img = smash_mul(img, _psi_lplus_letter(l))
        left = SmashElement.zero(n)
        for (r, s), c in ws.items():
            left = left + _psi_weyl_monomial(r, s).scale(c)
        out = out + smash_mul(left, img)
    return out


# -- random elements ----------------------------------------------------------

def random_poly(rng: random.Random, n: int, max_deg: int = 2, max_terms: int = 3, height: int = 5) -> Polynomial:
    basis = monomial_basis(n, max_deg)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        k = rng.choice(basis)
        terms[k] = terms.get(k, 0) + Fraction(rng.randint(-height, height), rng.randint(1, 3))
    return Polynomial(n, terms)


def random_letter(rng: random.Random, n: int, max_grade: int = 2, plus: bool = False) -> Letter:
    lo = 1 if plus else 0
    basis = [k for k in monomial_basis(n, max_grade + 1) if sum(k) >= lo]
    return (rng.choice(basis), rng.randrange(n))


def random_vector_field(rng: random.Random, n: int, max_grade: int = 2, max_terms: int = 3, plus: bool = False) -> VectorField:
    coeffs: Dict[Letter, Fraction] = {}
    for _ in range(rng.randint(1, max_terms)):
        l = random_letter(rng, n, max_grade, plus)
        coeffs[l] = coeffs.get(l, 0) + Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return VectorField.from_letters(n, {l: c for l, c in coeffs.items() if c})


def random_smash(rng: random.Random, n: int, max_terms: int = 3, max_len: int = 2, max_grade: int = 2, max_deg: int = 2) -> SmashElement:
    terms = {}
    basis = monomial_basis(n, max_deg)
    for _ in range(rng.randint(1, max_terms)):
        a = rng.choice(basis)
        word = tuple(random_letter(rng, n, max_grade) for _ in range(rng.randint(0, max_len)))
        terms[(a, word)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return SmashElement(n, terms)


def random_tensor(rng: random.Random, n: int, max_terms: int = 3, max_len: int = 2, max_grade: int = 2, max_deg: int = 2) -> TensorElement:
    terms = {}
    basis = monomial_basis(2 * n, max_deg)
    for _ in range(rng.randint(1, max_terms)):
        rs = rng.choice(basis)
        word = tuple(random_letter(rng, n, max_grade, plus=True) for _ in range(rng.randint(0, max_len)))
        terms[((rs[:n], rs[n:]), word)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return TensorElement(n, terms)


# -- verification -------------------------------------------------------------

def _entry(check: str, inp, expected, got) -> Dict:
    return {
        "check": check,
        "input": str(inp),
        "expected": str(expected),
        "got": str(got),
        "pass": expected == got,
    }


def _generators(n: int, degree: int) -> List[Letter]:
    return [(k, p) for k in monomial_basis(n, degree) for p in range(n)]


def verify_roundtrip(n: int, degree: int, samples: int, seed: int = 0) -> List[Dict]:
    """psi(phi(a)) = a and phi(psi(t)) = t on generators and random elements."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    rng = random.Random(seed)
    report = []
    for l in _generators(n, degree):
        a = SmashElement.from_letter(l)
        report.append(_entry("psi_phi_generator", a, a, psi(phi(a))))
        if sum(l[0]) >= 1:
            t = TensorElement.from_lplus_letter(l)
            report.append(_entry("phi_psi_generator", t, t, phi(psi(t))))
    for i in range(n):
        a = SmashElement.from_poly(Polynomial.var(n, i))
        report.append(_entry("psi_phi_generator", a, a, psi(phi(a))))
        t = TensorElement.from_weyl(WeylElement.d(n, i))
        report.append(_entry("phi_psi_generator", t, t, phi(psi(t))))
    for _ in range(samples):
        a = random_smash(rng, n)
        report.append(_entry("psi_phi_random", a, a, psi(phi(a))))
        t = random_tensor(rng, n)
        report.append(_entry("phi_psi_random", t, t, phi(psi(t))))
    return report


def verify_homomorphism(n: int, degree: int, samples: int, seed: int = 0) -> List[Dict]:
    """Well-definedness checks for phi and psi.

    (i) smash relation  [phi(1#eta), phi(g#1)] = phi(eta(g)#1)
    (ii) phi(1#[eta,mu]) = [phi(1#eta), phi(1#mu)]
    (iii) psi(1(x)[u,v]) = [psi(1(x)u), psi(1(x)v)] for u, v in L_+
    (iv) psi(D (x) 1) commutes with psi(1 (x) L_+)
    (v) phi(ab) = phi(a) phi(b) on random multi-letter elements
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    rng = random.Random(seed)
    report = []
    gens = _generators(n, degree)
    lplus = [l for l in gens if sum(l[0]) >= 1]
    max_grade = max(degree - 1, 0)

    def one_hash(eta: VectorField) -> SmashElement:
        return SmashElement.from_vector_field(eta)

    def lplus_tensor(u: VectorField) -> TensorElement:
        out = TensorElement.zero(n)
        for l, c in u.letters().items():
            out = out + TensorElement.from_lplus_letter(l, c)
        return out

    pairs = []
    for l in gens:
        pairs.append((VectorField.letter(*l), VectorField.letter(*gens[rng.randrange(len(gens))])))
    for _ in range(samples):
        pairs.append((random_vector_field(rng, n, max_grade), random_vector_field(rng, n, max_grade)))

    for eta, mu in pairs:
        g = random_poly(rng, n)
        lhs = commutator(phi(one_hash(eta)), phi(SmashElement.from_poly(g)))
        rhs = phi(SmashElement.from_poly(eta.apply(g)))
        report.append(_entry("smash_relation", (str(eta), str(g)), rhs, lhs))
        lhs = phi(one_hash(vf_bracket(eta, mu)))
        rhs = commutator(phi(one_hash(eta)), phi(one_hash(mu)))
        report.append(_entry("phi_bracket", (str(eta), str(mu)), lhs, rhs))

    lpairs = []
    for l in lplus:
        lpairs.append((VectorField.letter(*l), VectorField.letter(*lplus[rng.randrange(len(lplus))])))
    for _ in range(samples):
        lpairs.append((random_vector_field(rng, n, max_grade, plus=True), random_vector_field(rng, n, max_grade, plus=True)))
    for u, v in lpairs:
        lhs = psi(lplus_tensor(vf_bracket(u, v)))
        rhs = commutator(psi(lplus_tensor(u)), psi(lplus_tensor(v)))
        report.append(_entry("psi_bracket", (str(u), str(v)), lhs, rhs))

    weyl_gens = [WeylElement.x(n, i) for i in range(n)] + [WeylElement.d(n, i) for i in range(n)]
    for w in weyl_gens:
        for l in lplus:
            c = commutator(psi(TensorElement.from_weyl(w)), psi(TensorElement.from_lplus_letter(l)))
            report.append(_entry("psi_factors_commute", (str(w), l), SmashElement.zero(n), c))

    for _ in range(samples):
        a, b = random_smash(rng, n), random_smash(rng, n)
        report.append(_entry("phi_multiplicative", (a, b), tensor_mul(phi(a), phi(b)), phi(smash_mul(a, b))))
    return report


def report_ok(report: List[Dict]) -> bool:
    return all(e["pass"] for e in report)


def failures(report: List[Dict]) -> List[Dict]:
    return [e for e in report if not e["pass"]]
