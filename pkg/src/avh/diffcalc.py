"""Grothendieck differential-operator calculus for rho: V -> gl(M).

Orders follow Grothendieck's Diff_s: rho has order <= s iff s+1 nested
adjoint actions delta(f) kill it, equivalently iff m^s L_+ acts by zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .arithpoly import MultiIndex, Polynomial, indices_of_degree, monomial_basis, q_str, unit_index, zero_index
from .avmodules import AVModule
from .enveloping import SmashElement
from .isomorphism import psi_lplus_letter, random_poly, random_vector_field
from .linalg import Vector, add_into, vec_scale, vec_sub
from .liefields import Letter, VectorField


class InconsistentRoutes(RuntimeError):
    """The delta-iteration and m^s L_+ routes disagreed."""


# -- adjoint operators -------------------------------------------------------------

class RhoOperator:
    """The representation map itself: (eta, v) -> rho(eta) v."""

    def __init__(self, M: AVModule):
        self.module = M

    def __call__(self, eta: VectorField, v: Vector) -> Vector:
        return self.module.act_vf(eta, v)


@dataclass
class AdjointOperator:
    """delta(f) D : (eta, v) -> D(f eta) v - f . D(eta) v."""

    f: Polynomial
    target: object

    @property
    def module(self) -> AVModule:
        return self.target.module

    def __call__(self, eta: VectorField, v: Vector) -> Vector:
        M = self.module
        a = self.target(eta.times(self.f), v)
        b = M.act_poly(self.f, self.target(eta, v))
        return vec_sub(a, b)


def delta_apply(f: Polynomial, D, eta: VectorField, v: Vector) -> Vector:
    return AdjointOperator(f, D)(eta, v)


def delta_power(M: AVModule, m: MultiIndex, D=None):
    """delta(x)^m D = delta(x_1)^{m_1} ... delta(x_n)^{m_n} D (defaults to D = rho)."""
    op = D if D is not None else RhoOperator(M)
    for i, e in enumerate(m):
        xi = Polynomial.var(M.n, i)
        for _ in range(e):
            op = AdjointOperator(xi, op)
    return op


def s_diff_annihilator_check(M: AVModule, f: Polynomial, eta: VectorField, s: int, v: Vector) -> Vector:
    """sum_{j=0}^s (-1)^j C(s,j) f^j rho(f^{s-j} eta) v  (= (delta(f)^s rho)(eta) v)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    out: Vector = {}
    for j in range(s + 1):
        w = M.act_vf(eta.times(f ** (s - j)), v)
        w = M.act_poly(f ** j, w)
        add_into(out, w, (-1) ** j * comb(s, j))
    return out


# -- order determination -------------------------------------------------------------

@dataclass
class DiffOrderResult:
    order: Optional[int]
    exceeded: bool
    route_agreement: bool
    witnesses: List[Dict] = field(default_factory=list)
    routes: Dict[str, Optional[int]] = field(default_factory=dict)
    smax: int = 0
    dmax: int = 0
    checked: int = 0

    def to_json(self) -> Dict:
        return {
            "order": self.order if not self.exceeded else "exceeds smax",
            "route_agreement": self.route_agreement,
            "witnesses": self.witnesses,
            "routes": {k: (v if v is not None else "exceeds smax") for k, v in self.routes.items()},
            "smax": self.smax,
            "dmax": self.dmax,
            "checked": self.checked,
        }


def _vec_str(v: Vector) -> str:
    return "{" + ", ".join(f"{k}: {q_str(c)}" for k, c in sorted(v.items(), key=lambda kc: str(kc[0]))) + "}"


def test_vectors(M: AVModule, degree: int, samples: int, rng: random.Random) -> List[Vector]:
    vs = M.basis_vectors(degree)
    vs += [M.random_vector(rng, degree) for _ in range(samples)]
    return [v for v in vs if v]


def diff_order(M: AVModule, smax: int = 3, dmax: int = 3, seed: int = 0, samples: int = 5, vdegree: Optional[int] = None) -> DiffOrderResult:
    """Smallest s <= smax with rho of order <= s, by two independent routes.

    direct: delta(x)^m rho (eta) v = 0 for all |m| = s+1, eta in {d_i} plus
            random fields, v in the test set;
    lplus:  every letter of m^s L_+ up to grade dmax, acting through its
            psi-image in A#U(V), kills the test set.
    The routes are also compared letter by letter: the action of
    X^m d/dX_i must equal (delta(x)^m rho)(d_i).
    """
    if smax < 0:
        raise ValueError("smax must be non-negative")
    rng = random.Random(seed)
    n = M.n
    vdeg = dmax if vdegree is None else vdegree
    vs = test_vectors(M, vdeg, samples, rng)
    partials = [VectorField.letter(zero_index(n), i) for i in range(n)]
    fields = partials + [random_vector_field(rng, n, 2) for _ in range(max(1, samples // 2))]
    top = max(dmax + 1, smax + 1)

    # route comparison and per-|m| vanishing for the lplus route
    agreement = True
    lplus_nonzero: Dict[int, List[Dict]] = {}
    checked = 0
    for size in range(1, top + 1):
        for m in indices_of_degree(n, size):
            op = delta_power(M, m)
            for i in range(n):
                img = psi_lplus_letter((m, i))
                for v in vs:
                    a = M.act_smash(img, v)
                    b = op(partials[i], v)
                    checked += 1
                    if a != b:
                        agreement = False
                    if a:
                        lplus_nonzero.setdefault(size, []).append({"m": list(m), "i": i + 1, "v": _vec_str(v)})

    def lplus_ok(s: int) -> bool:
        return all(size not in lplus_nonzero for size in range(s + 1, top + 1))

    def direct_ok(s: int) -> bool:
        for m in indices_of_degree(n, s + 1):
            op = delta_power(M, m)
            for eta in fields:
                for v in vs:
                    if op(eta, v):
                        return False
        return True

    route_lplus = next((s for s in range(smax + 1) if lplus_ok(s)), None)
    route_direct = next((s for s in range(smax + 1) if direct_ok(s)), None)
    if route_lplus != route_direct:
        agreement = False
    order = route_lplus if agreement else None
    exceeded = agreement and order is None
    witnesses = []
    if order:
        witnesses = lplus_nonzero.get(order, [])[:5]
    elif exceeded:
        witnesses = lplus_nonzero.get(smax + 1, [])[:5]
    return DiffOrderResult(
        order=order,
        exceeded=exceeded,
        route_agreement=agreement,
        witnesses=witnesses,
        routes={"direct": route_direct, "lplus": route_lplus},
        smax=smax,
        dmax=dmax,
        checked=checked,
    )


# -- localization M_f ------------------------------------------------------------------

@dataclass(frozen=True)
class LocalVector:
    """num / f^exp for a module vector ``num``."""

    num: Tuple
    exp: int

    @classmethod
    def of(cls, v: Vector, exp: int = 0) -> "LocalVector":
        return cls(tuple(sorted(v.items(), key=lambda kc: repr(kc[0]))), exp)

    @property
    def vec(self) -> Vector:
        return dict(self.num)


@dataclass(frozen=True)
class LocalScalar:
    """h / f^exp in A_f."""

    num: Polynomial
    exp: int


class LocalizedModule:
    """M_f = A_f (x)_A M with the V_f action extended from an order-s rho.

    Three formulas for (g/f^k d_i) m are available:

    ``closed``   sum_{p<=s} sum_{l<=p} (-1)^l C(k+p-1, p) C(p, l) f^{-(k+l)} rho(f^l g d_i) m
                 (Newton extrapolation of t -> f^{-t} rho(f^{t-k} g d_i) m, a
                 polynomial of degree <= s in t);
    ``printed``  sum_{p<=s} sum_{l<=p} (-1)^l C(p+k, p) C(p, k) f^{-(k+l)} rho(f^l g d_i) m;
    ``printed_l`` the same with C(p, k) replaced by C(p, l);
    ``oracle``   back-substitution through the annihilator identity
                 sum_j (-1)^j C(s+1, j) f^j rho(f^{s+1-j} u d_i) = 0 for u = g f^{t-k}.
    """

    def __init__(self, M: AVModule, f: Polynomial, s: int):
        if not f:
            raise ZeroDivisionError("cannot localize at the zero polynomial")
        self.M = M
        self.f = f
        self.s = s
        self._fpow = {0: Polynomial.const(M.n, 1)}

    def fpow(self, e: int) -> Polynomial:
        if e not in self._fpow:
            self._fpow[e] = self.f ** e
        return self._fpow[e]

    # arithmetic on localized vectors
    def canon(self, lv: LocalVector) -> LocalVector:
        v, e = lv.vec, lv.exp
        if not v:
            return LocalVector.of({}, 0)
        if hasattr(self.M, "as_polys"):
            while e > 0:
                polys = self.M.as_polys(v)
                q = [p.divide_exact(self.f) for p in polys]
                if any(x is None for x in q):
                    break
                v = self.M.from_polys(q)
                e -= 1
        return LocalVector.of(v, e)

    def add(self, a: LocalVector, b: LocalVector, cb=1) -> LocalVector:
        e = max(a.exp, b.exp)
        va = self.M.act_poly(self.fpow(e - a.exp), a.vec)
        vb = self.M.act_poly(self.fpow(e - b.exp), b.vec)
        return LocalVector.of(add_into(va, vb, cb), e)

    def equal(self, a: LocalVector, b: LocalVector) -> bool:
        return not self.add(a, b, -1).vec

    def scalar_mul(self, h: LocalScalar, lv: LocalVector) -> LocalVector:
        return LocalVector.of(self.M.act_poly(h.num, lv.vec), lv.exp + h.exp)

    def rho_poly(self, eta: VectorField, lv: LocalVector) -> LocalVector:
        """Polynomial eta on m / f^c: (f rho(eta) m - c eta(f) m) / f^{c+1}."""
        M, c = self.M, lv.exp
        v = lv.vec
        w = M.act_poly(self.f, M.act_vf(eta, v))
        if c:
            add_into(w, M.act_poly(eta.apply(self.f), v), -c)
        return LocalVector.of(w, c + 1)

    def _rho_term(self, g: Polynomial, i: int, l: int, lv: LocalVector) -> LocalVector:
        eta = VectorField.letter(zero_index(self.M.n), i).times(self.fpow(l) * g)
        return self.rho_poly(eta, lv)

    def act(self, g: Polynomial, k: int, i: int, lv: LocalVector, formula: str = "closed") -> LocalVector:
        """(g / f^k) d/dx_i acting on a localized vector."""
        if formula == "oracle":
            return self._act_oracle(g, k, i, lv)
        out = LocalVector.of({}, 0)
        for p in range(self.s + 1):
            for l in range(p + 1):
                if formula == "closed":
                    c = (-1) ** l * _neg_binom(k, p) * comb(p, l)
                elif formula == "printed":
                    c = (-1) ** l * comb(p + k, p) * comb(p, k)
                elif formula == "printed_l":
                    c = (-1) ** l * comb(p + k, p) * comb(p, l)
                else:
                    raise ValueError(f"unknown formula {formula!r}")
                if not c:
                    continue
                t = self._rho_term(g, i, l, lv)
                t = LocalVector.of(t.vec, t.exp + k + l)
                out = self.add(out, t, c)
        return self.canon(out)

    def _act_oracle(self, g: Polynomial, k: int, i: int, lv: LocalVector) -> LocalVector:
        s = self.s
        y: Dict[int, LocalVector] = {}
        for t in range(k, k + s + 1):
            y[t] = self._rho_term(g, i, t - k, lv)
        for t in range(k - 1, -1, -1):
            acc = LocalVector.of({}, 0)
            for j in range(s + 1):
                term = self.scalar_mul(LocalScalar(self.fpow(j), 0), y[t + s + 1 - j])
                acc = self.add(acc, term, (-1) ** j * comb(s + 1, j))
            # (-1)^{s+1} f^{s+1} y_t + acc = 0
            y[t] = LocalVector.of(vec_scale(acc.vec, (-1) ** s), acc.exp + s + 1)
        return self.canon(y[0])

    def act_rational_field(self, comps: Sequence[Polynomial], exp: int, lv: LocalVector, formula: str = "closed") -> LocalVector:
        """sum_i (comps[i] / f^exp) d/dx_i acting on ``lv``."""
        out = LocalVector.of({}, 0)
        for i, g in enumerate(comps):
            if g:
                out = self.add(out, self.act(g, exp, i, lv, formula))
        return self.canon(out)


def _neg_binom(k: int, p: int) -> int:
    """(-1)^p C(-k, p) = C(k+p-1, p), with the value 1 at p = 0 for every k."""
    if p == 0:
        return 1
    if k == 0:
        return 0
    return comb(k + p - 1, p)


def local_derivative(f: Polynomial, g: Polynomial, k: int, i: int, h: LocalScalar) -> LocalScalar:
    """(g / f^k) d/dx_i applied to h.num / f^h.exp."""
    e = h.exp
    num = f * h.num.partial(i) - (h.num * f.partial(i)).scale(e)
    return LocalScalar(g * num, k + e + 1)


def rational_bracket(f: Polynomial, u: Sequence[Polynomial], a: int, w: Sequence[Polynomial], b: int) -> Tuple[List[Polynomial], int]:
    """[u / f^a, w / f^b] as (numerators, exponent) over f^{a+b+1}."""
    n = f.n
    out = []
    for j in range(n):
        acc = Polynomial.zero(n)
        for i in range(n):
            acc = acc + u[i] * (f * w[j].partial(i) - (w[j] * f.partial(i)).scale(b))
            acc = acc - w[i] * (f * u[j].partial(i) - (u[j] * f.partial(i)).scale(a))
        out.append(acc)
    return out, a + b + 1


def localized_leibniz_residual(L: LocalizedModule, g: Polynomial, k: int, i: int, h: LocalScalar, lv: LocalVector, formula: str = "closed") -> LocalVector:
    """eta(a m) - eta(a) m - a eta(m) for eta = (g/f^k) d_i and a = h in A_f."""
    am = L.scalar_mul(h, lv)
    lhs = L.act(g, k, i, am, formula)
    t1 = L.scalar_mul(local_derivative(L.f, g, k, i, h), lv)
    t2 = L.scalar_mul(h, L.act(g, k, i, lv, formula))
    return L.canon(L.add(L.add(lhs, t1, -1), t2, -1))


def localized_bracket_residual(L: LocalizedModule, u: Sequence[Polynomial], a: int, w: Sequence[Polynomial], b: int, lv: LocalVector, formula: str = "closed") -> LocalVector:
    """[eta, mu] m - (eta (mu m) - mu (eta m)) for rational fields eta = u/f^a, mu = w/f^b."""
    comps, e = rational_bracket(L.f, u, a, w, b)
    lhs = L.act_rational_field(comps, e, lv, formula)
    em = L.act_rational_field(u, a, L.act_rational_field(w, b, lv, formula), formula)
    me = L.act_rational_field(w, b, L.act_rational_field(u, a, lv, formula), formula)
    return L.canon(L.add(L.add(lhs, em, -1), me))


def localization_report(M: AVModule, f: Polynomial, s: int, samples: int = 20, seed: int = 0, max_k: int = 2) -> Dict:
    """Leibniz and bracket checks in A_f plus a three-way formula comparison."""
    rng = random.Random(seed)
    L = LocalizedModule(M, f, s)
    # the printed sum is also tried with the upper limit s+1, in case its
    # order convention is shifted by one
    L1 = LocalizedModule(M, f, s + 1)
    n = M.n
    counts = {
        "leibniz_pass": 0,
        "bracket_pass": 0,
        "closed_vs_oracle_agree": 0,
        "printed_vs_oracle_agree": 0,
        "printed_shifted_vs_oracle_agree": 0,
        "printed_l_vs_oracle_agree": 0,
        "restriction_k0_pass": 0,
        "samples": samples,
    }
    discrepancies = []
    for t in range(samples):
        g = random_poly(rng, n, 2, 2)
        k = rng.randint(0, max_k)
        i = rng.randrange(n)
        lv = LocalVector.of(M.random_vector(rng, 1, 2), rng.randint(0, 1))
        h = LocalScalar(random_poly(rng, n, 1, 2), rng.randint(0, 1))
        if not localized_leibniz_residual(L, g, k, i, h, lv).vec:
            counts["leibniz_pass"] += 1
        u = [random_poly(rng, n, 1, 2) for _ in range(n)]
        w = [random_poly(rng, n, 1, 2) for _ in range(n)]
        if not localized_bracket_residual(L, u, rng.randint(0, 1), w, rng.randint(0, 1), lv).vec:
            counts["bracket_pass"] += 1
        oracle = L.act(g, k, i, lv, "oracle")
        closed = L.act(g, k, i, lv, "closed")
        printed = L.act(g, k, i, lv, "printed")
        if L.equal(closed, oracle):
            counts["closed_vs_oracle_agree"] += 1
        if L.equal(printed, oracle):
            counts["printed_vs_oracle_agree"] += 1
        elif len(discrepancies) < 3:
            discrepancies.append({"g": str(g), "k": k, "i": i + 1, "oracle": _vec_str(oracle.vec) + f" / f^{oracle.exp}", "printed": _vec_str(printed.vec) + f" / f^{printed.exp}"})
        if L.equal(L1.act(g, k, i, lv, "printed"), oracle):
            counts["printed_shifted_vs_oracle_agree"] += 1
        if L.equal(L.act(g, k, i, lv, "printed_l"), oracle):
            counts["printed_l_vs_oracle_agree"] += 1
        e = L.rho_poly(VectorField.letter(zero_index(n), i).times(g), lv)
        if L.equal(L.act(g, 0, i, lv), e):
            counts["restriction_k0_pass"] += 1
    ok = all(counts[c] == samples for c in ("leibniz_pass", "bracket_pass", "closed_vs_oracle_agree", "restriction_k0_pass"))
    return {
        "module": M.name,
        "f": str(f),
        "order": s,
        "counts": counts,
        "printed_formula_matches_oracle": counts["printed_vs_oracle_agree"] == samples,
        "printed_formula_shifted_matches_oracle": counts["printed_shifted_vs_oracle_agree"] == samples,
        "printed_discrepancies": discrepancies,
        "pass": ok,
    }
