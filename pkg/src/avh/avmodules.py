"""Concrete AV-modules: gauge, Rudakov and tensor modules P (x) Q.

Module vectors are sparse dicts over countable coordinate bases:

* gauge modules A (x) W use keys ``(a, j)`` for x^a (x) w_j;
* tensor modules P (x) W use keys ``(pkey, j)`` where ``pkey`` is a basis
  key of the D-module P (``a`` for the tautological module A, ``s`` for
  d^s delta_p, ``(c, s)`` for the c-th summand of a sum of delta modules).

Every module exposes the AV action (``act_poly``, ``act_vf``) and the
factorized D (x) U(L_+) action (``act_weyl_monomial``, ``act_lplus_letter``)
so that both sides of the isomorphism can be exercised on the same vectors.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .arithpoly import (
    MultiIndex,
    Polynomial,
    Q,
    add_index,
    indices_below,
    monomial_basis,
    multi_binomial,
    parse_poly,
    q_str,
    sub_index,
    zero_index,
)
from .enveloping import SmashElement, TensorElement
from .linalg import EchelonBasis, Vector, add_into, add_term_into, vec_scale, vec_sub
from .liefields import (
    Letter,
    VectorField,
    bracket_letters,
    fprime_basis,
    letter_grade,
    letter_order,
    lplus_graded_basis,
)

Matrix = Tuple[Tuple[Fraction, ...], ...]


class MalformedSpec(ValueError):
    """A module spec could not be parsed or is structurally invalid."""


# -- L_+ actions on finite-dimensional W ---------------------------------------

def _mat(rows) -> Matrix:
    return tuple(tuple(Q(x) for x in row) for row in rows)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(sum((a[i][t] * b[t][j] for t in range(len(b))), Fraction(0)) for j in range(len(b[0])))
        for i in range(len(a))
    )


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_zero(d: int) -> Matrix:
    return tuple((Fraction(0),) * d for _ in range(d))


def mat_is_zero(a: Matrix) -> bool:
    return all(not x for row in a for x in row)


@dataclass(frozen=True)
class RhoData:
    """Constant-matrix action of L_+ on W, zero above grade ``cutoff``.

    ``matrices[(k, i)]`` is the matrix of X^k d/dX_i acting on column
    vectors, so rho(u) w_j = sum_l M[l][j] w_l.  Letters not listed act by
    zero.
    """

    n: int
    dim: int
    matrices: Dict[Letter, Matrix] = field(default_factory=dict)
    cutoff: int = -1

    def __post_init__(self):
        for (k, i), m in self.matrices.items():
            if len(k) != self.n or not 0 <= i < self.n or sum(k) < 1:
                raise MalformedSpec(f"rho letter {(k, i)} is not an L_+ basis vector for n={self.n}")
            if len(m) != self.dim or any(len(r) != self.dim for r in m):
                raise MalformedSpec(f"rho matrix for {(k, i)} is not {self.dim}x{self.dim}")
        if self.cutoff < 0 and self.matrices:
            top = max(letter_grade(l) for l, m in self.matrices.items())
            object.__setattr__(self, "cutoff", top)

    def matrix(self, letter: Letter) -> Optional[Matrix]:
        if letter_grade(letter) > self.cutoff:
            return None
        return self.matrices.get(letter)

    def matrix_or_zero(self, letter: Letter) -> Matrix:
        m = self.matrix(letter)
        return m if m is not None else mat_zero(self.dim)

    def combo(self, coeffs: Dict[Letter, Fraction]) -> Matrix:
        out = mat_zero(self.dim)
        for l, c in coeffs.items():
            m = self.matrix(l)
            if m is not None:
                out = tuple(tuple(x + c * y for x, y in zip(ro, rm)) for ro, rm in zip(out, m))
        return out

    def apply(self, letter: Letter, j: int) -> Dict[int, Fraction]:
        m = self.matrix(letter)
        if m is None:
            return {}
        return {l: m[l][j] for l in range(self.dim) if m[l][j]}

    def nonzero_grades(self) -> List[int]:
        return sorted({letter_grade(l) for l, m in self.matrices.items() if not mat_is_zero(m) and letter_grade(l) <= self.cutoff})


def trivial_rho(n: int, dim: int = 1) -> RhoData:
    return RhoData(n, dim, {}, -1)


def gl_standard_rho(n: int) -> RhoData:
    """Standard gl_n module: X_a d/dX_b acts by the matrix unit E_ab; zero above grade 0."""
    mats = {}
    for a in range(n):
        for b in range(n):
            k = [0] * n
            k[a] = 1
            m = [[0] * n for _ in range(n)]
            m[a][b] = 1
            mats[(tuple(k), b)] = _mat(m)
    return RhoData(n, n, mats, 0)


def trace_rho(n: int, lam) -> RhoData:
    """One-dimensional gl_n module: X_i d/dX_i acts by ``lam``."""
    mats = {}
    for i in range(n):
        k = [0] * n
        k[i] = 1
        mats[(tuple(k), i)] = _mat([[lam]])
    return RhoData(n, 1, mats, 0)


def adjoint_quotient_rho(n: int, s: int) -> Tuple[RhoData, List[Letter]]:
    """L_+ acting on L_+ / m^s L_+ by brackets; basis = letters of grade < s.

    Letters of grade >= s act by zero; grade s-1 still moves grade 0 into
    the top grade, so the cutoff is s - 1.  Returns the action and the
    basis ordering of W.
    """
    basis: List[Letter] = []
    for d in range(s):
        basis.extend(lplus_graded_basis(n, d))
    pos = {l: t for t, l in enumerate(basis)}
    dim = len(basis)
    mats = {}
    for u in basis:
        m = [[Fraction(0)] * dim for _ in range(dim)]
        nz = False
        for j, w in enumerate(basis):
            for l, c in bracket_letters({u: Fraction(1)}, {w: Fraction(1)}).items():
                if l in pos:
                    m[pos[l]][j] += c
                    nz = True
        if nz:
            mats[u] = _mat(m)
    return RhoData(n, dim, mats, s - 1 if mats else -1), basis


def rho_homomorphism_violations(rho: RhoData) -> List[str]:
    """Check rho([u, v]) = [rho(u), rho(v)] on all basis pairs of grade <= cutoff."""
    if rho.cutoff < 0 or rho.dim == 0:
        return []
    letters: List[Letter] = []
    for d in range(rho.cutoff + 1):
        letters.extend(lplus_graded_basis(rho.n, d))
    out = []
    for x, u in enumerate(letters):
        mu = rho.matrix_or_zero(u)
        for v in letters[x + 1:]:
            mv = rho.matrix_or_zero(v)
            lhs = rho.combo(bracket_letters({u: Fraction(1)}, {v: Fraction(1)}))
            rhs = mat_sub(mat_mul(mu, mv), mat_mul(mv, mu))
            if lhs != rhs:
                out.append(f"rho not a homomorphism on [{u}, {v}]")
    return out


# -- D-modules P ---------------------------------------------------------------

class DModule:
    """A D-module with a countable coordinate basis and explicit x_i, d_i actions."""

    n: int
    tag: str

    def x(self, i: int, key) -> Vector:
        raise NotImplementedError

    def d(self, i: int, key) -> Vector:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def order(self, key) -> tuple:
        raise NotImplementedError

    def basis(self, degree: int) -> List[Hashable]:
        raise NotImplementedError

    def generators(self) -> List[Hashable]:
        raise NotImplementedError

    def act_x(self, i: int, v: Vector) -> Vector:
        out: Vector = {}
        for k, c in v.items():
            add_into(out, self.x(i, k), c)
        return out

    def act_d(self, i: int, v: Vector) -> Vector:
        out: Vector = {}
        for k, c in v.items():
            add_into(out, self.d(i, k), c)
        return out

    def act_weyl_monomial(self, r: MultiIndex, s: MultiIndex, v: Vector) -> Vector:
        for i, e in enumerate(s):
            for _ in range(e):
                v = self.act_d(i, v)
        for i, e in enumerate(r):
            for _ in range(e):
                v = self.act_x(i, v)
        return v

    def act_monomial(self, a: MultiIndex, v: Vector) -> Vector:
        return self.act_weyl_monomial(a, zero_index(self.n), v)


class TautologicalModule(DModule):
    """A = k[x1..xn] with D acting by multiplication and differentiation."""

    def __init__(self, n: int):
        self.n = n
        self.tag = "tautological"

    def x(self, i, a):
        b = list(a)
        b[i] += 1
        return {tuple(b): Fraction(1)}

    def d(self, i, a):
        if not a[i]:
            return {}
        b = list(a)
        b[i] -= 1
        return {tuple(b): Fraction(a[i])}

    def act_monomial(self, a, v):
        return {add_index(a, k): c for k, c in v.items()}

    def degree(self, a):
        return sum(a)

    def order(self, a):
        return (sum(a), tuple(-e for e in a))

    def basis(self, degree):
        return monomial_basis(self.n, degree)

    def generators(self):
        return [zero_index(self.n)]


class DeltaModule(DModule):
    """k[d1..dn] delta_p: x_i (d^s delta) = p_i d^s delta - s_i d^{s-e_i} delta."""

    def __init__(self, n: int, p: Sequence = None):
        self.n = n
        self.p = tuple(Q(c) for c in (p if p is not None else [0] * n))
        if len(self.p) != n:
            raise MalformedSpec(f"point {p} does not have {n} coordinates")
        self.tag = "delta(" + ",".join(q_str(c) for c in self.p) + ")"

    def x(self, i, s):
        out: Vector = {}
        if self.p[i]:
            out[s] = self.p[i]
        if s[i]:
            t = list(s)
            t[i] -= 1
            out[tuple(t)] = Fraction(-s[i])
        return out

    def d(self, i, s):
        t = list(s)
        t[i] += 1
        return {tuple(t): Fraction(1)}

    def degree(self, s):
        return sum(s)

    def order(self, s):
        return (sum(s), tuple(-e for e in s))

    def basis(self, degree):
        return monomial_basis(self.n, degree)

    def generators(self):
        return [zero_index(self.n)]


class DeltaSumModule(DModule):
    """Direct sum of delta modules at the listed points; keys are (c, s)."""

    def __init__(self, n: int, points: Sequence[Sequence]):
        self.n = n
        self.parts = [DeltaModule(n, p) for p in points]
        self.tag = "+".join(p.tag for p in self.parts)

    def x(self, i, key):
        c, s = key
        return {(c, t): v for t, v in self.parts[c].x(i, s).items()}

    def d(self, i, key):
        c, s = key
        return {(c, t): v for t, v in self.parts[c].d(i, s).items()}

    def degree(self, key):
        return sum(key[1])

    def order(self, key):
        c, s = key
        return (sum(s), tuple(-e for e in s), -c)

    def basis(self, degree, summands=None):
        cs = range(len(self.parts)) if summands is None else summands
        return [(c, s) for c in cs for s in monomial_basis(self.n, degree)]

    def generators(self):
        return [(c, zero_index(self.n)) for c in range(len(self.parts))]


# -- AV-modules ----------------------------------------------------------------

class AVModule:
    """Common interface; subclasses implement the primitive actions."""

    n: int
    dim_w: int
    name: str

    # primitive actions -------------------------------------------------------
    def act_monomial(self, a: MultiIndex, v: Vector) -> Vector:
        raise NotImplementedError

    def act_letter(self, letter: Letter, v: Vector) -> Vector:
        raise NotImplementedError

    def act_weyl_monomial(self, r: MultiIndex, s: MultiIndex, v: Vector) -> Vector:
        raise NotImplementedError

    def act_lplus_letter(self, letter: Letter, v: Vector) -> Vector:
        raise NotImplementedError

    def key_order(self, key) -> tuple:
        raise NotImplementedError

    def key_degree(self, key) -> int:
        raise NotImplementedError

    def basis_keys(self, degree: int) -> List[Hashable]:
        raise NotImplementedError

    def generators(self) -> List[Vector]:
        raise NotImplementedError

    # derived actions ---------------------------------------------------------
    def act_poly(self, f: Polynomial, v: Vector) -> Vector:
        out: Vector = {}
        for a, c in f.terms.items():
            add_into(out, self.act_monomial(a, v), c)
        return out

    def act_vf(self, eta: VectorField, v: Vector) -> Vector:
        out: Vector = {}
        for l, c in eta.letters().items():
            add_into(out, self.act_letter(l, v), c)
        return out

    def act_x(self, i: int, v: Vector) -> Vector:
        e = [0] * self.n
        e[i] = 1
        return self.act_monomial(tuple(e), v)

    def act_d(self, i: int, v: Vector) -> Vector:
        e = [0] * self.n
        e[i] = 1
        return self.act_weyl_monomial(zero_index(self.n), tuple(e), v)

    def act_tensor(self, t: TensorElement, v: Vector) -> Vector:
        out: Vector = {}
        for ((r, s), word), c in t.terms.items():
            w = v
            for l in reversed(word):
                w = self.act_lplus_letter(l, w)
            add_into(out, self.act_weyl_monomial(r, s, w), c)
        return out

    def act_smash(self, a: SmashElement, v: Vector) -> Vector:
        out: Vector = {}
        for (f, word), c in a.terms.items():
            w = v
            for l in reversed(word):
                w = self.act_letter(l, w)
            add_into(out, self.act_monomial(f, w), c)
        return out

    def basis_vectors(self, degree: int) -> List[Vector]:
        return [{k: Fraction(1)} for k in self.basis_keys(degree)]

    def random_vector(self, rng: random.Random, degree: int = 2, terms: int = 3) -> Vector:
        keys = self.basis_keys(degree)
        if not keys:
            return {}
        v: Vector = {}
        for _ in range(rng.randint(1, terms)):
            add_term_into(v, rng.choice(keys), Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        return v


class TensorModule(AVModule):
    """P (x) W with the action x^k d_i (p (x) q) = (x^k d_i p) (x) q + sum_{0<m<=k} C(k,m) (x^{k-m} p) (x) X^m d_i q."""

    def __init__(self, P: DModule, rho: RhoData):
        if P.n != rho.n:
            raise MalformedSpec("D-module and L_+-module ranks differ")
        self.P = P
        self.rho = rho
        self.n = P.n
        self.dim_w = rho.dim
        self.name = f"tensor[{P.tag} x W{rho.dim}]"

    def _p_apply(self, fn, v: Vector) -> Vector:
        out: Vector = {}
        for (pk, j), c in v.items():
            for qk, d in fn(pk).items():
                add_term_into(out, (qk, j), c * d)
        return out

    def _p_vec_apply(self, fn, v: Vector) -> Vector:
        # apply a P-vector map to each W-slice
        slices: Dict[int, Vector] = {}
        for (pk, j), c in v.items():
            slices.setdefault(j, {})[pk] = c
        out: Vector = {}
        for j, sv in slices.items():
            for pk, c in fn(sv).items():
                out[(pk, j)] = c
        return out

    def act_monomial(self, a, v):
        return self._p_vec_apply(lambda sv: self.P.act_monomial(a, sv), v)

    def act_weyl_monomial(self, r, s, v):
        return self._p_vec_apply(lambda sv: self.P.act_weyl_monomial(r, s, sv), v)

    def act_lplus_letter(self, letter, v):
        out: Vector = {}
        m = self.rho.matrix(letter)
        if m is None:
            return out
        for (pk, j), c in v.items():
            for l in range(self.dim_w):
                if m[l][j]:
                    add_term_into(out, (pk, l), c * m[l][j])
        return out

    def act_letter(self, letter, v):
        k, i = letter
        n = self.n
        e = [0] * n
        e[i] = 1
        out = self.act_weyl_monomial(k, tuple(e), v)
        for m in indices_below(k):
            if not any(m):
                continue
            w = self.act_lplus_letter((m, i), v)
            if w:
                add_into(out, self.act_monomial(sub_index(k, m), w), multi_binomial(k, m))
        return out

    def key_order(self, key):
        pk, j = key
        return (self.P.order(pk), -j)

    def key_degree(self, key):
        return self.P.degree(key[0])

    def basis_keys(self, degree):
        return [(pk, j) for pk in self.P.basis(degree) for j in range(self.dim_w)]

    def generators(self):
        return [{(pk, j): Fraction(1)} for pk in self.P.generators() for j in range(self.dim_w)]


class RudakovModule(TensorModule):
    """R_p(W) = k[d] delta_p (x) W, acting through the image phi(1 # x^k d_i).

    The vector-field action is routed through the isomorphism, which makes
    it an independent implementation of the tensor-module formula.
    """

    def __init__(self, n: int, p: Sequence, rho: RhoData):
        super().__init__(DeltaModule(n, p), rho)
        self.p = self.P.p
        self.name = f"rudakov[p=({','.join(q_str(c) for c in self.p)}), W{rho.dim}]"

    def act_letter(self, letter, v):
        from .isomorphism import phi_letter

        return self.act_tensor(phi_letter(letter), v)


class GaugeModule(AVModule):
    """A (x) W with connection matrices B_i (polynomial entries) and constant rho.

    (x^m d_i)(g (x) w) = x^m dg/dx_i w + x^m g B_i(w) + g sum_{0<k<=m} C(m,k) x^{m-k} rho(X^k d_i) w
    """

    def __init__(self, n: int, dim_w: int, B: Sequence[Sequence[Sequence[Polynomial]]], rho: RhoData):
        self.n = n
        self.dim_w = dim_w
        self.B = [tuple(tuple(e for e in row) for row in Bi) for Bi in B]
        self.rho = rho
        self.name = f"gauge[n={n}, W{dim_w}]"
        # sparse form: B_i(w_j) = sum_l B[i][l][j] w_l
        self._Bcols = [
            {j: [(l, Bi[l][j]) for l in range(dim_w) if Bi[l][j]] for j in range(dim_w)} for Bi in self.B
        ]

    def act_monomial(self, a, v):
        return {(add_index(a, b), j): c for (b, j), c in v.items()}

    def _B_apply(self, i: int, prefix: MultiIndex, v: Vector, out: Vector, scale=1) -> None:
        # out += scale * x^prefix * B_i(v)
        for (b, j), c in v.items():
            for l, poly in self._Bcols[i][j]:
                base = add_index(prefix, b)
                for e, pc in poly.terms.items():
                    add_term_into(out, (add_index(base, e), l), scale * c * pc)

    def nabla(self, i: int, v: Vector) -> Vector:
        out: Vector = {}
        for (b, j), c in v.items():
            if b[i]:
                bb = list(b)
                bb[i] -= 1
                add_term_into(out, (tuple(bb), j), c * b[i])
        self._B_apply(i, zero_index(self.n), v, out)
        return out

    def act_weyl_monomial(self, r, s, v):
        for i, e in enumerate(s):
            for _ in range(e):
                v = self.nabla(i, v)
        return self.act_monomial(r, v)

    def act_lplus_letter(self, letter, v):
        out: Vector = {}
        m = self.rho.matrix(letter)
        if m is None:
            return out
        for (b, j), c in v.items():
            for l in range(self.dim_w):
                if m[l][j]:
                    add_term_into(out, (b, l), c * m[l][j])
        return out

    def act_letter(self, letter, v):
        mexp, i = letter
        out: Vector = {}
        for (b, j), c in v.items():
            if b[i]:
                e = list(add_index(mexp, b))
                e[i] -= 1
                add_term_into(out, (tuple(e), j), c * b[i])
        self._B_apply(i, mexp, v, out)
        for k in indices_below(mexp):
            if not any(k):
                continue
            w = self.act_lplus_letter((k, i), v)
            if w:
                add_into(out, self.act_monomial(sub_index(mexp, k), w), multi_binomial(mexp, k))
        return out

    def key_order(self, key):
        b, j = key
        return (sum(b), tuple(-e for e in b), -j)

    def key_degree(self, key):
        return sum(key[0])

    def basis_keys(self, degree):
        return [(b, j) for b in monomial_basis(self.n, degree) for j in range(self.dim_w)]

    def generators(self):
        z = zero_index(self.n)
        return [{(z, j): Fraction(1)} for j in range(self.dim_w)]

    def as_polys(self, v: Vector) -> List[Polynomial]:
        comps: List[Dict] = [dict() for _ in range(self.dim_w)]
        for (b, j), c in v.items():
            comps[j][b] = c
        return [Polynomial(self.n, t) for t in comps]

    def from_polys(self, polys: Sequence[Polynomial]) -> Vector:
        return {(b, j): c for j, p in enumerate(polys) for b, c in p.terms.items()}


# -- specs ----------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeModuleSpec:
    n: int
    W_dim: int
    B: Tuple = ()
    rho: RhoData = None
    kind: str = "gauge"

    def __post_init__(self):
        if self.rho is None:
            object.__setattr__(self, "rho", trivial_rho(self.n, self.W_dim))
        if not self.B:
            zero = tuple(tuple(Polynomial.zero(self.n) for _ in range(self.W_dim)) for _ in range(self.W_dim))
            object.__setattr__(self, "B", tuple(zero for _ in range(self.n)))
        if len(self.B) != self.n:
            raise MalformedSpec(f"need {self.n} connection matrices, got {len(self.B)}")
        for Bi in self.B:
            if len(Bi) != self.W_dim or any(len(r) != self.W_dim for r in Bi):
                raise MalformedSpec(f"connection matrices must be {self.W_dim}x{self.W_dim}")
        if self.rho.dim != self.W_dim or self.rho.n != self.n:
            raise MalformedSpec("rho does not match n / W_dim")


@dataclass(frozen=True)
class RudakovModuleSpec:
    n: int
    p: Tuple[Fraction, ...]
    W_dim: int
    rho: RhoData = None
    kind: str = "rudakov"

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(Q(c) for c in self.p))
        if len(self.p) != self.n:
            raise MalformedSpec(f"point p must have {self.n} coordinates")
        if self.rho is None:
            object.__setattr__(self, "rho", trivial_rho(self.n, self.W_dim))
        if self.rho.dim != self.W_dim or self.rho.n != self.n:
            raise MalformedSpec("rho does not match n / W_dim")


def build_module(spec) -> AVModule:
    if isinstance(spec, GaugeModuleSpec):
        return GaugeModule(spec.n, spec.W_dim, spec.B, spec.rho)
    if isinstance(spec, RudakovModuleSpec):
        return RudakovModule(spec.n, spec.p, spec.rho)
    raise TypeError(f"not a module spec: {spec!r}")


def tensor_module(P, rho: RhoData) -> TensorModule:
    """P (x) Q for P a D-module or one of the tags ``"tautological"``, ``("delta", p)``."""
    if isinstance(P, DModule):
        return TensorModule(P, rho)
    if P == "tautological":
        return TensorModule(TautologicalModule(rho.n), rho)
    if isinstance(P, tuple) and P and P[0] == "delta":
        return TensorModule(DeltaModule(rho.n, P[1]), rho)
    raise ValueError(f"unknown D-module tag {P!r}")


def spec_check(spec) -> Dict:
    """Verify flatness, [B_i, rho] = 0 and the homomorphism property of rho."""
    violations: List[str] = []
    rho = spec.rho
    if isinstance(spec, GaugeModuleSpec):
        n, d = spec.n, spec.W_dim
        B = spec.B
        for i in range(n):
            for j in range(i + 1, n):
                for a in range(d):
                    for b in range(d):
                        val = B[j][a][b].partial(i) - B[i][a][b].partial(j)
                        for t in range(d):
                            val = val + B[i][a][t] * B[j][t][b] - B[j][a][t] * B[i][t][b]
                        if val:
                            violations.append(f"flatness fails for (i,j)=({i + 1},{j + 1}) at entry ({a},{b}): {val}")
        for l, m in rho.matrices.items():
            if rho.matrix(l) is None:
                continue
            for i in range(n):
                for a in range(d):
                    for b in range(d):
                        val = Polynomial.zero(n)
                        for t in range(d):
                            val = val + B[i][a][t].scale(m[t][b]) - B[i][t][b].scale(m[a][t])
                        if val:
                            violations.append(f"[B_{i + 1}, rho({l})] != 0 at entry ({a},{b})")
    violations.extend(rho_homomorphism_violations(rho))
    return {"kind": spec.kind, "pass": not violations, "violations": violations}


# -- JSON spec format -------------------------------------------------------------

def _parse_rho(n: int, dim: int, entries, cutoff) -> RhoData:
    mats: Dict[Letter, Matrix] = {}
    for e in entries or []:
        try:
            k = tuple(int(x) for x in e["k"])
            i = int(e["i"]) - 1
            m = _mat(e["matrix"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise MalformedSpec(f"bad rho entry {e!r}: {exc}") from exc
        mats[(k, i)] = m
    return RhoData(n, dim, mats, -1 if cutoff is None else int(cutoff))


def spec_from_dict(d: Dict):
    try:
        kind = d["type"]
        n = int(d["n"])
        dim = int(d["W_dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSpec(f"spec needs type, n, W_dim: {exc}") from exc
    if n < 1 or dim < 0:
        raise MalformedSpec("need n >= 1 and W_dim >= 0")
    rho = _parse_rho(n, dim, d.get("rho"), d.get("rho_cutoff"))
    if kind == "gauge":
        B = d.get("B")
        mats = ()
        if B:
            try:
                mats = tuple(
                    tuple(tuple(parse_poly(str(x), n) for x in row) for row in Bi) for Bi in B
                )
            except ValueError as exc:
                raise MalformedSpec(f"bad connection entry: {exc}") from exc
        return GaugeModuleSpec(n, dim, mats, rho)
    if kind == "rudakov":
        try:
            p = tuple(Q(str(c)) for c in d.get("p", [0] * n))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedSpec(f"bad point: {exc}") from exc
        return RudakovModuleSpec(n, p, dim, rho)
    raise MalformedSpec(f"unknown module type {kind!r}")


def spec_to_dict(spec) -> Dict:
    from .arithpoly import format_poly

    rho = [
        {"k": list(k), "i": i + 1, "matrix": [[q_str(x) for x in row] for row in m]}
        for (k, i), m in sorted(spec.rho.matrices.items(), key=lambda lm: letter_order(lm[0]))
    ]
    d = {"type": spec.kind, "n": spec.n, "W_dim": spec.W_dim, "rho": rho, "rho_cutoff": spec.rho.cutoff}
    if isinstance(spec, GaugeModuleSpec):
        d["B"] = [[[format_poly(x) for x in row] for row in Bi] for Bi in spec.B]
    else:
        d["p"] = [q_str(c) for c in spec.p]
    return d


def load_spec(path: str):
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedSpec(f"cannot read spec {path}: {exc}") from exc
    return spec_from_dict(d)


# -- module axioms --------------------------------------------------------------

def leibniz_check(M: AVModule, eta: VectorField, f: Polynomial, v: Vector) -> Vector:
    """eta(f v) - eta(f) v - f (eta v); zero for an AV-module."""
    lhs = M.act_vf(eta, M.act_poly(f, v))
    out = vec_sub(lhs, M.act_poly(eta.apply(f), v))
    return vec_sub(out, M.act_poly(f, M.act_vf(eta, v)))


def representation_residual(M: AVModule, eta: VectorField, mu: VectorField, v: Vector) -> Vector:
    """[eta, mu] v - (eta (mu v) - mu (eta v))."""
    from .liefields import vf_bracket

    lhs = M.act_vf(vf_bracket(eta, mu), v)
    rhs = vec_sub(M.act_vf(eta, M.act_vf(mu, v)), M.act_vf(mu, M.act_vf(eta, v)))
    return vec_sub(lhs, rhs)


# -- composition series of P (x) Q ------------------------------------------------

def _w_rank(vectors: Sequence[Sequence]) -> int:
    eb = EchelonBasis(lambda j: -j)
    for vec in vectors:
        eb.add({j: Q(c) for j, c in enumerate(vec) if Q(c)})
    return eb.rank


def interleave_series(P_chain: Sequence, Q_chain: Sequence[Sequence[Sequence]]) -> List[Dict]:
    """The chain N_{1,1} < ... < N_{r,1} < N_{1,2} < ... < N_{r,s}.

    N_{a,1} = P_a (x) Q_1 and N_{a,b} = P_a (x) Q_b + P_r (x) Q_{b-1}.
    ``P_chain`` entries are collections of summand indices (or any tags
    ordered by set inclusion); ``Q_chain`` entries are bases of subspaces of W
    as coordinate lists.  Each element of the result lists its summands as
    ``(P tag, Q basis)`` pairs.
    """
    r, s = len(P_chain), len(Q_chain)
    if r == 0 or s == 0:
        raise ValueError("chains must be non-empty")
    for a in range(1, r):
        lo, hi = frozenset(P_chain[a - 1]), frozenset(P_chain[a])
        if not lo < hi:
            raise ValueError(f"P chain not strictly increasing at position {a + 1}")
    for b in range(1, s):
        lo, hi = Q_chain[b - 1], Q_chain[b]
        if not (_w_rank(hi) > _w_rank(lo) and _w_rank(list(lo) + list(hi)) == _w_rank(hi)):
            raise ValueError(f"Q chain not strictly increasing at position {b + 1}")
    out = []
    for b in range(1, s + 1):
        for a in range(1, r + 1):
            parts = [(tuple(sorted(P_chain[a - 1])), Q_chain[b - 1])]
            if b > 1:
                parts.append((tuple(sorted(P_chain[r - 1])), Q_chain[b - 2]))
            out.append({"a": a, "b": b, "parts": parts})
    return out


def series_span(M: TensorModule, element: Dict, degree: int) -> List[Vector]:
    """Spanning vectors of a chain element truncated at P-degree ``degree``."""
    vecs = []
    for summands, qbasis in element["parts"]:
        for pk in M.P.basis(degree, summands):
            for qv in qbasis:
                vecs.append({(pk, j): Q(c) for j, c in enumerate(qv) if Q(c)})
    return vecs


def verify_series(M: TensorModule, series: List[Dict], degree: int) -> Dict:
    """Check strict inclusions by rank and closure under the AV generators.

    Ranks are computed on the truncation at P-degree ``degree``; closure is
    checked by acting with x_i, d/dx_i and the F' letters on spanning
    vectors of degree < ``degree`` and testing membership in the truncation.
    """
    rows = []
    prev_rank = 0
    prev_span = None
    ok = True
    gens = [((0,) * M.n, i) for i in range(M.n)] + fprime_basis(M.n)
    for el in series:
        eb = EchelonBasis(M.key_order)
        eb.extend(series_span(M, el, degree))
        rank = eb.rank
        strict = rank > prev_rank
        contains_prev = prev_span is None or all(eb.contains(v) for v in prev_span)
        closed = True
        for v in series_span(M, el, degree - 1):
            for i in range(M.n):
                if not eb.contains(M.act_x(i, v)):
                    closed = False
            for l in gens:
                if not eb.contains(M.act_letter(l, v)):
                    closed = False
        row = {
            "a": el["a"],
            "b": el["b"],
            "rank": rank,
            "quotient_rank": rank - prev_rank,
            "strict": strict,
            "contains_previous": contains_prev,
            "closed": closed,
        }
        ok &= strict and contains_prev and closed
        rows.append(row)
        prev_rank = rank
        prev_span = series_span(M, el, degree)
    return {"degree": degree, "length": len(series), "steps": rows, "pass": ok}
