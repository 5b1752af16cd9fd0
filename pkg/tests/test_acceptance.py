"""Acceptance criteria at their stated bounds.

Each ``test_criterion_<N>_<name>`` covers one criterion; conftest prints one
PASS/FAIL line per criterion in the terminal summary.
"""

import random
import time
from fractions import Fraction
from math import comb

import pytest

from avh.arithpoly import Polynomial
from avh.avmodules import (
    DeltaSumModule,
    GaugeModuleSpec,
    RhoData,
    RudakovModuleSpec,
    TensorModule,
    adjoint_quotient_rho,
    build_module,
    gl_standard_rho,
    interleave_series,
    leibniz_check,
    representation_residual,
    tensor_module,
    trivial_rho,
    verify_series,
)
from avh.diffcalc import diff_order, localization_report
from avh.enveloping import smash_mul, tensor_mul
from avh.growth import estimate_gkdim, filtration_profile
from avh.isomorphism import (
    failures,
    random_poly,
    random_smash,
    random_tensor,
    random_vector_field,
    verify_homomorphism,
    verify_roundtrip,
)
from avh.liefields import bracket_identity_check, generation_check, letter_grade
from avh.weyl import WeylElement, weyl_mul


def test_criterion_1_isomorphism_roundtrip():
    start = time.perf_counter()
    for n in (1, 2, 3):
        rep = verify_roundtrip(n, 4, 200, seed=n)
        assert not failures(rep), failures(rep)[:3]
        assert sum(e["check"].endswith("random") for e in rep) == 400
    elapsed = time.perf_counter() - start
    print(f"round trip n=1..3: {elapsed:.1f} s")
    assert elapsed < 30


def test_criterion_2_homomorphism():
    for n in (1, 2):
        rep = verify_homomorphism(n, 3, 200, seed=n)
        assert not failures(rep), failures(rep)[:3]


def _random_weyl(rng, n):
    p = random_poly(rng, 2 * n, 3, 3)
    return WeylElement(n, {(k[:n], k[n:]): c for k, c in p.terms.items()})


def test_criterion_3_confluence():
    rng = random.Random(3)
    for _ in range(100):
        a, b, c = (_random_weyl(rng, 2) for _ in range(3))
        assert weyl_mul(weyl_mul(a, b), c) == weyl_mul(a, weyl_mul(b, c))
    for _ in range(100):
        a, b, c = (random_smash(rng, 2, 2, 3, 2) for _ in range(3))
        assert smash_mul(smash_mul(a, b), c) == smash_mul(a, smash_mul(b, c))
    for _ in range(100):
        a, b, c = (random_tensor(rng, 2, 2, 3, 2) for _ in range(3))
        assert tensor_mul(tensor_mul(a, b), c) == tensor_mul(a, tensor_mul(b, c))


def _grade0_rank2(n):
    if n == 2:
        return gl_standard_rho(2)
    # X_a d_a -> Id and X_a d_b -> 0 (a != b) is a gl_n action on Q^2
    eye = ((1, 0), (0, 1))
    return RhoData(n, 2, {(tuple(int(t == a) for t in range(n)), a): eye for a in range(n)})


def test_criterion_4_growth_oracles():
    for n in (1, 2, 3):
        want = [comb(m + n, n) for m in range(1, 9)]
        for P in ("tautological", ("delta", (0,) * n)):
            prof = filtration_profile(tensor_module(P, trivial_rho(n)), mmax=8)
            assert prof.dims == want, (P, n)
            assert estimate_gkdim(prof).estimate == n
    for n in (1, 2, 3):
        M = build_module(GaugeModuleSpec(n, 2, (), _grade0_rank2(n)))
        prof = filtration_profile(M, mmax=8 if n < 3 else 7)
        assert prof.dims == [2 * comb(m + n, n) for m in range(1, len(prof.dims) + 1)]
        assert estimate_gkdim(prof).estimate == n


def test_criterion_5_bracket_span():
    for n in (1, 2, 3):
        for s in (1, 2):
            rep = bracket_identity_check(n, s, 5)
            assert rep["pass"], rep
            assert rep["q"] == (2 * s + 1 if n == 1 else 2 * s)
        assert generation_check(n, 5)["pass"]


def _axiom_modules():
    rq, _ = adjoint_quotient_rho(2, 2)
    x = Polynomial.var(2, 0) * Polynomial.var(2, 0) * Polynomial.var(2, 1)
    return {
        "gauge_gl2": build_module(GaugeModuleSpec(2, 2, (), gl_standard_rho(2))),
        "gauge_grade1": build_module(GaugeModuleSpec(2, rq.dim, (), rq)),
        "gauge_connection": build_module(GaugeModuleSpec(2, 1, tuple(((x.partial(i),),) for i in range(2)))),
        "rudakov": build_module(RudakovModuleSpec(2, (1, Fraction(-1, 2)), 2, gl_standard_rho(2))),
        "tensor_taut": tensor_module("tautological", gl_standard_rho(2)),
        "tensor_delta": tensor_module(("delta", (0, 0)), rq),
    }


def test_criterion_6_leibniz_suite():
    for name, M in _axiom_modules().items():
        rng = random.Random(name)
        for _ in range(300):
            eta, mu = random_vector_field(rng, 2, 2), random_vector_field(rng, 2, 2)
            f, v = random_poly(rng, 2, 3), M.random_vector(rng, 2)
            assert leibniz_check(M, eta, f, v) == {}, name
            assert representation_residual(M, eta, mu, v) == {}, name


def test_criterion_7_differentiability():
    rq, _ = adjoint_quotient_rho(2, 2)
    cases = [
        (build_module(RudakovModuleSpec(2, (0, 0), 1)), 0),
        (build_module(GaugeModuleSpec(2, 2, (), gl_standard_rho(2))), 1),
        (build_module(GaugeModuleSpec(2, rq.dim, (), rq)), 2),
    ]
    for M, want in cases:
        r = diff_order(M, smax=3, dmax=3, seed=0, samples=5)
        assert r.route_agreement and r.routes == {"direct": want, "lplus": want}
        assert r.order == want


def test_criterion_8_localization():
    rq, _ = adjoint_quotient_rho(2, 2)
    mods = [
        (tensor_module("tautological", trivial_rho(2)), 0),
        (build_module(GaugeModuleSpec(2, 2, (), gl_standard_rho(2))), 1),
        (build_module(GaugeModuleSpec(2, rq.dim, (), rq)), 2),
    ]
    x1 = Polynomial.var(2, 0)
    for M, s in mods:
        for f in (x1, x1 + 1):
            rep = localization_report(M, f, s, samples=100, seed=s)
            c = rep["counts"]
            assert rep["pass"], c
            print(
                f"{M.name} f={f} s={s}: closed=oracle {c['closed_vs_oracle_agree']}/100, "
                f"printed=oracle {c['printed_vs_oracle_agree']}/100, "
                f"printed(s+1)=oracle {c['printed_shifted_vs_oracle_agree']}/100"
            )
            if s >= 1:
                # documented discrepancy: the printed coefficients disagree with the oracle
                assert not rep["printed_formula_matches_oracle"]


@pytest.mark.parametrize("n", [1, 2])
def test_criterion_9_series_interleaving(n):
    for s in (1, 2, 3):
        rho, basis = adjoint_quotient_rho(n, s)
        # Q_b = span of the letters of grade >= s - b: an L_+-submodule chain
        Q = [
            [[int(t == j) for t in range(len(basis))] for j, l in enumerate(basis) if letter_grade(l) >= s - b]
            for b in range(1, s + 1)
        ]
        for r in (1, 2, 3):
            M = TensorModule(DeltaSumModule(n, [[c] * n for c in range(r)]), rho)
            series = interleave_series([list(range(a)) for a in range(1, r + 1)], Q)
            rep = verify_series(M, series, 2)
            assert rep["pass"] and rep["length"] == r * s
            per_summand = comb(2 + n, n)
            grade_dims = [sum(1 for l in basis if letter_grade(l) == s - b) for b in range(1, s + 1)]
            assert [x["quotient_rank"] for x in rep["steps"]] == [per_summand * d for d in grade_dims for _ in range(r)]
