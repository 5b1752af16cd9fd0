"""Bundled invariant suite run by ``avh selftest``.

Each invariant is a named, grouped, seeded check at small bounds that
returns ``(ok, detail)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import Callable, Dict, List, Optional, Tuple

from .arithpoly import Polynomial
from .avmodules import (
    GaugeModule,
    GaugeModuleSpec,
    RudakovModule,
    adjoint_quotient_rho,
    build_module,
    gl_standard_rho,
    leibniz_check,
    representation_residual,
    tensor_module,
    trivial_rho,
)
from .diffcalc import diff_order, localization_report
from .enveloping import enveloping, smash_mul, tensor_mul
from .growth import estimate_gkdim, filtration_profile
from .isomorphism import (
    random_letter,
    random_poly,
    random_smash,
    random_tensor,
    random_vector_field,
    report_ok,
    verify_homomorphism,
    verify_roundtrip,
)
from .liefields import bracket_identity_check, generation_check, vf_bracket
from .weyl import WeylElement, weyl_mul


@dataclass
class Invariant:
    name: str
    group: str
    check: Callable[[int], Tuple[bool, str]]


def _rng(seed: int, salt: str) -> random.Random:
    return random.Random(f"{seed}:{salt}")


def _poly_ring(seed: int):
    rng = _rng(seed, "poly")
    for _ in range(20):
        f, g, h = (random_poly(rng, 2, 3, 4) for _ in range(3))
        if (f * g) * h != f * (g * h) or f * g != g * f:
            return False, f"ring axioms fail at {f}, {g}, {h}"
        if (f * g).partial(0) != f.partial(0) * g + f * g.partial(0):
            return False, f"product rule fails at {f}, {g}"
    return True, "20 triples"


def _random_weyl(rng: random.Random, n: int) -> WeylElement:
    p = random_poly(rng, 2 * n, 3, 3)
    return WeylElement(n, {(k[:n], k[n:]): c for k, c in p.terms.items()})


def _weyl_assoc(seed: int):
    rng = _rng(seed, "weyl")
    for _ in range(20):
        a, b, c = (_random_weyl(rng, 2) for _ in range(3))
        if weyl_mul(weyl_mul(a, b), c) != weyl_mul(a, weyl_mul(b, c)):
            return False, "associativity fails"
    for i in range(2):
        comm = weyl_mul(WeylElement.d(2, i), WeylElement.x(2, i)) - weyl_mul(WeylElement.x(2, i), WeylElement.d(2, i))
        if comm != WeylElement.one(2):
            return False, "[d_i, x_i] != 1"
    return True, "20 triples"


def _antisymmetry(seed: int):
    rng = _rng(seed, "anti")
    for _ in range(30):
        a, b = random_vector_field(rng, 2), random_vector_field(rng, 2)
        if vf_bracket(a, b) != -vf_bracket(b, a):
            return False, f"[a,b] != -[b,a] at a={a}, b={b}"
    return True, "30 pairs"


def _jacobi(seed: int):
    rng = _rng(seed, "jacobi")
    for _ in range(30):
        a, b, c = (random_vector_field(rng, 2) for _ in range(3))
        s = vf_bracket(a, vf_bracket(b, c)) + vf_bracket(b, vf_bracket(c, a)) + vf_bracket(c, vf_bracket(a, b))
        if s:
            return False, f"Jacobi sum nonzero at a={a}, b={b}, c={c}"
    return True, "30 triples"


def _bracket_identity(seed: int):
    for n, s in ((1, 1), (2, 1), (3, 1)):
        r = bracket_identity_check(n, s, 4)
        if not r["pass"]:
            return False, f"[m^s L+, m^s L+] != m^q L+ for n={n}, s={s}"
    return True, "n=1..3, s=1, grade<=4"


def _generation(seed: int):
    for n in (1, 2, 3):
        if not generation_check(n, 4)["pass"]:
            return False, f"F' does not generate L+ for n={n}"
    return True, "n=1..3, grade<=4"


def _pbw_normal(seed: int):
    rng = _rng(seed, "pbw")
    U = enveloping(2, False)
    for _ in range(20):
        word = tuple(random_letter(rng, 2, 2) for _ in range(3))
        out = U.normalize(word)
        bad = [w for w in out if not U.is_normal(w)]
        if bad:
            return False, f"non-normal output {bad[0]} from {word}"
    return True, "20 words"


def _smash_assoc(seed: int):
    rng = _rng(seed, "smash")
    for _ in range(10):
        a, b, c = (random_smash(rng, 2, 2, 2) for _ in range(3))
        if smash_mul(smash_mul(a, b), c) != smash_mul(a, smash_mul(b, c)):
            return False, "smash product not associative"
        a, b, c = (random_tensor(rng, 2, 2, 2) for _ in range(3))
        if tensor_mul(tensor_mul(a, b), c) != tensor_mul(a, tensor_mul(b, c)):
            return False, "tensor product not associative"
    return True, "10 triples each"


def _roundtrip(seed: int):
    for n in (1, 2):
        rep = verify_roundtrip(n, 2, 10, seed)
        if not report_ok(rep):
            return False, f"round trip fails for n={n}"
    return True, "n=1,2, degree 2"


def _homomorphism(seed: int):
    for n in (1, 2):
        rep = verify_homomorphism(n, 2, 10, seed)
        if not report_ok(rep):
            bad = sorted({e["check"] for e in rep if not e["pass"]})
            return False, f"n={n}: {', '.join(bad)}"
    return True, "n=1,2, degree 2"


def _sample_modules():
    rq, _ = adjoint_quotient_rho(2, 2)
    return {
        "gauge_gl2": GaugeModule(2, 2, GaugeModuleSpec(2, 2).B, gl_standard_rho(2)),
        "gauge_adjoint": build_module(GaugeModuleSpec(2, rq.dim, (), rq)),
        "rudakov_gl2": RudakovModule(2, (0, 0), gl_standard_rho(2)),
        "tensor_taut": tensor_module("tautological", gl_standard_rho(2)),
    }


def _leibniz(seed: int):
    rng = _rng(seed, "leibniz")
    for name, M in _sample_modules().items():
        for _ in range(10):
            eta = random_vector_field(rng, 2)
            f = random_poly(rng, 2)
            v = M.random_vector(rng, 2)
            if leibniz_check(M, eta, f, v):
                return False, f"Leibniz fails on {name}"
            mu = random_vector_field(rng, 2)
            if representation_residual(M, eta, mu, v):
                return False, f"representation property fails on {name}"
    return True, "4 modules x 10 samples"


def _growth(seed: int):
    for n in (1, 2):
        dims = filtration_profile(tensor_module("tautological", trivial_rho(n)), mmax=6).dims
        want = [comb(m + n, n) for m in range(1, 7)]
        if dims != want:
            return False, f"tautological profile {dims} != {want}"
        if estimate_gkdim(dims).estimate != n:
            return False, f"GK estimate != {n}"
    return True, "tautological n=1,2"


def _gauge_growth(seed: int):
    M = _sample_modules()["gauge_gl2"]
    est = estimate_gkdim(filtration_profile(M, mmax=6)).estimate
    return est == 2, f"estimate {est}"


def _diff_order(seed: int):
    mods = _sample_modules()
    cases = [
        (RudakovModule(2, (0, 0), trivial_rho(2)), 0),
        (mods["gauge_gl2"], 1),
        (mods["gauge_adjoint"], 2),
    ]
    for M, want in cases:
        r = diff_order(M, smax=3, dmax=3, seed=seed, samples=2, vdegree=1)
        if not r.route_agreement or r.order != want:
            return False, f"{M.name}: order {r.order} (want {want}), routes {r.routes}"
    return True, "orders 0, 1, 2"


def _localization(seed: int):
    mods = _sample_modules()
    x1 = Polynomial.var(2, 0)
    for name, s in (("gauge_gl2", 1), ("gauge_adjoint", 2)):
        for f in (x1, x1 + 1):
            r = localization_report(mods[name], f, s, samples=5, seed=seed)
            if not r["pass"]:
                return False, f"{name} at f={f}: {r['counts']}"
    return True, "closed form = oracle, Leibniz and bracket hold"


INVARIANTS: List[Invariant] = [
    Invariant("poly_ring_axioms", "arithpoly", _poly_ring),
    Invariant("weyl_associativity", "weyl", _weyl_assoc),
    Invariant("bracket_antisymmetry", "liefields", _antisymmetry),
    Invariant("jacobi", "liefields", _jacobi),
    Invariant("bracket_span_identity", "liefields", _bracket_identity),
    Invariant("fprime_generation", "liefields", _generation),
    Invariant("pbw_normal_words", "enveloping", _pbw_normal),
    Invariant("product_associativity", "enveloping", _smash_assoc),
    Invariant("iso_roundtrip", "isomorphism", _roundtrip),
    Invariant("iso_homomorphism", "isomorphism", _homomorphism),
    Invariant("leibniz_and_representation", "avmodules", _leibniz),
    Invariant("growth_tautological", "growth", _growth),
    Invariant("growth_gauge_holonomic", "growth", _gauge_growth),
    Invariant("diff_order_canonical", "diffcalc", _diff_order),
    Invariant("localization_oracle", "diffcalc", _localization),
]


def run_selftest(filter_: Optional[str] = None, seed: int = 0) -> List[Dict]:
    """Run invariants whose group or name contains ``filter_`` (all if None)."""
    chosen = [
        inv for inv in INVARIANTS if not filter_ or filter_ == inv.group or filter_ in inv.name
    ]
    if not chosen:
        raise ValueError(f"no invariant matches filter {filter_!r}")
    results = []
    for inv in chosen:
        try:
            ok, detail = inv.check(seed)
        except Exception as exc:  # a crash counts as a failure of that invariant
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": inv.name, "group": inv.group, "pass": bool(ok), "detail": detail})
    return results
