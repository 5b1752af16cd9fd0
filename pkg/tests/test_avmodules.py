import json
import random
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given

from avh.arithpoly import Polynomial, parse_poly
from avh.avmodules import (
    DeltaModule,
    DeltaSumModule,
    GaugeModule,
    GaugeModuleSpec,
    MalformedSpec,
    RhoData,
    RudakovModule,
    RudakovModuleSpec,
    TensorModule,
    adjoint_quotient_rho,
    build_module,
    gl_standard_rho,
    interleave_series,
    leibniz_check,
    load_spec,
    representation_residual,
    rho_homomorphism_violations,
    spec_check,
    spec_from_dict,
    spec_to_dict,
    tensor_module,
    trace_rho,
    trivial_rho,
    verify_series,
)
from avh.isomorphism import phi, random_poly, random_smash, random_vector_field
from avh.liefields import VectorField, letter_grade, parse_vector_field
from strategies import seeds

ONE = Fraction(1)


def gauge(n, W, rho=None, B=()):
    return build_module(GaugeModuleSpec(n, W, B, rho))


def rudakov(n, W=1, rho=None, p=None):
    return build_module(RudakovModuleSpec(n, tuple(p or [0] * n), W, rho))


def test_act_poly_examples():
    G = gauge(2, 1)
    assert G.act_poly(Polynomial.var(2, 0), {((0, 1), 0): ONE}) == {((1, 1), 0): ONE}
    R = rudakov(1)
    x = Polynomial.var(1, 0)
    assert R.act_poly(x, {((0,), 0): ONE}) == {}
    assert R.act_poly(x, {((1,), 0): ONE}) == {((0,), 0): -ONE}


def test_act_vf_examples():
    xd = parse_vector_field("x1 d1", 1)
    assert gauge(1, 1).act_vf(xd, {((0,), 0): ONE}) == {}
    R = RhoData(1, 2, {((1,), 0): ((1, 2), (0, 3))})
    # (x d)(1 (x) w_0) = 1 (x) R w_0 and R w_1 = 2 w_0 + 3 w_1
    G = gauge(1, 2, R)
    assert G.act_vf(xd, {((0,), 0): ONE}) == {((0,), 0): ONE}
    assert G.act_vf(xd, {((0,), 1): ONE}) == {((0,), 0): 2 * ONE, ((0,), 1): 3 * ONE}
    assert rudakov(1).act_vf(xd, {((0,), 0): ONE}) == {((0,), 0): -ONE}


def test_delta_standard_gl1_hand_expansion():
    # (x^2 d)(d^2 delta (x) w) = x^2 d^3 delta (x) w + 2 x d^2 delta (x) R w = 6 d delta - 4 d delta
    M = tensor_module(("delta", (0,)), gl_standard_rho(1))
    eta = parse_vector_field("x1^2 d1", 1)
    assert M.act_vf(eta, {((2,), 0): ONE}) == {((1,), 0): 2 * ONE}


def test_delta_module_formula():
    P = DeltaModule(1)
    # x^a d^s delta = (-1)^a s!/(s-a)! d^{s-a} delta
    for s in range(5):
        for a in range(s + 1):
            v = {(s,): ONE}
            for _ in range(a):
                v = P.act_x(0, v)
            assert v == {(s - a,): Fraction((-1) ** a * factorial(s) // factorial(s - a))}


def test_leibniz_examples():
    G = gauge(1, 2, gl_standard_rho(1).__class__(1, 2, {((1,), 0): ((1, 0), (0, 2))}))
    eta = parse_vector_field("x1^2 d1", 1)
    x = Polynomial.var(1, 0)
    assert leibniz_check(G, eta, x, {((0,), 0): ONE}) == {}
    R = rudakov(1)
    assert leibniz_check(R, parse_vector_field("x1 d1", 1), x, {((0,), 0): ONE}) == {}
    assert leibniz_check(R, eta, Polynomial.const(1, 1), {((3,), 0): ONE}) == {}


def test_spec_check_examples():
    assert spec_check(GaugeModuleSpec(2, 1))["pass"]
    x2 = parse_poly("x2", 2)
    bad = GaugeModuleSpec(2, 1, (((x2,),), ((Polynomial.zero(2),),)))
    rep = spec_check(bad)
    assert not rep["pass"] and "flatness" in rep["violations"][0]
    # rho(X1 d1) = N alone fails: [X2 d1, X1 d2] = X2 d2 - X1 d1 must map to -N, not 0
    nil = RhoData(2, 2, {((1, 0), 0): ((0, 1), (0, 0))})
    rep = spec_check(GaugeModuleSpec(2, 2, (), nil))
    assert rep["violations"] == ["rho not a homomorphism on [((0, 1), 0), ((1, 0), 1)]"]
    assert spec_check(GaugeModuleSpec(2, 1, (), trace_rho(2, Fraction(3, 2))))["pass"]
    # rho(X1 d2) != 0 alone breaks [E11, E12] = E12
    lone = RhoData(2, 2, {((1, 0), 1): ((1, 0), (0, 0))})
    assert rho_homomorphism_violations(lone)


def test_rho_constructors_are_homomorphisms():
    for n in (1, 2):
        assert not rho_homomorphism_violations(gl_standard_rho(n))
        for s in (1, 2):
            rho, _ = adjoint_quotient_rho(n, s)
            assert not rho_homomorphism_violations(rho)


def test_tensor_examples():
    taut = tensor_module("tautological", trivial_rho(2))
    eta = random_vector_field(random.Random(1), 2)
    v = {((1, 2), 0): ONE}
    g = parse_poly("x1 x2^2", 2)
    assert taut.act_vf(eta, v) == {(k, 0): c for k, c in eta.apply(g).terms.items()}
    delta = tensor_module(("delta", (0, 0)), trivial_rho(2))
    R = rudakov(2)
    for l in [((0, 0), 1), ((2, 1), 0), ((1, 0), 0)]:
        assert delta.act_letter(l, {((1, 1), 0): ONE}) == R.act_letter(l, {((1, 1), 0): ONE})


def test_spec_json_roundtrip(tmp_path):
    rho, _ = adjoint_quotient_rho(2, 2)
    spec = GaugeModuleSpec(2, rho.dim, (), rho)
    d = spec_to_dict(spec)
    assert spec_from_dict(json.loads(json.dumps(d))) == spec
    p = tmp_path / "s.json"
    p.write_text(json.dumps(spec_to_dict(RudakovModuleSpec(1, (Fraction(1, 2),), 1))))
    assert load_spec(str(p)).p == (Fraction(1, 2),)


@pytest.mark.parametrize(
    "bad",
    [
        {"n": 2, "W_dim": 1},
        {"type": "gauge", "n": 0, "W_dim": 1},
        {"type": "torus", "n": 1, "W_dim": 1},
        {"type": "gauge", "n": 1, "W_dim": 1, "rho": [{"k": [1], "i": 1, "matrix": [[1, 2]]}]},
        {"type": "gauge", "n": 2, "W_dim": 1, "B": [[["x1"]]]},
        {"type": "rudakov", "n": 2, "W_dim": 1, "p": [0]},
    ],
)
def test_malformed_specs(bad):
    with pytest.raises(MalformedSpec):
        spec_from_dict(bad)


def test_empty_module():
    M = gauge(2, 0)
    assert M.generators() == []
    assert leibniz_check(M, VectorField.letter((1, 0), 1), Polynomial.var(2, 0), {}) == {}


def _modules():
    rq, _ = adjoint_quotient_rho(2, 2)
    x2 = parse_poly("x1^2 x2", 2)
    conn = tuple(((x2.partial(i),),) for i in range(2))
    return [
        gauge(2, 2, gl_standard_rho(2)),
        gauge(2, rq.dim, rq),
        gauge(2, 1, None, conn),
        rudakov(2, 2, gl_standard_rho(2), (1, Fraction(1, 2))),
        tensor_module("tautological", gl_standard_rho(2)),
        TensorModule(DeltaSumModule(2, [(0, 0), (1, 1)]), gl_standard_rho(2)),
    ]


MODULES = _modules()


@given(seeds)
def test_leibniz_random(seed):
    rng = random.Random(seed)
    for M in MODULES:
        eta, f, v = random_vector_field(rng, 2), random_poly(rng, 2), M.random_vector(rng, 2)
        assert leibniz_check(M, eta, f, v) == {}


@given(seeds)
def test_representation_random(seed):
    rng = random.Random(seed)
    for M in MODULES:
        eta, mu, v = random_vector_field(rng, 2), random_vector_field(rng, 2), M.random_vector(rng, 2)
        assert representation_residual(M, eta, mu, v) == {}


@given(seeds)
def test_smash_action_factors_through_phi(seed):
    rng = random.Random(seed)
    for M in MODULES[:4]:
        a, v = random_smash(rng, 2, 2, 2), M.random_vector(rng, 2)
        assert M.act_smash(a, v) == M.act_tensor(phi(a), v)


@given(seeds)
def test_rudakov_equals_tensor_formula(seed):
    rng = random.Random(seed)
    rho = gl_standard_rho(2)
    R = RudakovModule(2, (1, 2), rho)
    T = tensor_module(("delta", (1, 2)), rho)
    eta, v = random_vector_field(rng, 2, 3), R.random_vector(rng, 3)
    assert R.act_vf(eta, v) == T.act_vf(eta, v)


def test_interleave_examples():
    Q1 = [[[1, 0]], [[1, 0], [0, 1]]]
    assert [(e["a"], e["b"]) for e in interleave_series([[0]], Q1[:1])] == [(1, 1)]
    assert [(e["a"], e["b"]) for e in interleave_series([[0], [0, 1]], Q1[:1])] == [(1, 1), (2, 1)]
    ser = interleave_series([[0], [0, 1]], Q1)
    assert [(e["a"], e["b"]) for e in ser] == [(1, 1), (2, 1), (1, 2), (2, 2)]
    n12 = ser[2]["parts"]
    assert n12 == [((0,), Q1[1]), ((0, 1), Q1[0])]
    with pytest.raises(ValueError):
        interleave_series([[0, 1], [0]], Q1)
    with pytest.raises(ValueError):
        interleave_series([[0]], [Q1[1], Q1[0]])


def test_series_on_graded_adjoint():
    rho, basis = adjoint_quotient_rho(2, 2)
    Q = [[[int(t == j) for t in range(len(basis))] for j, l in enumerate(basis) if letter_grade(l) >= 2 - b] for b in (1, 2)]
    M = TensorModule(DeltaSumModule(2, [(0, 0), (1, 0)]), rho)
    rep = verify_series(M, interleave_series([[0], [0, 1]], Q), 2)
    assert rep["pass"]
    assert [r["quotient_rank"] for r in rep["steps"]] == [6 * 6, 6 * 6, 6 * 4, 6 * 4]
