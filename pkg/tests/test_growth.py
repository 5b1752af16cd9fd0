import random
from math import comb

import pytest

from avh.avmodules import GaugeModuleSpec, RudakovModuleSpec, adjoint_quotient_rho, build_module, gl_standard_rho, tensor_module, trivial_rho
from avh.growth import bernstein_check, estimate_gkdim, filtration_profile, generating_set, profile_csv


def binoms(n, mmax):
    return [comb(m + n, n) for m in range(1, mmax + 1)]


def test_tautological_bernstein_set():
    M = tensor_module("tautological", trivial_rho(2))
    prof = filtration_profile(M, G=generating_set(M, "B"), mmax=6)
    assert prof.dims == [3, 6, 10, 15, 21, 28]


def test_delta_line():
    M = tensor_module(("delta", (0,)), trivial_rho(1))
    assert filtration_profile(M, mmax=8).dims == list(range(2, 10))


def test_zero_module():
    M = build_module(GaugeModuleSpec(2, 0))
    rep = bernstein_check(M, mmax=5)
    assert rep["dims"] == [0] * 5 and rep["holonomic"]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("tag", ["tautological", "delta"])
def test_binomial_profiles(n, tag):
    P = tag if tag == "tautological" else ("delta", (0,) * n)
    M = tensor_module(P, trivial_rho(n))
    mmax = 10 if n < 3 else 8
    prof = filtration_profile(M, mmax=mmax)
    assert prof.dims == binoms(n, mmax)
    assert estimate_gkdim(prof).estimate == n


def test_estimate_examples():
    assert estimate_gkdim([3, 6, 10, 15, 21, 28]).estimate == 2
    assert estimate_gkdim([5, 5, 5, 5]).estimate == 0
    est = estimate_gkdim([3, 6, 10, 15, 21, 28])
    assert est.method == "polynomial" and est.residual == 0
    with pytest.raises(ValueError):
        estimate_gkdim([1, 2, 3])


def test_estimate_slope_fallback():
    est = estimate_gkdim([2 ** m for m in range(1, 9)])
    assert est.method == "slope"


def test_gauge_holonomic():
    M = build_module(GaugeModuleSpec(2, 2, (), gl_standard_rho(2)))
    rep = bernstein_check(M, mmax=8)
    assert rep["dims"] == [2 * c for c in binoms(2, 8)]
    assert rep["estimate"] == 2 and rep["holonomic"] and rep["slope_lower_bound_ok"]


def test_rudakov_line():
    M = build_module(RudakovModuleSpec(1, (0,), 1))
    rep = bernstein_check(M, mmax=8)
    assert rep["dims"] == list(range(2, 10)) and rep["estimate"] == 1 and rep["holonomic"]


def test_additivity_witness():
    # P = delta(0), Q two-dimensional: GKdim n + 0
    M = tensor_module(("delta", (0, 0)), gl_standard_rho(2))
    rep = bernstein_check(M, mmax=8)
    assert rep["estimate"] == 2 and rep["holonomic"]


def test_generating_set_independence():
    rq, _ = adjoint_quotient_rho(2, 2)
    M = build_module(GaugeModuleSpec(2, rq.dim, (), rq))
    ests = {k: estimate_gkdim(filtration_profile(M, G=generating_set(M, k), mmax=7)).estimate for k in ("G", "AV")}
    assert ests == {"G": 2, "AV": 2}


def test_submodule_witness():
    M = build_module(GaugeModuleSpec(2, 2, (), gl_standard_rho(2)))
    v = M.random_vector(random.Random(5), 2)
    sub = filtration_profile(M, M0=[v], mmax=8)
    full = filtration_profile(M, mmax=8)
    assert estimate_gkdim(sub).estimate == 2 <= estimate_gkdim(full).estimate
    assert sub.is_monotone()


def test_work_limit_truncates():
    M = tensor_module("tautological", trivial_rho(3))
    prof = filtration_profile(M, mmax=10, work_limit=200)
    assert prof.truncated and len(prof.dims) < 10


def test_csv():
    rep = bernstein_check(tensor_module("tautological", trivial_rho(1)), mmax=4)
    assert profile_csv(rep) == "m,dim\n1,2\n2,3\n3,4\n4,5\n"
