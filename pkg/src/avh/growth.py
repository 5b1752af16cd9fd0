"""Filtration dimension profiles dim C^m M_0 and GK-dimension estimates."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .arithpoly import q_str, zero_index
from .avmodules import AVModule
from .linalg import EchelonBasis, Vector, WorkLimitExceeded
from .liefields import Letter, fprime_basis

DEFAULT_WORK_LIMIT = 10**6


def work_limit_from_env() -> int:
    raw = os.environ.get("AVH_WORK_LIMIT")
    return int(raw) if raw else DEFAULT_WORK_LIMIT


@dataclass
class GeneratingSet:
    """Finite set of module operators; the identity is implicit."""

    name: str
    ops: List[Tuple[str, Callable[[Vector], Vector]]]


def generating_set(M: AVModule, kind: str = "G") -> GeneratingSet:
    """Standard generating subspaces acting on ``M``.

    ``"G"``  B (x) 1 + 1 (x) F: x_i, d_i through the D factor and the F' letters
             through the L_+ factor (the default).
    ``"B"``  the Bernstein generators 1, x_i, d_i only.
    ``"AV"`` x_i and the vector fields x^k d_i with |k| <= 2 (3 when n = 1)
             acting through the AV action.
    """
    n = M.n
    ops: List[Tuple[str, Callable]] = []
    for i in range(n):
        ops.append((f"x{i + 1}", lambda v, i=i: M.act_x(i, v)))
    if kind in ("G", "B"):
        for i in range(n):
            ops.append((f"d{i + 1}", lambda v, i=i: M.act_d(i, v)))
    if kind == "G":
        for l in fprime_basis(n):
            ops.append((f"L{l}", lambda v, l=l: M.act_lplus_letter(l, v)))
    elif kind == "AV":
        top = 3 if n == 1 else 2
        from .arithpoly import monomial_basis

        for k in monomial_basis(n, top):
            for i in range(n):
                l: Letter = (k, i)
                ops.append((f"V{l}", lambda v, l=l: M.act_letter(l, v)))
    elif kind != "B":
        raise ValueError(f"unknown generating set {kind!r}")
    return GeneratingSet(kind, ops)


@dataclass
class DimensionProfile:
    dims: List[int]
    n: int
    module: str
    generating_set: str
    truncated: bool = False

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.dims, self.dims[1:]))


def filtration_profile(
    M: AVModule,
    M0: Optional[Sequence[Vector]] = None,
    G: Optional[GeneratingSet] = None,
    mmax: int = 8,
    work_limit: Optional[int] = None,
) -> DimensionProfile:
    """dims[m-1] = dim C^m M_0 for m = 1..mmax, by incremental row reduction.

    Only the vectors that entered at the previous step are pushed through
    the generators, since G (M_{k-1}) is already inside M_k.
    """
    if mmax < 1:
        raise ValueError("mmax must be >= 1")
    if M0 is None:
        M0 = M.generators()
    if G is None:
        G = generating_set(M)
    if work_limit is None:
        work_limit = work_limit_from_env()
    eb = EchelonBasis(M.key_order, work_limit)
    dims: List[int] = []
    truncated = False
    try:
        frontier = eb.extend(M0)
        for _ in range(mmax):
            cand = [op(v) for v in frontier for _, op in G.ops]
            frontier = eb.extend(cand)
            dims.append(eb.rank)
    except WorkLimitExceeded:
        truncated = True
    return DimensionProfile(dims, M.n, M.name, G.name, truncated)


@dataclass
class GKEstimate:
    estimate: int
    method: str
    residual: Fraction


def _diff(xs: Sequence[int]) -> List[int]:
    return [b - a for a, b in zip(xs, xs[1:])]


def estimate_gkdim(profile, window: int = 3) -> GKEstimate:
    """Polynomial-degree test on finite differences, falling back to a log-log slope.

    Returns degree ``d`` with method ``"polynomial"`` when the last
    ``window`` entries of the d-th difference are a positive constant and
    the (d+1)-th difference vanishes there.  Otherwise fits log dims
    against log m over the last half and rounds the slope.
    """
    dims = list(profile.dims if isinstance(profile, DimensionProfile) else profile)
    if len(dims) < 4:
        raise ValueError("profile too short: need at least 4 entries")
    if all(d == 0 for d in dims):
        return GKEstimate(0, "polynomial", Fraction(0))
    cur = dims
    for d in range(len(dims) - 1):
        nxt = _diff(cur)
        if len(nxt) < 2:
            break
        w = min(window, len(nxt))
        tail = cur[-w:]
        if all(x == 0 for x in nxt[-w:]) and tail[0] > 0 and len(set(tail)) == 1:
            return GKEstimate(d, "polynomial", Fraction(0))
        cur = nxt
    half = max(2, len(dims) // 2)
    pts = [(math.log(m), math.log(x)) for m, x in enumerate(dims, start=1) if x > 0][-half:]
    if len(pts) < 2:
        return GKEstimate(0, "slope", Fraction(0))
    mx = sum(p for p, _ in pts) / len(pts)
    my = sum(q for _, q in pts) / len(pts)
    den = sum((p - mx) ** 2 for p, _ in pts)
    slope = sum((p - mx) * (q - my) for p, q in pts) / den if den else 0.0
    est = int(round(slope))
    return GKEstimate(est, "slope", Fraction(abs(slope - est)).limit_denominator(10**6))


def bernstein_check(
    M: AVModule,
    M0: Optional[Sequence[Vector]] = None,
    mmax: int = 8,
    G: Optional[GeneratingSet] = None,
    work_limit: Optional[int] = None,
) -> Dict:
    """Estimate GKdim and compare it with the lower bound n; holonomic iff M = 0 or GKdim = n."""
    prof = filtration_profile(M, M0, G, mmax, work_limit)
    zero = bool(prof.dims) and all(d == 0 for d in prof.dims)
    est = estimate_gkdim(prof) if len(prof.dims) >= 4 else GKEstimate(-1, "none", Fraction(0))
    return {
        "n": M.n,
        "module": M.name,
        "generating_set": prof.generating_set,
        "dims": prof.dims,
        "estimate": est.estimate,
        "method": est.method,
        "residual": q_str(est.residual),
        "slope_lower_bound_ok": zero or est.estimate >= M.n,
        "holonomic": zero or est.estimate == M.n,
        "truncated": prof.truncated,
        "profile": prof,
    }


def profile_json(report: Dict) -> Dict:
    """JSON-ready subset of a :func:`bernstein_check` report."""
    keys = ("n", "module", "dims", "estimate", "method", "residual", "holonomic", "generating_set", "truncated")
    return {k: report[k] for k in keys}


def profile_csv(report: Dict) -> str:
    lines = ["m,dim"]
    for m, d in enumerate(report["dims"], start=1):
        lines.append(f"{m},{d}")
    return "\n".join(lines) + "\n"
