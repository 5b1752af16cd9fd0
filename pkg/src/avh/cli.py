"""Command-line entry point ``avh``.

Exit codes: 0 pass, 1 verification failure, 2 internal error, 3 work limit
hit, 4 smax exceeded, 64 usage error, 65 malformed module spec.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .arithpoly import q_str
from .avmodules import MalformedSpec, build_module, leibniz_check, load_spec, representation_residual, spec_check
from .diffcalc import InconsistentRoutes, diff_order
from .enveloping import StraighteningLimitExceeded
from .growth import bernstein_check, profile_csv, profile_json
from .isomorphism import failures, random_poly, random_vector_field, verify_homomorphism, verify_roundtrip
from .linalg import WorkLimitExceeded
from .liefields import bracket_identity_check, generation_check, set_fault

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INTERNAL = 2
EXIT_WORK_LIMIT = 3
EXIT_SMAX = 4
EXIT_USAGE = 64
EXIT_BAD_SPEC = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


@dataclass
class RunConfig:
    command: str
    n: int = 2
    degree: int = 3
    mmax: int = 8
    smax: int = 3
    dmax: int = 3
    samples: int = 50
    seed: int = 0
    spec: Optional[str] = None
    out: Optional[str] = None
    format: str = "json"
    filter: Optional[str] = None
    inject_fault: Optional[str] = None

    def validate(self) -> None:
        if self.n < 1:
            raise UsageError("--n must be >= 1")
        if self.degree < 1:
            raise UsageError("--degree must be >= 1")
        if self.mmax < 1:
            raise UsageError("--mmax must be >= 1")
        if self.smax < 0 or self.dmax < 0 or self.samples < 0:
            raise UsageError("--smax, --dmax and --samples must be non-negative")
        if self.command in ("gk", "diff-order", "leibniz") and not self.spec:
            raise UsageError(f"{self.command} needs --spec")
        if self.format == "csv" and self.command != "gk":
            raise UsageError("--format csv is only available for gk")


# -- output -------------------------------------------------------------------------

def jsonable(obj):
    """Recursively convert to JSON types; rationals become "num/den" strings."""
    if isinstance(obj, Fraction):
        return q_str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    return str(obj)


def render_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_output(text: str, path: Optional[str]) -> None:
    """Write ``text`` to ``path`` atomically, or to stdout when no path is given."""
    if not path:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".avh-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands -----------------------------------------------------------------------

def _load_checked(path: str):
    spec = load_spec(path)
    chk = spec_check(spec)
    if not chk["pass"]:
        raise MalformedSpec("; ".join(chk["violations"]))
    return spec


def cmd_verify_iso(cfg: RunConfig):
    rep = verify_roundtrip(cfg.n, cfg.degree, cfg.samples, cfg.seed)
    rep += verify_homomorphism(cfg.n, cfg.degree, cfg.samples, cfg.seed)
    counts: Dict[str, Dict[str, int]] = {}
    for e in rep:
        c = counts.setdefault(e["check"], {"pass": 0, "fail": 0})
        c["pass" if e["pass"] else "fail"] += 1
    bad = failures(rep)
    out = {
        "command": "verify-iso",
        "n": cfg.n,
        "degree": cfg.degree,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "checks": counts,
        "failures": bad[:10],
        "pass": not bad,
    }
    return (EXIT_OK if not bad else EXIT_FAIL), out


def cmd_gk(cfg: RunConfig):
    spec = _load_checked(cfg.spec)
    M = build_module(spec)
    rep = bernstein_check(M, mmax=cfg.mmax)
    out = profile_json(rep)
    out["command"] = "gk"
    out["mmax"] = cfg.mmax
    code = EXIT_WORK_LIMIT if rep["truncated"] else EXIT_OK
    if cfg.format == "csv":
        return code, profile_csv(rep)
    return code, out


def cmd_diff_order(cfg: RunConfig):
    spec = _load_checked(cfg.spec)
    M = build_module(spec)
    res = diff_order(M, smax=cfg.smax, dmax=cfg.dmax, seed=cfg.seed, samples=cfg.samples)
    out = res.to_json()
    out["command"] = "diff-order"
    out["module"] = M.name
    if not res.route_agreement:
        raise InconsistentRoutes(f"routes disagree: {res.routes}")
    return (EXIT_SMAX if res.exceeded else EXIT_OK), out


def cmd_leibniz(cfg: RunConfig):
    spec = _load_checked(cfg.spec)
    M = build_module(spec)
    n = M.n
    rng = random.Random(cfg.seed)
    leib = rep = 0
    witnesses: List[Dict] = []
    for _ in range(cfg.samples):
        eta, mu = random_vector_field(rng, n), random_vector_field(rng, n)
        f = random_poly(rng, n)
        v = M.random_vector(rng, 2)
        if leibniz_check(M, eta, f, v):
            leib += 1
            witnesses.append({"check": "leibniz", "eta": str(eta), "f": str(f)})
        if representation_residual(M, eta, mu, v):
            rep += 1
            witnesses.append({"check": "representation", "eta": str(eta), "mu": str(mu)})
    out = {
        "command": "leibniz",
        "module": M.name,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "leibniz_failures": leib,
        "representation_failures": rep,
        "witnesses": witnesses[:10],
        "pass": leib == 0 and rep == 0,
    }
    return (EXIT_OK if out["pass"] else EXIT_FAIL), out


def cmd_bracket_span(cfg: RunConfig):
    smax = max(cfg.smax, 1)
    grade_max = cfg.dmax
    idents = [bracket_identity_check(cfg.n, s, grade_max) for s in range(1, smax + 1)]
    gen = generation_check(cfg.n, grade_max)
    ok = gen["pass"] and all(r["pass"] for r in idents)
    out = {"command": "bracket-span", "n": cfg.n, "grade_max": grade_max, "identity": idents, "generation": gen, "pass": ok}
    return (EXIT_OK if ok else EXIT_FAIL), out


def cmd_selftest(cfg: RunConfig):
    from .selftest import run_selftest

    if cfg.inject_fault:
        set_fault(cfg.inject_fault)
    try:
        results = run_selftest(cfg.filter, cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    bad = [r["name"] for r in results if not r["pass"]]
    out = {"command": "selftest", "filter": cfg.filter, "results": results, "failed": bad, "pass": not bad}
    if bad:
        sys.stderr.write("failing invariants: " + ", ".join(bad) + "\n")
    return (EXIT_OK if not bad else EXIT_FAIL), out


COMMANDS = {
    "verify-iso": cmd_verify_iso,
    "gk": cmd_gk,
    "diff-order": cmd_diff_order,
    "leibniz": cmd_leibniz,
    "bracket-span": cmd_bracket_span,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="number of variables")
    common.add_argument("--degree", type=int, default=3, help="generator degree bound for verify-iso")
    common.add_argument("--mmax", type=int, default=8, help="filtration steps for gk")
    common.add_argument("--smax", type=int, default=3, help="largest order tried by diff-order (bracket-span: largest s)")
    common.add_argument("--dmax", type=int, default=None, help="grade bound (diff-order default 3, bracket-span default 5)")
    common.add_argument("--samples", type=int, default=None, help="random samples")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--spec", help="module spec JSON")
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--filter", help="selftest group or name filter")
    common.add_argument("--inject-fault", help="enable a named fault (e.g. bracket-sign)")
    p = _Parser(prog="avh", description="Exact computations with AV-modules over Q.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


_SAMPLE_DEFAULTS = {"verify-iso": 50, "leibniz": 100, "diff-order": 5}


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    a = build_parser().parse_args(argv)
    dmax = a.dmax if a.dmax is not None else (5 if a.command == "bracket-span" else 3)
    samples = a.samples if a.samples is not None else _SAMPLE_DEFAULTS.get(a.command, 0)
    return RunConfig(
        command=a.command,
        n=a.n,
        degree=a.degree,
        mmax=a.mmax,
        smax=a.smax,
        dmax=dmax,
        samples=samples,
        seed=a.seed,
        spec=a.spec,
        out=a.out,
        format=a.format,
        filter=a.filter,
        inject_fault=a.inject_fault,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = config_from_args(argv)
    try:
        cfg.validate()
        code, out = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"avh: usage error: {exc}\n")
        return EXIT_USAGE
    except MalformedSpec as exc:
        sys.stderr.write(f"avh: malformed spec: {exc}\n")
        return EXIT_BAD_SPEC
    except (WorkLimitExceeded, StraighteningLimitExceeded) as exc:
        sys.stderr.write(f"avh: work limit exceeded: {exc}\n")
        return EXIT_WORK_LIMIT
    except Exception as exc:
        sys.stderr.write(f"avh: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    write_output(out if isinstance(out, str) else render_json(out), cfg.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
