"""Compare the localization formulas against the back-substitution oracle.

    python scripts/localization_report.py --samples 100 [--out report.json]
"""

import argparse
import json

from avh.arithpoly import Polynomial
from avh.avmodules import GaugeModuleSpec, adjoint_quotient_rho, build_module, gl_standard_rho, tensor_module, trivial_rho
from avh.cli import render_json, write_output
from avh.diffcalc import localization_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    rq, _ = adjoint_quotient_rho(2, 2)
    modules = [
        (tensor_module("tautological", trivial_rho(2)), 0),
        (build_module(GaugeModuleSpec(2, 2, (), gl_standard_rho(2))), 1),
        (build_module(GaugeModuleSpec(2, rq.dim, (), rq)), 2),
    ]
    x1 = Polynomial.var(2, 0)
    reports = []
    for M, s in modules:
        for f in (x1, x1 + 1):
            rep = localization_report(M, f, s, samples=args.samples, seed=args.seed)
            reports.append(rep)
            c = rep["counts"]
            print(
                f"{rep['module']:16s} f={rep['f']:7s} s={s}  leibniz {c['leibniz_pass']}/{args.samples}  "
                f"closed {c['closed_vs_oracle_agree']}  printed {c['printed_vs_oracle_agree']}  "
                f"printed(s+1) {c['printed_shifted_vs_oracle_agree']}  C(p,l)-variant {c['printed_l_vs_oracle_agree']}"
            )
    if args.out:
        write_output(render_json(reports), args.out)


if __name__ == "__main__":
    main()
