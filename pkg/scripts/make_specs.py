"""Regenerate the example module specs in specs/."""

import json
import os
import sys

from avh.arithpoly import Polynomial, parse_poly
from avh.avmodules import (
    GaugeModuleSpec,
    RudakovModuleSpec,
    adjoint_quotient_rho,
    gl_standard_rho,
    spec_to_dict,
    trivial_rho,
)

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "specs")


def scalar_connection(n, potential):
    """B_i = d_i(potential) * Id on a rank-1 bundle: flat, commutes with everything."""
    phi = parse_poly(potential, n)
    return tuple(((phi.partial(i),),) for i in range(n))


def main():
    rq, _ = adjoint_quotient_rho(2, 2)
    specs = {
        "gauge_trivial": GaugeModuleSpec(2, 1),
        "gauge_gl2": GaugeModuleSpec(2, 2, (), gl_standard_rho(2)),
        "gauge_grade1": GaugeModuleSpec(2, rq.dim, (), rq),
        "gauge_connection": GaugeModuleSpec(2, 1, scalar_connection(2, "x1^2 x2")),
        "rudakov_trivial": RudakovModuleSpec(1, (0,), 1),
        "rudakov_delta2": RudakovModuleSpec(2, (0, 0), 1),
        "rudakov_gl2": RudakovModuleSpec(2, (1, "1/2"), 2, gl_standard_rho(2)),
        "empty": GaugeModuleSpec(2, 0),
    }
    os.makedirs(OUT, exist_ok=True)
    for name, spec in specs.items():
        with open(os.path.join(OUT, name + ".json"), "w") as fh:
            json.dump(spec_to_dict(spec), fh, indent=1, sort_keys=True)
            fh.write("\n")
    # B_1 = x2, B_2 = 0 is not flat: d_1 B_2 - d_2 B_1 = -1
    bad = {"type": "gauge", "n": 2, "W_dim": 1, "B": [[["x2"]], [["0"]]], "rho": []}
    with open(os.path.join(OUT, "bad_flatness.json"), "w") as fh:
        json.dump(bad, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(specs) + 1} specs to {os.path.normpath(OUT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
