"""Filtration profiles and GK estimates for the bundled module specs.

    python scripts/growth_profiles.py --mmax 8 [--csv]
"""

import argparse
import glob
import os

from avh.avmodules import MalformedSpec, build_module, load_spec, spec_check
from avh.growth import bernstein_check

SPECS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "specs")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mmax", type=int, default=8)
    ap.add_argument("--csv", action="store_true", help="one row per (spec, m)")
    args = ap.parse_args()
    if args.csv:
        print("spec,m,dim")
    for path in sorted(glob.glob(os.path.join(SPECS, "*.json"))):
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            spec = load_spec(path)
        except MalformedSpec as exc:
            print(f"# {name}: unreadable ({exc})")
            continue
        if not spec_check(spec)["pass"]:
            print(f"# {name}: rejected by spec_check")
            continue
        rep = bernstein_check(build_module(spec), mmax=args.mmax)
        if args.csv:
            for m, d in enumerate(rep["dims"], start=1):
                print(f"{name},{m},{d}")
        else:
            flag = "holonomic" if rep["holonomic"] else "NOT holonomic"
            print(f"{name:18s} n={rep['n']} dims={rep['dims']} GK~{rep['estimate']} ({rep['method']}) {flag}")


if __name__ == "__main__":
    main()
