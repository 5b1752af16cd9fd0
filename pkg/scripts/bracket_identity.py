"""Grade-by-grade dimensions of [m^s L_+, m^s L_+] against m^q L_+, and generation by F'.

    python scripts/bracket_identity.py --grade-max 5
"""

import argparse

from avh.liefields import bracket_identity_check, generation_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grade-max", type=int, default=5)
    ap.add_argument("--smax", type=int, default=2)
    args = ap.parse_args()
    for n in (1, 2, 3):
        for s in range(1, args.smax + 1):
            rep = bracket_identity_check(n, s, args.grade_max)
            got = [g["bracket_span_dim"] for g in rep["grades"]]
            want = [g["target_dim"] for g in rep["grades"]]
            print(f"n={n} s={s} q={rep['q']}: span dims {got} target {want} {'ok' if rep['pass'] else 'MISMATCH'}")
        gen = generation_check(n, args.grade_max)
        print(f"n={n} F' generates L_+ up to grade {args.grade_max}: {gen['pass']}")


if __name__ == "__main__":
    main()
