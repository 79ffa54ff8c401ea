#!/usr/bin/env python3
"""Runtime scaling of order extraction with power-law fits per problem class."""

import argparse
from pathlib import Path

from qubolin.experiments import TIMING_FIELDS, run_timing, write_csv, write_manifest


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-list", default="100,200,400,800")
    parser.add_argument("--classes", default="p=2.0,p=1.0,p=0.5,p=0.1,hard")
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--out", default="timing.csv")
    args = parser.parse_args()

    ns = [int(tok) for tok in args.n_list.split(",")]
    classes = args.classes.split(",")
    rows, fits = run_timing(ns, classes, list(range(args.seeds)), repeats=args.repeats)
    write_csv(rows, TIMING_FIELDS, args.out)
    write_manifest(
        {"experiment": "timing", "ns": ns, "classes": classes,
         "seeds": list(range(args.seeds)), "repeats": args.repeats},
        Path(args.out).with_suffix(".manifest.json"),
    )
    for label, exponent in fits.items():
        print(f"{label}: fitted exponent {exponent:.2f}")


if __name__ == "__main__":
    main()
