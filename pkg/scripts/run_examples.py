#!/usr/bin/env python3
"""Run every shipped example config through the command line interface.

Each run writes under its own output root so repeated builds never
overwrite one another; the stored-candidate scan is pointed at the
existence build it consumes.  The weak runaway example is expected to
fail by construction, so its nonzero exit counts as success here.
"""

import argparse
import os

from freqdyn.cli import main as freqdyn_main

# (label, subcommand, config file, expected exit code)
RUNS = (
    ("sigma", "sigma", "sigma.ini", 0),
    ("split", "split", "split.ini", 0),
    ("density", "density", "density.ini", 0),
    ("sepfamily", "sepfamily", "sepfamily.ini", 0),
    ("runaway-strong", "runaway", "runaway_strong.ini", 0),
    ("runaway-weak", "runaway", "runaway_weak.ini", 1),
    ("example1", "example1", "example1.ini", 0),
    ("example2", "example2", "example2.ini", 0),
    ("example3", "example3", "example3.ini", 0),
    ("example4", "example4", "example4.ini", 0),
    ("example5", "example5", "example5.ini", 0),
    ("existence", "build_fhc", "existence.ini", 0),
    ("scan", "scan", "scan.ini", 0),
    ("spaceable", "build_fhc", "spaceable.ini", 0),
    ("dense", "build_fhc", "dense.ini", 0),
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default="out/examples", help="root directory for artifacts"
    )
    parser.add_argument(
        "--configs", default="configs", help="directory holding the .ini files"
    )
    args = parser.parse_args(argv)

    mismatches = []
    for label, command, config, expected in RUNS:
        os.environ["FREQDYN_OUT"] = os.path.join(args.out, label)
        argv_run = [command, os.path.join(args.configs, config)]
        if label == "scan":
            candidate = os.path.join(
                args.out, "existence", "build_fhc", "candidate.json"
            )
            argv_run += ["--override", f"scan.candidate={candidate}"]
        code = freqdyn_main(argv_run)
        note = "as expected" if code == expected else f"expected {expected}"
        print(f"== {label}: exit {code} ({note})")
        if code != expected:
            mismatches.append(label)
    os.environ.pop("FREQDYN_OUT", None)

    if mismatches:
        print("unexpected exits: " + ", ".join(mismatches))
        return 1
    print(f"all {len(RUNS)} example runs behaved as expected")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
