"""Command line entry point: ``certify --pair P Q`` or ``certify --range N``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from .certify import (CERTIFIED, certify_slopes, summarize, sweep_slopes,
                      write_records)
from .shapes import DEFAULT_EPS, DehnSlope, is_exceptional, load_shapes


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="certify",
        description="Certify infinitesimal projective rigidity of Dehn fillings "
                    "of the figure-eight knot complement.")
    which = ap.add_mutually_exclusive_group(required=True)
    which.add_argument("--pair", nargs=2, type=int, metavar=("P", "Q"),
                       help="a single slope p/q")
    which.add_argument("--range", type=int, metavar="N", dest="max_n",
                       help="all coprime non-exceptional 1 <= p, q <= N")
    ap.add_argument("--shapes", metavar="FILE",
                    help="shape file 'p q z1x z1y z2x z2y' (default: internal oracle)")
    ap.add_argument("--epsilon", type=float, default=DEFAULT_EPS,
                    help="shape box radius (default %(default)g)")
    ap.add_argument("--jobs", type=int, default=1,
                    help="worker processes; 0 means one per CPU")
    ap.add_argument("--out", metavar="FILE", help="results file (default: stdout)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.epsilon <= 0:
        print("certify: --epsilon must be positive", file=sys.stderr)
        return 2
    if args.pair is not None:
        p, q = args.pair
        try:
            slope = DehnSlope(p, q)
        except ValueError as exc:
            print(f"certify: {exc}", file=sys.stderr)
            return 2
        if is_exceptional(slope) or p < 1 or q < 1:
            print(f"certify: {slope} is exceptional or outside p, q >= 1", file=sys.stderr)
            return 2
        slopes = [slope]
    else:
        if args.max_n < 1:
            print("certify: --range needs N >= 1", file=sys.stderr)
            return 2
        slopes = sweep_slopes(args.max_n)

    shapes = dict(load_shapes(args.shapes)) if args.shapes else None
    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    start = time.perf_counter()
    records = certify_slopes(slopes, shapes, args.epsilon, jobs)
    elapsed = time.perf_counter() - start

    if args.out:
        with open(args.out, "w") as fh:
            write_records(records, fh)
    else:
        write_records(records, sys.stdout)
    counts = summarize(records)
    logging.info("%d slopes in %.2fs: %s", len(records), elapsed, counts)
    for r in records:
        if r.status != CERTIFIED:
            logging.warning("%s %s: %s", r.slope, r.status, r.reason)
    return 0 if counts[CERTIFIED] == len(records) else 1


if __name__ == "__main__":
    sys.exit(main())
