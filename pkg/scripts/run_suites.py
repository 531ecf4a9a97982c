"""Run every verification suite and write a JSON summary.

    python3 scripts/run_suites.py --seeds 500 --out results/suites.json
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from repairsched.harness import SUITES, run_suite

log = logging.getLogger("run_suites")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--seed-base", type=int, default=0)
    ap.add_argument("--suite", action="append", choices=SUITES, help="repeat to pick several; default all")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    summary = {}
    for name in args.suite or SUITES:
        t0 = time.perf_counter()
        rep = run_suite(name, args.seeds, args.seed_base)
        doc = rep.to_json()
        doc["seconds"] = round(time.perf_counter() - t0, 2)
        summary[name] = doc
        log.info("%-10s instances=%-5d violations=%-3d min_ratio=%s %.1fs", name, rep.instances,
                 len(rep.violations), doc["min_observed_ratio"], doc["seconds"])
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(summary, indent=2) + "\n")
    return 0 if all(not d["violations"] for d in summary.values()) else 2


if __name__ == "__main__":
    sys.exit(main())
