"""Run acceptance criteria 1-11, print one line each, optionally write the full JSON report.

    python3 scripts/run_acceptance.py [--out acceptance.json] [--only 2 9]
"""

import argparse
import json
import sys

from fedbrst.acceptance import CRITERIA, line, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out")
    ap.add_argument("--only", type=int, nargs="*")
    a = ap.parse_args()
    results = []
    for n in a.only or CRITERIA:
        res = run(n)
        results.append(res)
        print(line(res), f"[{res['seconds']} s]", flush=True)
    if a.out:
        with open(a.out, "w") as fh:
            json.dump(results, fh, sort_keys=True, indent=1, ensure_ascii=False)
    return 0 if all(r["passed"] for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
