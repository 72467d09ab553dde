"""Syzygy check for (AC) at a given N: every syzygy generator of (J_1..J_3) of component
degree <= max-deg is tested for membership in the Koszul module.

N = 1 fails (centralizer syzygy); N = 2 passes in about 35 s on one core.

    python3 scripts/ac_syzygies.py -N 2 --max-deg 4
"""

import argparse
import json
import sys
import time

from fedbrst.phasealg import PhaseRing
from fedbrst.polyengine import KoszulHomotopy


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-N", type=int, default=2)
    ap.add_argument("--max-deg", type=int, default=4)
    ap.add_argument("--deg-cap", type=int, default=6)
    a = ap.parse_args()
    t = time.perf_counter()
    kh = KoszulHomotopy(PhaseRing(a.N, 1), a.deg_cap)
    extra = [kh.centralizer_syzygy(n) for n in range(a.N)]
    rep = kh.syzygy_report(a.max_deg, extra)
    out = rep.to_json()
    out["seconds"] = round(time.perf_counter() - t, 1)
    print(json.dumps(out, sort_keys=True, indent=1, ensure_ascii=False))
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
