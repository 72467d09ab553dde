"""Write a random retract and a compatible λ-raising perturbation as JSON, for `fedbrst hpt perturb`.

    python3 scripts/make_retract.py --seed 3 -K 2 --side i --out scripts/data
    fedbrst hpt perturb --input scripts/data/r.json --t scripts/data/t.json -K 2 --side i
"""

import argparse
import json
import random
from pathlib import Path

from fedbrst.hpt import random_perturbation, random_retract


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-K", type=int, default=2)
    ap.add_argument("--side", choices=("i", "p"), default="i")
    ap.add_argument("--out", type=Path, default=Path("."))
    a = ap.parse_args()
    rng = random.Random(a.seed)
    r, split = random_retract(rng, a.K)
    t = random_perturbation(rng, r, split, a.side)
    a.out.mkdir(parents=True, exist_ok=True)
    (a.out / "r.json").write_text(json.dumps(r.to_json(), sort_keys=True, indent=1))
    (a.out / "t.json").write_text(json.dumps(t.to_json(), sort_keys=True, indent=1))


if __name__ == "__main__":
    main()
