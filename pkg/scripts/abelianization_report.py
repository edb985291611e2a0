"""Abelianization of the special derivation algebra degree by degree.

Reports the integral quotient b_n(k)/[b,b]_k, the rank seen by the Morita
trace, and the Morita kernel modulo brackets (over Z and over Q).

    python scripts/abelianization_report.py --ns 3 4 5 --ks 2 3 4 5
"""
from __future__ import annotations

import argparse
import json
import time
from dataclasses import dataclass, field

from speciallie.abelianization import h1_degree


@dataclass
class Config:
    ns: list = field(default_factory=lambda: [3, 4, 5])
    ks: list = field(default_factory=lambda: [2, 3, 4, 5])
    json: bool = False


def main(cfg: Config):
    out = []
    for n in cfg.ns:
        for k in cfg.ks:
            t0 = time.perf_counter()
            rep = h1_degree(n, k)
            out.append(rep.to_json() | {"seconds": round(time.perf_counter() - t0, 2)})
            if not cfg.json:
                print(f"n={n} k={k}: rank b={rep.rank_b} brackets={rep.bracket_rank} H1={rep.presentation} "
                      f"MT image={rep.mt_detected_rank} residual={rep.residual} (Q-dim {rep.residual_q_dim})",
                      flush=True)
    if cfg.json:
        print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ns", type=int, nargs="+", default=[3, 4, 5])
    p.add_argument("--ks", type=int, nargs="+", default=[2, 3, 4, 5])
    p.add_argument("--json", action="store_true")
    a = p.parse_args()
    main(Config(a.ns, a.ks, a.json))
