"""Print the rank tables (free Lie, special derivations, Johnson image, trace images).

    python scripts/reproduce_tables.py --max-n 5 --max-k 5
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from math import comb

from speciallie import freelie as fl
from speciallie.derivations import special_kernel
from speciallie.johnson import braid_lcs_rank, johnson_cokernel, johnson_degree
from speciallie.suite import special_formula
from speciallie.traces import image_lattice


@dataclass
class Config:
    max_n: int = 5
    max_k: int = 5
    johnson_max_n: int = 4


def table(title, rows, header):
    print(f"\n== {title}")
    print("\t".join(header))
    for r in rows:
        print("\t".join(str(x) for x in r))


def main(cfg: Config):
    t0 = time.perf_counter()
    ks = range(1, cfg.max_k + 1)
    table("free Lie ranks", [[n] + [fl.witt_rank(n, k) for k in ks] for n in range(2, cfg.max_n + 1)],
          ["n"] + [f"k={k}" for k in ks])
    rows = []
    for n in range(2, cfg.max_n + 1):
        rows.append([n] + [f"{special_kernel(n, k).rank}/{special_formula(n, k)}" for k in ks])
    table("special derivation ranks (computed/formula)", rows, ["n"] + [f"k={k}" for k in ks])
    rows = []
    for n in range(2, cfg.johnson_max_n + 1):
        rows.append([n] + [f"{johnson_degree(n, k).rank}/{braid_lcs_rank(n, k)}" for k in ks])
    table("Johnson image ranks (computed/pure braid LCS)", rows, ["n"] + [f"k={k}" for k in ks])
    rows = []
    for k in (3, 5):
        for n in range(3, cfg.max_n + 1):
            if k <= cfg.max_k:
                got = image_lattice("symmetric", special_kernel(n, k)).rank
                rows.append([k, n, got, comb(n + k - 1, k) - n * (n + 1) // 2])
    table("Morita trace image rank", rows, ["k", "n", "computed", "expected"])
    rows = [[k, n, johnson_cokernel(n, k)] for k in (3, 4) if k <= cfg.max_k
            for n in range(max(3, k), cfg.max_n + 1)]
    table("Johnson cokernels", rows, ["k", "n", "cokernel"])
    print(f"\n{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-n", type=int, default=Config.max_n)
    p.add_argument("--max-k", type=int, default=Config.max_k)
    p.add_argument("--johnson-max-n", type=int, default=Config.johnson_max_n)
    a = p.parse_args()
    main(Config(a.max_n, a.max_k, a.johnson_max_n))
