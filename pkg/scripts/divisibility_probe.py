"""Probe whether time-independent joint evolution from a product state gives
CP intermediate maps, over random Hamiltonians and environment states."""

import argparse
from dataclasses import dataclass

import numpy as np

from redmap import golden as pc
from redmap import reporting as rp
from redmap import scenarios as sc
from redmap.errors import SingularMap
from redmap.unitaries import rng_for


@dataclass
class ProbeConfig:
    n_cases: int = 500
    seed: int = 0
    d_e: int = 2
    out: str = "results/divisibility_probe.csv"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=ProbeConfig.n_cases)
    ap.add_argument("--seed", type=int, default=ProbeConfig.seed)
    ap.add_argument("--d-e", type=int, default=ProbeConfig.d_e)
    ap.add_argument("--out", default=ProbeConfig.out)
    args = ap.parse_args()
    cfg = ProbeConfig(args.n, args.seed, args.d_e, args.out)
    rows = []
    for i in range(cfg.n_cases):
        h, chi, s, t = pc.random_divisibility_case(rng_for(cfg.seed, i), 2, cfg.d_e)
        try:
            res = sc.evolution_intermediate(h, chi, s, t)
            rows.append((i, s, t, res.verdict, res.min_eigenvalue))
        except SingularMap:
            rows.append((i, s, t, "SINGULAR", float("nan")))
    verdicts = [r[3] for r in rows]
    print({v: verdicts.count(v) for v in ("CP", "NCP", "SINGULAR")})
    mins = np.array([r[4] for r in rows if r[3] != "SINGULAR"])
    if mins.size:
        print(f"median min eigenvalue {np.median(mins):.4f}")
    print(rp.atomic_write(cfg.out, rp.to_csv(("case", "s", "t", "verdict", "min_eigenvalue"), rows)))


if __name__ == "__main__":
    main()
