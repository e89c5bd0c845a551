"""GM of random real qubit states against the two-copy witness threshold.

For each qubit count the script prints the GM quantiles, the witness
threshold (half the two-copy bound) and the certified witness fraction.

    python scripts/random_scan.py --qubits 4 5 6 7 --samples 100
"""

import argparse
import json
from pathlib import Path

from entadd.gm_solver import GmOptions
from entadd.random_lab import ScanConfig, nonadditivity_scan, overlap_tail


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, nargs="+", default=[2, 4, 5, 6, 7])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ensemble", default="haar_real", choices=("haar_real", "haar_complex"))
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    print(f"{'n':>3} {'mean G':>8} {'q90 G':>8} {'max G':>8} {'thresh':>8} {'frac':>6} {'excl':>5}", flush=True)
    for n in args.qubits:
        cfg = ScanConfig.qubits(n, samples=args.samples, seed=args.seed, ensemble=args.ensemble,
                                gm_opts=GmOptions(restarts=args.restarts, seed=args.seed))
        rep = nonadditivity_scan(cfg)
        s = rep.summary
        thresh = rep.rows[0].bound / 2
        print(f"{n:>3} {s['mean']:>8.4f} {s['q90']:>8.4f} {s['max']:>8.4f} {thresh:>8.4f} "
              f"{rep.witness_fraction:>6.2f} {rep.excluded:>5}", flush=True)
        rep.write_csv(args.out / f"scan_{n}q.csv")
        rep.write_json(args.out / f"scan_{n}q.json")
    for d in (8, 16):
        t = overlap_tail((2,) * (d.bit_length() - 1), 100_000, ensemble=args.ensemble, seed=args.seed)
        print(f"overlap tail d_T={d}: max deviation {t.max_deviation_sigmas():.2f} sigma", flush=True)
        (args.out / f"tail_{d}.json").write_text(json.dumps(t.__dict__, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
