"""Compare G - S with the REE of two-qubit Dicke mixtures s|D0><D0| + (1-s)|D1><D1|.

    python scripts/dicke_mixture_bound.py --points 16
"""

import argparse

import numpy as np

from entadd import state_zoo as z
from entadd.gm_solver import gm
from entadd.ree_lgr import ReeOptions, ree_frank_wolfe
from entadd.tensor_core import entropy


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--n", type=int, default=2, help="number of qubits")
    args = p.parse_args()
    opts = ReeOptions(with_lower_bound=False)
    grid = sorted(set(np.linspace(0, 1, args.points).round(6)) | {round(1 / 3, 6)})
    print(f"{'s':>8} {'G':>9} {'S':>9} {'G - S':>9} {'E_R':>9} {'slack':>9}", flush=True)
    for s in grid:
        rho = z.dicke_mixture(args.n, [(0, s), (1, 1 - s)])
        g, h = gm(rho).gm_bits, entropy(rho)
        e = ree_frank_wolfe(rho, opts).value_bits
        print(f"{s:>8.4f} {g:>9.5f} {h:>9.5f} {g - h:>9.5f} {e:>9.5f} {e - g + h:>9.2e}", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
