"""Pure two-qubit LGR: PPT value against the two candidate closed forms.

For a pure state with Schmidt coefficients c the PPT bound is exact on 2 x 2,
so it decides between 2 log2(sum c) and (1/2) log2(sum c).

    python scripts/lgr_pure_state_check.py
"""

import math

import numpy as np

from entadd.ree_lgr import lgr_ppt_lower, pure_state_lgr_candidates
from entadd.tensor_core import PartyLayout, QuantumState


def main() -> int:
    print(f"{'a':>6} {'PPT':>9} {'2log':>9} {'log/2':>9}", flush=True)
    worst = 0.0
    for a in np.linspace(0.5, 1.0, 11):
        c = [math.sqrt(a), math.sqrt(1 - a)]
        s = QuantumState.pure(np.array([c[0], 0, 0, c[1]]), PartyLayout((2, 2)))
        ppt = lgr_ppt_lower(s).value_bits
        cand = pure_state_lgr_candidates(c)
        worst = max(worst, abs(ppt - cand["two_log_tr_sqrt"]))
        print(f"{a:>6.3f} {ppt:>9.5f} {cand['two_log_tr_sqrt']:>9.5f} {cand['half_log_tr_sqrt']:>9.5f}", flush=True)
    print(f"max |PPT - 2 log2 tr sqrt(rho_A)| = {worst:.2e}", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
