"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in an "acceptance criteria" section at the end of the
pytest run. Tolerances are in bits unless stated otherwise.
"""

import math
import time

import numpy as np
import pytest

from conftest import random_mixed, random_pure
from entadd import state_zoo as z
from entadd.additivity_lab import additivity_gap, overlap_identity, two_copy_gm_via_V
from entadd.gm_solver import gm
from entadd.random_lab import ScanConfig, nonadditivity_scan, overlap_tail
from entadd.ree_lgr import ReeOptions, lgr_bounds, ree_frank_wolfe
from entadd.state_zoo import parse_spec
from entadd.tables import TABLE1_SPECS, run_table
from entadd.tensor_core import entropy, kron_all, partial_trace, tensor_merge

FW = ReeOptions(with_lower_bound=False)


def _table(report, number, name, budget_s):
    rep = run_table(name)
    bad = [c for c in rep.cells if not c.passed]
    ok = not bad and rep.seconds < budget_s
    detail = f"{name}: {len(rep.cells) - len(bad)}/{len(rep.cells)} cells in {rep.seconds:.0f} s (budget {budget_s} s)"
    if bad:
        detail += "; failed: " + ", ".join(f"{c.row} {c.quantity} |d|={c.delta:.2e}" for c in bad[:5])
    assert report(number, ok, detail), detail


def test_criterion_01_table1(report):
    _table(report, 1, "table1", 300)


def test_criterion_02_table2(report):
    _table(report, 2, "table2", 600)


def test_criterion_03_table3(report):
    _table(report, 3, "table3", 600)


def test_criterion_04_nonnegative_additivity(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(20):
        n = 2 + i % 2
        rho = random_mixed((2,) * n, rng, rank=int(rng.integers(1, 2 ** n + 1)), nonneg=True)
        sigma = random_mixed((2,) * n, rng, rank=int(rng.integers(1, 3)))
        worst = max(worst, abs(additivity_gap(rho, sigma, "GM").gap))
    secs = time.perf_counter() - t0
    ok = worst <= 1e-4 and secs < 600
    assert report(4, ok, f"20 pairs, max |gap| = {worst:.2e} (tol 1e-4) in {secs:.0f} s"), worst


def test_criterion_05_antisym_witness(report):
    p = z.antisym_projector_state(3, 2)
    g2 = two_copy_gm_via_V(p).gm_bits
    g1 = gm(p).gm_bits
    psi = z.antisym_basis_state(3)
    h2 = two_copy_gm_via_V(psi).gm_bits
    h1 = gm(psi).gm_bits
    ok = (abs(g2 - math.log2(27)) <= 1e-4 and 2 * math.log2(6) - g2 >= 0.41
          and abs(g1 - math.log2(6)) <= 1e-4
          and abs(h2 - 3 * math.log2(3)) <= 1e-4 and h2 < 2 * math.log2(6) and abs(h1 - math.log2(6)) <= 1e-4)
    detail = (f"G(P32 x P32) = {g2:.6f} (2G = {2 * g1:.6f}, gap {2 * g1 - g2:.4f}); "
              f"G(psi3- x2) = {h2:.6f} vs 3 log2 3 = {3 * math.log2(3):.6f}")
    assert report(5, ok, detail), detail


def test_criterion_06_overlap_identity(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for dims in ((2, 2), (3, 3), (2, 2, 2)):
        for _ in range(50):
            a = random_mixed(dims, rng, rank=int(rng.integers(1, 4)))
            b = random_mixed(dims, rng, rank=int(rng.integers(1, 4)))
            vs = []
            for d in dims:
                v = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                vs.append(v * math.sqrt(d) / np.linalg.norm(v))
            right = overlap_identity(a, b, vs)
            phi = kron_all([v.reshape(-1) / math.sqrt(v.shape[0]) for v in vs])
            joint = tensor_merge(a, b).matrix
            left = float(np.real(phi.conj() @ joint @ phi))
            worst = max(worst, abs(left - right))
    ok = worst <= 1e-10
    assert report(6, ok, f"150 triples, max |left - right| = {worst:.2e} (tol 1e-10)"), worst


def test_criterion_07_measure_chain(report):
    worst = math.inf
    where = ""
    t0 = time.perf_counter()
    for text in TABLE1_SPECS:
        spec = parse_spec(text)
        s = spec.build()
        lower = gm(s).gm_bits - entropy(s)
        e_r = ree_frank_wolfe(s, FW).value_bits
        r_l = lgr_bounds(s, spec).value_bits
        slack = min(r_l - e_r, e_r - lower)
        if slack < worst:
            worst, where = slack, text
    ok = worst >= -1e-3
    detail = (f"{len(TABLE1_SPECS)} instances, min slack in R_L >= E_R >= G - S is {worst:.2e} "
              f"at {where} (tol 1e-3) in {time.perf_counter() - t0:.0f} s")
    assert report(7, ok, detail), detail


def test_criterion_08_purification_identity(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        dims = tuple(int(d) for d in rng.integers(2, 4, size=3))
        psi = random_pure(dims, rng)
        red = partial_trace(psi, ["A", "B"])
        worst = max(worst, abs(gm(red).gm_bits - gm(psi).gm_bits))
    ok = worst <= 1e-4
    assert report(8, ok, f"20 states, max |G(reduced) - G(pure)| = {worst:.2e} (tol 1e-4)"), worst


def test_criterion_09_concentration(report):
    t0 = time.perf_counter()
    tails = {d: overlap_tail((2,) * int(math.log2(d)), 100_000, seed=9) for d in (8, 16)}
    tails_ok = all(t.within(4.0) for t in tails.values())
    small = nonadditivity_scan(ScanConfig.qubits(2, samples=100, seed=0))
    big = nonadditivity_scan(ScanConfig.qubits(7, samples=100, seed=0))
    secs = time.perf_counter() - t0
    ok = tails_ok and small.witness_fraction == 0.0 and big.witness_fraction >= 0.5 and secs < 1800
    detail = (f"tails max dev {max(t.max_deviation_sigmas() for t in tails.values()):.2f} sigma; "
              f"2 qubits fraction {small.witness_fraction}; 7 real qubits fraction {big.witness_fraction} "
              f"(needs >= 0.5; mean G {big.summary['mean']:.3f}, max {big.summary['max']:.3f}, "
              f"threshold {big.rows[0].bound / 2:.3f}) in {secs:.0f} s")
    assert report(9, ok, detail), detail


def test_criterion_10_dicke_mixture_bound(report):
    rows = []
    ok = True
    for s in (0.0, 1 / 3, 0.4):
        rho = z.dicke_mixture(2, [(0, s), (1, 1 - s)])
        lower = gm(rho).gm_bits - entropy(rho)
        e_r = ree_frank_wolfe(rho, FW).value_bits
        ok &= lower <= e_r + 1e-3
        if abs(s - 1 / 3) < 1e-12:
            ok &= abs(e_r - lower) <= 1e-3
        rows.append(f"s={s:.3f}: G-S {lower:.5f}, E_R {e_r:.5f}")
    detail = "; ".join(rows)
    assert report(10, ok, detail), detail
