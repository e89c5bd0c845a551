import csv
import json
import math

import numpy as np
import pytest

from entadd.gm_solver import GmOptions
from entadd.random_lab import (
    ScanConfig, haar_purity_mean, mean_reduced_purity, nonadditivity_scan, overlap_tail, sample_pure, tail_bound,
    tail_law,
)

FAST = GmOptions(restarts=8)


def test_sampling_is_deterministic():
    a = sample_pure((2, 2, 2), "haar_complex", seed=3, index=5)
    b = sample_pure((2, 2, 2), "haar_complex", seed=3, index=5)
    np.testing.assert_array_equal(a.vector, b.vector)
    c = sample_pure((2, 2, 2), "haar_complex", seed=3, index=6)
    assert not np.allclose(a.vector, c.vector)
    r = sample_pure((2, 2), "haar_real", seed=0, index=0)
    assert np.allclose(np.imag(r.vector), 0) and "real" in r.tags


def test_mean_reduced_purity():
    assert haar_purity_mean(4, 4) == pytest.approx(8 / 17)
    assert mean_reduced_purity((2,) * 4, 2000, seed=1) == pytest.approx(8 / 17, abs=0.01)


@pytest.mark.parametrize("ensemble", ["haar_complex", "haar_real"])
def test_overlap_tail_matches_law(ensemble):
    t = overlap_tail((2,) * 4, 20000, ensemble=ensemble, seed=2)
    assert t.within(4.0)
    assert t.empirical[0] == 1.0


def test_tail_law_and_bound():
    for eps in (0.05, 0.2, 0.5):
        assert tail_law(16, eps, "haar_complex") == pytest.approx((1 - eps) ** 15)
        # the envelope dominates the exact real law
        assert tail_law(16, eps, "haar_real") <= tail_bound(16, eps, "haar_real") + 1e-12
    assert tail_law(8, 0.0, "haar_real") == 1.0 and tail_law(8, 1.0, "haar_real") == 0.0


def test_two_qubit_scan_has_no_witnesses():
    rep = nonadditivity_scan(ScanConfig.qubits(2, samples=30, seed=0, gm_opts=FAST))
    assert rep.witness_fraction == 0.0
    assert all(r.gm_bits <= 1 + 1e-9 for r in rep.rows)


def test_scan_invariants_and_control():
    rep = nonadditivity_scan(ScanConfig.qubits(4, samples=12, seed=5, gm_opts=FAST))
    assert 0.0 <= rep.witness_fraction <= 1.0
    assert np.all(rep.gm_bits <= math.log2(16) + 1e-9)
    assert np.all(rep.gm_bits >= -1e-12)
    assert rep.summary["min"] <= rep.summary["q50"] <= rep.summary["max"]
    # GHZ has GM 1, far below the real-state bound of n bits
    assert rep.control.gm_bits == pytest.approx(1.0, abs=1e-6)
    assert not rep.control.witness


def test_scan_reproducible_and_thread_independent(monkeypatch):
    cfg = ScanConfig.qubits(3, samples=8, seed=11, gm_opts=FAST)
    a = nonadditivity_scan(cfg)
    monkeypatch.setenv("ENTADD_THREADS", "4")
    b = nonadditivity_scan(cfg)
    assert a.rows == b.rows
    assert a.to_json() == b.to_json()


def test_scan_outputs(tmp_path):
    rep = nonadditivity_scan(ScanConfig.qubits(3, samples=4, seed=1, gm_opts=FAST))
    rep.write_csv(tmp_path / "s.csv")
    rep.write_json(tmp_path / "s.json")
    rows = list(csv.DictReader(open(tmp_path / "s.csv")))
    assert len(rows) == 4 and float(rows[2]["gm_bits"]) == rep.rows[2].gm_bits
    doc = json.load(open(tmp_path / "s.json"))
    assert doc["units"] == "bits" and doc["config"]["samples"] == 4


def test_config_validation():
    with pytest.raises(ValueError):
        ScanConfig.qubits(3, samples=0)
    with pytest.raises(ValueError):
        ScanConfig.qubits(3, ensemble="gue")


def test_complex_ensemble_bound_exceeds_real():
    # complex states have tr(rho rho^*) < 1, so the witness threshold is higher
    rep = nonadditivity_scan(ScanConfig.qubits(3, samples=6, seed=2, ensemble="haar_complex", gm_opts=FAST))
    assert all(r.bound >= 3 - 1e-9 for r in rep.rows)
