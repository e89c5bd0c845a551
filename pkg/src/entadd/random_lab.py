"""Random pure states, overlap tails and a two-copy non-additivity scan.

A sample is a certified two-copy non-additivity witness when
``2 G(psi) > log2 d_T - log2 tr(rho rho^*) + margin``: the right side bounds
G(psi (x) psi), so the two-copy GM is strictly below twice the single value.
Per-sample generators come from ``SeedSequence(seed, spawn_key=(i,))``, so
results do not depend on execution order or thread count.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import stats

from .additivity_lab import product_upper_bound
from .gm_solver import GmOptions, gm
from .state_zoo import ghz
from .tensor_core import PartyLayout, QuantumState, partial_trace, purity

ENSEMBLES = ("haar_complex", "haar_real")
DEFAULT_EPS = tuple(np.round(np.linspace(0.0, 1.0, 21), 10))
THREADS_ENV = "ENTADD_THREADS"


def _layout(layout) -> PartyLayout:
    if isinstance(layout, PartyLayout):
        return layout
    return PartyLayout(tuple(int(d) for d in layout))


def _rng(seed, index: int | None = None) -> np.random.Generator:
    if index is None:
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _gaussian(rng: np.random.Generator, shape, ensemble: str) -> np.ndarray:
    if ensemble == "haar_complex":
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if ensemble == "haar_real":
        return rng.standard_normal(shape) + 0j
    raise ValueError(f"unknown ensemble {ensemble!r}")


def sample_pure(layout, ensemble: str = "haar_complex", seed=0, index: int | None = None) -> QuantumState:
    """Normalized Gaussian vector: Haar for complex, orthogonal-invariant for real."""
    layout = _layout(layout)
    v = _gaussian(_rng(seed, index), layout.total_dim, ensemble)
    tags = {"real"} if ensemble == "haar_real" else set()
    return QuantumState.pure(v / np.linalg.norm(v), layout, tags)


def mean_reduced_purity(layout, samples: int, seed=0, keep: Sequence[int] | None = None,
                        ensemble: str = "haar_complex") -> float:
    """Average purity of the reduced state on ``keep`` (default: first half of the parties)."""
    layout = _layout(layout)
    keep = list(keep) if keep is not None else list(range(layout.n // 2))
    labels = [layout.labels[j] for j in keep]
    vals = [purity(partial_trace(sample_pure(layout, ensemble, seed, i), labels)) for i in range(samples)]
    return float(np.mean(vals))


def haar_purity_mean(d_a: int, d_b: int) -> float:
    """Exact Haar average of tr rho_A^2 for a pure state on C^{d_a} (x) C^{d_b}."""
    return (d_a + d_b) / (d_a * d_b + 1)


# -- overlap tails ----------------------------------------------------------


@dataclass(frozen=True)
class OverlapTail:
    eps: tuple
    samples: int
    empirical: tuple
    exact: tuple
    sigma: tuple
    bound: tuple
    ensemble: str

    def max_deviation_sigmas(self) -> float:
        """Largest |empirical - exact| in units of the binomial standard error."""
        out = 0.0
        for e, x, s in zip(self.empirical, self.exact, self.sigma):
            dev = abs(e - x)
            if s > 0:
                out = max(out, dev / s)
            elif dev > 0:
                return math.inf
        return out

    def within(self, n_sigma: float = 4.0) -> bool:
        return self.max_deviation_sigmas() <= n_sigma


def tail_law(d_t: int, eps: float, ensemble: str) -> float:
    """Pr[|<phi|psi>|^2 >= eps] for a fixed unit phi (real phi for the real ensemble)."""
    if eps <= 0:
        return 1.0
    if eps >= 1:
        return 0.0
    if ensemble == "haar_complex":
        return (1 - eps) ** (d_t - 1)
    # squared overlap of a random real unit vector is Beta(1/2, (d_T - 1)/2)
    return float(stats.beta.sf(eps, 0.5, (d_t - 1) / 2))


def tail_bound(d_t: int, eps: float, ensemble: str) -> float:
    """Closed-form envelope: (1-eps)^(d_T-1) complex, (1-eps)^(d_T/2-1) real."""
    if eps <= 0:
        return 1.0
    power = d_t - 1 if ensemble == "haar_complex" else d_t / 2 - 1
    return (1 - eps) ** power


def overlap_tail(layout, samples: int, phi_fixed: np.ndarray | None = None,
                 ensemble: str = "haar_complex", seed=0, eps: Sequence[float] = DEFAULT_EPS,
                 block: int = 20000) -> OverlapTail:
    """Empirical tail of |<phi|psi>|^2 over ``samples`` random states, with the exact law."""
    layout = _layout(layout)
    d_t = layout.total_dim
    if phi_fixed is None:
        phi_fixed = np.zeros(d_t, dtype=complex)
        phi_fixed[0] = 1
    phi = np.asarray(phi_fixed, dtype=complex)
    phi = phi / np.linalg.norm(phi)
    rng = _rng(seed)
    ov = []
    left = samples
    while left > 0:
        b = min(block, left)
        g = _gaussian(rng, (b, d_t), ensemble)
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        ov.append(np.abs(g @ phi.conj()) ** 2)
        left -= b
    ov = np.concatenate(ov)
    eps = tuple(float(e) for e in eps)
    emp = tuple(float(np.mean(ov >= e)) for e in eps)
    exact = tuple(tail_law(d_t, e, ensemble) for e in eps)
    sig = tuple(math.sqrt(p * (1 - p) / samples) for p in exact)
    bound = tuple(tail_bound(d_t, e, ensemble) for e in eps)
    return OverlapTail(eps, samples, emp, exact, sig, bound, ensemble)


# -- non-additivity scan ----------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    layout: tuple
    samples: int = 100
    seed: int = 0
    ensemble: str = "haar_real"
    gm_opts: GmOptions = field(default_factory=GmOptions)
    margin: float = 1e-3
    control: bool = True
    eps: tuple = DEFAULT_EPS

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        object.__setattr__(self, "layout", tuple(int(d) for d in
                                                 (self.layout.dims if isinstance(self.layout, PartyLayout)
                                                  else self.layout)))

    @classmethod
    def qubits(cls, n: int, **kw) -> "ScanConfig":
        return cls(layout=(2,) * n, **kw)


@dataclass(frozen=True)
class SampleRow:
    index: int
    seed: str
    gm_bits: float
    bound: float
    witness: bool
    counted: bool
    max_basis_overlap: float


@dataclass(frozen=True)
class ScanReport:
    config: ScanConfig
    rows: tuple
    summary: dict
    witness_fraction: float
    excluded: int
    tail_counts: dict
    control: SampleRow | None = None

    @property
    def gm_bits(self) -> np.ndarray:
        return np.array([r.gm_bits for r in self.rows])

    def to_json(self) -> dict:
        cfg = asdict(self.config)
        cfg["gm_opts"] = asdict(self.config.gm_opts)
        return {
            "units": "bits",
            "config": cfg,
            "summary": self.summary,
            "witness_fraction": self.witness_fraction,
            "excluded": self.excluded,
            "tail_counts": self.tail_counts,
            "control": None if self.control is None else asdict(self.control),
            "note": "witness thresholds at this scale are engineering choices, not asymptotic predictions",
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "seed", "gm_bits", "bound", "witness", "counted", "max_basis_overlap"])
            for r in self.rows:
                w.writerow([r.index, r.seed, repr(r.gm_bits), repr(r.bound), int(r.witness), int(r.counted),
                            repr(r.max_basis_overlap)])

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)


def _evaluate(state: QuantumState, opts: GmOptions, margin: float, index: int, seed_label: str) -> SampleRow:
    res = gm(state, replace(opts, ansatz="general") if opts.ansatz is None else opts)
    bound = product_upper_bound(state)
    # an underestimated overlap inflates GM, so witnesses need agreeing restarts
    counted = bool(res.converged and res.restarts_agreeing >= 2)
    witness = counted and 2 * res.gm_bits > bound + margin
    top = float(np.max(np.abs(np.asarray(state.vector)) ** 2))
    return SampleRow(index, seed_label, float(res.gm_bits), float(bound), bool(witness), counted, top)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def nonadditivity_scan(config: ScanConfig) -> ScanReport:
    """GM of random pure states and the two-copy witness test for each sample."""
    layout = PartyLayout(config.layout)

    def job(i: int) -> SampleRow:
        s = sample_pure(layout, config.ensemble, config.seed, i)
        return _evaluate(s, config.gm_opts, config.margin, i, f"{config.seed}:{i}")

    n_threads = _threads()
    if n_threads > 1:
        with ThreadPoolExecutor(n_threads) as pool:
            rows = tuple(pool.map(job, range(config.samples)))
    else:
        rows = tuple(job(i) for i in range(config.samples))
    vals = np.array([r.gm_bits for r in rows])
    counted = [r for r in rows if r.counted]
    frac = sum(r.witness for r in counted) / len(counted) if counted else 0.0
    summary = {
        "mean": float(vals.mean()), "min": float(vals.min()), "max": float(vals.max()),
        "q10": float(np.quantile(vals, 0.1)), "q50": float(np.quantile(vals, 0.5)),
        "q90": float(np.quantile(vals, 0.9)), "log2_dT": math.log2(layout.total_dim),
    }
    tops = np.array([r.max_basis_overlap for r in rows])
    tails = {repr(float(e)): float(np.mean(tops >= e)) for e in config.eps}
    control = None
    if config.control and layout.n >= 2 and len(set(layout.dims)) == 1:
        g = ghz(layout.n, layout.dims[0])
        control = _evaluate(g, config.gm_opts, config.margin, -1, "ghz")
    return ScanReport(config, rows, summary, float(frac), len(rows) - len(counted), tails, control)
