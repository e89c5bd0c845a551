"""Geometric measure of entanglement by multi-start alternating optimization.

The engine maximizes <phi|H|phi> over product vectors phi for a Hermitian
PSD ``H = F F^dagger``. Holding every party but ``j`` fixed, the optimal
local vector is the top eigenvector of the conditioned matrix
``M_j = (prod_{l != j} <a_l|) H (prod_{l != j} |a_l>)``; sweeping ``j``
never decreases the objective. All restarts are advanced together as one
batch of small eigenproblems.

Specializations:

* ``symmetric_replica``: one vector ``a`` shared by all parties.
* ``antisym_frame``: an orthonormal frame; each update is restricted to the
  orthogonal complement of the other frame vectors.
* ``non_negative``: local vectors kept entrywise non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .tensor_core import (
    SYMMETRY_TOL,
    PartyLayout,
    QuantumState,
    StateError,
    entropy,
    kron_all,
)

ANSATZE = ("general", "symmetric_replica", "antisym_frame", "non_negative")
AGREE_TOL = 1e-8
TIE_TOL = 1e-12


@dataclass(frozen=True)
class GmOptions:
    restarts: int = 32
    max_iters: int = 2000
    tol: float = 1e-11
    ansatz: str | None = None
    seed: int = 0
    scale_restarts: bool = True
    cross_check_restarts: int = 4

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.ansatz is not None and self.ansatz not in ANSATZE:
            raise ValueError(f"unknown ansatz {self.ansatz!r}")

    def restarts_for(self, n_parties: int) -> int:
        if not self.scale_restarts:
            return self.restarts
        return self.restarts * 2 ** max(0, n_parties - 4)


@dataclass(frozen=True)
class ProductAnsatz:
    """One unit vector per party."""

    vectors: tuple
    constraint: str = "general"

    def vector(self) -> np.ndarray:
        return kron_all(self.vectors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.vectors)

    def to_json(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in v] for v in self.vectors]

    @classmethod
    def from_json(cls, doc: list, constraint: str = "general") -> "ProductAnsatz":
        return cls(tuple(np.array([complex(a, b) for a, b in v]) for v in doc), constraint)


@dataclass(frozen=True)
class GmResult:
    lambda_sq: float
    gm_bits: float
    ansatz_used: str
    witness: ProductAnsatz
    converged: bool
    restarts_agreeing: int
    restarts: int = 0
    seed: int = 0
    runner_up: float = 0.0
    notes: tuple = ()

    def to_json(self) -> dict:
        return {
            "measure": "GM",
            "value_bits": self.gm_bits,
            "units": "bits",
            "lambda_sq": self.lambda_sq,
            "witness": self.witness.to_json(),
            "converged": self.converged,
            "restarts_agreeing": self.restarts_agreeing,
            "restarts": self.restarts,
            "ansatz_used": self.ansatz_used,
            "seed": self.seed,
            "notes": list(self.notes),
        }


# -- input handling ---------------------------------------------------------


def _factor_of(h, layout: PartyLayout | None) -> tuple[np.ndarray, PartyLayout]:
    if isinstance(h, QuantumState):
        return np.asarray(h.factor), layout or h.layout
    h = np.asarray(h, dtype=complex)
    if layout is None:
        raise ValueError("a layout is required for a bare matrix")
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] != layout.total_dim:
        raise ValueError(f"matrix shape {h.shape} does not match layout {layout.dims}")
    asym = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    scale = max(1.0, float(np.max(np.abs(h))))
    if asym > 1e-10 * scale:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
    w, u = np.linalg.eigh(0.5 * (h + h.conj().T))
    if w[0] < -1e-8 * max(1.0, abs(w[-1])):
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[0]:.3g})")
    keep = w > 1e-15 * max(1.0, abs(w[-1]))
    return u[:, keep] * np.sqrt(w[keep]), layout


def _strip(f: np.ndarray, layout: PartyLayout) -> tuple[np.ndarray, tuple[int, ...], list[int]]:
    keep = [j for j, d in enumerate(layout.dims) if d > 1] or [0]
    dims = tuple(layout.dims[j] for j in keep)
    return f.reshape(dims + (f.shape[1],)), dims, keep


# -- batched contraction ----------------------------------------------------


def _contract(t: np.ndarray, vecs: Sequence[np.ndarray], skip: int | None, batch: int) -> np.ndarray:
    """Contract ``t`` (dims + (r,)) with conj(vecs[l]) for every party ``l != skip``.

    Returns shape (B, d_skip, r), or (B, r) when ``skip`` is None.
    """
    dims = t.shape[:-1]
    x = t
    batched = False
    lead = 0
    for l, dl in enumerate(dims):
        if l == skip:
            lead = 1
            continue
        c = vecs[l].conj()
        if not batched:
            if lead:
                y = x.reshape(dims[skip], dl, -1)
                x = np.einsum("sij,bi->bsj", y, c)
            else:
                x = c @ x.reshape(dl, -1)
            batched = True
        else:
            b = x.shape[0]
            if lead:
                x = (c[:, None, None, :] @ x.reshape(b, dims[skip], dl, -1))[:, :, 0, :]
            else:
                x = (c[:, None, :] @ x.reshape(b, dl, -1))[:, 0, :]
    if not batched:
        x = np.broadcast_to(t, (batch,) + t.shape)
    if skip is None:
        return x.reshape(batch, -1)
    return x.reshape(batch, dims[skip], -1)


def _objective(t, vecs, batch) -> np.ndarray:
    w = _contract(t, vecs, None, batch)
    return np.sum(np.abs(w) ** 2, axis=1)


def _top_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = 0.5 * (m + m.conj().transpose(0, 2, 1))
    w, u = np.linalg.eigh(m)
    return w[:, -1], u[:, :, -1]


def _normalize(a: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(a, axis=-1, keepdims=True)
    n[n == 0] = 1
    return a / n


# -- sweeps -----------------------------------------------------------------


def _sweep_general(t, vecs, nonneg, batch):
    for j in range(len(vecs)):
        w = _contract(t, vecs, j, batch)
        m = w @ w.conj().transpose(0, 2, 1)
        _, a = _top_eig(m)
        if nonneg:
            a = np.abs(a).astype(complex)
        vecs[j] = a
    return _objective(t, vecs, batch)


def _sweep_symmetric(t, vecs, nonneg, batch, current):
    n = len(vecs)
    a = vecs[0]
    w = _contract(t, [a] * n, 0, batch)
    m = w @ w.conj().transpose(0, 2, 1)
    _, v = _top_eig(m)
    if nonneg:
        v = np.abs(v).astype(complex)
    else:
        ph = np.sum(v.conj() * a, axis=1)
        ph = np.where(np.abs(ph) > 0, ph / np.maximum(np.abs(ph), 1e-300), 1)
        v = v * ph[:, None]
    new = _objective(t, [v] * n, batch)
    # the power step M(a) a is an ascent direction; keep whichever candidate is better
    u = _normalize((m @ a[:, :, None])[:, :, 0])
    if nonneg:
        u = np.abs(u).astype(complex)
    val = _objective(t, [u] * n, batch)
    take = val > new
    v[take] = u[take]
    new[take] = val[take]
    bad = new <= current
    step = 0.5
    while np.any(bad) and step > 1e-9:
        cand = _normalize(a + step * (u - a))
        val = _objective(t, [cand] * n, batch)
        ok = bad & (val > current)
        v[ok] = cand[ok]
        new[ok] = val[ok]
        bad &= ~ok
        step *= 0.5
    v[bad] = a[bad]
    new[bad] = current[bad]
    for j in range(n):
        vecs[j] = v
    return new


def _sweep_antisym(t, vecs, nonneg, batch):
    n = len(vecs)
    d = vecs[0].shape[1]
    eye = np.eye(d)
    for j in range(n):
        w = _contract(t, vecs, j, batch)
        m = w @ w.conj().transpose(0, 2, 1)
        q = np.broadcast_to(eye, (batch, d, d)).astype(complex)
        for l in range(n):
            if l != j:
                q = q - vecs[l][:, :, None] * vecs[l].conj()[:, None, :]
        scale = np.maximum(np.abs(np.trace(m, axis1=1, axis2=2)), 1.0)
        mq = q @ m @ q + 1e-13 * scale[:, None, None] * q
        _, a = _top_eig(mq)
        vecs[j] = a
    frame = np.stack(vecs, axis=2)
    qm, r = np.linalg.qr(frame)
    diag = np.diagonal(r, axis1=1, axis2=2)
    ph = np.where(np.abs(diag) > 0, diag / np.maximum(np.abs(diag), 1e-300), 1)
    qm = qm * ph[:, None, :]
    for j in range(n):
        vecs[j] = qm[:, :, j]
    return _objective(t, vecs, batch)


def _run(t, starts, mode, nonneg, opts):
    """Iterate all restarts to objective stall; returns (values, vecs, converged)."""
    vecs = [np.array(v, dtype=complex) for v in starts]
    batch = vecs[0].shape[0]
    cur = _objective(t, vecs, batch)
    conv = np.zeros(batch, dtype=bool)
    active = np.arange(batch)
    for _ in range(opts.max_iters):
        if active.size == 0:
            break
        sub = [v[active] for v in vecs]
        b = active.size
        if mode == "symmetric_replica":
            new = _sweep_symmetric(t, sub, nonneg, b, cur[active])
        elif mode == "antisym_frame":
            new = _sweep_antisym(t, sub, nonneg, b)
        else:
            new = _sweep_general(t, sub, nonneg, b)
        for j in range(len(vecs)):
            vecs[j][active] = sub[j]
        done = np.abs(new - cur[active]) < opts.tol
        cur[active] = new
        conv[active[done]] = True
        active = active[~done]
    return cur, vecs, conv


# -- seeding ----------------------------------------------------------------


def _top_vector(f: np.ndarray) -> np.ndarray:
    g = f.conj().T @ f
    w, u = np.linalg.eigh(0.5 * (g + g.conj().T))
    v = f @ u[:, -1]
    return v / np.linalg.norm(v)


def _local_marginals(v: np.ndarray, dims: tuple[int, ...], count: int = 1) -> list[np.ndarray]:
    """Top ``count`` eigenvectors of each one-party reduced state of ``v``."""
    t = v.reshape(dims)
    out = []
    for j, d in enumerate(dims):
        a = np.moveaxis(t, j, 0).reshape(d, -1)
        w, u = np.linalg.eigh(a @ a.conj().T)
        out.append(u[:, ::-1][:, :count])
    return out


def _basis_vec(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1
    return e


def _random_vectors(rng, b, d, nonneg):
    a = rng.standard_normal((b, d)) + 1j * rng.standard_normal((b, d))
    if nonneg:
        a = np.abs(a) + 0j
    return _normalize(a)


def _general_seeds(f, dims, count, rng, nonneg, init=()):
    n = len(dims)
    seeds: list[list[np.ndarray]] = [[] for _ in range(n)]

    def add(vs):
        for j in range(n):
            seeds[j].append(np.asarray(vs[j], dtype=complex))

    for p in init:
        add(p.vectors if isinstance(p, ProductAnsatz) else p)
    top = _top_vector(f)
    marg = _local_marginals(top, dims, 1)
    add([np.abs(m[:, 0]) if nonneg else m[:, 0] for m in marg])
    diag = np.sum(np.abs(f) ** 2, axis=1)
    n_basis = max(1, min(count // 4, diag.size))
    for idx in np.argsort(-diag, kind="stable")[:n_basis]:
        digits = np.unravel_index(int(idx), dims)
        add([_basis_vec(d, int(i)) for d, i in zip(dims, digits)])
    n_rand = max(count - len(seeds[0]), 0)
    for j in range(n):
        r = _random_vectors(rng, n_rand, dims[j], nonneg)
        seeds[j] = np.concatenate([np.array(seeds[j]).reshape(-1, dims[j]), r])[: max(count, 1)]
    return seeds


def _symmetric_seeds(f, dims, count, rng, nonneg, init=()):
    d = dims[0]
    rows = [np.asarray(p.vectors[0] if isinstance(p, ProductAnsatz) else p[0]) for p in init]
    top = _top_vector(f)
    rows.append(_local_marginals(top, dims, 1)[0][:, 0])
    diag = np.sum(np.abs(f) ** 2, axis=1)
    for idx in np.argsort(-diag, kind="stable")[: max(1, min(count // 4, d))]:
        digits = np.unravel_index(int(idx), dims)
        rows.append(_basis_vec(d, int(digits[0])))
    rows = [np.abs(r) if nonneg else r for r in rows]
    a = np.array(rows, dtype=complex)
    extra = max(count - a.shape[0], 0)
    a = np.concatenate([a, _random_vectors(rng, extra, d, nonneg)])[: max(count, 1)]
    a = _normalize(a)
    return [a] * len(dims)


def _antisym_seeds(f, dims, count, rng, init=()):
    n, d = len(dims), dims[0]
    frames = [np.stack([np.asarray(v) for v in (p.vectors if isinstance(p, ProductAnsatz) else p)], 1)
              for p in init]
    frames.append(np.eye(d, dtype=complex)[:, :n])
    top = _top_vector(f)
    frames.append(_local_marginals(top, dims, n)[0])
    while len(frames) < count:
        g = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
        frames.append(np.linalg.qr(g)[0])
    frames = np.array(frames[:count])
    qm, _ = np.linalg.qr(frames)
    return [qm[:, :, j] for j in range(n)]


# -- result assembly --------------------------------------------------------


def phase_fix(v: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component real positive."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    thresh = 1e-12 * max(1.0, float(np.max(np.abs(v))))
    nz = np.nonzero(np.abs(v) > thresh)[0]
    if nz.size == 0:
        return v
    z = v[nz[0]]
    return v * (abs(z) / z)


def _witness_key(vectors) -> tuple:
    flat = np.concatenate([phase_fix(v) for v in vectors])
    return tuple(np.round(np.stack([flat.real, flat.imag], 1), 12).reshape(-1))


def overlap(f: np.ndarray, vectors: Sequence[np.ndarray]) -> float:
    phi = kron_all([np.asarray(v, dtype=complex) for v in vectors])
    return float(np.sum(np.abs(phi.conj() @ f) ** 2))


def _assemble(f, layout, keep, values, vecs, conv, mode, seed, notes=()) -> GmResult:
    best = float(np.max(values))
    ties = np.nonzero(values >= best - TIE_TOL)[0]
    if ties.size > 1:
        keys = [_witness_key([v[i] for v in vecs]) for i in ties]
        i_best = int(ties[int(min(range(len(keys)), key=keys.__getitem__))])
    else:
        i_best = int(ties[0])
    local = [phase_fix(v[i_best]) for v in vecs]
    full = []
    it = iter(local)
    for j, d in enumerate(layout.dims):
        full.append(next(it) if j in keep else np.ones(1, dtype=complex))
    witness = ProductAnsatz(tuple(full), mode)
    lam = min(max(overlap(f, full), 0.0), 1.0 + 1e-12)
    agree = int(np.sum(values >= best - AGREE_TOL))
    others = np.sort(values)[::-1]
    runner = float(others[1]) if others.size > 1 else best
    gm_bits = -math.log2(lam) if lam > 0 else math.inf
    return GmResult(lam, max(gm_bits, 0.0), mode, witness, bool(conv[i_best]), agree,
                    int(values.size), seed, runner, tuple(notes))


def _solve(f, layout, opts, mode, nonneg, count=None, init=(), seed_offset=0, notes=()) -> GmResult:
    t, dims, keep = _strip(f, layout)
    count = count or opts.restarts_for(len(dims))
    rng = np.random.default_rng([opts.seed, seed_offset])
    if mode == "symmetric_replica":
        starts = _symmetric_seeds(f, dims, count, rng, nonneg, init)
    elif mode == "antisym_frame":
        starts = _antisym_seeds(f, dims, count, rng, init)
    else:
        starts = _general_seeds(f, dims, count, rng, nonneg, init)
    values, vecs, conv = _run(t, starts, mode, nonneg, opts)
    used = mode if not (nonneg and mode == "general") else "non_negative"
    return _assemble(f, layout, keep, values, vecs, conv, used, opts.seed, notes)


# -- public API -------------------------------------------------------------


def best_product_overlap(h, layout: PartyLayout | None = None, opts: GmOptions | None = None,
                         init: Sequence = ()) -> GmResult:
    """Maximize <phi|H|phi> over product unit vectors phi with the general ansatz.

    ``h`` is a Hermitian PSD matrix (or a QuantumState); ``init`` holds extra
    warm-start product vectors.
    """
    opts = opts or GmOptions()
    f, layout = _factor_of(h, layout)
    mode = opts.ansatz or "general"
    nonneg = mode == "non_negative"
    if mode == "non_negative":
        mode = "general"
    return _solve(f, layout, opts, mode, nonneg, init=init)


def _is_symmetric(s: QuantumState) -> bool:
    if "symmetric" in s.tags:
        return True
    try:
        return s._swap_residual(+1.0) <= SYMMETRY_TOL
    except StateError:
        return False


def _is_antisymmetric(s: QuantumState) -> bool:
    if "antisymmetric" in s.tags:
        return True
    try:
        return s.layout.n >= 2 and s._swap_residual(-1.0) <= SYMMETRY_TOL
    except StateError:
        return False


def gm_symmetric_replica(s: QuantumState, opts: GmOptions | None = None) -> GmResult:
    """Optimize over |a>^N by replica power iteration (proved sufficient for N >= 3)."""
    opts = opts or GmOptions()
    if not _is_symmetric(s):
        raise StateError("symmetric replica ansatz needs a symmetric state")
    notes = ("heuristic: replica ansatz is not guaranteed optimal for N = 2",) if s.layout.n == 2 else ()
    return _solve(np.asarray(s.factor), s.layout, opts, "symmetric_replica",
                  "non_negative" in s.tags, notes=notes)


def gm_antisym_frame(s: QuantumState, opts: GmOptions | None = None) -> GmResult:
    """Optimize over orthonormal frames; the witness is the frame's product state."""
    opts = opts or GmOptions()
    if not _is_antisymmetric(s):
        raise StateError("antisymmetric frame ansatz needs an antisymmetric state")
    return _solve(np.asarray(s.factor), s.layout, opts, "antisym_frame", False)


def _dispatch(s: QuantumState) -> str:
    n = len([d for d in s.layout.dims if d > 1])
    if n >= 3 and "symmetric" in s.tags:
        return "symmetric_replica"
    if n >= 2 and "antisymmetric" in s.tags:
        return "antisym_frame"
    if "non_negative" in s.tags:
        return "non_negative"
    return "general"


def gm(s: QuantumState, opts: GmOptions | None = None) -> GmResult:
    """Geometric measure of ``s``.

    The ansatz is chosen from the state's tags unless ``opts.ansatz`` is set.
    A specialized result is always cross-checked against general restarts and
    the larger overlap is returned.
    """
    opts = opts or GmOptions()
    mode = opts.ansatz or _dispatch(s)
    f = np.asarray(s.factor)
    if mode == "general":
        return _solve(f, s.layout, opts, "general", False)
    if mode == "symmetric_replica":
        special = gm_symmetric_replica(s, opts)
    elif mode == "antisym_frame":
        special = gm_antisym_frame(s, opts)
    else:
        special = _solve(f, s.layout, opts, "general", True)
    count = max(opts.cross_check_restarts, opts.restarts_for(s.layout.n) // 4)
    general = _solve(f, s.layout, opts, "general", False, count=count, seed_offset=1)
    if general.lambda_sq > special.lambda_sq + AGREE_TOL:
        note = f"general restarts beat {special.ansatz_used} by {general.lambda_sq - special.lambda_sq:.3g}"
        return replace(general, notes=general.notes + (note,))
    return special


def lower_bound_g_minus_s(s: QuantumState, opts: GmOptions | None = None) -> float:
    """G(s) - S(s): a lower bound on regularized REE and LGR for non-negative states."""
    return gm(s, opts).gm_bits - entropy(s)
