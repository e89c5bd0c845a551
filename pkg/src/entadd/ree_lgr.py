"""Relative entropy of entanglement and logarithmic global robustness.

REE is minimized over fully separable states by fully corrective Frank-Wolfe on
the atom set of pure product states; the linear subproblem is a product
overlap maximization. LGR is bracketed by explicit separable certificates
(upper bounds) and a PPT relaxation solved as an SDP (lower bounds).

All values are in bits.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .gm_solver import GmOptions, ProductAnsatz, best_product_overlap, gm
from .state_zoo import (
    FamilySpec,
    bell_vectors,
    block_permutation_product,
    dicke_lambda_sq,
    dur_vectors,
    isotropic_lambda_sq,
)
from .tensor_core import (
    ENTROPY_FLOOR,
    PartyLayout,
    QuantumState,
    StateError,
    entropy,
    kron_all,
    partial_trace,
)

LN2 = math.log(2.0)
SUPPORT_FLOOR = 1e-12
CERT_TOL = -1e-9
DROP_WEIGHT = 1e-14
PPT_MAX_DIM = 4096
INF = math.inf


# -- relative entropy -------------------------------------------------------


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, QuantumState):
        return np.asarray(x.matrix)
    if isinstance(x, SeparableDecomposition):
        return x.assembled
    return np.asarray(x, dtype=complex)


def _eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(0.5 * (a + a.conj().T))


def relative_entropy(rho, sigma) -> float:
    """S(rho || sigma) in bits; ``math.inf`` when rho leaves the support of sigma."""
    rho, sigma = _as_matrix(rho), _as_matrix(sigma)
    wr, ur = _eigh(rho)
    ws, us = _eigh(sigma)
    top = max(float(ws[-1]), 0.0)
    on = ws > SUPPORT_FLOOR * max(top, 1.0)
    ker = us[:, ~on]
    if ker.size:
        leak = float(np.real(np.trace(ker.conj().T @ rho @ ker)))
        if leak > SUPPORT_FLOOR:
            return INF
    pos = wr > ENTROPY_FLOOR
    s_rho = float(np.sum(wr[pos] * np.log2(wr[pos])))
    r = us[:, on].conj().T @ rho @ us[:, on]
    cross = float(np.real(np.sum(np.diag(r) * np.log2(ws[on]))))
    return max(s_rho - cross, 0.0) if s_rho - cross > -1e-10 else s_rho - cross


def log_derivative(sigma: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Frechet derivative of the natural log at ``sigma`` applied to ``x``.

    First divided differences of log on the eigenbasis of ``sigma``.
    """
    w, u = _eigh(sigma)
    w = np.maximum(w, ENTROPY_FLOOR)
    lw = np.log(w)
    diff = w[:, None] - w[None, :]
    close = np.abs(diff) < 1e-12 * np.maximum(w[:, None], w[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(close, 1.0 / w[:, None], (lw[:, None] - lw[None, :]) / np.where(close, 1.0, diff))
    xt = u.conj().T @ x @ u
    return u @ (kernel * xt) @ u.conj().T


# -- separable decompositions -----------------------------------------------


@dataclass(frozen=True)
class SeparableDecomposition:
    """Convex combination of pure product states."""

    weights: np.ndarray
    products: tuple
    layout: PartyLayout

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.size != len(self.products):
            raise ValueError("one weight per product is required")
        if np.any(w < -1e-15) or abs(w.sum() - 1) > 1e-12:
            raise ValueError(f"weights must be a convex vector (sum {w.sum():.15g})")
        for p in self.products:
            if p.dims != self.layout.dims:
                raise ValueError(f"product dims {p.dims} do not match layout {self.layout.dims}")
        object.__setattr__(self, "weights", np.clip(w, 0, None))

    @property
    def vectors(self) -> np.ndarray:
        return np.stack([p.vector() for p in self.products], axis=1)

    @property
    def assembled(self) -> np.ndarray:
        v = self.vectors
        return (v * self.weights) @ v.conj().T

    def state(self) -> QuantumState:
        return QuantumState.mixed(self.assembled, self.layout)

    def to_json(self) -> dict:
        return {
            "dims": list(self.layout.dims),
            "weights": [float(x) for x in self.weights],
            "products": [p.to_json() for p in self.products],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SeparableDecomposition":
        layout = PartyLayout(tuple(doc["dims"]))
        prods = tuple(ProductAnsatz.from_json(p) for p in doc["products"])
        w = np.asarray(doc["weights"], dtype=float)
        return cls(w / w.sum(), prods, layout)


def decomposition(weights, products: Sequence, layout: PartyLayout) -> SeparableDecomposition:
    """Build a decomposition from raw weights (renormalized) and local vector tuples."""
    w = np.asarray(weights, dtype=float)
    keep = w > 0
    prods = tuple(p if isinstance(p, ProductAnsatz) else
                  ProductAnsatz(tuple(np.asarray(v, dtype=complex) for v in p))
                  for p, k in zip(products, keep) if k)
    return SeparableDecomposition(w[keep] / w[keep].sum(), prods, layout)


# -- Frank-Wolfe REE --------------------------------------------------------


@dataclass(frozen=True)
class ReeOptions:
    gap_tol: float = 1e-6
    max_iters: int = 300
    stall_iters: int = 10
    eps: float = 1e-9
    lmo_restarts: int = 8
    seed: int = 0
    with_lower_bound: bool = True
    symmetrize: bool = True


@dataclass(frozen=True)
class ReeResult:
    value_bits: float
    sigma: SeparableDecomposition
    fw_gap: float
    iterations: int
    lower_bound_bits: float = float("nan")
    converged: bool = True
    eps: float = 1e-9
    history: tuple = ()
    notes: tuple = ()

    def to_json(self) -> dict:
        return {
            "measure": "REE",
            "value_bits": self.value_bits,
            "units": "bits",
            "fw_gap": self.fw_gap,
            "iterations": self.iterations,
            "lower_bound_bits": self.lower_bound_bits,
            "converged": self.converged,
            "eps": self.eps,
            "sigma": self.sigma.to_json(),
            "notes": list(self.notes),
        }


def _objective(rho: np.ndarray, s_rho: float, sigma: np.ndarray) -> float:
    w, u = _eigh(sigma)
    w = np.maximum(w, ENTROPY_FLOOR)
    r = np.real(np.einsum("ij,ik,kj->j", u.conj(), rho, u))
    return float(s_rho - np.sum(r * np.log2(w)))


def _basis_atoms(dims: tuple[int, ...]) -> list[tuple[np.ndarray, ...]]:
    out = []
    for idx in itertools.product(*[range(d) for d in dims]):
        out.append(tuple(np.eye(d, dtype=complex)[i] for d, i in zip(dims, idx)))
    return out


SYM_MAX_ORDER = 256


@dataclass(frozen=True)
class _Symmetry:
    """Finite group of local-product unitaries that fixes rho.

    Elements are (party permutation, phase power k) with the phase acting as
    diag(w^{k j}) on every party, w = exp(2 pi i / m). Twirling sigma over a
    group that fixes rho never increases S(rho || sigma) and keeps sigma
    separable, so Frank-Wolfe can work with twirled atoms.
    """

    perms: tuple
    m: int

    @property
    def order(self) -> int:
        return len(self.perms) * self.m

    def orbit(self, atom: tuple) -> list[tuple]:
        out = []
        for p in self.perms:
            moved = tuple(atom[j] for j in p)
            for k in range(self.m):
                out.append(tuple(v * np.exp(2j * np.pi * k * np.arange(v.size) / self.m) for v in moved))
        return out

    def orbit_vectors(self, atom: tuple) -> np.ndarray:
        return np.stack([kron_all(a) for a in self.orbit(atom)], axis=1)


def _permute_parties(mat: np.ndarray, dims: tuple[int, ...], perm) -> np.ndarray:
    n = len(dims)
    t = mat.reshape(dims + dims).transpose(tuple(perm) + tuple(n + j for j in perm))
    return t.reshape(mat.shape)


def _detect_symmetry(mat: np.ndarray, layout: PartyLayout, tol: float = 1e-10) -> _Symmetry:
    dims, n = layout.dims, layout.n
    ident = (tuple(range(n)),)
    if n < 2 or len(set(dims)) != 1:
        return _Symmetry(ident, 1)
    d = dims[0]
    scale = max(1.0, float(np.max(np.abs(mat))))

    def fixes(perm) -> bool:
        return float(np.max(np.abs(_permute_parties(mat, dims, perm) - mat))) <= tol * scale

    swap = (1, 0) + tuple(range(2, n))
    shift = tuple(range(1, n)) + (0,)
    perms = ident
    if fixes(shift):
        perms = tuple(tuple((i + j) % n for i in range(n)) for j in range(n))
        if fixes(swap) and math.factorial(n) <= 24:
            perms = tuple(itertools.permutations(range(n)))
    # global U(1) phase: rho only couples basis states with equal excitation count
    exc = np.sum(np.indices(dims).reshape(n, -1), axis=0)
    off = mat[exc[:, None] != exc[None, :]]
    m = n * (d - 1) + 1 if off.size == 0 or float(np.max(np.abs(off))) <= tol * scale else 1
    if len(perms) * m > SYM_MAX_ORDER:
        perms = perms[:1] if m > 1 else perms
    if len(perms) * m > SYM_MAX_ORDER:
        m = 1
    return _Symmetry(perms, m)


def _fw_stage(mat, eps, layout, atoms, w, opts, lmo_opts, gap_tol, max_iters, sym=None):
    """One fully corrective Frank-Wolfe run on rho_eps from the given atoms and weights.

    With ``sym`` each atom stands for the uniform mixture over its group orbit.
    """
    dim = layout.total_dim
    sym = sym or _Symmetry((tuple(range(layout.n)),), 1)
    rho_e = (1 - eps) * mat + eps * np.eye(dim) / dim
    wr = np.clip(_eigh(rho_e)[0], 0, None)
    s_rho = float(np.sum(wr[wr > 0] * np.log2(wr[wr > 0])))
    order = sym.order
    vecs = np.stack([kron_all(a) for a in atoms], axis=1)
    ext = np.concatenate([sym.orbit_vectors(a) for a in atoms], axis=1) if order > 1 else vecs

    def sigma_of(wv):
        return (ext * np.repeat(wv, order) / order) @ ext.conj().T

    def f_of(wv):
        return _objective(rho_e, s_rho, sigma_of(wv))

    def grad_of(wv):
        g = log_derivative(sigma_of(wv), rho_e)
        s = np.real(np.einsum("ia,ij,ja->a", ext.conj(), g, ext))
        return -s.reshape(-1, order).mean(axis=1) / LN2

    simplex = {"type": "eq", "fun": lambda x: np.sum(x) - 1, "jac": lambda x: np.ones_like(x)}
    # the first n_basis atoms are the product basis; a weight floor keeps sigma
    # full rank, since the floored entropy makes singular sigma look cheap
    n_basis = dim
    floor = 0.1 * eps / dim
    w = w.copy()
    w[:n_basis] = np.maximum(w[:n_basis], floor)
    w /= w.sum()
    f = f_of(w)
    history = [f]
    gap = INF
    it = 0
    converged = False
    stalled = 0
    for it in range(1, max_iters + 1):
        g = log_derivative(sigma_of(w), rho_e)
        g = 0.5 * (g + g.conj().T)
        scores = np.real(np.einsum("ia,ij,ja->a", vecs.conj(), g, vecs))
        init = [atoms[i] for i in np.argsort(-scores)[:4]]
        # D log is a positive map; a constant shift removes round-off negativity
        shift = max(0.0, -float(np.linalg.eigvalsh(g)[0]))
        res = best_product_overlap(g + shift * np.eye(dim), layout, lmo_opts, init=init)
        s = res.witness.vector()
        gap = max(float(np.real(s.conj() @ g @ s)) - 1.0, 0.0) / LN2
        if gap < gap_tol:
            converged = True
            break
        if float(np.max(np.abs(vecs.conj().T @ s) ** 2)) < 1 - 1e-12:
            atoms = atoms + [res.witness.vectors]
            vecs = np.concatenate([vecs, s[:, None]], axis=1)
            if order > 1:
                ext = np.concatenate([ext, sym.orbit_vectors(res.witness.vectors)], axis=1)
            else:
                ext = vecs
            w = np.append(w, 0.0)
        # fully corrective step: re-optimize every weight on the simplex
        bounds = [(floor, 1.0)] * n_basis + [(0.0, 1.0)] * (w.size - n_basis)
        with warnings.catch_warnings():
            # SLSQP clips its own trial points to the bounds and says so
            warnings.simplefilter("ignore", RuntimeWarning)
            sol = minimize(f_of, w, jac=grad_of, method="SLSQP", bounds=bounds,
                           constraints=[simplex], options={"ftol": 1e-15, "maxiter": 500})
        w_new = np.clip(sol.x, [b[0] for b in bounds], None)
        w_new /= w_new.sum()
        f_new = f_of(w_new)
        if f_new <= f:
            w = w_new
            stalled = stalled + 1 if f - f_new < 1e-13 else 0
            f = f_new
        else:
            stalled += 1
        keep = w > DROP_WEIGHT
        keep[:n_basis] = True
        if not np.all(keep):
            atoms = [a for a, k in zip(atoms, keep) if k]
            vecs = vecs[:, keep]
            ext = ext[:, np.repeat(keep, order)] if order > 1 else vecs
            w = w[keep] / w[keep].sum()
            f = f_of(w)
        history.append(f)
        if stalled >= opts.stall_iters:
            break
    return atoms, w, float(gap), it, converged, history


EPS_LADDER = (1e-3, 1e-6)


def ree_frank_wolfe(rho, opts: ReeOptions | None = None, layout: PartyLayout | None = None) -> ReeResult:
    """Minimize S(rho_eps || sigma) over fully separable sigma by fully corrective Frank-Wolfe.

    ``rho_eps = (1 - eps) rho + eps I / d`` keeps the objective finite. The
    solve walks down a ladder of eps values, warm-starting each stage, since
    small eps makes the gradient stiff along directions where sigma is
    nearly singular. The duality gap uses the best product overlap found by
    the subproblem solver, so it is exact only when that solve is globally
    optimal. When rho is fixed by party permutations or by a global phase
    rotation, sigma is restricted to twirled states (``opts.symmetrize``);
    this loses nothing and removes the slow drift of plain Frank-Wolfe on
    symmetric states. The reported value is S(rho || sigma) for the
    unregularized input.
    """
    opts = opts or ReeOptions()
    if isinstance(rho, QuantumState):
        state = rho
        layout = layout or rho.layout
        mat = np.asarray(rho.matrix)
    else:
        if layout is None:
            raise ValueError("a layout is required for a bare matrix")
        mat = np.asarray(rho, dtype=complex)
        state = QuantumState.mixed(mat, layout)
    atoms = _basis_atoms(layout.dims)
    w = np.full(len(atoms), 1.0 / len(atoms))
    lmo_opts = GmOptions(restarts=opts.lmo_restarts, seed=opts.seed, scale_restarts=False, max_iters=500)
    sym = _detect_symmetry(mat, layout) if opts.symmetrize else None
    total = 0
    for eps in [e for e in EPS_LADDER if e > opts.eps]:
        atoms, w, _, it, _, _ = _fw_stage(mat, eps, layout, atoms, w, opts, lmo_opts,
                                          max(opts.gap_tol, 1e-3), min(opts.max_iters, 40), sym)
        total += it
    # history records the objective of the final stage only
    atoms, w, gap, it, converged, history = _fw_stage(mat, opts.eps, layout, atoms, w, opts, lmo_opts,
                                                      opts.gap_tol, opts.max_iters, sym)
    total += it

    notes = []
    if sym is not None and sym.order > 1:
        # expand each atom into its orbit so that sigma is an explicit decomposition
        w = np.repeat(w, sym.order) / sym.order
        atoms = [o for a in atoms for o in sym.orbit(a)]
        notes.append(f"sigma twirled over a symmetry group of order {sym.order}")
    sep = decomposition(w, atoms, layout)
    value = relative_entropy(mat, sep.assembled)
    lower = float("nan")
    if not converged:
        notes.append(f"stopped before the gap target; gap {gap:.3g} bits after {total} iterations")
    if opts.with_lower_bound and "non_negative" in state.tags:
        lower = gm(state, GmOptions(seed=opts.seed)).gm_bits - entropy(state)
    return ReeResult(value, sep, float(gap), total, lower, converged, opts.eps, tuple(history), tuple(notes))


def ree(rho, opts: ReeOptions | None = None) -> ReeResult:
    return ree_frank_wolfe(rho, opts)


def ree_reduction_inequality_check(psi: QuantumState, party, opts: ReeOptions | None = None,
                                   tol: float = 1e-4) -> dict:
    """Check E_R(psi) - E_R(rho) - S(rho) >= 0 where rho traces out ``party``."""
    if not psi.is_pure:
        raise StateError("reduction check needs a pure state")
    labels = psi.layout.labels
    drop = labels[party] if isinstance(party, int) else party
    keep = [lab for lab in labels if lab != drop]
    reduced = partial_trace(psi, keep)
    e_pure = ree_frank_wolfe(psi, opts).value_bits
    e_red = ree_frank_wolfe(reduced, opts).value_bits
    s_red = entropy(reduced)
    slack = e_pure - e_red - s_red
    if slack < -tol:
        raise AssertionError(f"reduction inequality violated: slack {slack:.3g} bits")
    return {"ree_pure": e_pure, "ree_reduced": e_red, "entropy_reduced": s_red, "slack": slack}


# -- LGR --------------------------------------------------------------------


@dataclass(frozen=True)
class LgrResult:
    value_bits: float
    kind: str
    certificate: SeparableDecomposition | None = None
    scale: float = 1.0
    exact: bool = False
    notes: tuple = ()

    def to_json(self) -> dict:
        measure = {"closed_form": "LGR_closed", "certificate_upper": "LGR_upper",
                   "ppt_lower": "LGR_lower"}[self.kind]
        doc = {"measure": measure, "value_bits": self.value_bits, "units": "bits",
               "kind": self.kind, "exact": self.exact, "notes": list(self.notes)}
        if self.certificate is not None:
            doc["scale"] = self.scale
            doc["certificate"] = self.certificate.to_json()
        return doc


def lgr_certificate_upper(rho, rho_prime: SeparableDecomposition, scale: float) -> LgrResult:
    """Upper bound log2(scale) from a separable rho' = scale * sum_i w_i |phi_i><phi_i| >= rho."""
    mat = _as_matrix(rho)
    diff = scale * rho_prime.assembled - mat
    low = float(_eigh(diff)[0][0])
    if low < CERT_TOL:
        raise StateError(f"rho' - rho is not PSD (min eigenvalue {low:.3g})")
    return LgrResult(math.log2(scale), "certificate_upper", rho_prime, float(scale))


def scaling_certificate(rho, sep: SeparableDecomposition) -> LgrResult:
    """Smallest c with c * sigma >= rho, i.e. lambda_max(sigma^-1/2 rho sigma^-1/2)."""
    mat = _as_matrix(rho)
    sigma = sep.assembled
    w, u = _eigh(sigma)
    on = w > SUPPORT_FLOOR * max(1.0, float(w[-1]))
    ker = u[:, ~on]
    if ker.size and float(np.real(np.trace(ker.conj().T @ mat @ ker))) > SUPPORT_FLOOR:
        raise StateError("rho is not supported on sigma")
    half = u[:, on] / np.sqrt(w[on])
    c = float(_eigh(half.conj().T @ mat @ half)[0][-1])
    c = max(c, 1.0) * (1 + 1e-12)
    return lgr_certificate_upper(mat, sep, c)


def partial_transpose_index(dims: tuple[int, ...], parties: Sequence[int]) -> np.ndarray:
    """Flat index map ``perm`` with ``X^{T_S}.ravel() == X.ravel()[perm]``."""
    n = len(dims)
    shape = tuple(dims) + tuple(dims)
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    axes = list(range(2 * n))
    for j in parties:
        axes[j], axes[n + j] = axes[n + j], axes[j]
    return np.transpose(idx, axes).reshape(-1)


def partial_transpose(mat: np.ndarray, dims: tuple[int, ...], parties: Sequence[int]) -> np.ndarray:
    dim = int(np.prod(dims))
    return np.asarray(mat).reshape(-1)[partial_transpose_index(dims, parties)].reshape(dim, dim)


def lgr_ppt_lower(rho, layout: PartyLayout | None = None) -> LgrResult:
    """log2 min{tr X : X >= rho, X PPT across every bipartition}; a lower bound on LGR.

    Exact (PPT equals separable) for 2x2 and 2x3 systems.
    """
    import cvxpy as cp

    if isinstance(rho, QuantumState):
        layout = layout or rho.layout
    mat = _as_matrix(rho)
    if layout is None:
        raise ValueError("a layout is required for a bare matrix")
    layout = layout.strip_trivial() if hasattr(layout, "strip_trivial") else layout
    dims = tuple(layout.dims)
    dim = int(np.prod(dims))
    if dim > PPT_MAX_DIM:
        raise StateError(f"PPT relaxation needs d_T <= {PPT_MAX_DIM}, got {dim}")
    n = len(dims)
    if n < 2:
        return LgrResult(0.0, "ppt_lower", exact=True)
    import scipy.sparse as sp

    x = cp.Variable((dim, dim), hermitian=True)
    cons = [x - mat >> 0]
    flat = cp.vec(x, order="C")
    eye = np.arange(dim * dim)
    for r in range(1, n):
        for sub in itertools.combinations(range(n - 1), r):
            perm = partial_transpose_index(dims, sub)
            pmat = sp.csr_matrix((np.ones(dim * dim), (eye, perm)), shape=(dim * dim, dim * dim))
            pt = cp.reshape(pmat @ flat, (dim, dim), order="C")
            cons.append(0.5 * (pt + pt.H) >> 0)
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(x))), cons)
    with warnings.catch_warnings():
        # an inaccurate status is recorded in the notes instead
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
        prob.solve(solver=cp.CLARABEL)
    notes = []
    if prob.status not in ("optimal",):
        notes.append(f"solver status {prob.status}")
    tr = float(prob.value) if prob.value is not None else 1.0
    exact = n == 2 and sorted(dims) in ([2, 2], [2, 3])
    # solver slack can push the trace slightly below 1 for separable inputs
    return LgrResult(math.log2(max(tr, 1.0)), "ppt_lower", exact=exact, notes=tuple(notes))


# -- certificate builders ---------------------------------------------------


_BELL_SEEDS = (
    ((1, 0), (1, 0)),
    ((1, 0), (0, 1)),
    ((1, 1), (1, 1)),
    ((1, 1), (1, -1)),
    ((1, 1j), (1, -1j)),
    ((1, 1j), (1, 1j)),
)
_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def bell_weights(rho) -> np.ndarray:
    """Bell-basis weights; raises if ``rho`` is not Bell diagonal."""
    mat = _as_matrix(rho)
    b = bell_vectors()
    m = b.conj().T @ mat @ b
    off = float(np.max(np.abs(m - np.diag(np.diag(m)))))
    if mat.shape != (4, 4) or off > 1e-10:
        raise StateError("state is not Bell diagonal")
    return np.real(np.diag(m))


def bell_diagonal_separable(q) -> SeparableDecomposition:
    """Twirled product decomposition of a separable Bell-diagonal state (all q_i <= 1/2)."""
    q = np.asarray(q, dtype=float)
    b = bell_vectors()
    seeds = [tuple(_unit(v) for v in s) for s in _BELL_SEEDS]
    cols = np.array([np.abs(b.conj().T @ kron_all(s)) ** 2 for s in seeds]).T
    res = linprog(np.zeros(len(seeds)), A_eq=cols, b_eq=q, bounds=[(0, None)] * len(seeds), method="highs")
    if not res.success:
        raise StateError(f"Bell-diagonal weights {q} are not separable")
    weights, prods = [], []
    for c, s in zip(res.x, seeds):
        if c <= 1e-15:
            continue
        for p in _PAULIS:
            weights.append(c / 4)
            prods.append((p @ s[0], p @ s[1]))
    return decomposition(weights, prods, PartyLayout((2, 2)))


def bell_certificate(rho) -> LgrResult:
    q = bell_weights(rho)
    i0 = int(np.argmax(q))
    p0 = q[i0]
    if p0 <= 0.5:
        return lgr_certificate_upper(rho, bell_diagonal_separable(q), 1.0)
    # add (2 p0 - 1)/3 of each other Bell projector: the result has top weight 1/2
    t = np.full(4, (2 * p0 - 1) / 3)
    t[i0] = 0
    target = (q + t) / (2 * p0)
    return lgr_certificate_upper(rho, bell_diagonal_separable(target), 2 * p0)


def mub_vectors(d: int) -> list[np.ndarray]:
    """Complete set of d + 1 mutually unbiased bases for prime d (columns of each matrix)."""
    if d == 2:
        s = 1 / math.sqrt(2)
        return [np.eye(2, dtype=complex), np.array([[s, s], [s, -s]], dtype=complex),
                np.array([[s, s], [1j * s, -1j * s]])]
    if d < 2 or any(d % p == 0 for p in range(2, int(math.isqrt(d)) + 1)):
        raise ValueError(f"MUB construction implemented for prime d only, got {d}")
    j = np.arange(d)
    w = np.exp(2j * np.pi / d)
    out = [np.eye(d, dtype=complex)]
    for b in range(d):
        out.append(np.array([[w ** ((b * jj * jj + m * jj) % d) for m in range(d)] for jj in j]) / math.sqrt(d))
    return out


def isotropic_separable(d: int, lam: float) -> SeparableDecomposition:
    """Decomposition of the isotropic state for lam <= 1/d from MUB vectors e (x) conj(e')."""
    if lam > 1 / d + 1e-12:
        raise StateError("isotropic state is entangled for lambda > 1/d")
    bases = mub_vectors(d)
    alpha = lam * d
    same, cross = [], []
    for m in bases:
        for a in range(d):
            for c in range(d):
                (same if a == c else cross).append((m[:, a], m[:, c].conj()))
    weights = [alpha / len(same)] * len(same) + [(1 - alpha) / len(cross)] * len(cross)
    return decomposition(weights, same + cross, PartyLayout((d, d)))


def isotropic_certificate(d: int, lam: float) -> LgrResult:
    from .state_zoo import isotropic

    rho = isotropic(d, lam)
    if lam <= 1 / d:
        return lgr_certificate_upper(rho, isotropic_separable(d, lam), 1.0)
    return lgr_certificate_upper(rho, isotropic_separable(d, 1 / d), d * lam)


def dicke_certificate(n: int, k: Sequence[int]) -> LgrResult:
    """Phase twirl of |a>^N with |a_j|^2 = k_j / N, scaled by 1/Lambda^2."""
    from .state_zoo import dicke

    k = list(k)
    d = len(k)
    amp = np.sqrt(np.asarray(k, dtype=float) / n)
    phases = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    prods = []
    for combo in itertools.product(range(n + 1), repeat=d - 1):
        ph = np.concatenate([[1.0], phases[list(combo)]])
        a = (amp * ph).astype(complex)
        prods.append(tuple([a] * n))
    weights = np.full(len(prods), 1.0 / len(prods))
    sep = decomposition(weights, prods, PartyLayout.uniform(d, n))
    return lgr_certificate_upper(dicke(n, k), sep, 1.0 / dicke_lambda_sq(n, k))


def _basis_products(dims: tuple[int, ...], indices) -> list[tuple[np.ndarray, ...]]:
    return [tuple(np.eye(d, dtype=complex)[i] for d, i in zip(dims, idx)) for idx in indices]


def smolin_certificate() -> LgrResult:
    from .state_zoo import smolin

    words = ["0000", "1111", "0011", "1100", "0101", "1010", "0110", "1001"]
    prods = _basis_products((2,) * 4, [[int(c) for c in w] for w in words])
    sep = decomposition(np.full(8, 1 / 8), prods, PartyLayout.uniform(2, 4))
    return lgr_certificate_upper(smolin(), sep, 2.0)


def ghz_certificate(n: int, d: int = 2) -> LgrResult:
    from .state_zoo import ghz

    prods = _basis_products((d,) * n, [[j] * n for j in range(d)])
    sep = decomposition(np.full(d, 1 / d), prods, PartyLayout.uniform(d, n))
    return lgr_certificate_upper(ghz(n, d), sep, float(d))


def antisym_certificate(d: int, n: int) -> LgrResult:
    """N! times the uniform mixture of basis products with distinct indices."""
    from .state_zoo import antisym_projector_state

    idx = list(itertools.permutations(range(d), n))
    prods = _basis_products((d,) * n, idx)
    sep = decomposition(np.full(len(idx), 1 / len(idx)), prods, PartyLayout.uniform(d, n))
    return lgr_certificate_upper(antisym_projector_state(d, n), sep, float(math.factorial(n)))


def generalized_antisym_certificate(d: int, p: int, k: int) -> LgrResult:
    from .state_zoo import generalized_antisym

    prods = block_permutation_product(d, p, k)
    sep = decomposition(np.full(len(prods), 1 / len(prods)), prods, PartyLayout.uniform(d, p * k))
    return lgr_certificate_upper(generalized_antisym(d, p, k), sep, float(math.factorial(k)))


def mcb_certificate(d: int, p, fourier: bool = True) -> LgrResult:
    """rho_MCB <= d p_max * (1/d) sum_j |jj><jj| in the (possibly Fourier-mapped) basis."""
    from .state_zoo import dft, mcb

    rho = mcb(d, p, fourier)
    f = dft(d) if fourier else np.eye(d, dtype=complex)
    prods = [(f[:, j].copy(), f[:, j].copy()) for j in range(d)]
    sep = decomposition(np.full(d, 1 / d), prods, PartyLayout((d, d)))
    return scaling_certificate(rho, sep)


def dur_certificate(n: int, x: float) -> LgrResult:
    """Replace the GHZ projector by |0..0><0..0| + |1..1><1..1|; trace 1 + x."""
    from .state_zoo import dur

    rho = dur(n, x)
    _, flips = dur_vectors(n)
    dims = (2,) * n
    words = [[0] * n, [1] * n]
    for k in range(n):
        u = [1 if j == k else 0 for j in range(n)]
        words += [u, [1 - b for b in u]]
    prods = _basis_products(dims, words)
    raw = [x, x] + [(1 - x) / (2 * n)] * (2 * n)
    total = sum(raw)
    sep = decomposition(np.asarray(raw) / total, prods, PartyLayout.uniform(2, n))
    return lgr_certificate_upper(rho, sep, total)


def lgr_closed_form(spec: FamilySpec) -> LgrResult | None:
    from .state_zoo import UNKNOWN, closed_form

    val = closed_form(spec, "LGR", 1)
    if val is UNKNOWN:
        return None
    return LgrResult(float(val), "closed_form", exact=True)


def certificate_for(spec: FamilySpec) -> LgrResult | None:
    """Explicit separable upper-bound certificate for a recognized family, if one is known."""
    p = spec.params
    f = spec.family
    if f == "bell":
        return bell_certificate(spec.build())
    if f == "iso":
        return isotropic_certificate(p["d"], float(p["lambda"]))
    if f == "dicke":
        return dicke_certificate(p["N"], p["k"])
    if f == "smolin":
        return smolin_certificate()
    if f == "ghz":
        return ghz_certificate(p["N"], p["d"])
    if f == "asp":
        return antisym_certificate(p["d"], p["N"])
    if f == "asb":
        return antisym_certificate(p["N"], p["N"])
    if f == "gas":
        return generalized_antisym_certificate(p["d"], p["p"], p["k"])
    if f == "mcb":
        return mcb_certificate(p["d"], [float(x) for x in p["p"]])
    if f == "dur":
        return dur_certificate(p["N"], float(p["x"]))
    if f == "prod":
        s = spec.build()
        vecs = tuple(np.eye(d, dtype=complex)[i] for d, i in zip(p["dims"], p["index"]))
        return lgr_certificate_upper(s, decomposition([1.0], [vecs], s.layout), 1.0)
    return None


@dataclass(frozen=True)
class LgrBounds:
    lower: LgrResult | None
    upper: LgrResult | None
    closed: LgrResult | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def value_bits(self) -> float:
        if self.closed is not None:
            return self.closed.value_bits
        if self.upper is not None and self.upper.exact:
            return self.upper.value_bits
        if self.lower is not None and self.lower.exact:
            return self.lower.value_bits
        return self.upper.value_bits if self.upper is not None else float("nan")

    def to_json(self) -> dict:
        return {
            "measure": "LGR",
            "units": "bits",
            "value_bits": self.value_bits,
            "closed_form": None if self.closed is None else self.closed.to_json(),
            "upper": None if self.upper is None else self.upper.to_json(),
            "lower": None if self.lower is None else self.lower.to_json(),
            "notes": list(self.notes),
        }


def lgr_bounds(state: QuantumState, spec: FamilySpec | None = None, ppt_max_dim: int = 32) -> LgrBounds:
    """Closed form (if the family is recognized), certificate upper bound and PPT lower bound."""
    closed = lgr_closed_form(spec) if spec is not None else None
    upper = certificate_for(spec) if spec is not None else None
    lower = None
    notes = []
    if state.dim <= ppt_max_dim:
        lower = lgr_ppt_lower(state)
    else:
        notes.append(f"PPT relaxation skipped above d_T = {ppt_max_dim}")
    if upper is None and state.dim <= 256:
        r = ree_frank_wolfe(state, ReeOptions(with_lower_bound=False))
        upper = scaling_certificate(state, r.sigma)
        notes.append("upper bound from the REE closest separable state")
    if upper is not None and lower is not None and abs(upper.value_bits - lower.value_bits) < 1e-6:
        upper = LgrResult(upper.value_bits, upper.kind, upper.certificate, upper.scale, True, upper.notes)
    return LgrBounds(lower, upper, closed, tuple(notes))


def pure_state_lgr_candidates(schmidt: Sequence[float]) -> dict:
    """Two readings of the bipartite pure-state LGR formula, for comparison with the PPT value."""
    s = np.asarray(schmidt, dtype=float)
    tr_sqrt = float(np.sum(s))
    return {"two_log_tr_sqrt": 2 * math.log2(tr_sqrt), "half_log_tr_sqrt": 0.5 * math.log2(tr_sqrt)}


def isotropic_lgr(d: int, lam: float) -> float:
    return math.log2(d * lam) if lam >= 1 / d else 0.0


def isotropic_gm(d: int, lam: float) -> float:
    return -math.log2(isotropic_lambda_sq(d, lam))
