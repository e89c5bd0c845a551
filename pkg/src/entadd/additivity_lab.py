"""Two-copy measures with merged parties and additivity gaps.

Party ``j`` of the joint state ``rho (x) rho'`` is the pair (A_j, A'_j) of
dimension ``d_j^2``. A product vector on one merged party is written
``|a_V> = d^{-1/2} sum_jk V_jk |jk>`` with ``tr V V^dagger = d``, which turns
the overlap of ``rho (x) rho'`` with ``(x)_j |a_{V_j}>`` into the trace form
``tr(rho V rho'^* V^dagger) / d_T`` with ``V = (x)_j V_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .gm_solver import AGREE_TOL, GmOptions, GmResult, ProductAnsatz, best_product_overlap, gm
from .ree_lgr import ReeOptions, lgr_bounds, ree_frank_wolfe
from .state_zoo import asp_values
from .tensor_core import DEFAULT_MAX_DIM, QuantumState, StateError, kron_all, tensor_merge

MEASURES = ("GM", "REE_upper", "LGR_bounds")
CLASSES = ("additive_within_tol", "subadditive_gap", "inconclusive")
CROSS_CHECK_DIM = 4096
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class CorrelationMatrixAnsatz:
    """A d x d matrix V with tr V V^dagger = d and its merged-party vector |a_V>."""

    V: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.V, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("V must be square")
        d = v.shape[0]
        norm = float(np.real(np.trace(v @ v.conj().T)))
        if abs(norm - d) > 1e-10:
            raise ValueError(f"tr V V^dagger = {norm:.12g}, expected {d}")
        object.__setattr__(self, "V", v)

    @property
    def d(self) -> int:
        return self.V.shape[0]

    def vector(self) -> np.ndarray:
        return self.V.reshape(-1) / math.sqrt(self.d)

    @classmethod
    def normalized(cls, v: np.ndarray) -> "CorrelationMatrixAnsatz":
        v = np.asarray(v, dtype=complex)
        return cls(v * math.sqrt(v.shape[0]) / np.linalg.norm(v))

    @classmethod
    def from_vector(cls, a: np.ndarray) -> "CorrelationMatrixAnsatz":
        d = math.isqrt(a.size)
        return cls.normalized(np.asarray(a).reshape(d, d))


@dataclass(frozen=True)
class AdditivityReport:
    measure: str
    value_single_a: float
    value_single_b: float
    value_joint: float
    gap: float
    classification: str
    tol: float
    notes: tuple = ()

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "units": "bits",
            "value_single_a": self.value_single_a,
            "value_single_b": self.value_single_b,
            "value_joint": self.value_joint,
            "gap": self.gap,
            "classification": self.classification,
            "tol": self.tol,
            "notes": list(self.notes),
        }


# -- overlap identity -------------------------------------------------------


def _check_pair(rho: QuantumState, rho_prime: QuantumState) -> None:
    if rho.layout.dims != rho_prime.layout.dims:
        raise StateError(f"layouts differ: {rho.layout.dims} vs {rho_prime.layout.dims}")


def _check_vs(vs: Sequence[np.ndarray], dims: Sequence[int]) -> list[np.ndarray]:
    if len(vs) != len(dims):
        raise ValueError(f"need one V per party ({len(dims)}), got {len(vs)}")
    out = []
    for v, d in zip(vs, dims):
        v = np.asarray(v, dtype=complex)
        if v.shape != (d, d):
            raise ValueError(f"V of shape {v.shape} does not match party dimension {d}")
        norm = float(np.real(np.trace(v @ v.conj().T)))
        if abs(norm - d) > 1e-10:
            raise ValueError(f"tr V V^dagger = {norm:.12g}, expected {d}")
        out.append(v)
    return out


def overlap_identity(rho: QuantumState, rho_prime: QuantumState, Vs: Sequence[np.ndarray],
                     debug: bool = False) -> float:
    """tr(rho^{1/2} V rho'^* V^dagger rho^{1/2}) / d_T with V = (x)_j V_j.

    With ``debug`` the left side <phi|rho (x) rho'|phi> is also evaluated on
    the merged joint state and the two are required to agree within 1e-10.
    """
    _check_pair(rho, rho_prime)
    vs = _check_vs(Vs, rho.layout.dims)
    big = kron_all(vs)
    d_t = rho.layout.total_dim
    w, u = np.linalg.eigh(np.asarray(rho.matrix))
    half = (u * np.sqrt(np.clip(w, 0, None))) @ u.conj().T
    right = float(np.real(np.trace(half @ big @ np.asarray(rho_prime.matrix).conj() @ big.conj().T @ half))) / d_t
    if debug:
        joint = tensor_merge(rho, rho_prime, max_dim=DEFAULT_MAX_DIM)
        phi = kron_all([v.reshape(-1) / math.sqrt(v.shape[0]) for v in vs])
        f = np.asarray(joint.factor)
        left = float(np.sum(np.abs(phi.conj() @ f) ** 2))
        if abs(left - right) > IDENTITY_TOL:
            raise AssertionError(f"overlap identity mismatch: left {left!r}, right {right!r}")
    return right


def max_entangled_pair_overlap(s: QuantumState) -> float:
    """Overlap of s (x) s with the product of maximally entangled copy pairs (V_j = I)."""
    return overlap_identity(s, s, [np.eye(d) for d in s.layout.dims])


# -- V-parameterized two-copy GM --------------------------------------------


class _TwoCopyObjective:
    """f(V) = ||F^dagger V^{(x)N} conj(F')||^2 / d^N for rho = F F^dagger, rho' = F' F'^dagger."""

    def __init__(self, rho: QuantumState, rho_prime: QuantumState):
        dims = rho.layout.dims
        self.n = len(dims)
        self.d = dims[0]
        f = np.asarray(rho.factor)
        g = np.asarray(rho_prime.factor)
        shape = (self.d,) * self.n
        self.t = f.conj().T.reshape((f.shape[1],) + shape)
        self.u = g.conj().reshape(shape + (g.shape[1],))
        self.scale = 1.0 / self.d ** self.n

    def _apply(self, v: np.ndarray, skip: int | None) -> np.ndarray:
        x = self.u
        for m in range(self.n):
            if m == skip:
                continue
            x = np.moveaxis(np.tensordot(v, x, axes=(1, m)), 0, m)
        return x

    def value(self, v: np.ndarray) -> float:
        w = self._apply(v, None)
        axes = list(range(1, self.n + 1)), list(range(self.n))
        m = np.tensordot(self.t, w, axes=axes)
        return float(np.sum(np.abs(m) ** 2)) * self.scale

    def value_and_grad(self, v: np.ndarray) -> tuple[float, np.ndarray]:
        """Objective and its Wirtinger gradient df/d(conj V)."""
        grad = np.zeros_like(v)
        m_ab = None
        for m in range(self.n):
            w = self._apply(v, m)
            ta = [k + 1 for k in range(self.n) if k != m]
            wa = [k for k in range(self.n) if k != m]
            env = np.tensordot(self.t, w, axes=(ta, wa))  # (r, p, q, r')
            if m_ab is None:
                m_ab = np.einsum("apqb,pq->ab", env, v)
            grad += np.einsum("ab,apqb->pq", m_ab, env.conj())
        val = float(np.sum(np.abs(m_ab) ** 2)) * self.scale
        return val, grad * self.scale

    def slot_matrix(self, v: np.ndarray) -> np.ndarray:
        """Hermitian form in the first slot with every other slot fixed to ``v``."""
        w = self._apply(v, 0)
        ta = list(range(2, self.n + 1))
        wa = list(range(1, self.n))
        env = np.tensordot(self.t, w, axes=(ta, wa)).reshape(self.t.shape[0], -1, w.shape[-1])
        flat = env.transpose(1, 0, 2).reshape(self.d * self.d, -1)
        return flat.conj() @ flat.T * self.scale


@dataclass(frozen=True)
class VOptions:
    restarts: int = 16
    max_iters: int = 5000
    tol: float = 1e-14
    seed: int = 0
    cross_check: bool = True


def _project_sphere(v: np.ndarray, d: int) -> np.ndarray:
    return v * (math.sqrt(d) / np.linalg.norm(v))


def _ascend(obj: _TwoCopyObjective, v: np.ndarray, opts: VOptions) -> tuple[float, np.ndarray, bool]:
    d = obj.d
    v = _project_sphere(v, d)
    f, g = obj.value_and_grad(v)
    eta = 1.0
    checkpoint = f
    for it in range(1, opts.max_iters + 1):
        if it % 100 == 0:
            # degenerate maxima make first-order ascent crawl; stop and report unconverged
            if f - checkpoint < 1e-10:
                return f, v, False
            checkpoint = f
        gt = g - np.real(np.vdot(v, g)) * v / d
        if np.linalg.norm(gt) < 1e-15:
            return f, v, True
        # the full power step is a strong candidate for this homogeneous objective
        cands = [_project_sphere(g, d)] if np.linalg.norm(g) > 0 else []
        top = np.linalg.eigh(obj.slot_matrix(v))[1][:, -1].reshape(d, d)
        cands.append(_project_sphere(top * np.exp(-1j * np.angle(np.vdot(top, v))), d))
        best_f, best_v, best_step = f, None, eta
        # geometric step grid around the last accepted step
        for k in range(-12, 5):
            step = eta * 2.0 ** k
            c = _project_sphere(v + step * gt, d)
            fc = obj.value(c)
            if fc > best_f:
                best_f, best_v, best_step = fc, c, step
        for c in cands:
            fc = obj.value(c)
            if fc > best_f:
                best_f, best_v = fc, c
        if best_v is None:
            return f, v, True
        eta = best_step
        done = best_f - f < opts.tol
        v = best_v
        f, g = obj.value_and_grad(v)
        if done:
            return f, v, True
    return f, v, False


def _random_unitary(rng, d: int) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def two_copy_gm_via_V(rho: QuantumState, rho_prime: QuantumState | None = None,
                      opts: VOptions | None = None) -> GmResult:
    """GM of rho (x) rho' under the symmetric ansatz |a_V>^N, by ascent on tr V V^dagger = d.

    The ansatz is provably sufficient when the merged state is symmetric
    with N >= 3. When the merged dimension is at most 4096 the general
    solver is also run on the merged state and the larger overlap is kept.
    """
    opts = opts or VOptions()
    rho_prime = rho if rho_prime is None else rho_prime
    _check_pair(rho, rho_prime)
    dims = rho.layout.dims
    if len(set(dims)) != 1:
        raise StateError(f"the V ansatz needs equal local dimensions, got {dims}")
    obj = _TwoCopyObjective(rho, rho_prime)
    d = obj.d
    rng = np.random.default_rng([opts.seed, 7])
    seeds = [np.eye(d, dtype=complex), _random_unitary(rng, d)]
    while len(seeds) < opts.restarts:
        seeds.append(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    runs = [_ascend(obj, s, opts) for s in seeds[: opts.restarts]]
    vals = np.array([r[0] for r in runs])
    best = int(np.argmax(vals))
    f_best, v_best, conv = runs[best]
    ansatz = CorrelationMatrixAnsatz.normalized(v_best)
    n = len(dims)
    witness = ProductAnsatz(tuple([ansatz.vector()] * n), "correlation_matrix")
    lam = min(max(f_best, 0.0), 1.0)
    notes = []
    if n < 3:
        notes.append("V ansatz is not guaranteed optimal for N < 3")
    order = np.sort(vals)[::-1]
    result = GmResult(lam, -math.log2(lam) if lam > 0 else math.inf, "correlation_matrix", witness,
                      bool(conv), int(np.sum(vals >= f_best - AGREE_TOL)), len(runs), opts.seed,
                      float(order[1]) if order.size > 1 else f_best, tuple(notes))
    joint_dim = rho.layout.total_dim * rho_prime.layout.total_dim
    if opts.cross_check and joint_dim <= CROSS_CHECK_DIM:
        joint = tensor_merge(rho, rho_prime)
        general = best_product_overlap(joint, opts=GmOptions(seed=opts.seed), init=[witness])
        diff = general.lambda_sq - lam
        if diff > AGREE_TOL:
            note = f"general solver on the merged state is higher by {diff:.3g}"
            return replace(general, notes=general.notes + tuple(notes) + (note,))
        result = replace(result, notes=result.notes + (f"general cross-check agrees (diff {diff:.2g})",))
    else:
        result = replace(result, notes=result.notes + ("no cross-check: merged dimension above cap",))
    return result


def v_objective(rho: QuantumState, rho_prime: QuantumState, v: np.ndarray) -> float:
    """Two-copy overlap under the ansatz |a_V>^N (V is rescaled to tr V V^dagger = d)."""
    obj = _TwoCopyObjective(rho, rho_prime)
    return obj.value(_project_sphere(np.asarray(v, dtype=complex), obj.d))


def optimal_V(result: GmResult) -> np.ndarray:
    return CorrelationMatrixAnsatz.from_vector(result.witness.vectors[0]).V


# -- bounds and gaps --------------------------------------------------------


def product_upper_bound(rho: QuantumState, rho_prime: QuantumState | None = None) -> float:
    """log2 d_T - log2 tr(rho rho'^*), an upper bound on G(rho (x) rho').

    ``d_T`` is the dimension of one copy; ``rho'`` defaults to ``rho``.
    """
    rho_prime = rho if rho_prime is None else rho_prime
    _check_pair(rho, rho_prime)
    f = np.asarray(rho.factor)
    g = np.asarray(rho_prime.factor)
    # tr(rho rho'^*) = ||F^dagger conj(G)||^2
    tr = float(np.sum(np.abs(f.conj().T @ g.conj()) ** 2))
    if tr <= 1e-300:
        return math.inf
    return math.log2(rho.layout.total_dim) - math.log2(tr)


def _classify(gap: float, tol: float, ok: bool) -> str:
    if not ok:
        return "inconclusive"
    if abs(gap) <= tol:
        return "additive_within_tol"
    if gap < -tol:
        return "subadditive_gap"
    return "inconclusive"


def _merged_witness(wa: ProductAnsatz, wb: ProductAnsatz) -> ProductAnsatz:
    return ProductAnsatz(tuple(np.kron(x, y) for x, y in zip(wa.vectors, wb.vectors)))


def additivity_gap(a: QuantumState, b: QuantumState, measure: str = "GM", opts: GmOptions | None = None,
                   tol: float = 1e-3, max_dim: int = DEFAULT_MAX_DIM) -> AdditivityReport:
    """Joint value on the merged product minus the two single values.

    GM gaps are never positive beyond solver noise: the product of the two
    single-copy witnesses is a joint witness, and it seeds the joint solve.
    """
    measure = {"gm": "GM", "ree": "REE_upper", "lgr": "LGR_bounds"}.get(measure.lower(), measure)
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    opts = opts or GmOptions()
    joint = tensor_merge(a, b, max_dim=max_dim)
    notes = []
    ok = True
    if measure == "GM":
        ra, rb = gm(a, opts), gm(b, opts)
        rj = gm(joint, opts)
        seeded = best_product_overlap(joint, opts=opts, init=[_merged_witness(ra.witness, rb.witness)])
        if seeded.lambda_sq > rj.lambda_sq:
            rj = seeded
        va, vb, vj = ra.gm_bits, rb.gm_bits, rj.gm_bits
        ok = ra.converged and rb.converged and rj.converged
        gap = vj - va - vb
        if "non_negative" in a.tags or "non_negative" in b.tags:
            if abs(gap) > tol:
                notes.append(f"non-negative factor predicts additivity but gap is {gap:.3g}")
            else:
                notes.append("non-negative factor: additivity predicted and observed")
    elif measure == "REE_upper":
        if joint.dim > 256:
            raise StateError(f"REE joint dimension {joint.dim} is above the Frank-Wolfe cap 256")
        ro = ReeOptions(with_lower_bound=False, seed=opts.seed)
        ra, rb, rj = ree_frank_wolfe(a, ro), ree_frank_wolfe(b, ro), ree_frank_wolfe(joint, ro)
        va, vb, vj = ra.value_bits, rb.value_bits, rj.value_bits
        gap = vj - va - vb
        notes.append("values are Frank-Wolfe upper bounds")
    else:
        ba, bb, bj = lgr_bounds(a), lgr_bounds(b), lgr_bounds(joint)
        va, vb, vj = ba.value_bits, bb.value_bits, bj.value_bits
        gap = vj - va - vb
        ok = all(x.lower is not None and x.upper is not None and x.upper.value_bits - x.lower.value_bits <= tol
                 for x in (ba, bb, bj))
        notes.append("values are certificate upper bounds; PPT lower bounds decide conclusiveness")
    return AdditivityReport(measure, float(va), float(vb), float(vj), float(gap),
                            _classify(gap, tol, ok), tol, tuple(notes))


def asp_closed_forms(d1: int, d2: int, n: int) -> dict:
    """GM, REE and LGR of one and two copies of antisymmetric projector states.

    Two-copy entries refer to rho_{d1,N} (x) rho_{d2,N}; the REE/LGR entries do
    not depend on d2.
    """
    vals = asp_values(d1, d2, n)
    same = asp_values(d1, d1, n)
    return {
        "d1": d1, "d2": d2, "N": n, "units": "bits",
        "single": {"GM": vals[("GM", 1)], "REE": vals[("REE", 1)], "LGR": vals[("LGR", 1)]},
        "two_copy": {"GM": vals[("GM", 2)], "REE": vals[("REE", 2)], "LGR": vals[("LGR", 2)]},
        "ree_independent_of_d2": abs(vals[("REE", 2)] - same[("REE", 2)]) < 1e-12,
    }
