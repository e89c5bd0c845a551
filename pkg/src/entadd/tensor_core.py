"""Party-aware dense states and tensor algebra.

Basis convention: row-major, party-major, last party fastest, i.e. the flat
index of ``|i_1 ... i_N>`` is ``sum_j i_j * prod_{l>j} d_l``. When two states
on the same parties are merged, party ``j`` of the result has dimension
``d_j(a) * d_j(b)`` and local index ``i_a * d_j(b) + i_b``.

Mixed states may be held either as a dense matrix or as a factor ``F`` with
``rho = F F^dagger``; the matrix is assembled lazily. Pure states are kept as
vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_DIM = 16384

HERMITIAN_TOL = 1e-12
PSD_TOL = -1e-10
TRACE_TOL = 1e-12
NORM_TOL = 1e-12
NONNEG_TOL = 1e-12
SYMMETRY_TOL = 1e-10
RANK_TOL = 1e-9
ENTROPY_FLOOR = 1e-14

KNOWN_TAGS = frozenset({"non_negative", "symmetric", "antisymmetric", "real"})


class StateError(ValueError):
    """Raised when a state or layout violates its invariants."""


def _default_labels(n: int) -> tuple[str, ...]:
    if n <= 26:
        return tuple(chr(ord("A") + j) for j in range(n))
    return tuple(f"P{j + 1}" for j in range(n))


@dataclass(frozen=True)
class PartyLayout:
    """Ordered local dimensions and party labels."""

    dims: tuple[int, ...]
    labels: tuple = ()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0:
            raise StateError("a layout needs at least one party")
        if any(d < 1 for d in dims):
            raise StateError(f"local dimensions must be positive, got {dims}")
        labels = tuple(self.labels) if self.labels else _default_labels(len(dims))
        if len(labels) != len(dims):
            raise StateError("labels and dims differ in length")
        if len(set(labels)) != len(labels):
            raise StateError(f"duplicate party labels {labels}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, d: int, n: int, labels: Sequence | None = None) -> "PartyLayout":
        return cls((d,) * n, tuple(labels) if labels else ())

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StateError(f"unknown party label {label!r}") from None

    def strip_trivial(self) -> "PartyLayout":
        """Drop padding parties of dimension 1."""
        keep = [j for j, d in enumerate(self.dims) if d > 1]
        if not keep:
            keep = [0]
        return PartyLayout(tuple(self.dims[j] for j in keep), tuple(self.labels[j] for j in keep))

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "labels": list(self.labels)}


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


class QuantumState:
    """Normalized quantum state on a :class:`PartyLayout`.

    Use :meth:`pure`, :meth:`mixed` or :meth:`from_factor` to construct.
    Tags (``non_negative``, ``symmetric``, ``antisymmetric``, ``real``) are
    claims about the state that are verified on construction.
    """

    def __init__(self, layout: PartyLayout, kind: str, *, vector=None, matrix=None,
                 factor=None, tags: Iterable[str] = (), check: bool = True):
        self.layout = layout
        self.kind = kind
        self._vector = vector
        self._matrix = matrix
        self._factor = factor
        tags = frozenset(tags)
        unknown = tags - KNOWN_TAGS
        if unknown:
            raise StateError(f"unknown tags {sorted(unknown)}")
        self.tags = tags
        if check:
            self._validate()

    # -- constructors -----------------------------------------------------

    @classmethod
    def pure(cls, vector, layout: PartyLayout | None = None, tags: Iterable[str] = (),
             check: bool = True) -> "QuantumState":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        layout = layout or PartyLayout((v.size,))
        return cls(layout, "pure", vector=_freeze(v), tags=tags, check=check)

    @classmethod
    def mixed(cls, matrix, layout: PartyLayout | None = None, tags: Iterable[str] = (),
              check: bool = True) -> "QuantumState":
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        layout = layout or PartyLayout((m.shape[0],))
        if check:
            asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if asym > HERMITIAN_TOL:
                raise StateError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
        m = 0.5 * (m + m.conj().T)
        return cls(layout, "mixed", matrix=_freeze(m), tags=tags, check=check)

    @classmethod
    def from_factor(cls, factor, layout: PartyLayout | None = None, tags: Iterable[str] = (),
                    check: bool = True) -> "QuantumState":
        """Mixed state ``F F^dagger`` from a ``d_T x r`` factor."""
        f = np.asarray(factor, dtype=complex)
        if f.ndim == 1:
            f = f[:, None]
        layout = layout or PartyLayout((f.shape[0],))
        return cls(layout, "mixed", factor=_freeze(f), tags=tags, check=check)

    @classmethod
    def from_array(cls, data, layout: PartyLayout | None = None, tags: Iterable[str] = ()):
        a = np.asarray(data)
        if a.ndim == 1:
            return cls.pure(a, layout, tags)
        return cls.mixed(a, layout, tags)

    def with_tags(self, tags: Iterable[str]) -> "QuantumState":
        return QuantumState(self.layout, self.kind, vector=self._vector, matrix=self._matrix,
                            factor=self._factor, tags=tags)

    # -- views ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise StateError("mixed state has no state vector")
        return self._vector

    @cached_property
    def matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        if self.is_pure:
            m = np.outer(self._vector, self._vector.conj())
        else:
            m = self._factor @ self._factor.conj().T
        return _freeze(m)

    @cached_property
    def factor(self) -> np.ndarray:
        """Matrix ``F`` with ``rho = F F^dagger`` and linearly independent columns."""
        if self.is_pure:
            return _freeze(self._vector[:, None])
        if self._factor is not None:
            f = self._factor
            if f.shape[1] <= f.shape[0]:
                return f
        w, u = np.linalg.eigh(self.matrix)
        keep = w > ENTROPY_FLOOR
        return _freeze(u[:, keep] * np.sqrt(w[keep]))

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Nonzero-part spectrum in ascending order (zeros padded for mixed matrices)."""
        if self.is_pure:
            return np.array([1.0])
        if self._factor is not None and self._factor.shape[1] < self.dim:
            g = self._factor.conj().T @ self._factor
            return np.linalg.eigvalsh(0.5 * (g + g.conj().T))
        return np.linalg.eigvalsh(self.matrix)

    def tensor(self) -> np.ndarray:
        """Pure state reshaped to one axis per party."""
        return self.vector.reshape(self.layout.dims)

    def __repr__(self) -> str:
        tags = ",".join(sorted(self.tags))
        return f"QuantumState({self.kind}, dims={self.layout.dims}, tags={{{tags}}})"

    # -- validation -------------------------------------------------------

    def _validate(self) -> None:
        n = self.dim
        if self.is_pure:
            v = self._vector
            if v.size != n:
                raise StateError(f"vector length {v.size} does not match layout dimension {n}")
            norm = np.linalg.norm(v)
            if abs(norm - 1.0) > NORM_TOL:
                raise StateError(f"pure state norm {norm!r} is not 1")
        elif self._factor is not None:
            f = self._factor
            if f.shape[0] != n:
                raise StateError(f"factor has {f.shape[0]} rows, layout dimension is {n}")
            tr = float(np.sum(np.abs(f) ** 2))
            if abs(tr - 1.0) > TRACE_TOL * max(1, f.shape[1]):
                raise StateError(f"trace {tr!r} is not 1")
        else:
            m = self._matrix
            if m.shape[0] != n:
                raise StateError(f"matrix dimension {m.shape[0]} does not match layout dimension {n}")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL * max(1.0, math.sqrt(n)):
                raise StateError(f"trace {tr!r} is not 1")
            lo = np.linalg.eigvalsh(m)[0]
            if lo < PSD_TOL:
                raise StateError(f"matrix is not PSD (min eigenvalue {lo:.3g})")
        for tag in self.tags:
            getattr(self, f"_check_{tag}")()

    def _phase_fixed_vector(self) -> np.ndarray:
        v = self._vector
        k = int(np.argmax(np.abs(v)))
        return v * (abs(v[k]) / v[k])

    def _check_non_negative(self) -> None:
        a = self._phase_fixed_vector() if self.is_pure else self.matrix
        if np.any(a.real < -NONNEG_TOL) or np.any(np.abs(a.imag) > NONNEG_TOL):
            raise StateError("state tagged non_negative has negative or complex entries")

    def _check_real(self) -> None:
        a = self._phase_fixed_vector() if self.is_pure else self.matrix
        if np.any(np.abs(a.imag) > NONNEG_TOL):
            raise StateError("state tagged real has complex entries")

    def _swap_residual(self, sign: float) -> float:
        dims = self.layout.dims
        if len(set(dims)) != 1:
            raise StateError("permutation symmetry tags need equal local dimensions")
        cols = self.factor
        t = cols.reshape(dims + (cols.shape[1],))
        worst = 0.0
        for j in range(len(dims) - 1):
            swapped = np.swapaxes(t, j, j + 1)
            worst = max(worst, float(np.max(np.abs(swapped - sign * t))))
        return worst

    def _check_symmetric(self) -> None:
        if self._swap_residual(+1.0) > SYMMETRY_TOL:
            raise StateError("state tagged symmetric is not permutation symmetric")

    def _check_antisymmetric(self) -> None:
        if self.layout.n < 2 or self._swap_residual(-1.0) > SYMMETRY_TOL:
            raise StateError("state tagged antisymmetric is not supported on the antisymmetric subspace")


# -- tensor algebra --------------------------------------------------------


def _interleave_axes(n: int) -> list[int]:
    # axes (a_1..a_N, b_1..b_N) -> (a_1, b_1, ..., a_N, b_N)
    out = []
    for j in range(n):
        out += [j, n + j]
    return out


def merged_tags(ta: frozenset, tb: frozenset) -> set[str]:
    tags = set()
    for t in ("non_negative", "real"):
        if t in ta and t in tb:
            tags.add(t)
    sym_a = "symmetric" in ta, "antisymmetric" in ta
    sym_b = "symmetric" in tb, "antisymmetric" in tb
    if (sym_a[0] and sym_b[0]) or (sym_a[1] and sym_b[1]):
        tags.add("symmetric")
    elif (sym_a[0] and sym_b[1]) or (sym_a[1] and sym_b[0]):
        tags.add("antisymmetric")
    return tags


def tensor_merge(a: QuantumState, b: QuantumState, max_dim: int = DEFAULT_MAX_DIM) -> QuantumState:
    """Tensor product with party ``j`` of ``a`` and of ``b`` merged into one party."""
    la, lb = a.layout, b.layout
    if la.n != lb.n:
        raise StateError(f"party count mismatch: {la.n} vs {lb.n}")
    if la.labels != lb.labels:
        raise StateError(f"party labels differ: {la.labels} vs {lb.labels}")
    dims = tuple(x * y for x, y in zip(la.dims, lb.dims))
    total = math.prod(dims)
    if total > max_dim:
        raise StateError(f"merged dimension {total} exceeds the cap {max_dim}")
    layout = PartyLayout(dims, la.labels)
    tags = merged_tags(a.tags, b.tags)
    n = la.n
    if a.is_pure and b.is_pure:
        t = np.multiply.outer(a.tensor(), b.tensor())
        v = t.transpose(_interleave_axes(n)).reshape(total)
        return QuantumState.pure(v, layout, tags)
    fa, fb = a.factor, b.factor
    ta = fa.reshape(la.dims + (fa.shape[1],))
    tb = fb.reshape(lb.dims + (fb.shape[1],))
    t = np.multiply.outer(ta, tb)  # a_1..a_N, r_a, b_1..b_N, r_b
    axes = []
    for j in range(n):
        axes += [j, n + 1 + j]
    axes += [n, 2 * n + 1]
    f = t.transpose(axes).reshape(total, fa.shape[1] * fb.shape[1])
    return QuantumState.from_factor(f, layout, tags)


def copies(s: QuantumState, n: int = 2, max_dim: int = DEFAULT_MAX_DIM) -> QuantumState:
    out = s
    for _ in range(n - 1):
        out = tensor_merge(out, s, max_dim)
    return out


def partial_trace(s: QuantumState, keep: Iterable) -> QuantumState:
    """Reduced state on the parties whose labels are in ``keep`` (layout order kept)."""
    keep = list(keep)
    if not keep:
        raise StateError("keep set is empty")
    lay = s.layout
    idx = sorted({lay.index_of(k) for k in keep})
    rest = [j for j in range(lay.n) if j not in idx]
    kdims = tuple(lay.dims[j] for j in idx)
    dk = math.prod(kdims)
    new_layout = PartyLayout(kdims, tuple(lay.labels[j] for j in idx))
    f = s.factor
    r = f.shape[1]
    t = f.reshape(lay.dims + (r,)).transpose(idx + rest + [lay.n])
    a = t.reshape(dk, -1)  # columns run over (traced indices, r)
    if not rest:
        return s
    rho = a @ a.conj().T
    tags = set(s.tags) & {"non_negative", "real", "symmetric"}
    if "antisymmetric" in s.tags and len(idx) >= 2:
        # reductions of antisymmetric states stay on the antisymmetric subspace
        tags.add("antisymmetric")
    return QuantumState.mixed(0.5 * (rho + rho.conj().T), new_layout, tags)


def permute_parties(s: QuantumState, perm: Sequence[int]) -> QuantumState:
    """Reorder parties: party ``k`` of the result is party ``perm[k]`` of ``s`` (0-based)."""
    perm = [int(p) for p in perm]
    lay = s.layout
    if sorted(perm) != list(range(lay.n)):
        raise StateError(f"{perm} is not a permutation of 0..{lay.n - 1}")
    layout = PartyLayout(tuple(lay.dims[p] for p in perm), tuple(lay.labels[p] for p in perm))
    if s.is_pure:
        v = s.tensor().transpose(perm).reshape(-1)
        return QuantumState.pure(v, layout, s.tags)
    if s._matrix is None:
        f = s.factor
        t = f.reshape(lay.dims + (f.shape[1],)).transpose(perm + [lay.n])
        return QuantumState.from_factor(t.reshape(s.dim, -1), layout, s.tags)
    n = lay.n
    m = s.matrix.reshape(lay.dims + lay.dims)
    m = m.transpose(perm + [n + p for p in perm]).reshape(s.dim, s.dim)
    return QuantumState.mixed(m, layout, s.tags)


def apply_local(s: QuantumState, unitaries: Sequence[np.ndarray]) -> QuantumState:
    """Apply ``U_1 (x) ... (x) U_N`` to ``s``; tags are dropped."""
    lay = s.layout
    f = s.factor
    t = f.reshape(lay.dims + (f.shape[1],))
    for j, u in enumerate(unitaries):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [j])), 0, j)
    f = t.reshape(s.dim, -1)
    if s.is_pure:
        return QuantumState.pure(f[:, 0], lay)
    return QuantumState.from_factor(f, lay)


def entropy(s: QuantumState) -> float:
    """Von Neumann entropy in bits."""
    if s.is_pure:
        return 0.0
    w = s.eigenvalues
    w = w[w > ENTROPY_FLOOR]
    return float(-np.sum(w * np.log2(w)))


def purity(s: QuantumState) -> float:
    if s.is_pure:
        return 1.0
    return float(np.sum(s.eigenvalues ** 2))


# -- antisymmetric subspace ------------------------------------------------


def permutation_parity(perm: Sequence[int]) -> int:
    """+1 for even permutations, -1 for odd."""
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def antisymmetrize(t: np.ndarray) -> np.ndarray:
    """Apply ``(1/N!) sum_sigma sgn(sigma) S_sigma`` to a tensor with N equal axes."""
    n = t.ndim
    out = np.zeros_like(t, dtype=complex)
    for perm in itertools.permutations(range(n)):
        out += permutation_parity(perm) * t.transpose(perm)
    return out / math.factorial(n)


@dataclass(frozen=True)
class Wedge:
    """Antisymmetrized product ``(1/sqrt(N!)) sum_sigma sgn(sigma) |a_sigma(1) ... a_sigma(N)>``."""

    vector: np.ndarray
    norm: float
    d: int
    n: int

    def state(self) -> QuantumState:
        if self.norm < 1e-12:
            raise StateError("wedge of linearly dependent vectors has no normalized state")
        return QuantumState.pure(self.vector / self.norm, PartyLayout.uniform(self.d, self.n),
                                 tags={"antisymmetric"})


def wedge(vectors: Sequence[np.ndarray]) -> Wedge:
    vs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    n = len(vs)
    if n == 0:
        raise StateError("wedge of no vectors")
    d = vs[0].size
    if any(v.size != d for v in vs):
        raise StateError("wedge inputs must share one dimension")
    if n > d:
        raise StateError(f"cannot antisymmetrize {n} vectors in dimension {d}")
    out = np.zeros(d ** n, dtype=complex)
    for perm in itertools.permutations(range(n)):
        prod = vs[perm[0]]
        for k in perm[1:]:
            prod = np.kron(prod, vs[k])
        out += permutation_parity(perm) * prod
    out /= math.sqrt(math.factorial(n))
    return Wedge(out, float(np.linalg.norm(out)), d, n)


def antisym_basis(d: int, n: int) -> np.ndarray:
    """Orthonormal basis ``|j_1> ^ ... ^ |j_N>`` (j_1 < ... < j_N) as columns."""
    if n > d:
        raise StateError(f"N = {n} exceeds d = {d}")
    combos = list(itertools.combinations(range(d), n))
    w = np.zeros((d ** n, len(combos)))
    strides = [d ** (n - 1 - k) for k in range(n)]
    scale = 1.0 / math.sqrt(math.factorial(n))
    perms = [(p, permutation_parity(p)) for p in itertools.permutations(range(n))]
    for c, js in enumerate(combos):
        for p, sgn in perms:
            w[sum(js[p[k]] * strides[k] for k in range(n)), c] = sgn * scale
    return w


@dataclass(frozen=True)
class AntisymProjector:
    d: int
    n: int
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return math.comb(self.d, self.n)


def antisym_projector(d: int, n: int) -> AntisymProjector:
    if n < 2 or n > d:
        raise StateError(f"antisymmetric projector needs 2 <= N <= d, got d={d}, N={n}")
    w = antisym_basis(d, n)
    p = w @ w.T
    p.setflags(write=False)
    return AntisymProjector(d, n, p)


def slater_rank_check(psi: QuantumState) -> bool:
    """True iff an antisymmetric pure state is a single Slater determinant."""
    if "antisymmetric" not in psi.tags:
        if not psi.is_pure or psi._swap_residual(-1.0) > SYMMETRY_TOL:
            raise StateError("slater_rank_check needs an antisymmetric state")
    if not psi.is_pure:
        raise StateError("slater_rank_check needs a pure state")
    one = partial_trace(psi, [psi.layout.labels[0]])
    rank = int(np.sum(np.linalg.eigvalsh(one.matrix) > RANK_TOL))
    return rank == psi.layout.n


# -- products and serialization --------------------------------------------


def kron_all(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def product_state(vectors: Sequence[np.ndarray], labels: Sequence | None = None) -> QuantumState:
    vs = [np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in vectors]
    layout = PartyLayout(tuple(v.size for v in vs), tuple(labels) if labels else ())
    return QuantumState.pure(kron_all(vs), layout)


def _pairs(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def state_to_json(s: QuantumState) -> dict:
    data = s.vector if s.is_pure else s.matrix
    return {
        "layout": s.layout.to_json(),
        "kind": s.kind,
        "tags": sorted(s.tags),
        "data": _pairs(data),
    }


def state_from_json(doc: dict) -> QuantumState:
    lay = doc["layout"]
    layout = PartyLayout(tuple(lay["dims"]), tuple(lay["labels"]))
    data = np.array([complex(re, im) for re, im in doc["data"]])
    tags = doc.get("tags", ())
    if doc["kind"] == "pure":
        return QuantumState.pure(data, layout, tags)
    if doc["kind"] == "mixed":
        n = layout.total_dim
        return QuantumState.mixed(data.reshape(n, n), layout, tags)
    raise StateError(f"unknown state kind {doc['kind']!r}")
