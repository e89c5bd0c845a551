"""Named state families, a compact string grammar for them, and closed forms.

Family strings look like ``name:arg,arg`` where an argument is either a bare
value or ``key=value`` and list values are separated by ``;``. Numbers may be
written as decimals or fractions (``1/3``)::

    bell:0.7,0.1,0.1,0.1        mcb:d=3,p=0.5;0.25;0.25
    iso:d=3,lambda=0.6          dicke:N=3,k=2;1
    dmix:N=2,k=0;1,w=1/3;2/3    smolin
    dur:N=4,x=0.25              asp:d=3,N=2
    asb:N=3                     gas:d=2,p=2,k=4
    ghz:N=3,d=2                 prod:dims=2;2,index=0;1

For ``dmix`` the level index ``k`` counts the parties in ``|0>``, so
``dmix:N=2,k=0;1,...`` mixes ``|11>`` and ``(|01>+|10>)/sqrt(2)``.
"""

from __future__ import annotations

import itertools
import json
import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .tensor_core import (
    PartyLayout,
    QuantumState,
    StateError,
    antisym_basis,
    kron_all,
    permutation_parity,
)

UNKNOWN = "unknown"
PROB_TOL = 1e-12

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _h2(p: float) -> float:
    return shannon([p, 1 - p])


def shannon(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _check_prob(p, n: int | None = None, name: str = "p") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if n is not None and p.size != n:
        raise StateError(f"{name} must have {n} entries, got {p.size}")
    if np.any(p < -PROB_TOL):
        raise StateError(f"{name} has negative entries: {p}")
    if abs(p.sum() - 1) > PROB_TOL:
        raise StateError(f"{name} sums to {p.sum()!r}, not 1")
    return np.clip(p, 0, None)


def _basis(d: int, j: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[j] = 1
    return v


def _digits(d: int, n: int) -> np.ndarray:
    """Row ``i`` holds the base-``d`` digits of ``i`` (most significant first)."""
    idx = np.arange(d ** n)
    return np.stack([(idx // d ** (n - 1 - k)) % d for k in range(n)], axis=1)


def _from_columns(cols: np.ndarray, weights, layout: PartyLayout, tags) -> QuantumState:
    w = np.asarray(weights, dtype=float)
    keep = w > 0
    return QuantumState.from_factor(cols[:, keep] * np.sqrt(w[keep]), layout, tags)


# -- two-party families -----------------------------------------------------


def bell_vectors() -> np.ndarray:
    """Columns |Psi_0..3> = |00>+|11>, |00>-|11>, |01>+|10>, |01>-|10> (normalized)."""
    s = 1 / math.sqrt(2)
    return np.array([[s, s, 0, 0], [0, 0, s, s], [0, 0, s, -s], [s, -s, 0, 0]], dtype=complex)


def bell_sort(p) -> tuple[np.ndarray, tuple[int, ...]]:
    """Sort Bell weights descending; ``order[i]`` is the user index of sorted slot ``i``."""
    p = _check_prob(p, 4)
    order = tuple(int(i) for i in np.argsort(-p, kind="stable"))
    return p[list(order)], order


def bell_diagonal(p0, p1=None, p2=None, p3=None) -> QuantumState:
    """Bell-diagonal two-qubit state in canonical (descending) weight order.

    Any permutation of the four weights is realized by local unitaries, so
    the sorted state carries the same entanglement; :func:`bell_sort` gives
    the permutation.
    """
    p = p0 if p1 is None else (p0, p1, p2, p3)
    q, _ = bell_sort(p)
    return _from_columns(bell_vectors(), q, PartyLayout((2, 2)), {"non_negative", "real"})


def dft(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def mcb_vectors(d: int, fourier: bool = True) -> np.ndarray:
    """Columns |Psi_k> = d^{-1/2} sum_j w^{kj} |jj>; with ``fourier`` mapped by F (x) F."""
    cols = np.zeros((d * d, d), dtype=complex)
    w = np.exp(2j * np.pi / d)
    for k in range(d):
        for j in range(d):
            cols[j * d + j, k] = w ** (k * j) / math.sqrt(d)
    if fourier:
        f = dft(d)
        cols = np.kron(f, f) @ cols
        cols[np.abs(cols) < 1e-15] = 0
        cols = cols.real.astype(complex)
    return cols


def mcb(d: int, p, fourier: bool = True) -> QuantumState:
    """Maximally correlated Bell-diagonal state of two qudits.

    With ``fourier`` (default) the simultaneous local Fourier transform is
    applied, which makes every matrix entry non-negative.
    """
    if d < 2:
        raise StateError("mcb needs d >= 2")
    p = _check_prob(p, d)
    tags = {"non_negative", "real"} if fourier else set()
    return _from_columns(mcb_vectors(d, fourier), p, PartyLayout((d, d)), tags)


def max_entangled(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1 / math.sqrt(d)
    return v


def isotropic(d: int, lam: float) -> QuantumState:
    if not 0 <= lam <= 1:
        raise StateError(f"isotropic weight must lie in [0, 1], got {lam}")
    psi = max_entangled(d)
    proj = np.outer(psi, psi.conj())
    rho = (1 - lam) / (d * d - 1) * (np.eye(d * d) - proj) + lam * proj
    tags = {"real"}
    if lam >= 1 / d ** 2:
        tags.add("non_negative")
    return QuantumState.mixed(rho, PartyLayout((d, d)), tags)


# -- symmetric families -----------------------------------------------------


def dicke_vector(n: int, k: Sequence[int]) -> np.ndarray:
    k = tuple(int(x) for x in k)
    d = len(k)
    if any(x < 0 for x in k) or sum(k) != n:
        raise StateError(f"occupation {k} does not sum to N = {n}")
    dig = _digits(d, n)
    counts = np.stack([(dig == j).sum(axis=1) for j in range(d)], axis=1)
    hit = np.all(counts == np.array(k), axis=1)
    v = hit.astype(complex)
    return v / math.sqrt(hit.sum())


def dicke(n: int, k: Sequence[int]) -> QuantumState:
    """Symmetric basis state |N, k>; ``k[j]`` parties occupy level ``j``."""
    return QuantumState.pure(dicke_vector(n, k), PartyLayout.uniform(len(k), n),
                             {"non_negative", "symmetric", "real"})


def dicke_mixture(n: int, terms: Sequence[tuple[int, float]]) -> QuantumState:
    """Qubit mixture sum_k w_k |N,k><N,k| where ``k`` counts parties in |0>."""
    ks = [int(k) for k, _ in terms]
    w = _check_prob([w for _, w in terms], name="weights")
    if any(k < 0 or k > n for k in ks):
        raise StateError(f"levels {ks} out of range for N = {n}")
    cols = np.stack([dicke_vector(n, (k, n - k)) for k in ks], axis=1)
    return _from_columns(cols, w, PartyLayout.uniform(2, n), {"non_negative", "symmetric", "real"})


def ghz(n: int, d: int = 2) -> QuantumState:
    v = np.zeros(d ** n, dtype=complex)
    step = sum(d ** j for j in range(n))
    v[[j * step for j in range(d)]] = 1 / math.sqrt(d)
    return QuantumState.pure(v, PartyLayout.uniform(d, n), {"non_negative", "symmetric", "real"})


# -- Smolin and Dur ---------------------------------------------------------


def smolin_from_paulis() -> np.ndarray:
    rho = np.eye(16, dtype=complex)
    for s in _PAULI:
        rho += kron_all([s] * 4)
    return rho / 16


def smolin_vectors() -> np.ndarray:
    s = 1 / math.sqrt(2)
    pairs = [("0000", "1111"), ("0011", "1100"), ("0101", "1010"), ("0110", "1001")]
    cols = np.zeros((16, 4), dtype=complex)
    for c, (a, b) in enumerate(pairs):
        cols[int(a, 2), c] = s
        cols[int(b, 2), c] = s
    return cols


def smolin() -> QuantumState:
    cols = smolin_vectors()
    mix = cols @ cols.conj().T / 4
    dev = np.max(np.abs(mix - smolin_from_paulis()))
    if dev > 1e-12:
        raise StateError(f"Smolin constructions disagree by {dev:.3g}")
    return QuantumState.mixed(mix, PartyLayout.uniform(2, 4), {"non_negative", "real"})


def dur_vectors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """GHZ vector and the 2N single-flip product vectors u_k, v_k as columns."""
    dim = 2 ** n
    g = np.zeros(dim, dtype=complex)
    g[0] = g[-1] = 1 / math.sqrt(2)
    flips = np.zeros((dim, 2 * n), dtype=complex)
    for k in range(n):
        bit = 1 << (n - 1 - k)
        flips[bit, 2 * k] = 1
        flips[(dim - 1) ^ bit, 2 * k + 1] = 1
    return g, flips


def dur(n: int, x: float) -> QuantumState:
    """x |GHZ><GHZ| + (1-x)/(2N) sum_k (P_k + Pbar_k) on N qubits."""
    if not 0 <= x <= 1:
        raise StateError(f"x must lie in [0, 1], got {x}")
    if n < 2:
        raise StateError("dur needs N >= 2")
    if n < 4:
        warnings.warn("Dur states are only bound entangled for N >= 4", stacklevel=2)
    g, flips = dur_vectors(n)
    cols = np.concatenate([g[:, None], flips], axis=1)
    w = [x] + [(1 - x) / (2 * n)] * (2 * n)
    return _from_columns(cols, w, PartyLayout.uniform(2, n), {"non_negative", "real"})


# -- antisymmetric families -------------------------------------------------


def antisym_projector_state(d: int, n: int) -> QuantumState:
    """rho_{d,N} = P_{d,N} / binom(d, N)."""
    if n < 2 or n > d:
        raise StateError(f"need 2 <= N <= d, got d={d}, N={n}")
    w = antisym_basis(d, n).astype(complex) / math.sqrt(math.comb(d, n))
    return QuantumState.from_factor(w, PartyLayout.uniform(d, n), {"antisymmetric", "real"})


def antisym_basis_state(n: int) -> QuantumState:
    """|psi_{N-}> = |0> ^ |1> ^ ... ^ |N-1>."""
    v = antisym_basis(n, n)[:, 0]
    return QuantumState.pure(v, PartyLayout.uniform(n, n), {"antisymmetric", "real"})


def generalized_antisym(d: int, p: int, k: int) -> QuantumState:
    """k blocks of p qudits antisymmetrized over the first k block basis states.

    Block basis state ``m`` is the p-tuple of base-``d`` digits of ``m``.
    """
    if k > d ** p or k < 1:
        raise StateError(f"need 1 <= k <= d^p, got d={d}, p={p}, k={k}")
    big = d ** p
    v = np.zeros(big ** k, dtype=complex)
    scale = 1 / math.sqrt(math.factorial(k))
    for perm in itertools.permutations(range(k)):
        idx = 0
        for m in perm:
            idx = idx * big + m
        v[idx] = permutation_parity(perm) * scale
    return QuantumState.pure(v, PartyLayout.uniform(d, p * k), {"real"})


def block_permutation_product(d: int, p: int, k: int) -> list[tuple[np.ndarray, ...]]:
    """Product vectors |phi(s(1)),...,phi(s(k))> for every permutation s of 0..k-1."""
    out = []
    for perm in itertools.permutations(range(k)):
        vecs = []
        for m in perm:
            digits = [(m // d ** (p - 1 - t)) % d for t in range(p)]
            vecs += [_basis(d, x) for x in digits]
        out.append(tuple(vecs))
    return out


def product_basis(dims: Sequence[int], index: Sequence[int]) -> QuantumState:
    dims = tuple(int(x) for x in dims)
    vecs = [_basis(d, int(i)) for d, i in zip(dims, index, strict=True)]
    return QuantumState.pure(kron_all(vecs), PartyLayout(dims), {"non_negative", "real"})


# -- family specs -----------------------------------------------------------


class SpecParseError(ValueError):
    """Family-string parse failure with the offending character position."""

    def __init__(self, message: str, text: str, position: int):
        self.message = message
        self.text = text
        self.position = position
        caret = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {caret}")


_SCHEMA: dict[str, tuple[tuple[str, str], ...]] = {
    # name -> ((key, type), ...) where type is int, num, ints, nums
    "bell": (("p", "nums"),),
    "mcb": (("d", "int"), ("p", "nums")),
    "iso": (("d", "int"), ("lambda", "num")),
    "dicke": (("N", "int"), ("k", "ints")),
    "dmix": (("N", "int"), ("k", "ints"), ("w", "nums")),
    "smolin": (),
    "dur": (("N", "int"), ("x", "num")),
    "asp": (("d", "int"), ("N", "int")),
    "asb": (("N", "int"),),
    "gas": (("d", "int"), ("p", "int"), ("k", "int")),
    "ghz": (("N", "int"), ("d", "int")),
    "prod": (("dims", "ints"), ("index", "ints")),
}

_DEFAULTS = {"ghz": {"d": 2}}

FAMILY_NAMES = {
    "bell": "BellDiagonal", "mcb": "MCB", "iso": "Isotropic", "dicke": "Dicke",
    "dmix": "DickeMixture", "smolin": "Smolin", "dur": "Dur", "asp": "AntisymProjectorState",
    "asb": "AntisymBasis", "gas": "GeneralizedAntisym", "ghz": "GHZ", "prod": "ProductBasis",
}


def _fmt_num(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _as_float(x) -> float:
    return float(x)


@dataclass(frozen=True)
class FamilySpec:
    """A named family with its parameters.

    ``params`` values are ints, floats/Fractions, or tuples of those.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _SCHEMA:
            raise StateError(f"unknown family {self.family!r}")
        params = dict(_DEFAULTS.get(self.family, {}))
        params.update(self.params)
        keys = [k for k, _ in _SCHEMA[self.family]]
        missing = [k for k in keys if k not in params]
        extra = [k for k in params if k not in keys]
        if missing or extra:
            raise StateError(f"{self.family}: missing {missing}, unexpected {extra}")
        for key, kind in _SCHEMA[self.family]:
            params[key] = _coerce(params[key], kind, key)
        object.__setattr__(self, "params", params)
        self._check()

    def _check(self) -> None:
        p = self.params
        f = self.family
        if f == "bell":
            _check_prob([_as_float(x) for x in p["p"]], 4)
        elif f == "mcb":
            _check_prob([_as_float(x) for x in p["p"]], p["d"])
        elif f == "iso":
            if not 0 <= p["lambda"] <= 1:
                raise StateError("isotropic lambda must lie in [0, 1]")
        elif f == "dicke":
            if sum(p["k"]) != p["N"] or min(p["k"]) < 0:
                raise StateError("dicke occupations must be non-negative and sum to N")
        elif f == "dmix":
            if len(p["k"]) != len(p["w"]):
                raise StateError("dmix needs one weight per level")
            _check_prob([_as_float(x) for x in p["w"]], name="w")
        elif f == "dur":
            if not 0 <= p["x"] <= 1:
                raise StateError("dur x must lie in [0, 1]")
        elif f == "asp":
            if not 2 <= p["N"] <= p["d"]:
                raise StateError("asp needs 2 <= N <= d")
        elif f == "gas":
            if p["k"] > p["d"] ** p["p"]:
                raise StateError("gas needs k <= d^p")

    # -- grammar --

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        return parse_spec(text)

    def to_string(self) -> str:
        schema = _SCHEMA[self.family]
        if not schema:
            return self.family
        parts = []
        for key, kind in schema:
            val = self.params[key]
            if kind in ("ints", "nums"):
                sval = ";".join(_fmt_num(x) for x in val)
            else:
                sval = _fmt_num(val)
            parts.append(f"{key}={sval}")
        return f"{self.family}:" + ",".join(parts)

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, tuple):
                return [enc(y) for y in x]
            if isinstance(x, Fraction):
                return str(x)
            return x

        return {"family": self.family, "name": FAMILY_NAMES[self.family],
                "params": {k: enc(v) for k, v in self.params.items()}}

    @classmethod
    def from_json(cls, doc: dict | str) -> "FamilySpec":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["family"], dict(doc["params"]))

    def __str__(self) -> str:
        return self.to_string()

    # -- construction --

    def build(self) -> QuantumState:
        p = self.params
        f = self.family
        if f == "bell":
            return bell_diagonal([_as_float(x) for x in p["p"]])
        if f == "mcb":
            return mcb(p["d"], [_as_float(x) for x in p["p"]])
        if f == "iso":
            return isotropic(p["d"], _as_float(p["lambda"]))
        if f == "dicke":
            return dicke(p["N"], p["k"])
        if f == "dmix":
            return dicke_mixture(p["N"], list(zip(p["k"], [_as_float(w) for w in p["w"]])))
        if f == "smolin":
            return smolin()
        if f == "dur":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return dur(p["N"], _as_float(p["x"]))
        if f == "asp":
            return antisym_projector_state(p["d"], p["N"])
        if f == "asb":
            return antisym_basis_state(p["N"])
        if f == "gas":
            return generalized_antisym(p["d"], p["p"], p["k"])
        if f == "ghz":
            return ghz(p["N"], p["d"])
        if f == "prod":
            return product_basis(p["dims"], p["index"])
        raise AssertionError(f)


def _coerce(val, kind: str, key: str):
    if kind == "int":
        if isinstance(val, (list, tuple)):
            raise StateError(f"{key} takes a single integer")
        if isinstance(val, float) and not val.is_integer():
            raise StateError(f"{key} must be an integer, got {val}")
        return int(val)
    if kind == "num":
        if isinstance(val, (list, tuple)):
            raise StateError(f"{key} takes a single number")
        return _num(val)
    seq = val if isinstance(val, (list, tuple)) else (val,)
    if kind == "ints":
        return tuple(_coerce(x, "int", key) for x in seq)
    return tuple(_num(x) for x in seq)


def _num(x):
    if isinstance(x, str):
        return Fraction(x) if "/" in x else float(x)
    if isinstance(x, (int, Fraction)):
        return x
    return float(x)


_TOKEN_NUM = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?")


def _parse_value(text: str, start: int, end: int, full: str):
    """Parse ``a;b;c`` between ``start`` and ``end`` into a list of numbers."""
    items = []
    pos = start
    for chunk in text[start:end].split(";"):
        stripped = chunk.strip()
        off = pos + (len(chunk) - len(chunk.lstrip()))
        m = _TOKEN_NUM.fullmatch(stripped)
        if not stripped or m is None:
            raise SpecParseError(f"expected a number, got {stripped!r}", full, off)
        if "/" in stripped:
            num = Fraction(stripped)
            if num.denominator == 1:
                num = int(num)
        elif re.fullmatch(r"[+-]?\d+", stripped):
            num = int(stripped)
        else:
            num = float(stripped)
        items.append(num)
        pos += len(chunk) + 1
    return items


def parse_spec(text: str) -> FamilySpec:
    """Parse a family string; raises :class:`SpecParseError` on malformed input."""
    full = text
    name, sep, rest = text.partition(":")
    name_s = name.strip()
    if name_s not in _SCHEMA:
        raise SpecParseError(f"unknown family {name_s!r}", full, len(name) - len(name.lstrip()))
    schema = _SCHEMA[name_s]
    offset = len(name) + len(sep)
    params: dict[str, Any] = {}
    if not sep or not rest.strip():
        if schema and name_s not in _DEFAULTS:
            raise SpecParseError(f"family {name_s!r} needs arguments", full, len(full))
        if schema:
            raise SpecParseError(f"family {name_s!r} needs arguments", full, len(full))
        return FamilySpec(name_s, {})
    positional: list = []
    pos = offset
    for arg in rest.split(","):
        a_start = pos
        if "=" in arg:
            key, _, _ = arg.partition("=")
            k = key.strip()
            keys = [s for s, _ in schema]
            if k not in keys:
                raise SpecParseError(f"unknown parameter {k!r} for {name_s}", full, a_start)
            if k in params:
                raise SpecParseError(f"duplicate parameter {k!r}", full, a_start)
            v_start = a_start + len(key) + 1
            params[k] = _parse_value(full, v_start, a_start + len(arg), full)
        else:
            if params:
                raise SpecParseError("positional value after keyword", full, a_start)
            positional += _parse_value(full, a_start, a_start + len(arg), full)
        pos += len(arg) + 1
    if positional:
        if len(schema) != 1:
            raise SpecParseError(f"{name_s} takes keyword arguments", full, offset)
        params[schema[0][0]] = positional
    # collapse single-element lists for scalar parameters
    for key, kind in schema:
        if key in params and kind in ("int", "num"):
            vals = params[key]
            if len(vals) != 1:
                raise SpecParseError(f"{key} takes a single value", full, offset)
            params[key] = vals[0]
    try:
        return FamilySpec(name_s, params)
    except StateError as exc:
        raise SpecParseError(str(exc), full, offset) from None


# -- closed forms -----------------------------------------------------------


def dicke_lambda_sq(n: int, k: Sequence[int]) -> float:
    """N!/prod k_j! * prod (k_j/N)^k_j with 0^0 = 1."""
    val = math.factorial(n)
    for kj in k:
        val /= math.factorial(kj)
        if kj:
            val *= (kj / n) ** kj
    return val


def dicke_mixture_lambda_sq(n: int, terms: Sequence[tuple[int, float]]) -> tuple[float, float]:
    """Maximize sum_k w_k C(N,k) c^(2k) s^(2(N-k)) over the angle; returns (value, c^2).

    The objective is a polynomial in t = cos^2(theta); all stationary points
    and both endpoints are compared.
    """
    poly = np.polynomial.Polynomial([0.0])
    t = np.polynomial.Polynomial([0.0, 1.0])
    for k, w in terms:
        poly = poly + float(w) * math.comb(n, k) * t ** int(k) * (1 - t) ** (n - int(k))
    cands = [0.0, 1.0]
    for r in poly.deriv().roots():
        if abs(r.imag) < 1e-12 and 0 <= r.real <= 1:
            cands.append(float(r.real))
    vals = [float(poly(c)) for c in cands]
    i = int(np.argmax(vals))
    return vals[i], cands[i]


def dur_lambda_sq(n: int, x: float) -> float:
    return (1 - x) / (2 * n) if x <= 1 / (n + 1) else x / 2


def isotropic_lambda_sq(d: int, lam: float) -> float:
    base = (1 - lam) / (d * d - 1)
    return base + max(0.0, (lam - base) / d)


def closed_form(spec: FamilySpec, measure: str, copies: int = 1):
    """Known analytic value in bits, or ``"unknown"``.

    ``measure`` is one of ``GM``, ``REE``, ``LGR``; ``copies`` is 1 or 2.
    """
    measure = measure.upper()
    if measure not in ("GM", "REE", "LGR"):
        raise ValueError(f"unknown measure {measure!r}")
    if copies not in (1, 2):
        raise ValueError("copies must be 1 or 2")
    val = _closed_form(spec, measure, copies)
    if val is UNKNOWN:
        return UNKNOWN
    return float(val) + 0.0


def _closed_form(spec: FamilySpec, measure: str, copies: int):
    p = spec.params
    f = spec.family
    lg = math.log2
    # families whose measures are additive over two copies
    doubled = copies == 2

    if f == "bell":
        q, _ = bell_sort([float(x) for x in p["p"]])
        if measure == "GM":
            one = 1 - lg(q[0] + q[1])
        elif measure == "REE":
            one = 0.0 if q[0] <= 0.5 else 1 - _h2(q[0])
        else:
            if doubled:
                return UNKNOWN
            one = lg(2 * q[0]) if q[0] >= 0.5 else 0.0
        return 2 * one if doubled else one
    if f == "mcb":
        d = p["d"]
        q = [float(x) for x in p["p"]]
        if measure == "LGR":
            return UNKNOWN
        one = lg(d) if measure == "GM" else lg(d) - shannon(q)
        return 2 * one if doubled else one
    if f == "iso":
        d, lam = p["d"], float(p["lambda"])
        if measure == "GM":
            one = -lg(isotropic_lambda_sq(d, lam))
        elif measure == "REE":
            if lam <= 1 / d:
                one = 0.0
            else:
                one = lg(d) + lam * lg(lam) + ((1 - lam) * lg((1 - lam) / (d - 1)) if lam < 1 else 0.0)
        else:
            if doubled:
                return UNKNOWN
            one = lg(d * lam) if lam >= 1 / d else 0.0
        return 2 * one if doubled else one
    if f == "dicke":
        one = -lg(dicke_lambda_sq(p["N"], p["k"]))
        return 2 * one if doubled else one
    if f == "dmix":
        if measure != "GM":
            return UNKNOWN
        val, _ = dicke_mixture_lambda_sq(p["N"], list(zip(p["k"], [float(w) for w in p["w"]])))
        one = -lg(val)
        return 2 * one if doubled else one
    if f == "smolin":
        one = {"GM": 3.0, "REE": 1.0, "LGR": 1.0}[measure]
        return 2 * one if doubled else one
    if f == "dur":
        n, x = p["N"], float(p["x"])
        if measure == "LGR" or n < 4:
            return UNKNOWN
        one = -lg(dur_lambda_sq(n, x)) if measure == "GM" else x
        return 2 * one if doubled else one
    if f in ("asp", "asb"):
        d, n = (p["d"], p["N"]) if f == "asp" else (p["N"], p["N"])
        return asp_values(d, d, n)[(measure, copies)]
    if f == "gas":
        d, pp, k = p["d"], p["p"], p["k"]
        if not doubled:
            return lg(math.factorial(k))
        if measure == "GM" and k == d ** pp:
            return k * lg(k)
        return UNKNOWN
    if f == "ghz":
        one = lg(p["d"])
        return 2 * one if doubled else one
    if f == "prod":
        return 0.0
    raise AssertionError(f)


def asp_values(d1: int, d2: int, n: int) -> dict:
    """GM/REE/LGR of rho_{d1,N} (one copy) and rho_{d1,N} (x) rho_{d2,N} (two copies)."""
    if not (n <= d1 <= d2):
        raise StateError(f"need N <= d1 <= d2, got N={n}, d1={d1}, d2={d2}")
    lg = math.log2
    f = math.factorial
    single_g = lg(f(d1) / f(d1 - n))
    single_r = lg(f(n))
    two_g = lg(d1 ** n * f(d2) / (f(n) * f(d2 - n)))
    two_r = lg(d1 ** n * f(n) * f(d1 - n) / f(d1))
    return {
        ("GM", 1): single_g, ("REE", 1): single_r, ("LGR", 1): single_r,
        ("GM", 2): two_g, ("REE", 2): two_r, ("LGR", 2): two_r,
    }
