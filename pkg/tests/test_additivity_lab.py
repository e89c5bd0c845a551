import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_mixed, random_pure
from entadd import state_zoo as z
from entadd.additivity_lab import (
    CorrelationMatrixAnsatz, additivity_gap, asp_closed_forms, max_entangled_pair_overlap, optimal_V,
    overlap_identity, product_upper_bound, two_copy_gm_via_V, v_objective,
)
from entadd.tensor_core import PartyLayout, QuantumState, StateError


def ginibre_v(rng, d):
    v = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return v * math.sqrt(d) / np.linalg.norm(v)


@pytest.mark.parametrize("dims", [(2, 2), (3, 3), (2, 2, 2)])
def test_overlap_identity_agrees_with_direct_overlap(dims, rng):
    for _ in range(50):
        a = random_mixed(dims, rng, rank=int(rng.integers(1, 4)))
        b = random_mixed(dims, rng, rank=int(rng.integers(1, 4)))
        vs = [ginibre_v(rng, d) for d in dims]
        # debug mode raises if the two sides differ by more than 1e-10
        overlap_identity(a, b, vs, debug=True)


def test_overlap_identity_examples():
    zero = z.product_basis((2, 3, 2), (0, 0, 0))
    assert overlap_identity(zero, zero, [np.eye(d) for d in (2, 3, 2)]) == pytest.approx(1 / 12, abs=1e-14)
    p32 = z.antisym_projector_state(3, 2)
    u = np.linalg.qr(np.array([[1, 2, 0], [0, 1, 3], [1, 0, 1j]]))[0]
    # elementary symmetric polynomial with all eigenvalues 1: C(3,2) / 3^2 / 9 = 1/27
    assert overlap_identity(p32, p32, [u, u]) == pytest.approx(math.comb(3, 2) / 9 / 9, abs=1e-12)


def test_overlap_identity_rejects_bad_v():
    s = z.bell_diagonal([1, 0, 0, 0])
    with pytest.raises(ValueError):
        overlap_identity(s, s, [np.eye(2), 2 * np.eye(2)])
    with pytest.raises(ValueError):
        CorrelationMatrixAnsatz(np.eye(3) * 2)


def test_correlation_ansatz_vector_normalized(rng):
    a = CorrelationMatrixAnsatz(ginibre_v(rng, 3))
    assert np.linalg.norm(a.vector()) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(CorrelationMatrixAnsatz.from_vector(a.vector()).V, a.V, atol=1e-12)


def test_singlet_pair_witness():
    singlet = z.generalized_antisym(2, 1, 2)
    assert max_entangled_pair_overlap(singlet) == pytest.approx(0.25, abs=1e-12)
    r = two_copy_gm_via_V(singlet)
    assert r.lambda_sq >= 0.25 - 1e-8


@pytest.mark.parametrize("d,n", [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3)])
def test_two_copy_antisym_projector(d, n):
    s = z.antisym_projector_state(d, n)
    r = two_copy_gm_via_V(s)
    assert r.gm_bits == pytest.approx(asp_closed_forms(d, d, n)["two_copy"]["GM"], abs=1e-4)
    assert r.gm_bits <= product_upper_bound(s) + 1e-8


def test_two_copy_antisym_basis_state():
    r = two_copy_gm_via_V(z.antisym_basis_state(3))
    assert r.gm_bits == pytest.approx(3 * math.log2(3), abs=1e-4)


@pytest.mark.parametrize("d,n", [(3, 2), (3, 3), (4, 2)])
def test_optimal_v_is_unitary_and_stationary(d, n, rng):
    s = z.antisym_projector_state(d, n)
    v = optimal_V(two_copy_gm_via_V(s, opts=None))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-6)
    f0 = v_objective(s, s, v)
    for _ in range(20):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        x /= np.linalg.norm(x)
        assert v_objective(s, s, v + 1e-3 * x) <= f0 + 1e-7


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1))
def test_two_copy_below_product_bound(seed):
    rng = np.random.default_rng(seed)
    a = random_mixed((2, 2, 2), rng, rank=2)
    b = random_mixed((2, 2, 2), rng, rank=2)
    r = two_copy_gm_via_V(a, b)
    assert r.gm_bits <= product_upper_bound(a, b) + 1e-8


def test_product_upper_bound_examples(rng):
    psi = random_pure((2, 3), rng, real=True)
    assert product_upper_bound(psi) == pytest.approx(math.log2(6), abs=1e-12)
    mixed = QuantumState.mixed(np.eye(4) / 4, PartyLayout((2, 2)))
    assert product_upper_bound(mixed) == pytest.approx(4.0, abs=1e-12)
    p32 = z.antisym_projector_state(3, 2)
    assert product_upper_bound(p32) == pytest.approx(math.log2(27), abs=1e-12)
    orth = QuantumState.pure(np.array([1, 0, 0, 0]), PartyLayout((2, 2)))
    other = QuantumState.pure(np.array([0, 1, 0, 0]), PartyLayout((2, 2)))
    assert product_upper_bound(orth, other) == math.inf


def test_unequal_dims_rejected():
    s = z.product_basis((2, 3), (0, 0))
    with pytest.raises(StateError):
        two_copy_gm_via_V(s)
    with pytest.raises(StateError):
        product_upper_bound(s, z.product_basis((3, 2), (0, 0)))


# -- gaps --

def test_smolin_gap():
    r = additivity_gap(z.smolin(), z.smolin(), "GM")
    assert r.value_joint == pytest.approx(6.0, abs=1e-4)
    assert abs(r.gap) <= 1e-4
    assert r.classification == "additive_within_tol"


def test_antisym_gap():
    s = z.antisym_projector_state(3, 2)
    r = additivity_gap(s, s, "GM")
    assert r.gap == pytest.approx(math.log2(27) - 2 * math.log2(6), abs=1e-4)
    assert r.classification == "subadditive_gap"


def test_dicke_gap():
    s = z.dicke(3, (2, 1))
    r = additivity_gap(s, s, "GM")
    assert abs(r.gap) <= 1e-4
    assert r.classification == "additive_within_tol"


@settings(max_examples=6)
@given(st.integers(0, 2**31 - 1))
def test_gm_gap_never_positive(seed):
    rng = np.random.default_rng(seed)
    r = additivity_gap(random_mixed((2, 2), rng, rank=2), random_pure((2, 2), rng), "GM")
    assert r.gap <= r.tol
    doc = r.to_json()
    assert doc["classification"] in ("additive_within_tol", "subadditive_gap", "inconclusive")


def test_lgr_gap_bell_pair():
    b = z.bell_diagonal([1, 0, 0, 0])
    r = additivity_gap(b, b, "LGR")
    assert r.value_joint == pytest.approx(2.0, abs=1e-4)
    assert abs(r.gap) <= 1e-3


def test_unknown_measure():
    with pytest.raises(ValueError):
        additivity_gap(z.smolin(), z.smolin(), "negativity")


# -- closed forms --

def test_asp_closed_forms():
    r = asp_closed_forms(3, 3, 2)
    assert r["two_copy"]["REE"] == pytest.approx(math.log2(3), abs=1e-12)
    r4 = asp_closed_forms(3, 4, 2)
    assert r4["two_copy"]["REE"] == pytest.approx(r["two_copy"]["REE"], abs=1e-12)
    assert r4["ree_independent_of_d2"]
    for n in (2, 3, 4):
        assert asp_closed_forms(n, n, n)["single"]["GM"] == pytest.approx(math.log2(math.factorial(n)), abs=1e-12)
