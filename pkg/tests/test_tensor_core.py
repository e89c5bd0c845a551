import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_mixed, random_pure, random_unitary
from entadd import state_zoo as z
from entadd.tensor_core import (
    PartyLayout, QuantumState, StateError, antisym_projector, entropy, partial_trace, permute_parties,
    product_state, purity, slater_rank_check, state_from_json, state_to_json, tensor_merge, wedge,
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


# -- QuantumState validation --

def test_pure_state_must_be_normalized():
    with pytest.raises(StateError):
        QuantumState.pure(np.array([1.0, 1.0]), PartyLayout((2,)))


def test_mixed_state_must_be_psd():
    with pytest.raises(StateError):
        QuantumState.mixed(np.diag([1.5, -0.5]), PartyLayout((2,)))


def test_false_non_negative_tag_is_rejected():
    v = np.array([1, 0, 0, -1]) / math.sqrt(2)
    with pytest.raises(StateError):
        QuantumState.pure(v, PartyLayout((2, 2)), {"non_negative"})


def test_json_round_trip(rng):
    s = random_mixed((2, 3), rng, rank=2)
    back = state_from_json(state_to_json(s))
    assert back.layout == s.layout
    np.testing.assert_allclose(back.matrix, s.matrix, atol=1e-14)


# -- tensor_merge --

def test_merge_single_party_qubits():
    a = product_state([KET0])
    m = tensor_merge(a, a)
    assert m.layout.dims == (4,)
    np.testing.assert_allclose(m.vector, [1, 0, 0, 0])


def test_merge_ghz_copies_is_pure_with_dim4_parties():
    g = z.ghz(3)
    m = tensor_merge(g, g)
    assert m.layout.dims == (4, 4, 4)
    assert m.is_pure
    assert purity(m) == pytest.approx(1.0, abs=1e-12)


def test_merge_matches_naive_kron_plus_permutation():
    r = z.antisym_projector_state(3, 2)
    m = tensor_merge(r, r)
    assert m.layout.dims == (9, 9)
    assert np.trace(m.matrix).real == pytest.approx(1.0, abs=1e-12)
    # oracle: 4-party kron ordered (A1, B1, A2, B2), then regroup as (A1 A2)(B1 B2)
    naive = np.kron(r.matrix, r.matrix).reshape([3] * 8)
    naive = naive.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(81, 81)
    np.testing.assert_allclose(m.matrix, naive, atol=1e-12)


def test_merge_index_convention():
    # merged index is i_a * d_b + i_b
    a = product_state([np.array([0, 1, 0])])
    b = product_state([np.array([0, 0, 1, 0])])
    m = tensor_merge(a, b)
    assert int(np.argmax(np.abs(m.vector))) == 1 * 4 + 2


def test_merge_errors():
    with pytest.raises(StateError):
        tensor_merge(z.ghz(2), z.ghz(3))
    with pytest.raises(StateError):
        tensor_merge(z.ghz(3), z.ghz(3), max_dim=32)


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_merge_then_trace_out_recovers_factor(seed, dims):
    rng = np.random.default_rng(seed)
    a = random_mixed(dims, rng, rank=2)
    b = random_pure(dims, rng)
    m = tensor_merge(a, b)
    # splitting every merged party back into (a_j, b_j) and tracing b gives a
    t = m.matrix.reshape(sum([[x, y] for x, y in zip(dims, dims)], []) * 2)
    n = len(dims)
    a_axes = [2 * j for j in range(n)]
    b_axes = [2 * j + 1 for j in range(n)]
    t = t.transpose(a_axes + b_axes + [2 * n + k for k in a_axes] + [2 * n + k for k in b_axes])
    da = int(np.prod(dims))
    red = np.einsum("ijkj->ik", t.reshape(da, da, da, da))
    np.testing.assert_allclose(red, a.matrix, atol=1e-10)


# -- partial_trace --

def test_partial_trace_ghz():
    r = partial_trace(z.ghz(3), ["A", "B"])
    np.testing.assert_allclose(r.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-14)


def test_partial_trace_slater_one_party_is_maximally_mixed():
    r = partial_trace(z.antisym_basis_state(3), ["A"])
    np.testing.assert_allclose(r.matrix, np.eye(3) / 3, atol=1e-14)


def test_partial_trace_dicke_entropy():
    r = partial_trace(z.dicke(3, (2, 1)), ["B", "C"])
    assert entropy(r) == pytest.approx(z.shannon([2 / 3, 1 / 3]), abs=1e-12)


def test_partial_trace_errors():
    with pytest.raises(StateError):
        partial_trace(z.ghz(3), [])
    with pytest.raises(StateError):
        partial_trace(z.ghz(3), ["Z"])


@given(st.integers(0, 2 ** 31 - 1))
def test_partial_trace_preserves_trace(seed):
    s = random_mixed((2, 3, 2), np.random.default_rng(seed), rank=3)
    assert np.trace(partial_trace(s, ["B"]).matrix).real == pytest.approx(1.0, abs=1e-12)


# -- permute_parties --

def test_identity_permutation_is_bitwise_identical():
    s = z.dicke(3, (2, 1))
    assert np.array_equal(permute_parties(s, [0, 1, 2]).vector, s.vector)


def test_swap_01_to_10():
    s = permute_parties(product_state([KET0, KET1]), [1, 0])
    np.testing.assert_allclose(s.vector, product_state([KET1, KET0]).vector)


def test_smolin_is_permutation_invariant():
    s = z.smolin()
    for perm in itertools.permutations(range(4)):
        np.testing.assert_allclose(permute_parties(s, perm).matrix, s.matrix, atol=1e-12)


def test_invalid_permutation():
    with pytest.raises(StateError):
        permute_parties(z.ghz(3), [0, 0, 1])


@given(st.integers(0, 2 ** 31 - 1), st.permutations([0, 1, 2]))
def test_permutation_preserves_spectrum(seed, perm):
    s = random_mixed((2, 3, 2), np.random.default_rng(seed), rank=4)
    p = permute_parties(s, perm)
    np.testing.assert_allclose(np.linalg.eigvalsh(p.matrix), np.linalg.eigvalsh(s.matrix), atol=1e-10)


# -- wedge and the antisymmetric projector --

def test_wedge_singlet():
    w = wedge([KET0, KET1])
    assert w.norm == pytest.approx(1.0)
    np.testing.assert_allclose(w.vector, [0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0], atol=1e-15)


def test_wedge_dependent_is_zero():
    assert wedge([KET0, KET0]).norm < 1e-12


def test_wedge_norm_explicit_sum():
    b = (KET0 + KET1) / math.sqrt(2)
    w = wedge([KET0, b])
    # explicit antisymmetrization oracle
    ref = (np.kron(KET0, b) - np.kron(b, KET0)) / math.sqrt(2)
    np.testing.assert_allclose(w.vector, ref, atol=1e-15)
    assert w.norm == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_wedge_too_many_vectors():
    with pytest.raises(StateError):
        wedge([KET0, KET1, KET0])


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([(2, 3), (3, 3), (3, 4), (2, 5)]))
def test_wedge_norm_is_sqrt_gram_det(seed, nd):
    n, d = nd
    rng = np.random.default_rng(seed)
    vs = [rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(n)]
    vs = [v / np.linalg.norm(v) for v in vs]
    gram = np.array([[np.vdot(a, b) for b in vs] for a in vs])
    assert wedge(vs).norm == pytest.approx(math.sqrt(abs(np.linalg.det(gram))), abs=1e-10)


@pytest.mark.parametrize("d,n,tr", [(2, 2, 1), (3, 2, 3), (4, 3, 4)])
def test_antisym_projector_trace_and_idempotence(d, n, tr):
    p = antisym_projector(d, n).matrix
    assert np.trace(p) == pytest.approx(tr, abs=1e-8)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)


def test_antisym_projector_commutes_with_collective_unitaries(rng):
    p = antisym_projector(3, 2).matrix
    for _ in range(20):
        u = random_unitary(rng, 3)
        uu = np.kron(u, u)
        np.testing.assert_allclose(uu @ p, p @ uu, atol=1e-10)


def test_antisym_projector_needs_n_le_d():
    with pytest.raises(StateError):
        antisym_projector(2, 3)


# -- Slater rank --

def test_slater_rank_examples(rng):
    assert slater_rank_check(z.antisym_basis_state(3))
    e = np.eye(4)
    v = wedge([e[0], e[1]]).vector + wedge([e[2], e[3]]).vector
    s = QuantumState.pure(v / np.linalg.norm(v), PartyLayout.uniform(4, 2), {"antisymmetric"})
    assert not slater_rank_check(s)
    q = random_unitary(rng, 5)
    assert slater_rank_check(wedge([q[:, 0], q[:, 1]]).state())


def test_slater_rank_rejects_non_antisymmetric():
    with pytest.raises(StateError):
        slater_rank_check(z.ghz(2))


# -- entropy --

def test_entropy_examples():
    assert entropy(z.ghz(3)) == 0.0
    assert entropy(z.smolin()) == pytest.approx(2.0, abs=1e-12)
    assert entropy(z.antisym_projector_state(3, 2)) == pytest.approx(math.log2(3), abs=1e-12)
