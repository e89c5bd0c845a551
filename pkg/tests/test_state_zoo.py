import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entadd import state_zoo as z
from entadd.gm_solver import gm
from entadd.state_zoo import UNKNOWN, FamilySpec, SpecParseError, closed_form, parse_spec
from entadd.tensor_core import StateError, antisym_projector, entropy, partial_trace


def ket(bits: str, d: int = 2) -> np.ndarray:
    v = np.zeros(d ** len(bits), dtype=complex)
    v[int(bits, d)] = 1
    return v


def dicke_by_permutations(n: int, k) -> np.ndarray:
    # oracle: sum over distinct orderings of the occupation string
    letters = "".join(str(j) * kj for j, kj in enumerate(k))
    v = sum(ket("".join(p), len(k)) for p in set(itertools.permutations(letters)))
    return v / np.linalg.norm(v)


# -- Bell diagonal --

def test_bell_pure_endpoint_has_gm_one():
    assert gm(z.bell_diagonal([1, 0, 0, 0])).gm_bits == pytest.approx(1.0, abs=1e-8)


def test_bell_overlap_from_sorted_weights():
    assert gm(z.bell_diagonal([0.7, 0.1, 0.1, 0.1])).lambda_sq == pytest.approx(0.4, abs=1e-8)


def test_bell_uniform_is_maximally_mixed():
    np.testing.assert_allclose(z.bell_diagonal([0.25] * 4).matrix, np.eye(4) / 4, atol=1e-14)


def test_bell_is_canonicalized_and_non_negative():
    s = z.bell_diagonal([0.1, 0.2, 0.6, 0.1])
    assert "non_negative" in s.tags
    q, perm = z.bell_sort([0.1, 0.2, 0.6, 0.1])
    assert list(q) == sorted(q, reverse=True)
    assert sorted(perm) == [0, 1, 2, 3]


@pytest.mark.parametrize("p", [[0.5, 0.5, 0.1, -0.1], [0.5, 0.5]])
def test_bell_rejects_bad_weights(p):
    with pytest.raises(StateError):
        z.bell_diagonal(p)


# -- MCB and isotropic --

def test_mcb_bell_endpoint():
    s = z.mcb(2, [1, 0])
    bell = (ket("00") + ket("11")) / math.sqrt(2)
    # the stored state is Fourier-rotated; its spectrum and GM identify it
    assert s.is_pure or np.linalg.matrix_rank(s.matrix, tol=1e-9) == 1
    assert gm(s).gm_bits == pytest.approx(1.0, abs=1e-8)
    assert gm(z.mcb(2, [1, 0], fourier=False)).gm_bits == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(z.mcb(2, [1, 0], fourier=False).matrix, np.outer(bell, bell.conj()), atol=1e-14)


def test_mcb_overlap_is_one_over_d(rng):
    p = rng.dirichlet(np.ones(3))
    assert gm(z.mcb(3, p)).lambda_sq == pytest.approx(1 / 3, abs=1e-8)
    assert "non_negative" in z.mcb(3, p).tags


def test_mcb_ree_closed_form():
    spec = parse_spec("mcb:d=3,p=1/2;1/4;1/4")
    assert closed_form(spec, "REE") == pytest.approx(math.log2(3) - 1.5, abs=1e-12)
    assert closed_form(spec, "REE") == pytest.approx(0.0850, abs=1e-4)


def test_isotropic_examples():
    assert gm(z.isotropic(2, 1.0)).gm_bits == pytest.approx(1.0, abs=1e-8)
    assert closed_form(parse_spec("iso:d=3,lambda=1/3"), "LGR") == 0.0
    assert gm(z.isotropic(3, 2 / 3)).lambda_sq == pytest.approx(0.25, abs=1e-8)
    with pytest.raises(StateError):
        z.isotropic(3, 1.2)


# -- Dicke --

def test_dicke_examples():
    assert gm(z.dicke(3, (2, 1))).gm_bits == pytest.approx(math.log2(9 / 4), abs=1e-8)
    np.testing.assert_allclose(z.dicke(2, (1, 1)).vector, (ket("01") + ket("10")) / math.sqrt(2), atol=1e-15)
    assert gm(z.dicke(4, (2, 2))).gm_bits == pytest.approx(math.log2(8 / 3), abs=1e-8)
    with pytest.raises(StateError):
        z.dicke(3, (2, 2))


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("d", range(2, 5))
def test_dicke_matches_permutation_sum(n, d):
    for k in itertools.product(range(n + 1), repeat=d):
        if sum(k) != n or d ** n > 4096:
            continue
        v = z.dicke(n, k).vector
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        if n <= 5:
            np.testing.assert_allclose(v, dicke_by_permutations(n, k), atol=1e-12)


def test_dicke_mixture_examples():
    w_tilde = (ket("011") + ket("101") + ket("110")) / math.sqrt(3)
    r = partial_trace(z.dicke(3, (1, 2)), ["B", "C"])
    np.testing.assert_allclose(z.dicke_mixture(2, [(0, 1 / 3), (1, 2 / 3)]).matrix, r.matrix, atol=1e-12)
    np.testing.assert_allclose(z.dicke_vector(3, (1, 2)), w_tilde, atol=1e-15)
    pure = z.dicke_mixture(3, [(1, 1.0), (2, 0.0)])
    v = z.dicke_vector(3, (1, 2))
    np.testing.assert_allclose(pure.matrix, np.outer(v, v.conj()), atol=1e-12)
    red = partial_trace(z.dicke(4, (2, 2)), ["A", "B", "C"])
    np.testing.assert_allclose(z.dicke_mixture(3, [(1, 0.5), (2, 0.5)]).matrix, red.matrix, atol=1e-12)


# -- Smolin and Dur --

def test_smolin_two_constructions_agree():
    np.testing.assert_allclose(z.smolin_from_paulis(), z.smolin().matrix, atol=1e-12)
    cols = z.smolin_vectors()
    np.testing.assert_allclose(cols @ cols.conj().T / 4, z.smolin_from_paulis(), atol=1e-12)


def test_smolin_values():
    s = z.smolin()
    assert entropy(s) == pytest.approx(2.0, abs=1e-12)
    assert gm(s).lambda_sq == pytest.approx(1 / 8, abs=1e-8)
    spec = parse_spec("smolin")
    assert [closed_form(spec, m) for m in ("GM", "REE", "LGR")] == [3.0, 1.0, 1.0]


def test_dur_examples():
    assert gm(z.dur(4, 1.0)).gm_bits == pytest.approx(1.0, abs=1e-8)
    assert gm(z.dur(4, 0.2)).lambda_sq == pytest.approx(0.1, abs=1e-8)
    assert gm(z.dur(4, 0.1)).lambda_sq == pytest.approx(0.1125, abs=1e-8)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_dur_matches_unparametrized_form(n):
    g = (ket("0" * n) + ket("1" * n)) / math.sqrt(2)
    m = np.outer(g, g)
    for k in range(n):
        u = ket("0" * k + "1" + "0" * (n - k - 1))
        v = ket("1" * k + "0" + "1" * (n - k - 1))
        m = m + 0.5 * (np.outer(u, u) + np.outer(v, v))
    np.testing.assert_allclose(z.dur(n, 1 / (n + 1)).matrix, m / (n + 1), atol=1e-12)


def test_dur_small_n_warns():
    with pytest.warns(UserWarning):
        z.dur(3, 0.5)


# -- antisymmetric families --

def test_antisym_examples():
    assert gm(z.antisym_basis_state(3)).gm_bits == pytest.approx(math.log2(6), abs=1e-8)
    r = z.antisym_projector_state(3, 2)
    assert np.linalg.matrix_rank(r.matrix, tol=1e-9) == 3
    assert closed_form(parse_spec("asp:d=3,N=2"), "REE") == pytest.approx(1.0)


def test_generalized_antisym_gm():
    s = z.generalized_antisym(2, 2, 4)
    assert s.layout.dims == (2,) * 8
    assert gm(s).gm_bits == pytest.approx(math.log2(24), abs=1e-6)


@pytest.mark.parametrize("d,n", [(2, 2), (3, 2), (3, 3), (4, 2)])
def test_antisymmetric_tag_holds(d, n):
    p = antisym_projector(d, n).matrix
    r = z.antisym_projector_state(d, n).matrix
    np.testing.assert_allclose(p @ r @ p, r, atol=1e-10)
    assert "antisymmetric" in z.antisym_projector_state(d, n).tags


# -- closed forms --

def test_closed_form_examples():
    assert closed_form(parse_spec("bell:0.7,0.1,0.1,0.1"), "LGR") == pytest.approx(math.log2(1.4), abs=1e-12)
    assert closed_form(parse_spec("asp:d=3,N=2"), "GM", 2) == pytest.approx(math.log2(27), abs=1e-12)
    assert closed_form(parse_spec("mcb:d=3,p=0.5;0.3;0.2"), "LGR") == UNKNOWN
    assert closed_form(parse_spec("dur:N=4,x=0.2"), "LGR") == UNKNOWN


def test_bell_below_half_is_separable():
    spec = parse_spec("bell:0.4,0.3,0.2,0.1")
    assert closed_form(spec, "REE") == 0.0
    assert closed_form(spec, "LGR") == 0.0


# -- spec grammar --

@pytest.mark.parametrize("text", [
    "bell:0.7,0.1,0.1,0.1", "dicke:N=3,k=2;1", "dur:N=4,x=0.25", "asp:d=3,N=2", "gas:d=2,p=2,k=4",
    "iso:d=3,lambda=1/3", "mcb:d=3,p=0.5;0.3;0.2", "smolin", "ghz:N=3", "dmix:N=2,k=0;1,w=1/3;2/3",
    "prod:dims=2;3,index=1;2", "asb:N=3",
])
def test_spec_round_trips(text):
    spec = parse_spec(text)
    assert parse_spec(spec.to_string()) == spec
    assert FamilySpec.from_json(json.dumps(spec.to_json())) == spec
    spec.build()


@pytest.mark.parametrize("text,pos", [
    ("foo:1", 0), ("iso:d=3,lamda=0.5", 8), ("iso:d=3", None), ("bell:0.7,0.1,x,0.1", None),
    ("dicke:N=3,k=2;2", None),
])
def test_spec_errors_report_positions(text, pos):
    with pytest.raises(SpecParseError) as exc:
        parse_spec(text)
    assert 0 <= exc.value.position <= len(text)
    if pos is not None:
        assert exc.value.position == pos
    assert "^" in str(exc.value)


@given(st.integers(2, 5), st.integers(0, 5))
def test_dicke_spec_property(n, split):
    k = (min(split, n), n - min(split, n))
    spec = parse_spec(f"dicke:N={n},k={k[0]};{k[1]}")
    assert parse_spec(str(spec)) == spec
    lam = z.dicke_lambda_sq(n, k)
    assert 0 < lam <= 1
    assert closed_form(spec, "GM") == pytest.approx(-math.log2(lam))
