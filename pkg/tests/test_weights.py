import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from siegel_rankin.errors import SchemaError
from siegel_rankin.weights import GLWeight, OrthWeight, SymRep, all_orth_weights, kv_tau, tau_sigma_membership

GOLDEN = [
    (3, "2;+1", (2, 0, 0)),
    (3, "0;-1", (1, 1, 1)),
    (4, "2,0;-", (2, 1, 1, 0)),
    (3, "2;-1", (2, 1, 0)),
    (5, "2,1;+1", (2, 1, 1, 0, 0)),
    (1, ";-1", (1,)),
    (6, "2,1,0;-", (2, 1, 1, 1, 0, 0)),
]


@pytest.mark.parametrize("n,text,want", GOLDEN)
def test_kv_golden(n, text, want):
    assert kv_tau(OrthWeight.parse(n, text)).entries == want


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_kv_round_trip(n):
    for lam in all_orth_weights(n, 3):
        back = tau_sigma_membership(kv_tau(lam))
        assert back == lam


@pytest.mark.parametrize("text", ["2;0", "a;+1", "3,1,1;+", "-1;+1"])
def test_malformed_weights(text):
    with pytest.raises(SchemaError):
        OrthWeight.parse(3, text)


def test_gl_weight_must_be_dominant():
    with pytest.raises(SchemaError):
        GLWeight.of([0, 1])


def test_non_image_weight():
    assert tau_sigma_membership(GLWeight.of([3, 1, 1])) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(-2, 2), st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_symrep_homomorphism(j, k, vals):
    rho = SymRep(j, k)
    A = np.array(vals[:4], dtype=float).reshape(2, 2) + 4 * np.eye(2)
    B = np.array(vals[4:], dtype=float).reshape(2, 2) + 4 * np.eye(2)
    assume(abs(np.linalg.det(A)) > 0.5 and abs(np.linalg.det(B)) > 0.5)
    assert np.allclose(rho.numeric(A @ B), rho.numeric(A) @ rho.numeric(B), rtol=1e-9, atol=1e-6)


def unitary(theta, phi):
    return np.array([[np.cos(theta), -np.sin(theta) * np.exp(1j * phi)],
                     [np.sin(theta), np.cos(theta) * np.exp(1j * phi)]])


@pytest.mark.parametrize("j", [0, 1, 2, 3, 4])
def test_bombieri_form_is_invariant(j):
    rho = SymRep(j)
    G = rho.gram()
    for th, ph in ((0.3, 0.0), (1.1, 0.7), (2.5, -1.3)):
        M = rho.numeric(unitary(th, ph))
        assert np.allclose(M.conj().T @ G @ M, G, atol=1e-12)


@pytest.mark.parametrize("j", [2, 3, 4])
def test_plain_monomial_form_is_not_invariant(j):
    # the identity Gram matrix in the monomial basis fails for j >= 2
    M = SymRep(j).numeric(unitary(0.3, 0.0))
    assert not np.allclose(M.conj().T @ M, np.eye(j + 1), atol=1e-6)


def test_exact_matches_numeric():
    rho = SymRep(3, 1)
    A = [[2, 1], [1, 3]]
    assert np.allclose(rho.exact(A).to_numpy().astype(float), rho.numeric(np.array(A, dtype=float)))


def test_n1_character():
    rho = SymRep(0, 3, 1)
    assert rho.numeric(np.array([[2.0]]))[0, 0] == 8.0
    with pytest.raises(SchemaError):
        SymRep(1, 0, 1)
