import cmath
import itertools

import numpy as np
import pytest

from siegel_rankin.chars import enumerate_characters, odd_characters
from siegel_rankin.errors import DomainError, GuardExceeded
from siegel_rankin.exactmath import RationalMatrix
from siegel_rankin.gauss import GaussSumParams, gauss_sum, vanishing_certificate


def brute(n, chi, X, R, F, M):
    total = 0
    X, R, M = (np.array(A, dtype=np.int64) for A in (X, R, M))
    for flat in itertools.product(range(F), repeat=n * n):
        T = np.array(flat, dtype=np.int64).reshape(n, n)
        d = int(round(np.linalg.det(T))) % F
        total += chi.complex(d) * cmath.exp(2j * cmath.pi * (np.sum(X * T) - np.trace(M @ T @ R @ T.T)) / F)
    return total


CASES = [
    (1, 3, 1, [[1]], [[1]], [[1]]),
    (1, 5, 2, [[0]], [[2]], [[1]]),
    (1, 7, 3, [[3]], [[1]], [[2]]),
    (2, 3, 1, [[0, 1], [0, 1]], [[0, 1], [1, 0]], [[1, 0], [0, 2]]),
    (2, 3, 1, [[1, 0], [0, 0]], [[1, 0], [0, 1]], [[1, 0], [0, 1]]),
    (2, 5, 1, [[1, 2], [2, 4]], [[1, 0], [0, 2]], [[1, 0], [0, 1]]),
]


@pytest.mark.parametrize("n,F,idx,X,R,M", CASES)
def test_gauss_sum_matches_brute_force(n, F, idx, X, R, M):
    chi = enumerate_characters(F)[idx]
    P = GaussSumParams(n, chi, RationalMatrix.parse(X), RationalMatrix.parse(R), F, RationalMatrix.parse(M))
    assert abs(complex(gauss_sum(P)) - brute(n, chi, X, R, F, M)) < 1e-8


def test_frozen_counterexample_value():
    # odd character mod 3, tau = diag(1, 2): exact value 9 - 18 zeta_6
    chi = odd_characters(3)[0]
    P = GaussSumParams(2, chi, RationalMatrix.parse([[0, 1], [0, 1]]), RationalMatrix.parse([[0, 1], [1, 0]]), 3,
                       RationalMatrix.parse([[1, 0], [0, 2]]))
    v = gauss_sum(P).to_json()
    assert v["order"] == 6 and [str(c) for c in v["coefficients"]] == ["9", "-18"]
    assert abs(abs(complex(gauss_sum(P))) - 9 * 3**0.5) < 1e-12


def test_modulus_must_divide():
    with pytest.raises(DomainError):
        GaussSumParams(1, odd_characters(5)[0], RationalMatrix.parse([[1]]), RationalMatrix.parse([[1]]), 3,
                       RationalMatrix.parse([[1]]))


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_n1_certificates_vanish(p):
    assert vanishing_certificate(1, p, [[1]]).zero


def test_n2_vanishing_tracks_isotropy():
    # nonzero exactly when -det tau is a square mod p
    for p, tau in ((3, [[1, 0], [0, 1]]), (3, [[1, 0], [0, 2]]), (5, [[1, 0], [0, 1]]), (5, [[1, 0], [0, 2]])):
        det = tau[0][0] * tau[1][1]
        isotropic = pow(-det % p, (p - 1) // 2, p) == 1
        cert = vanishing_certificate(2, p, tau, stop_at_first=True)
        assert cert.zero != isotropic, (p, tau)


def test_certificate_guard():
    with pytest.raises(GuardExceeded):
        vanishing_certificate(3, 3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
