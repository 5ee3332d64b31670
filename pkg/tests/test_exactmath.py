import cmath
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegel_rankin.errors import DomainError, SchemaError
from siegel_rankin.exactmath import (QI, CyclotomicNumber, RationalMatrix, automorph_group, hermite_representatives,
                                     minkowski_reduce, reduced_forms, representations)


def zeta(N, k=1):
    return cmath.exp(2j * cmath.pi * k / N)


@pytest.mark.parametrize("N", [1, 3, 4, 5, 6, 8, 9, 12, 15])
def test_root_of_unity_numeric(N):
    for k in range(N):
        assert abs(complex(CyclotomicNumber.root_of_unity(N, k)) - zeta(N, k)) < 1e-12


def test_non_squarefree_order_reduces():
    # zeta_9^6 = -1 - zeta_9^3 in the power basis of Q(zeta_9)
    z = CyclotomicNumber.root_of_unity(9, 6)
    assert z == CyclotomicNumber.rational(-1, 9) - CyclotomicNumber.root_of_unity(9, 3)


def test_quadratic_gauss_sum_exact():
    g = sum((CyclotomicNumber.root_of_unity(5, x * x) for x in range(5)), CyclotomicNumber.rational(0, 5))
    assert (g * g).as_rational() == 5


def test_bad_order_and_length():
    with pytest.raises(DomainError):
        CyclotomicNumber(0, [])
    with pytest.raises(SchemaError):
        CyclotomicNumber(5, [1, 2])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 7, 8, 12]), st.lists(st.integers(-5, 5), min_size=12, max_size=12),
       st.lists(st.integers(-5, 5), min_size=12, max_size=12))
def test_cyclotomic_ring_homomorphism(N, a, b):
    def make(cs):
        return sum((CyclotomicNumber.root_of_unity(N, i) * CyclotomicNumber.rational(c, N) for i, c in enumerate(cs)),
                   CyclotomicNumber.rational(0, N))
    x, y = make(a), make(b)
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-8
    assert abs(complex(x + y) - complex(x) - complex(y)) < 1e-8
    assert abs(complex(x.conj()) - complex(x).conjugate()) < 1e-8


def test_mixed_orders_lift():
    s = CyclotomicNumber.root_of_unity(3, 1) + CyclotomicNumber.root_of_unity(4, 1)
    assert s.order == 12
    assert abs(complex(s) - zeta(3) - 1j) < 1e-12


def test_gaussian_rationals():
    a = QI.of(Fraction(1, 2)) + QI(Fraction(0), Fraction(3))
    assert a * a.conj() == QI.of(Fraction(1, 4) + 9)
    assert (a / a) == QI.of(1)
    assert a ** 3 == a * a * a


def test_rational_matrix_det_inverse():
    M = RationalMatrix.parse([[2, 1], [1, "1/3"]])
    assert M.det() == Fraction(-1, 3)
    assert M @ M.inverse() == RationalMatrix.identity(2)


def test_minkowski_reduce_relation():
    R = RationalMatrix.parse([[5, 7], [7, 11]])
    R0, U = minkowski_reduce(R)
    assert U.T @ R @ U == R0
    assert abs(U.det()) == 1
    a, b, c = R0[0, 0], R0[0, 1], R0[1, 1]
    assert 0 <= 2 * b <= a <= c


@pytest.mark.parametrize("R,size", [([[1, 0], [0, 1]], 8), ([[2, 1], [1, 2]], 12), ([[1, 0], [0, 2]], 4),
                                    ([[2, 1], [1, 3]], 4)])
def test_automorph_group_sizes(R, size):
    G = automorph_group(R)
    assert len(G) == size
    Rm = RationalMatrix.parse(R)
    assert all(u.T @ Rm @ u == Rm for u in G)


def test_reduced_forms_count_det3():
    # binary forms with 1 <= det <= 3 up to GL_2(Z): x^2+y^2, x^2+2y^2, x^2+3y^2, 2x^2+2xy+2y^2
    forms = reduced_forms(2, 3)
    assert sorted(tuple(map(int, (f[0, 0], f[0, 1], f[1, 1]))) for f in forms) == [(1, 0, 1), (1, 0, 2), (1, 0, 3),
                                                                                  (2, 1, 2)]


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6])
def test_hermite_count_matches_sigma(d):
    # number of index-d sublattices of Z^2 is sigma_1(d)
    assert len(hermite_representatives(2, d)) == sum(k for k in range(1, d + 1) if d % k == 0)


def test_representations_brute_force():
    tau = RationalMatrix.identity(2)
    R = RationalMatrix.parse([[2, 1], [1, 2]])
    got = {tuple(tuple(int(v) for v in row) for row in X.entries) for X in representations(tau, R)}
    want = set()
    for a, b, c, d in itertools.product(range(-2, 3), repeat=4):
        X = np.array([[a, b], [c, d]])
        if (X.T @ X == np.array([[2, 1], [1, 2]])).all():
            want.add(tuple(map(tuple, X.tolist())))
    assert got == want
