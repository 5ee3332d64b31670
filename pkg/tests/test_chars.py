import cmath
import math

import pytest

from siegel_rankin.chars import (DirichletCharacter, dirichlet_L, enumerate_characters, epsilon_tau, kronecker,
                                 odd_characters, trivial_character)
from siegel_rankin.exactmath import RationalMatrix


@pytest.mark.parametrize("F", [1, 3, 4, 5, 8, 12, 15, 16, 21])
def test_character_group_size_and_orthogonality(F):
    chars = enumerate_characters(F)
    units = [a for a in range(F) if math.gcd(a, F) == 1] if F > 1 else [0]
    assert len(chars) == len(units)
    for a in units:
        total = sum(c.complex(a) for c in chars)
        assert abs(total - (len(units) if a % F == 1 % F else 0)) < 1e-9


@pytest.mark.parametrize("F", [3, 5, 7, 8, 9])
def test_multiplicative(F):
    for c in enumerate_characters(F):
        for a in range(F):
            for b in range(F):
                assert abs(c.complex(a * b) - c.complex(a) * c.complex(b)) < 1e-12


def test_odd_characters_mod_7():
    odd = odd_characters(7)
    assert len(odd) == 3
    assert all(abs(c.complex(6) + 1) < 1e-12 for c in odd)


def test_kronecker_matches_legendre():
    for p in (3, 5, 7, 11, 13):
        for a in range(1, p):
            euler = pow(a, (p - 1) // 2, p)
            assert kronecker(a, p) == (1 if euler == 1 else -1)


def test_L_values_against_closed_forms():
    # L(2, chi_-4) is Catalan's constant; L(3, chi_-3) = 4 pi^3 / (81 sqrt 3)
    chi4 = [c for c in enumerate_characters(4) if not c.is_trivial()][0]
    v = dirichlet_L(2.0, chi4, 10**5)
    assert abs(v.value - 0.915965594177219) < v.tail_bound + 1e-12
    chi3 = odd_characters(3)[0]
    v = dirichlet_L(3.0, chi3, 10**5)
    assert abs(v.value - 4 * math.pi**3 / (81 * 3**0.5)) < v.tail_bound + 1e-12


def test_zeta_4():
    v = dirichlet_L(4.0, trivial_character(), 10**5)
    assert abs(v.value - math.pi**4 / 90) < v.tail_bound + 1e-12


def test_conductor_and_induce():
    chi = odd_characters(3)[0]
    big = chi.induce(15)
    assert big.modulus == 15 and big.conductor == 3
    assert abs(big.complex(2) - chi.complex(2)) < 1e-12
    assert big.complex(5) == 0


def test_epsilon_tau_identity_n1():
    # n = 1, tau = 1: |2 tau| = 2, the character of Q(sqrt 2)
    e = epsilon_tau(RationalMatrix.parse([[1]]))
    assert e.conductor == 8 and e.parity == 1
