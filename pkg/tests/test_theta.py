from fractions import Fraction

import numpy as np
import pytest

from siegel_rankin.chars import odd_characters
from siegel_rankin.errors import SchemaError
from siegel_rankin.theta import (ThetaSpec, coefficient_by_transport, cuspidality_report, default_spec, level_data,
                                 theta_coefficient)

N1 = {"n": 1, "tau": [[1]], "chi": {"modulus": 3, "exponents": [1]}, "P": "x"}


def legendre3(m):
    return [0, 1, -1][m % 3]


@pytest.mark.parametrize("m", range(1, 13))
def test_n1_square_coefficients(m):
    # representations of m^2 by x^2 are +-m; weight chi(x) x gives 2 m chi(m)
    c = theta_coefficient(ThetaSpec.from_json(N1), [[m * m]]).numeric()
    assert abs(c[0] - 2 * m * legendre3(m)) < 1e-12


@pytest.mark.parametrize("r", [2, 3, 5, 6, 7, 8, 10, 11, 12])
def test_n1_nonsquare_vanish(r):
    assert abs(theta_coefficient(ThetaSpec.from_json(N1), [[r]]).numeric()[0]) == 0


def brute_det_theta(R, tau, chi):
    # sum over X in M_2(Z) with X^T tau X = R of chi(|det X|) sgn(det X) det(sqrt(tau) X)
    R = np.array(R)
    total = 0
    rng = range(-4, 5)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    X = np.array([[a, b], [c, d]])
                    if (X.T @ tau @ X == R).all():
                        det = a * d - b * c
                        sgn = 1 if det > 0 else -1 if det < 0 else 0
                        total += chi.complex(abs(det)) * sgn * det * np.sqrt(np.linalg.det(tau)) if det else 0
    return total


@pytest.mark.parametrize("R", [[[1, 0], [0, 2]], [[2, 0], [0, 2]], [[3, 1], [1, 3]], [[2, 1], [1, 3]], [[4, 0], [0, 2]]])
def test_n2_det_coefficients_brute(R):
    spec = ThetaSpec.from_json({"n": 2, "tau": [[1, 0], [0, 2]], "chi": {"modulus": 3, "exponents": [1]}, "P": "det"})
    got = theta_coefficient(spec, R).numeric()[0]
    assert abs(got - brute_det_theta(R, np.array([[1, 0], [0, 2]]), odd_characters(3)[0])) < 1e-9


def test_transport_law():
    spec = ThetaSpec.from_json({"n": 2, "tau": [[1, 0], [0, 4]], "P": "sym:2"})
    R = [[5, -3], [-3, 5]]
    for u in ([[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]]):
        direct = theta_coefficient(spec, np.array(u).T @ np.array(R) @ np.array(u)).numeric()
        moved = coefficient_by_transport(spec, R, u).numeric()
        assert np.abs(direct).max() > 1
        assert np.allclose(direct, moved)


@pytest.mark.parametrize("p", [3, 5])
def test_n8_level(p):
    L = level_data(default_spec(8, p))
    assert L.b == Fraction(1, 2 * p)
    assert L.c == 4 * p * p


def test_parity_mismatch_flagged():
    spec = ThetaSpec.from_json({"n": 1, "tau": [[1]], "chi": {"modulus": 3, "exponents": [1]}, "P": "1"})
    assert not spec.parity_consistent


def test_bad_spec():
    with pytest.raises(SchemaError):
        ThetaSpec.from_json({"tau": [[1]]})


@pytest.mark.parametrize("p", [3, 5, 7])
def test_n1_cuspidal(p):
    for chi in odd_characters(p):
        assert cuspidality_report(default_spec(1, p, chi)).verdict == "cuspidal"


def test_n2_p3_cuspidal():
    assert cuspidality_report(default_spec(2, 3)).verdict == "cuspidal"


def test_n2_p1mod4_not_certified():
    # -det tau is a square mod p = 5, so the singular Gauss sums survive
    rep = cuspidality_report(default_spec(2, 5, odd_characters(5)[0]))
    assert rep.verdict == "not certified"
    assert rep.kinds_certified == ["m/m", "m.eta/m"]


def test_even_character_not_covered():
    from siegel_rankin.chars import enumerate_characters
    even = [c for c in enumerate_characters(5) if not c.is_odd() and not c.is_trivial()][0]
    spec = default_spec(1, 5, even)
    assert cuspidality_report(spec).verdict == "not covered"
