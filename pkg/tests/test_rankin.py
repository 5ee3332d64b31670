import math

import numpy as np
import pytest
from scipy.special import gamma

from siegel_rankin import rankin
from siegel_rankin.errors import DomainError
from siegel_rankin.exactmath import RationalMatrix
from siegel_rankin.pluriharm import sym_pluriharmonic
from siegel_rankin.theta import ThetaSpec
from siegel_rankin.weights import SymRep


def test_de_rules():
    x, w = rankin.de_rule("half", 1 / 16)
    assert abs(np.sum(w * x * np.exp(-x)) - 1) < 1e-10
    x, w = rankin.de_rule("line", 1 / 16)
    assert abs(np.sum(w * np.exp(-x * x)) - math.sqrt(math.pi)) < 1e-10


@pytest.mark.parametrize("sigma", [1.5, 2.0, 3.7])
def test_maass_n1(sigma):
    # int_0^inf y^sigma e^(-4 pi y) dy / y
    want = gamma(sigma) * (4 * math.pi) ** -sigma
    assert abs(rankin.maass_closed_form([0], sigma, 1) - want) < 1e-12 * want
    assert rankin.maass_integral_check([0], sigma, 1).rel_error < 1e-8


@pytest.mark.parametrize("lam", [(0, 0), (1, 0), (2, 0), (1, 1)])
def test_maass_n2_quadrature(lam):
    assert rankin.maass_integral_check(list(lam), 3.0, 2).rel_error < 1e-6


@pytest.mark.parametrize("lam", [(1, 0), (2, 0)])
def test_literal_prefactor_is_off_by_power_of_4pi(lam):
    closed = rankin.maass_closed_form(list(lam), 3.0, 2)
    literal = rankin.maass_literal_form(list(lam), 3.0, 2)
    assert abs(closed / literal - (4 * math.pi) ** lam[0]) < 1e-9 * (4 * math.pi) ** lam[0]


def test_sigma_guard():
    with pytest.raises(DomainError):
        rankin.base_operator(SymRep(0), 1.4)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_eigenvector_p1(j):
    rho = SymRep(j)
    H = rankin.base_operator(rho, 3.0).matrix
    v = sym_pluriharmonic(j).numeric(np.eye(2))
    alpha = rankin.eigenvalue_closed_form(rho, 3.0)
    assert np.linalg.norm(H @ v - alpha * v) < 1e-7 * abs(alpha) * np.linalg.norm(v)


def test_gamma_rho_eigenvalue_agrees_only_for_small_j():
    for j in (0, 1):
        rho = SymRep(j)
        a, g = rankin.eigenvalue_closed_form(rho, 3.0), rankin.gamma_rho_eigenvalue(rho, 3.0)
        assert abs(a - g) < 1e-12 * abs(a)
    rho = SymRep(2)
    a, g = rankin.eigenvalue_closed_form(rho, 3.0), rankin.gamma_rho_eigenvalue(rho, 3.0)
    assert abs(abs(g - a) / abs(a) - 1 / 7) < 1e-9


@pytest.mark.parametrize("j,k", [(1, 0), (2, 0), (2, 1)])
def test_gamma_rho_is_highest_weight_coefficient(j, k):
    rho = SymRep(j, k)
    h = rankin.highest_weight_coefficient(rho, 3.0)
    g = rankin.gamma_rho_eigenvalue(rho, 3.0)
    assert abs(h - g) < 1e-7 * abs(g)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_hermitian_and_conjugation(j):
    rho = SymRep(j)
    R = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert rankin.base_operator(rho, 3.0).asymmetry < 1e-9
    for u in ([[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]], [[1, 0], [-3, 1]]):
        u = np.array(u, dtype=float)
        A = rankin.h_operator(rho, 3.0, u.T @ R @ u).matrix
        B = rankin.conjugated_operator(rho, 3.0, R, u)
        assert np.linalg.norm(A - B) < 1e-8 * np.linalg.norm(A)


def test_random_family_is_coherent_and_corruption_is_caught():
    fam = rankin.random_family(2, SymRep(2), 8, seed=3)
    assert rankin.validate_family(fam).coherent
    key = next(k for k, (R, _) in fam.values.items() if len(rankin.automorph_group(R)) > 2)
    R, v = fam.values[key]
    fam.values[key] = (R, v + np.array([1.0, 0, 0]))
    rep = rankin.validate_family(fam)
    assert not rep.coherent and rep.violation is not None


def test_family_json_round_trip():
    fam = rankin.random_family(2, SymRep(1), 6, sign=-1, seed=1)
    back = rankin.CoefficientFamily.from_json(fam.to_json())
    for R, _ in fam.values.values():
        assert np.allclose(back.value(R), fam.value(R))


def test_series_positivity_and_cauchy_schwarz():
    f = rankin.random_family(2, SymRep(1), 8, seed=5)
    g = rankin.random_family(2, SymRep(1), 8, seed=6)
    assert rankin.rankin_series(3.0, f, f, 8).monotone
    assert rankin.cauchy_schwarz(3.0, f, g, 8)["holds"]


THETA_N1 = {"n": 1, "tau": [[1]], "chi": {"modulus": 3, "exponents": [1]}, "P": "x"}


def test_unfolding_n1():
    th = ThetaSpec.from_json(THETA_N1)
    f = rankin.random_family(1, SymRep(0, th.mu, 1), 30, sign=-1, seed=0)
    rep = rankin.unfolding_check(f, th, 2.0, 30)
    assert not rep.degenerate
    assert rep.rel_discrepancy < 1e-6


def test_unfolding_sym2_uses_true_eigenvalue():
    th = ThetaSpec.from_json({"n": 2, "tau": [[1, 0], [0, 2]], "P": "sym:2"})
    f = rankin.random_family(2, SymRep(2), 10, seed=1)
    rep = rankin.unfolding_check(f, th, 3.0, 10)
    assert not rep.degenerate
    assert rep.rel_discrepancy < 1e-6
    assert rep.rel_discrepancy_gamma_rho > 0.05


def test_unfolding_sign_mismatch():
    th = ThetaSpec.from_json(THETA_N1)
    f = rankin.random_family(1, SymRep(0, 1, 1), 10, sign=1, seed=0)
    with pytest.raises(DomainError):
        rankin.unfolding_check(f, th, 2.0, 10)


def test_identity_tau_sym2_is_degenerate():
    th = ThetaSpec.from_json({"n": 2, "tau": [[1, 0], [0, 1]], "P": "sym:2"})
    f = rankin.random_family(2, SymRep(2), 6, seed=2)
    assert rankin.unfolding_check(f, th, 3.0, 6).degenerate
