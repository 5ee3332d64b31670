import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gamma

from siegel_rankin.analytic import (SatakeData, euler_factor, gamma_kn, lambda_factor, pole_report, siegel_gamma,
                                    truncated_standard_L)
from siegel_rankin.chars import trivial_character
from siegel_rankin.errors import DomainError, SchemaError


@pytest.mark.parametrize("n,s", [(1, 3.0), (2, 3.0), (2, 4.5), (3, 5.0)])
def test_siegel_gamma_product(n, s):
    want = math.pi ** (n * (n - 1) / 4) * math.prod(gamma(s - i / 2) for i in range(n))
    assert abs(siegel_gamma(n, s) - want) < 1e-10 * want


def test_zeta_values():
    # the m = 1 factor at s is zeta(2s)
    v = lambda_factor(1, 0, 1, trivial_character(), 2.0)
    assert abs(v.value - math.pi**4 / 90) < v.tail_bound + 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_euler_factor_degree_and_roots(n):
    data = SatakeData(n, 2 * n, {3: [2.0 ** (i + 1) for i in range(n)]})
    poly = euler_factor(3, data)
    assert len(poly) - 1 == 2 * n + 1
    roots = sorted(abs(1 / r) for r in np.roots(poly[::-1]))
    want = sorted([3.0**n] + [3.0**n * 2.0 ** (i + 1) for i in range(n)] + [3.0**n / 2.0 ** (i + 1) for i in range(n)])
    assert np.allclose(roots, want)


def test_euler_factor_at_level_degree():
    data = SatakeData(2, 4, {3: [1.0, 1.0]}, level=3)
    assert len(euler_factor(3, data)) - 1 == 2


def test_bad_satake():
    with pytest.raises(SchemaError):
        SatakeData(1, 2, {4: [1.0]})
    with pytest.raises(DomainError):
        SatakeData(1, 2, {3: [0.0]})


def test_truncated_standard_L_unramified_trivial():
    # n = 1 with parameters 1 at p: L_p = (1 - p t)^-3 at t = p^-s
    data = SatakeData.unramified_trivial(1, 2, [2, 3, 5])
    s = 6.0
    v = truncated_standard_L(s, data)
    want = math.prod((1 - p ** (1 - s)) ** -3 for p in (2, 3, 5))
    assert abs(v.value - want) < 1e-12 * want


@pytest.mark.parametrize("k,n,want", [(6, 2, ["3"]), (2, 2, ["3"])])
def test_pole_goldens(k, n, want):
    rep = pole_report(k, n, True, c=1, y=3)
    assert [str(p.s) for p in rep.exceptional_set + rep.lambda_ratio_poles] == want


def test_pole_report_empty_with_conductor():
    rep = pole_report(4, 2, False, 5, 5)
    assert rep.exceptional_set == [] and rep.lambda_ratio_poles == []


def test_pole_report_domain():
    with pytest.raises(SchemaError):
        pole_report(Fraction(1, 3), 2, True)
    with pytest.raises(DomainError):
        pole_report(Fraction(1, 2), 2, True)


def test_gamma_kn_finite():
    assert math.isfinite(abs(gamma_kn(4, 2, 5.0)))
