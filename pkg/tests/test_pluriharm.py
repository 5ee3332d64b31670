from fractions import Fraction

import numpy as np
import pytest

from siegel_rankin.errors import UnsupportedError
from siegel_rankin.pluriharm import (MatrixPolynomial, is_pluriharmonic, kv_generator, laplacian, right_action,
                                     sym_pluriharmonic, weight_profile)
from siegel_rankin.weights import GLWeight, SymRep


def x(n, r, c):
    return MatrixPolynomial.var(n, r, c)


def test_laplacian_contracts_rows():
    # Delta_12 = sum_k d^2 / dx_k1 dx_k2 (indices 1-based) sends x11 x12 to 1 and kills x11 x22
    p = x(2, 0, 0) * x(2, 0, 1)
    assert laplacian(p, 1, 2).terms == MatrixPolynomial.const(2, 1).terms
    q = x(2, 0, 0) * x(2, 1, 1)
    assert laplacian(q, 1, 2).is_zero()


def test_sum_of_squares_negative_control():
    p = x(2, 0, 0) * x(2, 0, 0) + x(2, 1, 0) * x(2, 1, 0)
    rep = is_pluriharmonic(p)
    assert not rep.ok
    assert rep.pair == (1, 1)
    assert rep.remainder.terms == MatrixPolynomial.const(2, 4).terms


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_det_is_pluriharmonic(n):
    assert is_pluriharmonic(MatrixPolynomial.det(n)).ok


@pytest.mark.parametrize("entries", [(1, 0), (2, 0), (3, 0), (1, 1), (2, 0, 0), (1, 1, 1), (1, 1, 0, 0),
                                     (3, 0, 0, 0), (2, 1, 0, 0), (1, 1, 1, 1)])
def test_kv_generator_profile(entries):
    rho = GLWeight.of(list(entries))
    P = kv_generator(rho)
    assert is_pluriharmonic(P).ok
    prof = weight_profile(P)
    assert prof.unipotent_invariant
    assert prof.exponents == tuple(entries)


@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_sym_pluriharmonic_equivariance(j):
    P = sym_pluriharmonic(j)
    assert is_pluriharmonic(P).ok
    rho = SymRep(j)
    g = np.array([[2.0, 1.0], [-1.0, 3.0]])
    rng = np.random.default_rng(j)
    X = rng.normal(size=(2, 2))
    assert np.allclose(P.numeric(X @ g.T), rho.numeric(g) @ P.numeric(X), atol=1e-9)


def test_sym_pluriharmonic_value_at_identity():
    # P(1) is the coefficient vector of (X + iY)^2
    v = sym_pluriharmonic(2).numeric(np.eye(2))
    assert np.allclose(v, [1, 2j, -1])


def test_right_action_exact():
    p = x(2, 0, 0) * x(2, 1, 1)
    q = right_action(p, [[0, 1], [1, 0]])
    assert q.terms == (x(2, 0, 1) * x(2, 1, 0)).terms


@pytest.mark.parametrize("entries", [(2, 1), (1, 1, 0), (2, 1, 1)])
def test_minus_branch_generators_unsupported(entries):
    with pytest.raises(UnsupportedError):
        kv_generator(GLWeight.of(list(entries)))
