"""Exact and numerical tools for vector-valued Siegel modular forms: weights and
pluriharmonic polynomials, matrix Gauss sums, theta series with spherical
coefficients, cusps of Gamma[m, m], analytic factors of standard L-functions and
the Rankin product with a theta series."""

__version__ = "0.1.0"
