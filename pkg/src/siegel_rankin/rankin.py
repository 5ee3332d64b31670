"""The Rankin product D(s, f, g): the Hermitian operator H_{rho,R}(s) by
double-exponential quadrature, synthetic coefficient families obeying the
transformation laws of Fourier coefficients, class-set summation and the
unfolding identity against a theta series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn

from .analytic import gamma_rho
from .errors import DomainError, SchemaError
from .exactmath import (RationalMatrix, as_sym_pos_def, automorph_group, fmt_q, hermite_representatives,
                        minkowski_reduce, reduced_forms)
from .theta import ThetaSpec, sqrt_tau_numeric, theta_coefficient
from .weights import GLWeight, SymRep

QUAD_TOL = 1e-9


# ---------------------------------------------------------------------------
# double-exponential rules


def de_rule(kind: str, h: float, T: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the exp-sinh rule on (0, inf) or the sinh-sinh rule on R."""
    t = np.arange(-math.floor(T / h), math.floor(T / h) + 1) * h
    u = 0.5 * math.pi * np.sinh(t)
    du = 0.5 * math.pi * np.cosh(t)
    if kind == "half":
        x = np.exp(u)
        w = h * x * du
    elif kind == "line":
        x = np.sinh(u)
        w = h * np.cosh(u) * du
    else:
        raise SchemaError("rule kind is 'half' or 'line'")
    keep = np.isfinite(x) & np.isfinite(w) & (w > 0)
    return x[keep], w[keep]


@dataclass
class QuadResult:
    value: np.ndarray
    error_estimate: float
    levels: int
    h: float


def _refine(evaluate, tol: float = QUAD_TOL, h0: float = 0.125, max_levels: int = 4) -> QuadResult:
    prev = evaluate(h0)
    h = h0
    for level in range(1, max_levels + 1):
        h /= 2
        cur = evaluate(h)
        scale = max(np.linalg.norm(cur), 1e-300)
        err = float(np.linalg.norm(cur - prev) / scale)
        if err < tol:
            return QuadResult(cur, err, level, h)
        prev = cur
    raise DomainError(f"quadrature did not converge (last relative change {err:.2e})")


def _cholesky_integral(n: int, sigma: complex, matrix_fn, h: float) -> np.ndarray:
    """int_Y M(y) e^(-4 pi tr y) |y|^sigma d^x y with y = L L^T, L lower triangular.

    n = 1: y = a^2, d^x y = 2 da / a.
    n = 2: L = [[a, 0], [b, c]], d^x y = 4 a^-1 c^-2 da db dc, tr y = a^2 + b^2 + c^2, |y| = a^2 c^2.
    Variables are scaled by (4 pi)^-1/2 so the Gaussian is e^-x^2.
    """
    scale = 1 / math.sqrt(4 * math.pi)
    xa, wa = de_rule("half", h)
    a, wa = xa * scale, wa * scale
    if n == 1:
        L = a[:, None, None]
        y = L * L
        f = 2 * np.exp(-4 * math.pi * a * a) * np.exp(2 * sigma * np.log(a)) / a
        M = matrix_fn(y)
        return np.tensordot(wa * f, M, axes=(0, 0))
    if n != 2:
        raise DomainError("operators are integrated for n <= 2")
    xb, wb = de_rule("line", h)
    b, wb = xb * scale, wb * scale
    c, wc = a, wa
    B, C = np.meshgrid(b, c, indexing="ij")
    WBC = np.outer(wb, wc)
    total = None
    gb = np.exp(-4 * math.pi * (B * B + C * C)) * np.exp((2 * sigma - 2) * np.log(C)) * WBC
    for ai, wai in zip(a, wa):
        fa = 4 * np.exp(-4 * math.pi * ai * ai) * np.exp((2 * sigma - 1) * np.log(ai)) * wai
        if abs(fa) < 1e-300:
            continue
        y = np.empty(B.shape + (2, 2))
        y[..., 0, 0] = ai * ai
        y[..., 0, 1] = y[..., 1, 0] = ai * B
        y[..., 1, 1] = B * B + C * C
        M = matrix_fn(y)
        part = np.tensordot(fa * gb, M, axes=([0, 1], [0, 1]))
        total = part if total is None else total + part
    return total


def _guard_sigma(n: int, sigma: complex):
    if complex(sigma).real <= (n + 1) / 2:
        raise DomainError(f"need Re(s+h) > {(n + 1) / 2} for the operator integral")


# ---------------------------------------------------------------------------
# the operator


@dataclass
class HermitianOperator:
    rho: SymRep
    sigma: complex
    R: np.ndarray
    matrix: np.ndarray
    asymmetry: float
    quad_error: float

    def to_json(self):
        return {"rho": self.rho.to_json(), "s_plus_h": {"re": self.sigma.real, "im": self.sigma.imag},
                "R": self.R.tolist(), "matrix": [[{"re": v.real, "im": v.imag} for v in row] for row in self.matrix],
                "hermitian_defect": self.asymmetry, "quadrature_error": self.quad_error, "exact": False}


def hermitian_defect(rho: SymRep, H: np.ndarray) -> float:
    """Relative size of the anti-Hermitian part of G H, G the invariant Gram matrix."""
    GH = rho.gram() @ H
    return float(np.linalg.norm(GH - GH.conj().T) / max(np.linalg.norm(GH), 1e-300))


def symmetrize(rho: SymRep, H: np.ndarray) -> np.ndarray:
    G = rho.gram()
    GH = G @ H
    return np.linalg.solve(G, (GH + GH.conj().T) / 2)


@lru_cache(maxsize=64)
def _base_operator(j: int, k: int, n: int, sigma: complex, tol: float) -> tuple[np.ndarray, float, float]:
    rho = SymRep(j, k, n)
    res = _refine(lambda h: _cholesky_integral(n, sigma, rho.numeric, h), tol)
    H = res.value
    return H, hermitian_defect(rho, H), res.error_estimate


def base_operator(rho: SymRep, sigma, tol: float = QUAD_TOL) -> HermitianOperator:
    """H_rho(s) = int_Y rho(y) e^(-4 pi tr y) |y|^(s+h) d^x y (sigma = s + h)."""
    sigma = complex(sigma)
    _guard_sigma(rho.n, sigma)
    H, defect, err = _base_operator(rho.j, rho.k, rho.n, sigma, tol)
    return HermitianOperator(rho, sigma, np.eye(rho.n), symmetrize(rho, H), defect, err)


def sym_sqrt_inv(R: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(R)
    if w.min() <= 0:
        raise DomainError("R is not positive definite")
    return (v / np.sqrt(w)) @ v.T


def h_operator(rho: SymRep, sigma, R, tol: float = QUAD_TOL) -> HermitianOperator:
    """H_{rho,R}(s) = rho(R^-1/2) H_rho(s) rho(R^-1/2) det(R)^-(s+h)."""
    base = base_operator(rho, sigma, tol)
    R = np.asarray(as_sym_pos_def(R).to_numpy() if not isinstance(R, np.ndarray) else R, dtype=float)
    S = sym_sqrt_inv(R)
    rS = rho.numeric(S)
    H = rS @ base.matrix @ rS * np.linalg.det(R) ** (-base.sigma)
    return HermitianOperator(rho, base.sigma, R, H, hermitian_defect(rho, H), base.quad_error)


def conjugated_operator(rho: SymRep, sigma, R, u, tol: float = QUAD_TOL) -> np.ndarray:
    """rho(u^-1) H_{rho,R} rho(u^T^-1): the second route to H_{rho, u^T R u}."""
    u = np.asarray(u, dtype=float)
    ui = np.linalg.inv(u)
    H = h_operator(rho, sigma, R, tol).matrix
    return rho.numeric(ui) @ H @ rho.numeric(ui.T)


# ---------------------------------------------------------------------------
# closed forms


def maass_closed_form(lam, sigma, n: int) -> complex:
    """(4 pi)^-(n sigma + lambda_P) pi^(n(n-1)/4) prod Gamma(sigma + lambda_i - i/2 + 1/2)."""
    rho = GLWeight.of(lam)
    return (4 * math.pi) ** (-(n * complex(sigma) + rho.size)) * gamma_rho(rho, 0, sigma)


def maass_literal_form(lam, sigma, n: int, extra_k: float = 0.0) -> complex:
    """The variant with prefactor (4 pi)^-n(sigma + lambda_P), optionally with sigma + k in the Gammas."""
    rho = GLWeight.of(lam)
    return (4 * math.pi) ** (-n * (complex(sigma) + rho.size)) * gamma_rho(rho, extra_k, sigma)


def maass_plus_k_form(lam, sigma, n: int, k) -> complex:
    """The closed form with sigma + k in place of sigma inside the Gamma factors only."""
    rho = GLWeight.of(lam)
    return (4 * math.pi) ** (-(n * complex(sigma) + rho.size)) * gamma_rho(rho, k, sigma)


def maass_integral(lam, sigma, n: int, tol: float = QUAD_TOL) -> QuadResult:
    """int_Y prod l_ii^(2 lambda_i) e^(-4 pi tr y) |y|^sigma d^x y with y = L L^T (L lower triangular)."""
    lam = tuple(int(x) for x in lam)
    if len(lam) != n:
        raise SchemaError("need n weight entries")
    sigma = complex(sigma)
    if sigma.real <= (n - 1) / 2 - min(lam) + 1e-12 and sigma.real <= (n - 1) / 2:
        raise DomainError("the Maass integral diverges")

    def fn(y):
        if n == 1:
            return (y[..., 0, 0] ** lam[0])[..., None, None]
        a2 = y[..., 0, 0]
        c2 = y[..., 1, 1] - y[..., 0, 1] ** 2 / a2
        return (a2 ** lam[0] * c2 ** lam[1])[..., None, None]

    return _refine(lambda h: _cholesky_integral(n, sigma, fn, h), tol)


@dataclass
class MaassCheck:
    n: int
    lam: tuple
    sigma: complex
    quadrature: complex
    closed_form: complex
    literal_form: complex
    quad_error: float

    @property
    def rel_error(self) -> float:
        return abs(self.quadrature - self.closed_form) / abs(self.closed_form)

    @property
    def literal_rel_error(self) -> float:
        return abs(self.quadrature - self.literal_form) / abs(self.literal_form)

    def to_json(self):
        return {"n": self.n, "lambda": list(self.lam), "s_plus_h": {"re": self.sigma.real, "im": self.sigma.imag},
                "quadrature": {"re": self.quadrature.real, "im": self.quadrature.imag},
                "closed_form": {"re": self.closed_form.real, "im": self.closed_form.imag},
                "relative_error": self.rel_error,
                "literal_prefactor_form": {"re": self.literal_form.real, "im": self.literal_form.imag},
                "literal_relative_error": self.literal_rel_error, "quadrature_error": self.quad_error,
                "exact": False}


def maass_integral_check(lam, sigma, n: int, tol: float = QUAD_TOL) -> MaassCheck:
    q = maass_integral(lam, sigma, n, tol)
    return MaassCheck(n, tuple(lam), complex(sigma), complex(q.value[0, 0]), maass_closed_form(lam, sigma, n),
                      maass_literal_form(lam, sigma, n), q.error_estimate)


def eigenvalue_closed_form(rho: SymRep, sigma) -> complex:
    """Eigenvalue of H_rho(s) on P(1), P the standard pluriharmonic of rho.

    n = 1, rho = det^k: Gamma(sigma + k) (4 pi)^-(sigma + k).
    n = 2, rho = Sym^j det^k, P(1) = (X + iY)^j:
    2^-j (2 sigma')_j (4 pi)^(-2 sigma' - j) pi^(1/2) Gamma(sigma') Gamma(sigma' - 1/2), sigma' = sigma + k.
    """
    sigma = complex(sigma) + rho.k
    if rho.n == 1:
        return complex(gamma_fn(sigma) * (4 * math.pi) ** (-sigma))
    j = rho.j
    return complex(2.0 ** (-j) * math.prod(2 * sigma + i for i in range(j)) * (4 * math.pi) ** (-2 * sigma - j) * math.sqrt(math.pi)
                   * gamma_fn(sigma) * gamma_fn(sigma - 0.5))


def gamma_rho_eigenvalue(rho: SymRep, sigma) -> complex:
    """(4 pi)^-(n sigma + lambda_P) Gamma_rho(s), the Maass value on the highest weight.

    It is the eigenvalue on P(1) only for Sym^j with j <= 1: for larger j the
    O(n)-isotypic pieces of rho get different eigenvalues.
    """
    return maass_closed_form(rho.weight.entries, sigma, rho.n)


def highest_weight_coefficient(rho: SymRep, sigma, tol: float = QUAD_TOL) -> complex:
    """<H_rho v, v> / <v, v> for v = X^j, the vector rho(t) scales by t_11^j for t upper triangular.

    With y = L L^T this is the Maass integral of prod l_ii^(2 lambda_i), so it equals
    maass_closed_form(weight of rho) for every j.
    """
    H = base_operator(rho, sigma, tol).matrix
    v = np.zeros(rho.dim, dtype=complex)
    v[0] = 1
    return inner(rho, H @ v, v) / inner(rho, v, v)


def highest_vector(rho: SymRep) -> np.ndarray:
    """P(1) in the monomial basis: the coefficients of (X + iY)^j."""
    return np.array([math.comb(rho.j, i) * (1j) ** i for i in range(rho.j + 1)], dtype=complex)


# ---------------------------------------------------------------------------
# coefficient families


def _key(R: RationalMatrix) -> tuple:
    return R.key()


@dataclass
class Violation:
    R: RationalMatrix
    u: RationalMatrix
    expected: np.ndarray
    found: np.ndarray
    rule: str

    def to_json(self):
        return {"R": self.R.to_json(), "u": self.u.to_json(), "rule": self.rule,
                "expected": [{"re": v.real, "im": v.imag} for v in self.expected],
                "found": [{"re": v.real, "im": v.imag} for v in self.found]}


@dataclass
class FamilyReport:
    coherent: bool
    checked: int
    violation: Violation | None = None

    def to_json(self):
        return {"coherent": self.coherent, "checked": self.checked,
                "first_violation": self.violation.to_json() if self.violation else None}


@dataclass
class CoefficientFamily:
    """Synthetic Fourier coefficients c(R) = c(R, 1) in V.

    Values are given on reduced forms and extended by
    c(u^T R u) = eps(det u) rho(u^T) c(R), u in GL_n(Z), where eps(-1) = ``sign``
    records psi_infty(-1) from the unit rule. Entries in ``values`` at
    non-reduced R are extra data that validate_family compares with the transport.
    """

    n: int
    rho: SymRep
    values: dict = field(default_factory=dict)
    sign: int = 1

    def __post_init__(self):
        if self.rho.n != self.n:
            raise SchemaError("rho has the wrong degree")
        if self.sign not in (1, -1):
            raise SchemaError("sign must be +1 or -1")
        clean = {}
        for R, v in self.values.items():
            R = R if isinstance(R, RationalMatrix) else RationalMatrix(R)
            v = np.asarray(v, dtype=complex).reshape(-1)
            if v.shape != (self.rho.dim,):
                raise SchemaError(f"coefficient at {R.to_json()} has the wrong dimension")
            clean[_key(R)] = (as_sym_pos_def(R), v)
        self.values = clean

    def eps(self, det_u) -> int:
        return 1 if det_u > 0 else self.sign

    def transport(self, v: np.ndarray, u: RationalMatrix) -> np.ndarray:
        """The value at u^T R u from the value v at R."""
        return self.eps(u.det()) * (self.rho.numeric(u.T.to_numpy()) @ v)

    def value(self, R) -> np.ndarray:
        R = as_sym_pos_def(R)
        R0, U = minkowski_reduce(R)
        base = self.values.get(_key(R0))
        if base is None:
            return np.zeros(self.rho.dim, dtype=complex)
        # U^T R U = R0, so R = u^T R0 u with u = U^-1
        return self.transport(base[1], U.inverse())

    def support(self, det_bound) -> list[RationalMatrix]:
        out = []
        for R, v in self.values.values():
            R0, _ = minkowski_reduce(R)
            if R0.det() <= det_bound and np.any(v) and _key(R0) == _key(R):
                out.append(R)
        return sorted(out, key=lambda M: (M.det(), M.key()))

    def to_json(self):
        return {"n": self.n, "rho": self.rho.to_json(), "sign": self.sign,
                "values": [{"R": R.to_json(), "c": [{"re": x.real, "im": x.imag} for x in v]}
                           for R, v in self.values.values()]}

    @classmethod
    def from_json(cls, d: dict) -> "CoefficientFamily":
        try:
            n = int(d["n"])
            r = d.get("rho", {})
            rho = SymRep(int(r.get("j", 0)), int(r.get("k", 0)), n)
            vals = {}
            for e in d.get("values", []):
                R = RationalMatrix.parse(e["R"])
                vals[R] = [complex(x["re"], x.get("im", 0)) if isinstance(x, dict) else complex(x) for x in e["c"]]
            return cls(n, rho, vals, int(d.get("sign", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad coefficient family: {exc}") from exc


def project_invariant(fam: CoefficientFamily, R0, v) -> np.ndarray:
    """Average of eps(det a) rho(a^T) v over a in Aut(R0): the nearest coherent value at R0."""
    R0 = as_sym_pos_def(R0)
    auts = automorph_group(R0)
    v = np.asarray(v, dtype=complex)
    return sum(fam.transport(v, a) for a in auts) / len(auts)


def validate_family(fam: CoefficientFamily, tol: float = 1e-10) -> FamilyReport:
    """Check that every stored value is fixed by the automorphs of its form (two routes
    around an orbit loop agree) and that non-reduced entries equal their transports."""
    checked = 0
    for R, v in fam.values.values():
        R0, U = minkowski_reduce(R)
        if _key(R0) == _key(R):
            for a in automorph_group(R):
                checked += 1
                w = fam.transport(v, a)
                if np.linalg.norm(w - v) > tol * max(1.0, np.linalg.norm(v)):
                    return FamilyReport(False, checked, Violation(R, a, v, w, "automorph loop"))
        else:
            checked += 1
            base = fam.values.get(_key(R0))
            expected = fam.transport(base[1], U.inverse()) if base else np.zeros_like(v)
            if np.linalg.norm(expected - v) > tol * max(1.0, np.linalg.norm(v)):
                return FamilyReport(False, checked, Violation(R, U.inverse(), expected, v, "transport from reduced form"))
    return FamilyReport(True, checked)


def random_family(n: int, rho: SymRep, det_bound: int, sign: int = 1, seed: int = 0) -> CoefficientFamily:
    """Random coherent values on every reduced form with det <= det_bound."""
    rng = np.random.default_rng(seed)
    fam = CoefficientFamily(n, rho, {}, sign)
    vals = {}
    for R in reduced_forms(n, det_bound):
        v = rng.normal(size=rho.dim) + 1j * rng.normal(size=rho.dim)
        vals[R] = project_invariant(fam, R, v)
    return CoefficientFamily(n, rho, vals, sign)


# ---------------------------------------------------------------------------
# series


def inner(rho: SymRep, v: np.ndarray, w: np.ndarray) -> complex:
    """<v, w> = w^* G v, linear in v."""
    return complex(np.conj(w) @ rho.gram() @ v)


@dataclass
class SeriesResult:
    value: complex
    partial_sums: list[tuple[Fraction, complex]]
    terms: int
    det_bound: int
    monotone: bool | None
    quad_error: float

    def to_json(self):
        return {"value": {"re": self.value.real, "im": self.value.imag}, "det_bound": self.det_bound,
                "terms": self.terms, "partial_sums": [{"det": fmt_q(d), "re": v.real, "im": v.imag}
                                                      for d, v in self.partial_sums],
                "monotone_nondecreasing": self.monotone, "quadrature_error": self.quad_error, "exact": False}


def _coefficients_g(g, R: RationalMatrix) -> np.ndarray:
    if isinstance(g, ThetaSpec):
        return theta_coefficient(g, R).numeric()
    return g.value(R)


def rankin_series(s, f: CoefficientFamily, g, det_bound: int, h=0, tol: float = QUAD_TOL) -> SeriesResult:
    """sum over reduced R with det R <= det_bound of nu_R <H_{rho,R}(s) c_f(R), c_g(R)>."""
    rho = f.rho
    sigma = complex(s) + float(Fraction(h))
    base = base_operator(rho, sigma, tol)
    total = 0j
    partial = []
    terms = 0
    for R in reduced_forms(f.n, det_bound):
        cf = f.value(R)
        if not np.any(cf):
            continue
        cg = _coefficients_g(g, R)
        if not np.any(cg):
            continue
        Rn = R.to_numpy()
        S = sym_sqrt_inv(Rn)
        rS = rho.numeric(S)
        H = rS @ base.matrix @ rS * np.linalg.det(Rn) ** (-sigma)
        term = inner(rho, H @ cf, cg) / len(automorph_group(R))
        total += term
        terms += 1
        partial.append((R.det(), total))
    mono = None
    if g is f and abs(sigma.imag) < 1e-15:
        reals = [v.real for _, v in partial]
        mono = all(b >= a - 1e-12 * max(1, abs(a)) for a, b in zip(reals, reals[1:]))
    return SeriesResult(total, partial, terms, det_bound, mono, base.quad_error)


def cauchy_schwarz(s, f: CoefficientFamily, g: CoefficientFamily, det_bound: int, h=0) -> dict:
    """|D(f, g)|^2 <= D(f, f) D(g, g) for real s + h, where H is positive."""
    fg = rankin_series(s, f, g, det_bound, h).value
    ff = rankin_series(s, f, f, det_bound, h).value
    gg = rankin_series(s, g, g, det_bound, h).value
    lhs, rhs = abs(fg) ** 2, ff.real * gg.real
    return {"D_fg": {"re": fg.real, "im": fg.imag}, "D_ff": ff.real, "D_gg": gg.real,
            "holds": bool(lhs <= rhs * (1 + 1e-12)), "ratio": lhs / rhs if rhs else None}


@dataclass
class UnfoldingReport:
    lhs: complex
    rhs: complex
    rhs_gamma_rho: complex
    det_bound: int
    classes: int
    cosets: int
    quad_error: float
    mass: float = 0.0

    @property
    def degenerate(self) -> bool:
        """Both sides cancel to rounding level against the size of the individual terms."""
        top = max(abs(self.lhs), abs(self.rhs))
        return top <= 1e-12 * self.mass or top < 1e-20

    @property
    def rel_discrepancy(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0 else abs(self.lhs - self.rhs) / scale

    @property
    def rel_discrepancy_gamma_rho(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs_gamma_rho))
        return 0.0 if scale == 0 else abs(self.lhs - self.rhs_gamma_rho) / scale

    def to_json(self):
        return {"lhs": {"re": self.lhs.real, "im": self.lhs.imag}, "rhs": {"re": self.rhs.real, "im": self.rhs.imag},
                "relative_discrepancy": self.rel_discrepancy,
                "rhs_with_gamma_rho_eigenvalue": {"re": self.rhs_gamma_rho.real, "im": self.rhs_gamma_rho.imag},
                "relative_discrepancy_gamma_rho": self.rel_discrepancy_gamma_rho,
                "degenerate": self.degenerate, "det_bound": self.det_bound, "class_terms": self.classes, "coset_terms": self.cosets,
                "quadrature_error": self.quad_error, "exact": False}


def unfolding_check(f: CoefficientFamily, theta: ThetaSpec, s, det_bound: int, h=0,
                    tol: float = QUAD_TOL) -> UnfoldingReport:
    """Compare D(s, f, theta) truncated at det R <= B with the coset sum

        alpha(s) * sum over xi in M_n(Z) / GL_n(Z), det(xi^T tau xi) <= B, of
        conj(w(xi)) det(R_xi)^-(s+h) <c_f(R_xi), P(sqrt(tau)^-1 xi^T^-1)>,   R_xi = xi^T tau xi,

    where w(xi) = sgn(det xi)^mu chi(|det xi|) and alpha is the eigenvalue of H_rho on P(1).
    """
    rho = f.rho
    n = f.n
    if theta.n != n or theta.P.dim != rho.dim:
        raise SchemaError("family and theta series live on different spaces")
    if f.sign != (-1) ** theta.mu:
        raise DomainError("the sign type of f does not match the theta series; the class sum is not well defined")
    sigma = complex(s) + float(Fraction(h))
    lhs_res = rankin_series(s, f, theta, det_bound, h, tol)
    alpha = eigenvalue_closed_form(rho, sigma)
    alpha_g = gamma_rho_eigenvalue(rho, sigma)
    S_inv = np.linalg.inv(sqrt_tau_numeric(theta.tau))
    dtau = theta.tau.det()
    acc = 0j
    mass = 0.0
    cosets = 0
    d = 1
    while dtau * d * d <= det_bound:
        for xi in hermite_representatives(n, d):
            R = xi.T @ theta.tau @ xi
            cf = f.value(R)
            cosets += 1
            if not np.any(cf):
                continue
            w = theta.weight_complex(int(xi.det()))
            if w == 0:
                continue
            arg = S_inv @ np.linalg.inv(xi.to_numpy()).T
            Pv = theta.P.numeric(arg)
            term = np.conj(w) * float(R.det()) ** (-sigma) * inner(rho, cf, Pv)
            acc += term
            G = rho.gram()
            size = math.sqrt(abs(np.conj(cf) @ G @ cf) * abs(np.conj(Pv) @ G @ Pv))
            mass += abs(alpha * w) * abs(float(R.det()) ** (-sigma)) * size
        d += 1
    return UnfoldingReport(lhs_res.value, alpha * acc, alpha_g * acc, det_bound, lhs_res.terms, cosets,
                           lhs_res.quad_error, mass)


def select_tau(f: CoefficientFamily, theta_P, det_bound: int) -> RationalMatrix | None:
    """First reduced tau (by determinant) with <c_f(tau), P(sqrt(tau)^-1)> != 0."""
    for tau in reduced_forms(f.n, det_bound):
        c = f.value(tau)
        if not np.any(c):
            continue
        v = theta_P.numeric(np.linalg.inv(sqrt_tau_numeric(tau)))
        if abs(inner(f.rho, c, v)) > 1e-12:
            return tau
    return None


__all__ = [
    "de_rule", "base_operator", "h_operator", "conjugated_operator", "hermitian_defect", "HermitianOperator",
    "maass_integral", "maass_integral_check", "maass_closed_form", "maass_literal_form", "maass_plus_k_form", "MaassCheck",
    "eigenvalue_closed_form", "gamma_rho_eigenvalue", "highest_vector", "highest_weight_coefficient", "CoefficientFamily", "validate_family",
    "project_invariant", "random_family", "rankin_series", "unfolding_check", "UnfoldingReport", "select_tau",
    "inner", "FamilyReport", "cauchy_schwarz",
]
