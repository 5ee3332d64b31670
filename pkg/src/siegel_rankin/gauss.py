"""Matrix quadratic Gauss sums

    G(chi, X, R, F) = sum_{T in M_n(Z/F)} chi(det T) e((tr(X^T T) - tr(M T R T^T)) / F),

with M = Q^T tau Q, their exact values in a cyclotomic field, the Schwartz
function values they control, and exhaustive vanishing certificates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .chars import DirichletCharacter, enumerate_characters, squarefree_kernel
from .errors import DomainError, GuardExceeded, SchemaError
from .exactmath import (CyclotomicNumber, RationalMatrix, _power_table, fmt_q, p_adic_membership,
                        p_valuation, reduce_mod)

ENUM_GUARD = 10**8
QUADRATIC_ORDERS = ("TRT^t", "T^tRT")


def _check_guard(F: int, n: int):
    if F ** (n * n) > ENUM_GUARD:
        raise GuardExceeded(f"{F}^{n * n} terms exceed the guard {ENUM_GUARD}")


@lru_cache(maxsize=32)
def all_matrices(F: int, n: int) -> np.ndarray:
    """Every T in M_n(Z/F) as an array of shape (F^(n^2), n, n), lexicographic order."""
    _check_guard(F, n)
    grid = np.indices((F,) * (n * n)).reshape(n * n, -1).T
    return grid.reshape(-1, n, n).astype(np.int64)


def det_mod(T: np.ndarray, F: int) -> np.ndarray:
    n = T.shape[-1]
    if n == 1:
        d = T[:, 0, 0]
    elif n == 2:
        d = T[:, 0, 0] * T[:, 1, 1] - T[:, 0, 1] * T[:, 1, 0]
    else:
        d = np.zeros(T.shape[0], dtype=np.int64)
        for perm in itertools.permutations(range(n)):
            sign = 1
            for a in range(n):
                for b in range(a + 1, n):
                    if perm[a] > perm[b]:
                        sign = -sign
            term = np.ones(T.shape[0], dtype=np.int64)
            for r in range(n):
                term = (term * T[:, r, perm[r]]) % F
            d = d + sign * term
    return d % F


def _reduce_matrix(M: RationalMatrix, F: int, what: str) -> np.ndarray:
    try:
        return np.array([[reduce_mod(a, F) for a in row] for row in M.entries], dtype=np.int64)
    except DomainError as exc:
        raise DomainError(f"{what} is not integral at the primes of {F}") from exc


def quadratic_coefficients(M: RationalMatrix, R: RationalMatrix, F: int, order: str = "TRT^t") -> np.ndarray:
    """C with tr(M T R T^T) = sum C[b,c,a,d] T_bc T_ad, reduced mod F.

    Each product M_ab R_cd must be integral at the primes of F; this is the
    condition for the exponent to be a well defined function of T mod F.
    """
    n = M.rows
    C = np.zeros((n, n, n, n), dtype=np.int64)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if order == "TRT^t":
            # tr(M T R T^t) = sum M_ab T_bc R_cd T_ad
            coef = M[a, b] * R[c, d]
            idx = (b, c, a, d)
        elif order == "T^tRT":
            # tr(M T^t R T) = sum M_ab T_cb R_cd T_da
            coef = M[a, b] * R[c, d]
            idx = (c, b, d, a)
        else:
            raise SchemaError(f"unknown quadratic order {order!r}")
        if coef:
            if math.gcd(Fraction(coef).denominator, F) != 1:
                raise DomainError("quadratic exponent is not integral modulo F")
            C[idx] = (C[idx] + reduce_mod(coef, F)) % F
    return C


def _phase_exponents(T: np.ndarray, X: np.ndarray, C: np.ndarray, F: int) -> np.ndarray:
    lin = np.einsum("ij,tij->t", X, T) % F
    quad = np.einsum("bcad,tbc,tad->t", C, T, T) % F
    return (lin - quad) % F


def _chi_table(chi: DirichletCharacter, F: int) -> np.ndarray:
    return np.array([-1 if chi.exp(a) is None else chi.exp(a) for a in range(F)], dtype=np.int64)


def _counts_to_cyclotomic(counts: np.ndarray, L: int) -> CyclotomicNumber:
    return CyclotomicNumber.from_exponent_counts(L, counts.tolist())


def _int_table(L: int) -> np.ndarray:
    return np.array(_power_table(L).tolist(), dtype=np.int64)


@dataclass(frozen=True)
class GaussSumParams:
    n: int
    chi: DirichletCharacter
    X: RationalMatrix
    R: RationalMatrix
    F: int
    tauQ: RationalMatrix
    order: str = "TRT^t"

    def __post_init__(self):
        if self.F < 1:
            raise DomainError("F must be positive")
        if self.F % self.chi.modulus:
            raise DomainError("the character modulus must divide F")
        for M, nm in ((self.X, "X"), (self.R, "R"), (self.tauQ, "tau[Q]")):
            if M.rows != self.n or M.cols != self.n:
                raise SchemaError(f"{nm} must be {self.n}x{self.n}")
        if not self.R.is_symmetric():
            raise DomainError("R must be symmetric")


def gauss_sum(params: GaussSumParams) -> CyclotomicNumber:
    """Exact value of the matrix Gauss sum, as an element of Q(zeta_L), L = lcm(F, ord chi)."""
    n, F, chi = params.n, params.F, params.chi
    _check_guard(F, n)
    T = all_matrices(F, n)
    X = _reduce_matrix(params.X, F, "X")
    C = quadratic_coefficients(params.tauQ, params.R, F, params.order)
    e = chi.order_base
    L = math.lcm(F, e)
    ctab = _chi_table(chi, F)
    cexp = ctab[det_mod(T, F)]
    keep = cexp >= 0
    k = (cexp[keep] * (L // e) + _phase_exponents(T[keep], X, C, F) * (L // F)) % L
    return _counts_to_cyclotomic(np.bincount(k, minlength=L), L)


# ---------------------------------------------------------------------------
# Schwartz function after the eta and translation actions


@dataclass(frozen=True)
class SchwartzSpec:
    Q: RationalMatrix
    chi: DirichletCharacter
    tau: RationalMatrix

    def __post_init__(self):
        if self.Q.det() == 0:
            raise DomainError("Q must be invertible")


@dataclass
class EtaValue:
    support: bool
    gauss: CyclotomicNumber | None = None
    chi_detQ: CyclotomicNumber | None = None
    rational_factor: Fraction | None = None
    sqrt_factor: int = 1
    membership_matrix: RationalMatrix | None = None

    @property
    def is_zero(self) -> bool:
        return (not self.support) or self.gauss.is_zero() or (self.chi_detQ is not None and self.chi_detQ.is_zero())

    def to_json(self):
        d = {"support": self.support, "exact": True,
             "membership_matrix": self.membership_matrix.to_json() if self.membership_matrix else None}
        if self.support:
            d.update({
                "gauss_sum": self.gauss.to_json(),
                "chi_detQ": self.chi_detQ.to_json() if self.chi_detQ is not None else None,
                "prefactor": {"rational": fmt_q(self.rational_factor), "sqrt_of": self.sqrt_factor},
                "zero": self.is_zero,
            })
        else:
            d["zero"] = True
        return d


def abs_det_power(d: Fraction, n: int) -> tuple[Fraction, int]:
    """|d|^(-n/2) as r * sqrt(s) with r rational and s a squarefree positive integer."""
    a = abs(Fraction(d))
    if a == 0:
        raise DomainError("zero determinant")
    if n % 2 == 0:
        return a ** (-(n // 2)), 1
    r = a ** (-((n + 1) // 2))
    # sqrt(a) = sqrt(num*den)/den, then pull squares out of num*den
    m = a.numerator * a.denominator
    s = squarefree_kernel(Fraction(m))
    root = math.isqrt(m // s)
    return r * Fraction(root, a.denominator), s


def eta_sigma_schwartz(spec: SchwartzSpec, b, x, p: int) -> EtaValue:
    """Local value at p of the eta-then-translation transformed Schwartz function.

    Support: p^Fp tau[Q] - 2 x^T tau Q must lie in p^-Fp M_n(Z_p) when p | F and
    in M_n(Z_p) otherwise (Fp = ord_p F). On the support the value is
    chi(det Q) |det(2 Q F tau)|^(-n/2) G(chi, 2F Q^T tau x, F b, F).
    """
    b = RationalMatrix.parse(b)
    x = RationalMatrix.parse(x)
    if not b.is_symmetric() or not p_adic_membership(b, p, 0):
        raise DomainError("b must be a p-integral symmetric matrix")
    Q, tau, chi = spec.Q, spec.tau, spec.chi
    n = tau.rows
    F = chi.modulus
    Fp = int(p_valuation(F, p)) if F % p == 0 else 0
    tauQ = Q.T @ tau @ Q
    test = tauQ.scale(Fraction(p) ** Fp) - (x.T @ tau @ Q).scale(2)
    if F % p == 0:
        supported = p_adic_membership(test, p, -Fp)
    else:
        supported = p_adic_membership(test, p, 0)
    if not supported:
        return EtaValue(False, membership_matrix=test)
    X = (Q.T @ tau @ x).scale(2 * F)
    G = gauss_sum(GaussSumParams(n, chi, X, b.scale(F), F, tauQ))
    dq = Q.det()
    chi_dq = None
    if math.gcd(dq.denominator, F) == 1 and math.gcd(dq.numerator, F) == 1:
        chi_dq = chi(reduce_mod(dq, F)) if F > 1 else CyclotomicNumber.rational(1)
    r, s = abs_det_power((Q @ tau).scale(2 * F).det(), n)
    return EtaValue(True, G, chi_dq, r, s, test)


# ---------------------------------------------------------------------------
# vanishing certificates


def symmetric_matrices(F: int, n: int) -> list[np.ndarray]:
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    out = []
    for vals in itertools.product(range(F), repeat=len(idx)):
        R = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in zip(idx, vals):
            R[i, j] = R[j, i] = v
        out.append(R)
    return out


def singular_matrices(p: int, n: int) -> np.ndarray:
    T = all_matrices(p, n)
    return T[det_mod(T, p) == 0]


@dataclass
class Certificate:
    n: int
    p: int
    tau: RationalMatrix
    Q: RationalMatrix
    parity: str
    order: str
    swept: int = 0
    nonzero: int = 0
    counterexample: dict | None = None
    in_scope: bool = True
    scope_notes: list[str] = field(default_factory=list)

    @property
    def zero(self) -> bool:
        return self.nonzero == 0

    def to_json(self):
        return {
            "n": self.n, "p": self.p, "tau": self.tau.to_json(), "Q": self.Q.to_json(),
            "characters": self.parity, "quadratic_order": self.order,
            "swept": self.swept, "nonzero_cases": self.nonzero, "zero": self.zero, "exact": True,
            "in_scope": self.in_scope, "scope_notes": self.scope_notes,
            "counterexample": self.counterexample,
        }


def vanishing_scope(n: int, p: int, tau: RationalMatrix, Q: RationalMatrix, chi: DirichletCharacter) -> list[str]:
    """Reasons why (p, tau, Q, chi) falls outside the vanishing statement (empty when inside)."""
    notes = []
    if p == 2:
        notes.append("p is even")
    if any(tau[i, j] for i in range(n) for j in range(n) if i != j):
        notes.append("tau is not diagonal")
    if any(Q[i, j] for i in range(n) for j in range(i)):
        notes.append("Q is not upper triangular")
    if not chi.is_odd():
        notes.append("character is even")
    if chi.conductor != p:
        notes.append("character conductor is not p")
    return notes


def vanishing_certificate(n: int, p: int, tau, Q=None, parity: str = "odd", order: str = "TRT^t",
                          stop_at_first: bool = False) -> Certificate:
    """Exhaustively evaluate G(chi, X, R, p) over singular X, symmetric R mod p and characters mod p.

    ``parity`` selects odd, even or all nontrivial characters. The certificate
    records every nonzero case count and the first counterexample.
    """
    if n > 2:
        raise GuardExceeded("certificates are swept for n <= 2")
    tau = RationalMatrix.parse(tau)
    Q = RationalMatrix.identity(n) if Q is None else RationalMatrix.parse(Q)
    M = Q.T @ tau @ Q
    if parity not in ("odd", "even", "all"):
        raise SchemaError("parity must be odd, even or all")
    chars = [c for c in enumerate_characters(p) if not c.is_trivial()]
    if parity == "odd":
        chars = [c for c in chars if c.is_odd()]
    elif parity == "even":
        chars = [c for c in chars if not c.is_odd()]
    cert = Certificate(n, p, tau, Q, parity, order)
    notes = set()
    for c in chars:
        notes.update(vanishing_scope(n, p, tau, Q, c))
    cert.scope_notes = sorted(notes)
    cert.in_scope = not notes and bool(chars)
    T = all_matrices(p, n)
    d = det_mod(T, p)
    Xs = singular_matrices(p, n)
    lin = np.einsum("xij,tij->xt", Xs, T) % p
    Mred = _reduce_matrix(M, p, "tau[Q]")
    for chi in chars:
        e = chi.order_base
        L = math.lcm(p, e)
        table = _int_table(L)
        cexp = _chi_table(chi, p)[d]
        keep = cexp >= 0
        Tk = T[keep]
        base_chi = cexp[keep] * (L // e)
        lin_k = lin[:, keep]
        for R in symmetric_matrices(p, n):
            C = quadratic_coefficients(RationalMatrix(Mred.tolist()), RationalMatrix(R.tolist()), p, order)
            quad = np.einsum("bcad,tbc,tad->t", C, Tk, Tk) % p
            k = (base_chi[None, :] + ((lin_k - quad[None, :]) % p) * (L // p)) % L
            offs = k + (np.arange(len(Xs)) * L)[:, None]
            counts = np.bincount(offs.ravel(), minlength=len(Xs) * L).reshape(len(Xs), L)
            vecs = counts @ table
            bad = np.nonzero(np.any(vecs != 0, axis=1))[0]
            cert.swept += len(Xs)
            cert.nonzero += len(bad)
            if len(bad) and cert.counterexample is None:
                i = int(bad[0])
                val = _counts_to_cyclotomic(counts[i], L)
                cert.counterexample = {
                    "chi": chi.to_json(), "X": Xs[i].tolist(), "R": R.tolist(),
                    "tau[Q] mod p": Mred.tolist(), "value": val.to_json(), "abs_value": abs(complex(val)),
                }
            if stop_at_first and cert.nonzero:
                return cert
    return cert
