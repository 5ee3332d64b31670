"""Closed-form analytic factors: Siegel Gamma, Gamma_rho, Gamma^{k,n}, products
of Dirichlet L-functions, Euler factors of the standard L-function, truncated
standard L-values and the pole predictor."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import loggamma
from sympy import factorint, primerange

from .chars import DirichletCharacter, LValue, dirichlet_L, trivial_character
from .errors import DomainError, SchemaError
from .exactmath import fmt_q, to_fraction
from .weights import GLWeight


class PoleSignal(DomainError):
    """Evaluation at a pole of a Gamma factor."""

    def __init__(self, where: str, argument):
        super().__init__(f"pole of Gamma at argument {argument} ({where})")
        self.argument = argument


def _check_pole(z: complex, where: str):
    z = complex(z)
    if abs(z.imag) < 1e-14 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-12:
        raise PoleSignal(where, round(z.real))


def _gamma(z: complex, where: str = "Gamma") -> complex:
    _check_pole(z, where)
    return complex(np.exp(loggamma(complex(z))))


def _log_gamma(z: complex, where: str) -> complex:
    _check_pole(z, where)
    return complex(loggamma(complex(z)))


def siegel_gamma(n: int, s) -> complex:
    """Gamma_n(s) = pi^(n(n-1)/4) prod_{j=0}^{n-1} Gamma(s - j/2)."""
    if n < 1:
        raise SchemaError("n must be positive")
    s = complex(s)
    acc = n * (n - 1) / 4 * math.log(math.pi)
    for j in range(n):
        acc += _log_gamma(s - j / 2, f"Gamma_{n} factor j={j}")
    return complex(cmath.exp(acc))


def gamma_rho(rho: GLWeight, h, s) -> complex:
    """pi^(n(n-1)/4) prod_{i=1}^n Gamma(s + h + lambda_i - i/2 + 1/2)."""
    n = rho.n
    z = complex(s) + float(to_fraction(h))
    acc = n * (n - 1) / 4 * math.log(math.pi)
    for i, lam in enumerate(rho.entries, 1):
        acc += _log_gamma(z + lam - i / 2 + 0.5, f"Gamma_rho factor i={i}")
    return complex(cmath.exp(acc))


@dataclass(frozen=True)
class GammaKNCase:
    label: str
    siegel_degree: int
    shift: Fraction
    extra: tuple  # (a, b) pairs for factors Gamma(a s + b)

    def to_json(self):
        return {"case": self.label, "siegel_degree": self.siegel_degree, "shift": fmt_q(self.shift),
                "extra_factors": [{"s_coeff": a, "const": fmt_q(b)} for a, b in self.extra]}


def gamma_kn_case(k, n: int) -> GammaKNCase:
    """Which branch of Gamma^{k,n} applies, with its factors Gamma_m(s + shift) prod Gamma(a s + b)."""
    k = to_fraction(k)
    if (2 * k).denominator != 1:
        raise SchemaError("k must lie in (1/2)Z")
    half = Fraction(n, 2)
    kappa = k - half
    if kappa < 0 or (kappa == 0 and kappa.denominator != 1):
        raise DomainError(f"Gamma^(k,n) needs k >= n/2, got k = {fmt_q(k)}, n = {n}")
    nbar = n % 2
    shift = (k - n) / 2
    if k > n and k.denominator != 1:
        return GammaKNCase("n<k not integral", n, shift, ())
    if k > n:
        b = (k - n - nbar) / 2 - math.floor((k - nbar) / 2)
        return GammaKNCase("n<k integral", n, shift, ((1, b),))
    m = int(2 * k - n + 1)
    if kappa.denominator == 1:
        lo, hi = int(kappa) + 1, n // 2
        extra = tuple((2, -half - i) for i in range(lo, hi + 1))
        return GammaKNCase("k-n/2 integral, k<=n", m, shift, extra)
    lo, hi = math.floor(kappa) + 1, (n - 1) // 2
    extra = tuple((2, -Fraction(n + 1, 2) - i) for i in range(lo, hi + 1))
    return GammaKNCase("k-n/2 not integral, k<=n", m, shift, extra)


def gamma_kn(k, n: int, s) -> complex:
    case = gamma_kn_case(k, n)
    s = complex(s)
    val = siegel_gamma(case.siegel_degree, s + float(case.shift))
    for a, b in case.extra:
        val *= _gamma(a * s + float(b), f"Gamma^(k,n) factor Gamma({a}s + {fmt_q(b)})")
    return val


# ---------------------------------------------------------------------------
# products of Dirichlet L-functions


@dataclass
class LambdaValue:
    value: complex
    tail_bound: float
    factors: list[dict] = field(default_factory=list)

    def to_json(self):
        return {"re": self.value.real, "im": self.value.imag, "tail_bound": self.tail_bound, "factors": self.factors,
                "exact": False}


def lambda_constituents(m: int, kappa) -> list[tuple[int, int, int]]:
    """(a, b, e): the factors L(a s + b, eta^e) of Lambda^{m,kappa}."""
    if m < 1:
        raise SchemaError("m must be a positive integer")
    kappa = to_fraction(kappa)
    if (2 * kappa).denominator != 1:
        raise SchemaError("kappa must lie in (1/2)Z")
    if kappa.denominator == 1:
        return [(2, 0, 1)] + [(4, -2 * i, 2) for i in range(1, m // 2 + 1)]
    return [(4, -2 * i + 1, 2) for i in range(1, (m + 1) // 2 + 1)]


def lambda_factor(m: int, kappa, x: int, eta: DirichletCharacter, s, P_max: int = 10**5) -> LambdaValue:
    """Lambda_x^{m,kappa}(s, eta) with the Euler factors at primes of x removed."""
    s = complex(s)
    vals: list[LValue] = []
    info = []
    for a, b, e in lambda_constituents(m, kappa):
        w = a * s + b
        if w.real <= 1:
            raise DomainError(f"L({w}) is outside the region of absolute convergence")
        lv = dirichlet_L(w, eta**e, P_max, skip=x)
        vals.append(lv)
        info.append({"argument": {"re": w.real, "im": w.imag}, "power": e, "re": lv.value.real, "im": lv.value.imag,
                     "tail_bound": lv.tail_bound})
    value = complex(np.prod([v.value for v in vals])) if vals else 1 + 0j
    upper = float(np.prod([abs(v.value) + v.tail_bound for v in vals]))
    lower = float(np.prod([abs(v.value) for v in vals]))
    return LambdaValue(value, upper - lower, info)


# ---------------------------------------------------------------------------
# Euler factors and the standard L-function


@dataclass
class SatakeData:
    n: int
    k: Fraction
    params: dict[int, list[complex]]
    level: int = 1
    psi: DirichletCharacter = field(default_factory=trivial_character)

    def __post_init__(self):
        self.k = to_fraction(self.k)
        if (2 * self.k).denominator != 1:
            raise SchemaError("k must lie in (1/2)Z")
        for p, lam in self.params.items():
            if len(factorint(p)) != 1 or list(factorint(p).values()) != [1]:
                raise SchemaError(f"{p} is not a prime")
            if len(lam) != self.n:
                raise SchemaError(f"need {self.n} Satake parameters at {p}")
            if any(abs(complex(l)) == 0 for l in lam):
                raise DomainError("Satake parameters must be nonzero")

    @property
    def integral_weight(self) -> bool:
        return self.k.denominator == 1

    @classmethod
    def from_json(cls, d: dict) -> "SatakeData":
        try:
            params = {int(p): [complex(v["re"], v.get("im", 0)) if isinstance(v, dict) else complex(v) for v in lam]
                      for p, lam in d.get("params", {}).items()}
            psi = d.get("psi")
            psi = DirichletCharacter(int(psi["modulus"]), psi.get("exponents", [])) if psi else trivial_character()
            return cls(int(d["n"]), to_fraction(d["k"]), params, int(d.get("level", 1)), psi)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad Satake data: {exc}") from exc

    @classmethod
    def unramified_trivial(cls, n: int, k, primes) -> "SatakeData":
        return cls(n, to_fraction(k), {p: [1.0] * n for p in primes})


def euler_factor(p: int, data: SatakeData, at_level: bool | None = None) -> np.ndarray:
    """Coefficients (ascending in t) of L_p(t); constant term 1.

    ``at_level`` defaults to p | level.
    """
    if p not in data.params:
        raise DomainError(f"no Satake parameters at {p}")
    if at_level is None:
        at_level = data.level % p == 0
    n = data.n
    pn = float(p) ** n
    roots = []  # reciprocal roots a with factor (1 - a t)
    lam = [complex(l) for l in data.params[p]]
    if at_level:
        roots = [pn * l for l in lam]
    else:
        roots = [pn * l for l in lam] + [pn / l for l in lam]
        if data.integral_weight:
            roots = [pn] + roots
    poly = np.array([1 + 0j])
    for a in roots:
        poly = npoly.polymul(poly, np.array([1, -a]))
    return poly


@dataclass
class StandardLValue:
    value: complex
    primes: list[int]
    absolutely_convergent: bool
    note: str = ""

    def to_json(self):
        return {"re": self.value.real, "im": self.value.imag, "primes": self.primes,
                "absolutely_convergent": self.absolutely_convergent, "note": self.note,
                "exact": False, "error_bound": None if not self.absolutely_convergent else "truncation only"}


def psi_prime(psi: DirichletCharacter, level: int, p: int) -> complex:
    """psi'(p) with the components at primes of the level removed: psi(p) for p prime to the
    modulus of psi, and 1 otherwise."""
    if psi.modulus % p == 0:
        return 1.0
    return psi.complex(p)


def truncated_standard_L(s, data: SatakeData, chi: DirichletCharacter | None = None,
                         prime_bound: int | None = None, remove: tuple[int, ...] = ()) -> StandardLValue:
    """prod over supplied primes p <= prime_bound (p not in ``remove``) of L_p(psi'(p) chi(p) p^-s)^-1."""
    s = complex(s)
    chi = chi or trivial_character()
    primes = sorted(p for p in data.params if (prime_bound is None or p <= prime_bound) and p not in remove)
    val = 1 + 0j
    for p in primes:
        t = psi_prime(data.psi, data.level, p) * chi.complex(p) * p ** (-s)
        val /= npoly.polyval(t, euler_factor(p, data))
    bound = 2 * data.n + 1 if data.integral_weight else 2 * data.n
    conv = s.real > bound
    note = "" if conv else f"Re(s) <= {bound}: outside the region of absolute convergence"
    return StandardLValue(complex(val), primes, conv, note)


# ---------------------------------------------------------------------------
# poles


@dataclass
class Pole:
    s: Fraction
    source: str

    def to_json(self):
        return {"s": fmt_q(self.s), "source": self.source, "order": 1}


@dataclass
class PoleReport:
    case: dict
    exceptional_set: list[Pole]
    lambda_ratio_poles: list[Pole]
    oscillatory: list[dict] = field(default_factory=list)
    simple: bool = True

    def to_json(self):
        return {"case": self.case, "exceptional_set": [p.to_json() for p in self.exceptional_set],
                "lambda_ratio_poles": [p.to_json() for p in self.lambda_ratio_poles],
                "oscillatory_zero_sets": self.oscillatory, "all_simple": self.simple, "exact": True}


def _ratio_poles(n: int, k: Fraction, c: int, y: int, eta: DirichletCharacter | None):
    """Poles of (Lambda_c / Lambda_y)((2s - n)/4) on the real axis.

    L_c / L_y = prod_{p | y, p not | c} (1 - eta(p) p^-w)^-1 prod_{p | c, p not | y} (1 - eta(p) p^-w),
    so only primes of y outside c contribute poles, at real w = 0 when eta^e(p) = 1.
    """
    if eta is None:
        return [], []
    kappa = k - Fraction(n, 2)
    poles: dict[Fraction, list[str]] = {}
    osc = []
    for p in sorted(factorint(y)):
        if c % p == 0:
            continue
        for a, b, e in lambda_constituents(n, kappa):
            val = (eta**e).complex(p)
            if val == 0:
                continue
            # a s' + b = w with s' = (2s - n)/4; w = 0 gives s = (n - 2b/a) / 2 ... solved exactly below
            sprime = Fraction(-b, a)
            s = (4 * sprime + n) / 2
            arg = cmath.phase(val)
            osc.append({"p": p, "factor": f"L({a}s'{b:+d}, eta^{e})", "re_s": fmt_q(s),
                        "spacing_im_s": 2 * 2 * math.pi / (a * math.log(p)),
                        "offset_im_s": 2 * arg / (a * math.log(p))})
            if abs(val - 1) < 1e-12:
                poles.setdefault(s, []).append(f"1 - eta^{e}({p}) p^-({a}s'{b:+d}) at s' = {fmt_q(sprime)}")
    return [Pole(s, "; ".join(src)) for s, src in sorted(poles.items())], osc


def pole_report(k, n: int, psi_chi_square_trivial: bool, c: int = 1, y: int = 1,
                eta: DirichletCharacter | None = None) -> PoleReport:
    k = to_fraction(k)
    if (2 * k).denominator != 1:
        raise SchemaError("k must lie in (1/2)Z")
    kappa = k - Fraction(n, 2)
    if kappa < 0 or (kappa == 0 and kappa.denominator != 1):
        raise DomainError("the pole description needs k >= n/2")
    y_trivial = y == 1
    case = {"k": fmt_q(k), "n": n, "psi_chi_square_trivial": psi_chi_square_trivial, "y_trivial": y_trivial,
            "k_integral": k.denominator == 1, "k_minus_half_n_integral": kappa.denominator == 1}
    ratio, osc = _ratio_poles(n, k, c, y, eta)
    exc: list[Pole] = []
    if not psi_chi_square_trivial:
        case["branch"] = "(psi chi)^2 != 1: Lambda-ratio poles only"
        return PoleReport(case, exc, ratio, osc)
    if k > n:
        case["branch"] = "k > n"
        if k.denominator == 1 and (k - n) % 2 == 0:
            exc.append(Pole(Fraction(n + 1), "single pole at s = n+1 (k integral, k-n even)"))
    elif kappa.denominator == 1:
        case["branch"] = "n/2 <= k <= n, k-n/2 integral"
        for j in range(n + 1, math.floor(2 * n + 1 - k) + 1):
            exc.append(Pole(Fraction(j), "n+1 <= j <= 2n+1-k"))
    else:
        case["branch"] = "n/2 <= k <= n, k-n/2 not integral"
        for j in range(n + 1, math.floor(2 * n + Fraction(1, 2) - k) + 1):
            exc.append(Pole(Fraction(2 * j + 1, 2), "j+1/2 with n+1 <= j <= 2n+1/2-k"))
    if y_trivial and kappa.denominator == 1:
        case["extra"] = "y = Z: additional set [(n+1)/2] <= j <= n"
        have = {p.s for p in exc}
        for j in range((n + 1) // 2, n + 1):
            if Fraction(j) not in have:
                exc.append(Pole(Fraction(j), "[(n+1)/2] <= j <= n (y trivial)"))
    exc.sort(key=lambda p: p.s)
    return PoleReport(case, exc, ratio, osc)


__all__ = [
    "PoleSignal", "siegel_gamma", "gamma_rho", "gamma_kn", "gamma_kn_case", "lambda_constituents", "lambda_factor",
    "LambdaValue", "SatakeData", "euler_factor", "truncated_standard_L", "StandardLValue", "pole_report", "PoleReport",
    "Pole", "primerange",
]
