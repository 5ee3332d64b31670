"""Dirichlet characters with exact values, the quadratic character of a
form, and truncated Euler products for L(s, chi)."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, primerange, primitive_root
from sympy.functions.combinatorial.numbers import jacobi_symbol

from .errors import DomainError, SchemaError
from .exactmath import CyclotomicNumber, RationalMatrix, as_sym_pos_def


@lru_cache(maxsize=None)
def unit_group(F: int) -> tuple[tuple[int, int], ...]:
    """Generators of (Z/F)^x with their orders, one or two per prime power.

    Each generator is congruent to 1 modulo the other prime-power factors.
    """
    if F < 1:
        raise DomainError("modulus must be positive")
    gens = []
    fac = sorted(factorint(F).items())
    for p, k in fac:
        q = p**k
        rest = F // q
        local: list[tuple[int, int]] = []
        if p == 2:
            if k == 2:
                local = [(q - 1, 2)]
            elif k >= 3:
                local = [(q - 1, 2), (5, 2 ** (k - 2))]
        else:
            local = [(int(primitive_root(q)), (p - 1) * p ** (k - 1))]
        for g, order in local:
            # CRT: g mod q, 1 mod rest
            if rest > 1:
                g = (g * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % F
            gens.append((g % F, order))
    return tuple(gens)


@lru_cache(maxsize=None)
def _log_table(F: int) -> dict[int, tuple[int, ...]]:
    gens = unit_group(F)
    table = {}
    for exps in itertools.product(*[range(o) for _, o in gens]):
        u = 1
        for (g, _), e in zip(gens, exps):
            u = u * pow(g, e, F) % F
        table[u % F] = exps
    if F == 1:
        table = {0: ()}
    return table


def group_exponent(F: int) -> int:
    return math.lcm(1, *[o for _, o in unit_group(F)])


class DirichletCharacter:
    """A Dirichlet character mod F, given by exponents a_i with chi(g_i) = zeta_{s_i}^{a_i}.

    ``sign_at_infinity`` is the declared infinity type chi_infty(-1); it always
    equals the parity chi(-1) for characters coming from Q.
    """

    def __init__(self, modulus: int, exponents=()):
        self.modulus = int(modulus)
        gens = unit_group(self.modulus)
        exps = tuple(int(a) for a in exponents)
        if len(exps) != len(gens):
            raise SchemaError(f"modulus {modulus} needs {len(gens)} exponents, got {len(exps)}")
        self.exponents = tuple(a % o for a, (_, o) in zip(exps, gens))
        self.order_base = group_exponent(self.modulus)

    # value access -------------------------------------------------------
    def exp(self, a: int) -> int | None:
        """k with chi(a) = zeta_e^k (e the group exponent), or None when gcd(a, F) > 1."""
        F = self.modulus
        logs = _log_table(F).get(a % F)
        if logs is None:
            return None
        e = self.order_base
        return sum(x * y * (e // o) for x, y, (_, o) in zip(self.exponents, logs, unit_group(F))) % e

    def __call__(self, a: int) -> CyclotomicNumber:
        k = self.exp(a)
        if k is None:
            return CyclotomicNumber.rational(0)
        return CyclotomicNumber.root_of_unity(self.order_base, k)

    def complex(self, a: int) -> complex:
        k = self.exp(a)
        if k is None:
            return 0j
        return cmath.exp(2j * math.pi * k / self.order_base)

    # bookkeeping ----------------------------------------------------------
    @property
    def parity(self) -> int:
        k = self.exp(-1)
        return 1 if k == 0 else -1

    @property
    def sign_at_infinity(self) -> int:
        return self.parity

    def is_odd(self) -> bool:
        return self.parity == -1

    def is_trivial(self) -> bool:
        return all(a == 0 for a in self.exponents)

    @property
    def order(self) -> int:
        return math.lcm(1, *[o // math.gcd(o, a) for a, (_, o) in zip(self.exponents, unit_group(self.modulus))])

    @property
    def conductor(self) -> int:
        F = self.modulus
        units = [a for a in range(F) if math.gcd(a, F) == 1]
        for d in sorted(q for q in range(1, F + 1) if F % q == 0):
            if all(self.exp(a) == 0 for a in units if (a - 1) % d == 0):
                return d
        return F

    def is_real(self) -> bool:
        return self.order <= 2

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, [-a for a in self.exponents])

    def induce(self, M: int) -> "DirichletCharacter":
        """The character mod M (F | M) agreeing with self on units mod M."""
        if M % self.modulus:
            raise DomainError("can only induce to a multiple of the modulus")
        return DirichletCharacter.from_exponent_function(M, lambda a: self.exp(a), self.order_base)

    def __mul__(self, o: "DirichletCharacter") -> "DirichletCharacter":
        M = math.lcm(self.modulus, o.modulus)
        a, b = self.induce(M), o.induce(M)
        return DirichletCharacter(M, [x + y for x, y in zip(a.exponents, b.exponents)])

    def __pow__(self, k: int) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, [a * k for a in self.exponents])

    @classmethod
    def from_exponent_function(cls, F: int, f, base: int) -> "DirichletCharacter":
        """Build from f(a) = k with chi(a) = zeta_base^k on units mod F."""
        exps = []
        for g, o in unit_group(F):
            k = f(g)
            if k is None:
                raise DomainError("function vanishes on a unit")
            # zeta_base^k must be an o-th root of unity: k*o divisible by base
            if (k * o) % base:
                raise DomainError("values are not compatible with the unit group")
            exps.append((k * o // base) % o)
        chi = cls(F, exps)
        return chi

    def __eq__(self, o):
        return isinstance(o, DirichletCharacter) and self.modulus == o.modulus and self.exponents == o.exponents

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "generators": [g for g, _ in unit_group(self.modulus)],
            "generator_exponents": list(self.exponents),
            "parity": self.parity,
            "conductor": self.conductor,
        }

    def __repr__(self):
        return f"DirichletCharacter({self.modulus}, {list(self.exponents)})"


def trivial_character(F: int = 1) -> DirichletCharacter:
    return DirichletCharacter(F, [0] * len(unit_group(F)))


def enumerate_characters(F: int) -> list[DirichletCharacter]:
    """All phi(F) characters mod F, ordered lexicographically by exponent vector."""
    gens = unit_group(F)
    return [DirichletCharacter(F, e) for e in itertools.product(*[range(o) for _, o in gens])]


def odd_characters(F: int) -> list[DirichletCharacter]:
    return [c for c in enumerate_characters(F) if c.is_odd()]


# ---------------------------------------------------------------------------
# quadratic characters


def kronecker(D: int, m: int) -> int:
    """Kronecker symbol (D/m)."""
    if m == 0:
        return 1 if abs(D) == 1 else 0
    r = 1
    if m < 0:
        m = -m
        if D < 0:
            r = -r
    while m % 2 == 0:
        m //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            r = -r
    if m == 1:
        return r
    return r * int(jacobi_symbol(D % m, m))


def squarefree_kernel(q: Fraction) -> int:
    """The squarefree integer d with q in d * (Q^x)^2."""
    q = Fraction(q)
    if q == 0:
        raise DomainError("zero has no square class")
    sign = -1 if q < 0 else 1
    d = 1
    for p, e in factorint(abs(q.numerator) * q.denominator).items():
        if e % 2:
            d *= p
    return sign * d


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt d) for squarefree d (1 for the trivial extension)."""
    if d == 1:
        return 1
    return d if d % 4 == 1 else 4 * d


@dataclass(frozen=True)
class QuadCharacter:
    D: int

    @property
    def conductor(self) -> int:
        return abs(self.D)

    def __call__(self, m: int) -> int:
        return kronecker(self.D, m)

    @property
    def parity(self) -> int:
        return -1 if self.D < 0 else 1

    def is_trivial(self) -> bool:
        return self.D == 1

    def as_dirichlet(self) -> DirichletCharacter:
        F = abs(self.D)
        return DirichletCharacter.from_exponent_function(F, lambda a: 0 if self(a) == 1 else 1, 2)

    def to_json(self) -> dict:
        return {"D": self.D, "conductor": self.conductor, "parity": self.parity}


def epsilon_tau(tau, n: int | None = None) -> QuadCharacter:
    """Quadratic character of Q(i^[n/4] sqrt|2 tau|)/Q.

    i^[n/4] is read as contributing the sign (-1)^[n/4] under the square root.
    """
    tau = as_sym_pos_def(tau)
    n = tau.rows if n is None else n
    val = (-1) ** (n // 4) * (tau.scale(2)).det()
    return QuadCharacter(fundamental_discriminant(squarefree_kernel(val)))


# ---------------------------------------------------------------------------
# L-values


@dataclass(frozen=True)
class LValue:
    value: complex
    tail_bound: float
    primes_used: int

    def to_json(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag, "tail_bound": self.tail_bound}


def euler_tail(sigma: float, P: int) -> float:
    """Bound for sum_{p > P} |log(1 - chi(p) p^-s)| with Re s = sigma > 1."""
    head = P ** (1 - sigma) / (sigma - 1)
    return head / (1 - (P + 1) ** (-sigma))


def dirichlet_L(s: complex, chi: DirichletCharacter, P_max: int, skip: int = 1) -> LValue:
    """Truncated Euler product over primes p <= P_max, p not dividing F * skip.

    ``skip`` removes further Euler factors (primes dividing it).
    """
    s = complex(s)
    sigma = s.real
    if sigma <= 1:
        raise DomainError("Euler product needs Re(s) > 1")
    F = chi.modulus
    logv = 0j
    count = 0
    for p in primerange(2, P_max + 1):
        if F % p == 0 or skip % p == 0:
            continue
        logv -= cmath.log(1 - chi.complex(p) * p ** (-s))
        count += 1
    val = cmath.exp(logv)
    E = euler_tail(sigma, P_max)
    bound = abs(val) * math.expm1(E) + abs(val) * 1e-15 * (count + 10)
    return LValue(val, bound, count)
