"""Exact arithmetic: rationals, Gaussian rationals, cyclotomic numbers,
rational matrices and small positive definite quadratic forms.

Everything here is immutable. Rationals are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from sympy import Poly, cyclotomic_poly, totient
from sympy.abc import x as _x

from .errors import DomainError, SchemaError, UnsupportedError

MAX_ENUM_DEGREE = 4


# ---------------------------------------------------------------------------
# rationals


def to_fraction(v) -> Fraction:
    """Parse ints, Fractions and strings like "3", "-2/5" into a Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise SchemaError(f"not a rational: {v!r}")
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational: {v!r}") from exc
    if isinstance(v, float) and v.is_integer():
        return Fraction(int(v))
    raise SchemaError(f"not a rational: {v!r}")


def fmt_q(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def p_valuation(q: Fraction | int, p: int) -> float:
    """p-adic valuation; +inf for zero."""
    q = Fraction(q)
    if q == 0:
        return math.inf
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# Gaussian rationals


@dataclass(frozen=True)
class QI:
    """An element re + i*im of Q(i)."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(v) -> "QI":
        if isinstance(v, QI):
            return v
        if isinstance(v, complex):
            raise SchemaError("complex floats are not exact")
        return QI(to_fraction(v), Fraction(0))

    def __add__(self, o):
        o = QI.of(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-QI.of(o))

    def __rsub__(self, o):
        return QI.of(o) - self

    def __mul__(self, o):
        o = QI.of(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "QI":
        return QI(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, o):
        o = QI.of(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        t = self * o.conj()
        return QI(t.re / n, t.im / n)

    def __pow__(self, e: int):
        r = QI(Fraction(1))
        b = self
        if e < 0:
            b, e = QI(Fraction(1)) / b, -e
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        if not isinstance(o, QI):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_json(self) -> dict:
        return {"re": fmt_q(self.re), "im": fmt_q(self.im)}

    def __repr__(self):
        if not self.im:
            return fmt_q(self.re)
        return f"({fmt_q(self.re)}{'+' if self.im >= 0 else '-'}{fmt_q(abs(self.im))}i)"


I = QI(Fraction(0), Fraction(1))


# ---------------------------------------------------------------------------
# cyclotomic numbers


@lru_cache(maxsize=None)
def _power_table(order: int) -> np.ndarray:
    """Row k holds the coordinates of zeta^k in the power basis of Q(zeta_order).

    Phi_N is monic with integer coefficients, so all rows are integral.
    """
    phi = int(totient(order))
    coeffs = [int(c) for c in reversed(Poly(cyclotomic_poly(order, _x), _x).all_coeffs())]
    table = np.zeros((order, phi), dtype=object)
    cur = [0] * phi
    cur[0] = 1
    for k in range(order):
        table[k] = cur
        # multiply by zeta and reduce x^phi = -sum c_i x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [cur[i] - top * coeffs[i] for i in range(phi)]
    return table


class CyclotomicNumber:
    """An element of Q(zeta_N), stored in the power basis 1, zeta, ..., zeta^(phi(N)-1).

    Arithmetic between different orders lifts both operands to the lcm.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence):
        if order < 1:
            raise DomainError("cyclotomic order must be positive")
        phi = int(totient(order))
        cs = tuple(Fraction(c) for c in coeffs)
        if len(cs) != phi:
            raise SchemaError(f"need {phi} coefficients for order {order}, got {len(cs)}")
        self.order = order
        self.coeffs = cs

    @classmethod
    def from_exponent_counts(cls, order: int, counts: Sequence) -> "CyclotomicNumber":
        """sum_k counts[k] * zeta_order^k, exactly."""
        counts = np.asarray([int(c) for c in counts], dtype=object)
        if len(counts) != order:
            raise SchemaError("counts must have one entry per exponent")
        vec = counts.dot(_power_table(order))
        return cls(order, [Fraction(int(v)) for v in vec])

    @classmethod
    def rational(cls, q, order: int = 1) -> "CyclotomicNumber":
        phi = int(totient(order))
        return cls(order, [Fraction(q)] + [Fraction(0)] * (phi - 1))

    @classmethod
    def root_of_unity(cls, order: int, k: int) -> "CyclotomicNumber":
        counts = [0] * order
        counts[k % order] = 1
        return cls.from_exponent_counts(order, counts)

    def lift(self, order: int) -> "CyclotomicNumber":
        if order == self.order:
            return self
        if order % self.order:
            raise DomainError(f"cannot lift order {self.order} to {order}")
        step = order // self.order
        table = _power_table(order)
        vec = np.zeros(table.shape[1], dtype=object)
        for k, c in enumerate(self.coeffs):
            if c:
                vec = vec + table[(k * step) % order] * c
        return CyclotomicNumber(order, list(vec))

    def _common(self, o):
        if not isinstance(o, CyclotomicNumber):
            o = CyclotomicNumber.rational(to_fraction(o) if not isinstance(o, Fraction) else o)
        n = math.lcm(self.order, o.order)
        return self.lift(n), o.lift(n)

    def __add__(self, o):
        a, b = self._common(o)
        return CyclotomicNumber(a.order, [u + v for u, v in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, [-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-o if isinstance(o, CyclotomicNumber) else -Fraction(o))

    def __mul__(self, o):
        a, b = self._common(o)
        n = a.order
        prod = [Fraction(0)] * (2 * len(a.coeffs))
        for i, u in enumerate(a.coeffs):
            if u:
                for j, v in enumerate(b.coeffs):
                    if v:
                        prod[i + j] += u * v
        table = _power_table(n)
        out = [Fraction(0)] * len(a.coeffs)
        for k, c in enumerate(prod):
            if c:
                row = table[k % n]
                for t in range(len(out)):
                    if row[t]:
                        out[t] += c * row[t]
        return CyclotomicNumber(n, out)

    __rmul__ = __mul__

    def conj(self) -> "CyclotomicNumber":
        """Complex conjugation zeta -> zeta^-1."""
        n = self.order
        table = _power_table(n)
        out = [Fraction(0)] * len(self.coeffs)
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(-k) % n]
                for t in range(len(out)):
                    out[t] += c * row[t]
        return CyclotomicNumber(n, out)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = CyclotomicNumber.rational(o)
        if not isinstance(o, CyclotomicNumber):
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        # canonical form is not order independent; hash on the complex value rounded
        z = complex(self)
        return hash((round(z.real, 9), round(z.imag, 9)))

    def __complex__(self):
        z = np.exp(2j * np.pi / self.order)
        return complex(sum(float(c) * z**k for k, c in enumerate(self.coeffs)))

    def as_rational(self) -> Fraction | None:
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def to_json(self):
        return {"order": self.order, "coefficients": [fmt_q(c) for c in self.coeffs]}

    def __repr__(self):
        q = self.as_rational()
        if q is not None:
            return fmt_q(q)
        terms = [f"{fmt_q(c)}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"Cyc{self.order}(" + " + ".join(terms) + ")"


# ---------------------------------------------------------------------------
# rational matrices


@dataclass(frozen=True)
class RationalMatrix:
    entries: tuple

    def __init__(self, rows: Iterable[Iterable]):
        ent = tuple(tuple(to_fraction(v) for v in r) for r in rows)
        if not ent or any(len(r) != len(ent[0]) for r in ent) or not ent[0]:
            raise SchemaError("matrix must be a nonempty rectangular array")
        object.__setattr__(self, "entries", ent)

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        return RationalMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def diag(vals: Sequence) -> "RationalMatrix":
        n = len(vals)
        return RationalMatrix([[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def parse(v) -> "RationalMatrix":
        """Accept nested lists, a scalar (1x1) or a string such as "[[1,0],[0,2]]"."""
        if isinstance(v, RationalMatrix):
            return v
        if isinstance(v, str):
            import json

            try:
                v = json.loads(v)
            except json.JSONDecodeError:
                return RationalMatrix([[to_fraction(v)]])
        if isinstance(v, (int, Fraction, str)):
            return RationalMatrix([[v]])
        if isinstance(v, list) and v and not isinstance(v[0], list):
            return RationalMatrix([v]) if len(v) != 1 else RationalMatrix([[v[0]]])
        return RationalMatrix(v)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self.entries))

    def __matmul__(self, o: "RationalMatrix") -> "RationalMatrix":
        if self.cols != o.rows:
            raise SchemaError("dimension mismatch")
        oc = list(zip(*o.entries))
        return RationalMatrix([[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in oc] for r in self.entries])

    def __add__(self, o):
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, o.entries)])

    def __sub__(self, o):
        return RationalMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, o.entries)])

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix([[a * c for a in r] for r in self.entries])

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.entries for a in r)

    def det(self) -> Fraction:
        if not self.is_square():
            raise SchemaError("determinant of a non-square matrix")
        m = [list(r) for r in self.entries]
        n = len(m)
        d = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d *= m[c][c]
            for r in range(c + 1, n):
                f = m[r][c] / m[c][c]
                if f:
                    for k in range(c, n):
                        m[r][k] -= f * m[c][k]
        return d

    def inverse(self) -> "RationalMatrix":
        n = self.rows
        if not self.is_square():
            raise SchemaError("inverse of a non-square matrix")
        m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.entries)]
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c] != 0), None)
            if piv is None:
                raise DomainError("matrix is singular")
            m[c], m[piv] = m[piv], m[c]
            pv = m[c][c]
            m[c] = [v / pv for v in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return RationalMatrix([r[n:] for r in m])

    def leading_minors(self) -> list[Fraction]:
        n = self.rows
        return [RationalMatrix([r[:k] for r in self.entries[:k]]).det() for k in range(1, n + 1)]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(a) for a in r] for r in self.entries])

    def to_int_numpy(self) -> np.ndarray:
        if not self.is_integral():
            raise DomainError("matrix is not integral")
        return np.array([[int(a) for a in r] for r in self.entries], dtype=np.int64)

    def to_json(self):
        return [[fmt_q(a) for a in r] for r in self.entries]

    def key(self) -> tuple:
        return tuple(a for r in self.entries for a in r)

    def __repr__(self):
        return "[" + ", ".join("[" + ", ".join(fmt_q(a) for a in r) + "]" for r in self.entries) + "]"


def as_sym_pos_def(m, semidefinite: bool = False) -> RationalMatrix:
    """Validate membership in S+ (or the closure S_+ when ``semidefinite``).

    Positive definiteness is tested by leading minors. For the semidefinite
    variant all principal minors must be nonnegative.
    """
    m = RationalMatrix.parse(m)
    if not m.is_symmetric():
        raise DomainError("matrix is not symmetric")
    if semidefinite:
        n = m.rows
        for k in range(1, n + 1):
            for idx in itertools.combinations(range(n), k):
                sub = RationalMatrix([[m[i, j] for j in idx] for i in idx])
                if sub.det() < 0:
                    raise DomainError("matrix is not positive semidefinite")
        return m
    if any(d <= 0 for d in m.leading_minors()):
        raise DomainError("matrix is not positive definite")
    return m


def p_adic_membership(M, p: int, e: int) -> bool:
    """True iff every entry of M has p-adic valuation >= e, i.e. M lies in p^e M_n(Z_p)."""
    M = RationalMatrix.parse(M)
    return all(p_valuation(a, p) >= e for r in M.entries for a in r)


def reduce_mod(q: Fraction, F: int) -> int:
    """Image of a rational with denominator prime to F in Z/F."""
    q = Fraction(q)
    if math.gcd(q.denominator, F) != 1:
        raise DomainError(f"{fmt_q(q)} is not integral at the primes of {F}")
    return (q.numerator * pow(q.denominator, -1, F)) % F if F > 1 else 0


# ---------------------------------------------------------------------------
# positive definite forms: reduction, automorphs, representations


def _check_degree(n: int, cap: int = MAX_ENUM_DEGREE):
    if n > cap:
        raise UnsupportedError(f"degree {n} exceeds the enumeration cap {cap}")


def minkowski_reduce(R) -> tuple[RationalMatrix, RationalMatrix]:
    """Reduce an integral positive definite form of degree 1 or 2 under GL_n(Z).

    Returns ``(reduced, U)`` with ``U.T @ R @ U == reduced``. For n = 2 the
    reduced form [[a, b], [b, c]] satisfies 0 <= 2b <= a <= c.
    """
    R = RationalMatrix.parse(R)
    n = R.rows
    if n > 2:
        raise UnsupportedError("reduction is implemented for degree <= 2")
    R = as_sym_pos_def(R)
    if n == 1:
        return R, RationalMatrix.identity(1)
    a, b, c = R[0, 0], R[0, 1], R[1, 1]
    U = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]

    def apply(m):
        nonlocal a, b, c, U
        (p, q), (r, s) = m
        a, b, c = (a * p * p + 2 * b * p * r + c * r * r,
                   a * p * q + b * (p * s + q * r) + c * r * s,
                   a * q * q + 2 * b * q * s + c * s * s)
        U = [[U[0][0] * p + U[0][1] * r, U[0][0] * q + U[0][1] * s],
             [U[1][0] * p + U[1][1] * r, U[1][0] * q + U[1][1] * s]]

    while True:
        if abs(2 * b) > a:
            # translate: second basis vector minus k times the first
            k = math.floor(b / a + Fraction(1, 2))
            apply(((1, -k), (0, 1)))
            continue
        if a > c:
            apply(((0, 1), (1, 0)))
            continue
        break
    if b < 0:
        apply(((1, 0), (0, -1)))
    return RationalMatrix([[a, b], [b, c]]), RationalMatrix(U)


def _coord_bounds(A: RationalMatrix, norms: Sequence[Fraction]) -> list[int]:
    # For v with v^T A v = N one has |v_i|^2 <= N * (A^-1)_ii (Cauchy-Schwarz in
    # the A-inner product). Box side per coordinate i for target max(norms).
    inv = A.inverse()
    top = max(norms)
    return [math.isqrt(math.floor(top * inv[i, i])) + 1 for i in range(A.rows)]


def vectors_of_norm(A: RationalMatrix, N: Fraction) -> list[tuple[int, ...]]:
    """All integer vectors v with v^T A v = N, A positive definite."""
    n = A.rows
    inv = A.inverse()
    bounds = [math.isqrt(math.floor(N * inv[i, i])) for i in range(n)]
    An = A.to_numpy()
    out = []
    ranges = [range(-b, b + 1) for b in bounds]
    for v in itertools.product(*ranges):
        va = np.array(v, dtype=float)
        if abs(va @ An @ va - float(N)) > 0.5:
            continue
        val = sum(A[i, j] * v[i] * v[j] for i in range(n) for j in range(n))
        if val == N:
            out.append(v)
    return out


def representations(tau, R, nonsingular: bool = True) -> list[RationalMatrix]:
    """All integer matrices xi (n x m) with xi^T tau xi = R.

    Column j of xi has tau-norm R_jj, which bounds the search box. With
    ``nonsingular`` (square case) only det xi != 0 is kept.
    """
    tau = as_sym_pos_def(tau)
    R = RationalMatrix.parse(R)
    if not R.is_symmetric():
        raise DomainError("R is not symmetric")
    n, m = tau.rows, R.rows
    _check_degree(max(n, m))
    cols = []
    for j in range(m):
        if R[j, j] < 0:
            return []
        cols.append(vectors_of_norm(tau, R[j, j]))
    out = []

    def bil(u, v):
        return sum(tau[i, k] * u[i] * v[k] for i in range(n) for k in range(n))

    def rec(j, chosen):
        if j == m:
            xi = RationalMatrix([[chosen[c][r] for c in range(m)] for r in range(n)])
            if nonsingular and n == m and xi.det() == 0:
                return
            out.append(xi)
            return
        for v in cols[j]:
            if all(bil(chosen[i], v) == R[i, j] for i in range(j)):
                rec(j + 1, chosen + [v])

    rec(0, [])
    out.sort(key=lambda M: M.key())
    return out


def lattice_solutions(tau, R, integrality: bool = True) -> list[RationalMatrix]:
    """The set X_R of integral nonsingular xi with xi^T tau xi = R, sorted lexicographically."""
    tau = as_sym_pos_def(tau)
    R = as_sym_pos_def(R)
    if tau.rows != R.rows:
        raise SchemaError("tau and R must have the same degree")
    if not integrality:
        raise UnsupportedError("only integral solutions are enumerated")
    return representations(tau, R, nonsingular=True)


def automorph_group(R) -> list[RationalMatrix]:
    """All u in GL_n(Z) with u^T R u = R, for integral positive definite R, n <= 3."""
    R = as_sym_pos_def(R)
    if not R.is_integral():
        raise DomainError("automorphs are computed for integral forms")
    _check_degree(R.rows, 3)
    return [u for u in representations(R, R, nonsingular=True) if abs(u.det()) == 1]


def nu_inverse(R) -> int:
    return len(automorph_group(R))


def reduced_forms(n: int, det_bound: int) -> list[RationalMatrix]:
    """Reduced integral positive definite forms of degree n <= 2 with det <= det_bound.

    Ordered by determinant, then lexicographically.
    """
    if n == 1:
        return [RationalMatrix([[d]]) for d in range(1, det_bound + 1)]
    if n != 2:
        raise UnsupportedError("class lists are available for n <= 2")
    out = []
    # reduced: 0 <= 2b <= a <= c, so det = ac - b^2 >= 3a^2/4
    a = 1
    while 3 * a * a <= 4 * det_bound:
        for b in range(0, a // 2 + 1):
            c = a
            while a * c - b * b <= det_bound:
                out.append(RationalMatrix([[a, b], [b, c]]))
                c += 1
        a += 1
    out.sort(key=lambda M: (M.det(), M.key()))
    return out


def hermite_representatives(n: int, det: int) -> list[RationalMatrix]:
    """Representatives of {xi in M_n(Z): det xi = +-det} / GL_n(Z) acting on the right.

    Column operations bring xi to lower triangular form with positive diagonal
    and entries left of the diagonal reduced modulo the diagonal entry of their row.
    """
    if n == 1:
        return [RationalMatrix([[det]])]
    if n != 2:
        raise UnsupportedError("Hermite representatives for n <= 2")
    out = []
    for a in range(1, det + 1):
        if det % a:
            continue
        d = det // a
        for b in range(d):
            out.append(RationalMatrix([[a, 0], [b, d]]))
    return out


def sqrt_int(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    a, b = sqrt_int(q.numerator), sqrt_int(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)
