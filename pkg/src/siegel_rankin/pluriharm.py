"""Polynomials on n x n matrices with coefficients in Q(i), the Laplacians
Delta_ij, pluriharmonicity certificates and highest weight generators.

Variables are the entries x_rc, stored row-major. GL_n acts on the right,
p -> p(x g), and the orthogonal group on the left, so the Laplacians contract
the row index:

    Delta_ij = sum_k d^2 / (dx_ki dx_kj),    1 <= i <= j <= n.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, SchemaError, UnsupportedError
from .exactmath import QI, RationalMatrix, fmt_q, I as IMAG
from .weights import GLWeight, SymRep


class MatrixPolynomial:
    """Sparse polynomial in the n^2 entries of a matrix, coefficients in Q(i)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple[int, ...], QI] | None = None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            c = QI.of(c)
            if len(e) != n * n:
                raise SchemaError("exponent length must be n^2")
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, n: int, c) -> "MatrixPolynomial":
        return cls(n, {(0,) * (n * n): QI.of(c)})

    @classmethod
    def var(cls, n: int, r: int, c: int) -> "MatrixPolynomial":
        """The entry x_rc (0-based indices)."""
        e = [0] * (n * n)
        e[r * n + c] = 1
        return cls(n, {tuple(e): QI(Fraction(1))})

    @classmethod
    def det(cls, n: int) -> "MatrixPolynomial":
        return minor(identity_frame(n, real=True), n, n)

    # arithmetic -----------------------------------------------------------
    def _wrap(self, o):
        if isinstance(o, MatrixPolynomial):
            if o.n != self.n:
                raise SchemaError("degree mismatch")
            return o
        return MatrixPolynomial.const(self.n, o)

    def __add__(self, o):
        o = self._wrap(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, QI()) + c
        return MatrixPolynomial(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return MatrixPolynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._wrap(o))

    def __rsub__(self, o):
        return self._wrap(o) - self

    def __mul__(self, o):
        o = self._wrap(o)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, QI()) + c1 * c2
        return MatrixPolynomial(self.n, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative power")
        r = MatrixPolynomial.const(self.n, 1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        if not isinstance(o, MatrixPolynomial):
            o = MatrixPolynomial.const(self.n, o) if not isinstance(o, MatrixPolynomial) else o
        return self.n == o.n and self.terms == o.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # calculus -------------------------------------------------------------
    def diff(self, r: int, c: int) -> "MatrixPolynomial":
        idx = r * self.n + c
        t = {}
        for e, co in self.terms.items():
            if e[idx]:
                f = list(e)
                f[idx] -= 1
                t[tuple(f)] = co * e[idx]
        return MatrixPolynomial(self.n, t)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def column_degrees(self) -> set[tuple[int, ...]]:
        n = self.n
        return {tuple(sum(e[r * n + c] for r in range(n)) for c in range(n)) for e in self.terms}

    # evaluation -----------------------------------------------------------
    def evaluate(self, M) -> QI:
        """Exact value at a matrix with rational or Q(i) entries."""
        if isinstance(M, RationalMatrix):
            flat = [QI.of(a) for a in M.key()]
        else:
            flat = [QI.of(a) for row in M for a in row]
        if len(flat) != self.n * self.n:
            raise SchemaError("evaluation matrix has the wrong size")
        total = QI()
        for e, c in self.terms.items():
            v = c
            for a, k in zip(flat, e):
                if k:
                    v = v * a**k
            total = total + v
        return total

    def numeric(self, X: np.ndarray) -> np.ndarray:
        """Values on a stack of matrices of shape (..., n, n)."""
        X = np.asarray(X)
        flat = X.reshape(X.shape[:-2] + (self.n * self.n,))
        out = np.zeros(X.shape[:-2], dtype=complex)
        for e, c in self.terms.items():
            v = np.full(X.shape[:-2], complex(c))
            for idx, k in enumerate(e):
                if k:
                    v = v * flat[..., idx] ** k
            out = out + v
        return out

    def linear_substitute(self, M: list[list["MatrixPolynomial"]]) -> "MatrixPolynomial":
        """p(Y) where Y is a matrix of polynomials (e.g. Y = A x or Y = x u)."""
        n = self.n
        flat = [M[r][c] for r in range(n) for c in range(n)]
        total = MatrixPolynomial(n)
        cache: dict = {}
        for e, c in self.terms.items():
            v = MatrixPolynomial.const(n, c)
            for idx, k in enumerate(e):
                if k:
                    key = (idx, k)
                    if key not in cache:
                        cache[key] = flat[idx] ** k
                    v = v * cache[key]
            total = total + v
        return total

    def to_json(self):
        n = self.n
        out = []
        for e in sorted(self.terms):
            c = self.terms[e]
            out.append({"exponents": [list(e[r * n:(r + 1) * n]) for r in range(n)], "re": fmt_q(c.re), "im": fmt_q(c.im)})
        return {"n": n, "terms": out}

    @classmethod
    def from_json(cls, d) -> "MatrixPolynomial":
        n = int(d["n"])
        t = {}
        for term in d["terms"]:
            e = tuple(int(a) for row in term["exponents"] for a in row)
            t[e] = QI(Fraction(str(term.get("re", "0"))), Fraction(str(term.get("im", "0"))))
        return cls(n, t)

    def __repr__(self):
        if not self.terms:
            return "0"
        n = self.n
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(
                f"x{r + 1}{c + 1}" + (f"^{e[r * n + c]}" if e[r * n + c] > 1 else "")
                for r in range(n) for c in range(n) if e[r * n + c]
            )
            parts.append(f"{self.terms[e]!r}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


@dataclass
class VectorPolynomial:
    components: list[MatrixPolynomial]

    def __post_init__(self):
        if not self.components:
            raise SchemaError("a vector polynomial needs at least one component")
        if len({c.n for c in self.components}) != 1:
            raise SchemaError("components must share n")

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def dim(self) -> int:
        return len(self.components)

    def evaluate(self, M) -> list[QI]:
        return [c.evaluate(M) for c in self.components]

    def numeric(self, X) -> np.ndarray:
        return np.stack([c.numeric(X) for c in self.components], axis=-1)

    def to_json(self):
        return {"components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, d) -> "VectorPolynomial":
        if "components" in d:
            return cls([MatrixPolynomial.from_json(c) for c in d["components"]])
        return cls([MatrixPolynomial.from_json(d)])


# ---------------------------------------------------------------------------
# Laplacians


def laplacian(p: MatrixPolynomial, i: int, j: int) -> MatrixPolynomial:
    """Delta_ij p = sum_k d^2 p / (dx_ki dx_kj), indices 1-based."""
    n = p.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise SchemaError(f"Laplacian index out of range for n={n}")
    total = MatrixPolynomial(n)
    for k in range(n):
        total = total + p.diff(k, i - 1).diff(k, j - 1)
    return total


@dataclass
class HarmonicityReport:
    ok: bool
    component: int | None = None
    pair: tuple[int, int] | None = None
    remainder: MatrixPolynomial | None = None

    def to_json(self):
        d = {"pluriharmonic": self.ok, "exact": True}
        if not self.ok:
            d["witness"] = {"component": self.component, "i": self.pair[0], "j": self.pair[1], "remainder": self.remainder.to_json()}
        return d


def is_pluriharmonic(p) -> HarmonicityReport:
    comps = p.components if isinstance(p, VectorPolynomial) else [p]
    for idx, c in enumerate(comps):
        n = c.n
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                rem = laplacian(c, i, j)
                if not rem.is_zero():
                    return HarmonicityReport(False, idx, (i, j), rem)
    return HarmonicityReport(True)


# ---------------------------------------------------------------------------
# highest weight generators


def identity_frame(n: int, real: bool = False) -> list[list[QI]]:
    """The isotropic frame A (rows a_j = e_j + i e_{l+j}, a_{n+1-j} = e_j - i e_{l+j},
    middle row e_n for odd n). A A^T is twice the antidiagonal pairing, plus 1 in
    the middle for odd n. With ``real`` the identity matrix is returned instead."""
    one, zero = QI(Fraction(1)), QI()
    if real:
        return [[one if r == c else zero for c in range(n)] for r in range(n)]
    l = n // 2
    A = [[zero] * n for _ in range(n)]
    for j in range(l):
        A[j][j] = one
        A[j][l + j] = IMAG
        A[n - 1 - j][j] = one
        A[n - 1 - j][l + j] = -IMAG
    if n % 2:
        A[l][n - 1] = one
    return A


def frame_coordinates(A: list[list[QI]], n: int) -> list[list[MatrixPolynomial]]:
    """Entries of the polynomial matrix A x."""
    xs = [[MatrixPolynomial.var(n, r, c) for c in range(n)] for r in range(n)]
    return [[sum((xs[s][c] * A[r][s] for s in range(n) if A[r][s]), MatrixPolynomial(n)) for c in range(n)] for r in range(n)]


def minor(A: list[list[QI]], n: int, j: int) -> MatrixPolynomial:
    """Leading principal j x j minor of A x."""
    Y = frame_coordinates(A, n)
    total = MatrixPolynomial(n)
    for perm in itertools.permutations(range(j)):
        sign = 1
        for a in range(j):
            for b in range(a + 1, j):
                if perm[a] > perm[b]:
                    sign = -sign
        term = MatrixPolynomial.const(n, sign)
        for r in range(j):
            term = term * Y[r][perm[r]]
        total = total + term
    return total


def kv_generator(rho: GLWeight) -> MatrixPolynomial:
    """Highest weight pluriharmonic polynomial of GL-weight rho.

    Supported: rho = (m_1..m_l, 0..0) with l = [n/2], and the all-ones weight
    (the determinant). Weights with a run of ones before the trailing zeros need
    the mixed generators of the minus branch and are refused.
    """
    n, e = rho.n, rho.entries
    l = n // 2
    if all(a == 1 for a in e):
        return MatrixPolynomial.det(n)
    if any(a != 0 for a in e[l:]):
        raise UnsupportedError(
            f"weight {e} needs the mixed minus-branch generators, which are not constructed here"
        )
    A = identity_frame(n)
    p = MatrixPolynomial.const(n, 1)
    for j in range(1, l + 1):
        c = e[j - 1] - (e[j] if j < l else 0)
        if c:
            p = p * minor(A, n, j) ** c
    return p


@dataclass
class WeightProfile:
    exponents: tuple[int, ...] | None
    unipotent_invariant: bool
    reason: str = ""

    def to_json(self):
        d = {"exponents": list(self.exponents) if self.exponents is not None else None,
             "unipotent_invariant": self.unipotent_invariant, "exact": True}
        if self.reason:
            d["reason"] = self.reason
        return d


def unipotent_derivation(p: MatrixPolynomial, j: int, k: int) -> MatrixPolynomial:
    """d/de p(x (1 + e E_jk)) at e = 0, i.e. sum_i x_ij dp/dx_ik (0-based, j < k)."""
    n = p.n
    total = MatrixPolynomial(n)
    for i in range(n):
        total = total + MatrixPolynomial.var(n, i, j) * p.diff(i, k)
    return total


def weight_profile(p: MatrixPolynomial) -> WeightProfile:
    """Torus exponents of p(x diag(t)) and invariance under x -> x u, u unit upper triangular.

    The unipotent group is connected and generated by 1 + e E_jk (j < k), so
    invariance is equivalent to the vanishing of the corresponding derivations.
    """
    degs = p.column_degrees()
    if len(degs) > 1:
        return WeightProfile(None, False, "monomials carry different torus weights")
    exps = degs.pop() if degs else (0,) * p.n
    n = p.n
    inv = all(unipotent_derivation(p, j, k).is_zero() for j in range(n) for k in range(j + 1, n))
    return WeightProfile(tuple(exps), inv)


def right_action(p: MatrixPolynomial, g: list[list]) -> MatrixPolynomial:
    """The polynomial x -> p(x g) for a constant matrix g."""
    n = p.n
    xs = [[MatrixPolynomial.var(n, r, c) for c in range(n)] for r in range(n)]
    Y = [[sum((xs[r][s] * QI.of(g[s][c]) for s in range(n) if QI.of(g[s][c])), MatrixPolynomial(n)) for c in range(n)] for r in range(n)]
    return p.linear_substitute(Y)


def sym_pluriharmonic(j: int) -> VectorPolynomial:
    """Sym^j-valued pluriharmonic polynomial on M_2.

    With w = (x11 + i x21, x12 + i x22) the first row of A x, P(x) is the
    coefficient vector of (w1 X + w2 Y)^j, so P(x g^T) = rho(g) P(x) for the
    representation of :class:`weights.SymRep`.
    """
    A = identity_frame(2)
    Y = frame_coordinates(A, 2)
    w1, w2 = Y[0][0], Y[0][1]
    return VectorPolynomial([w1 ** (j - i) * w2**i * comb(j, i) for i in range(j + 1)])
