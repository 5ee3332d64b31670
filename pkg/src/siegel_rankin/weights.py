"""Highest weights of GL_n and O_n, the Kashiwara-Vergne map between them,
and small explicit representations of GL_1 and GL_2."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DomainError, SchemaError
from .exactmath import RationalMatrix, fmt_q


@dataclass(frozen=True)
class GLWeight:
    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.n:
            raise SchemaError(f"GL weight needs {self.n} entries")
        if any(a < b for a, b in zip(self.entries, self.entries[1:])):
            raise SchemaError("GL weight must be weakly decreasing")
        if any(e < 0 for e in self.entries):
            raise DomainError("only polynomial weights (nonnegative entries) are supported")

    @classmethod
    def of(cls, entries) -> "GLWeight":
        e = tuple(int(a) for a in entries)
        return cls(len(e), e)

    @property
    def size(self) -> int:
        """lambda_P, the sum of the entries."""
        return sum(self.entries)

    def to_json(self):
        return {"n": self.n, "entries": list(self.entries)}


@dataclass(frozen=True)
class OrthWeight:
    """Highest weight of O_n.

    Odd n = 2l+1: (m_1..m_l; eps) with eps = +-1. Even n = 2l: (m_1..m_l) with
    tag +1 or -1; when m_l != 0 both tags give the same representation and the
    tag is normalized to +1.
    """

    n: int
    m: tuple[int, ...]
    sign: int

    def __post_init__(self):
        l = self.n // 2
        if self.n < 1:
            raise SchemaError("degree must be positive")
        if len(self.m) != l:
            raise SchemaError(f"O_{self.n} weight needs {l} entries")
        if any(a < 0 for a in self.m) or any(a < b for a, b in zip(self.m, self.m[1:])):
            raise SchemaError("O_n weight must be nonnegative and weakly decreasing")
        if self.sign not in (1, -1):
            raise SchemaError("sign must be +1 or -1")
        if self.n % 2 == 0:
            if self.sign == -1 and all(a == 0 for a in self.m):
                raise SchemaError("tag - with all entries zero is not a valid weight")
            if l and self.m[-1] != 0 and self.sign == -1:
                object.__setattr__(self, "sign", 1)

    @property
    def odd(self) -> bool:
        return self.n % 2 == 1

    def last_nonzero(self) -> int:
        r = 0
        for i, a in enumerate(self.m, 1):
            if a:
                r = i
        return r

    @classmethod
    def parse(cls, n: int, text: str) -> "OrthWeight":
        """Parse "2;+1", "0;-1", "2,0;-" or "1,1" (tag + by default)."""
        t = text.replace(" ", "")
        if ";" in t:
            ms, sg = t.split(";", 1)
        else:
            ms, sg = t, "+"
        if not re.fullmatch(r"[+-]1?", sg):
            raise SchemaError(f"bad sign {sg!r}")
        try:
            m = tuple(int(a) for a in ms.split(",")) if ms else ()
        except ValueError as exc:
            raise SchemaError(f"bad weight {text!r}") from exc
        return cls(n, m, -1 if sg.startswith("-") else 1)

    def to_json(self):
        key = "epsilon" if self.odd else "tag"
        val = self.sign if self.odd else ("+" if self.sign == 1 else "-")
        return {"n": self.n, "entries": list(self.m), key: val}

    def __str__(self):
        body = ",".join(map(str, self.m))
        if self.odd:
            return f"({body};{self.sign:+d})"
        return f"({body})" + ("+" if self.sign == 1 else "-")


def kv_tau(lam: OrthWeight) -> GLWeight:
    """GL_n highest weight tau(lambda) attached to an O_n type with nonzero pluriharmonics."""
    n, m = lam.n, lam.m
    l = n // 2
    if lam.odd:
        first = lam.sign == (-1) ** sum(m)
    else:
        first = lam.sign == 1
    if first:
        return GLWeight(n, tuple(m) + (0,) * (n - l))
    r = lam.last_nonzero()
    if not lam.odd and r == 0:
        raise DomainError("even degree tag - needs a nonzero entry")
    return GLWeight(n, tuple(m[:r]) + (1,) * (n - 2 * r) + (0,) * r)


def tau_sigma_membership(rho: GLWeight) -> OrthWeight | None:
    """The O_n weight lambda with kv_tau(lambda) = rho, or None if rho is not in the image."""
    n, e = rho.n, rho.entries
    l = n // 2
    if all(a == 0 for a in e[l:]):
        m = e[:l]
        if n % 2:
            return OrthWeight(n, m, (-1) ** sum(m))
        return OrthWeight(n, m, 1)
    r = 0
    while r < n and e[n - 1 - r] == 0:
        r += 1
    if r > l or any(a != 1 for a in e[r:n - r]):
        return None
    m = e[:r] + (0,) * (l - r)
    if n % 2:
        return OrthWeight(n, m, (-1) ** (1 + sum(m)))
    if r == 0:
        return None
    return OrthWeight(n, m, -1)


def all_orth_weights(n: int, max_entry: int) -> list[OrthWeight]:
    import itertools

    l = n // 2
    out = []
    for m in itertools.product(range(max_entry + 1), repeat=l):
        if any(a < b for a, b in zip(m, m[1:])):
            continue
        for s in (1, -1):
            if n % 2 == 0 and s == -1 and (not any(m) or m[-1] != 0):
                continue
            out.append(OrthWeight(n, tuple(m), s))
    return out


# ---------------------------------------------------------------------------
# explicit representations


class SymRep:
    """rho = Sym^j (x) det^k of GL_2 on binary forms of degree j.

    The basis is X^(j-i) Y^i, i = 0..j, and rho(A) f(v) = det(A)^k f(v A) for a
    row vector v = (X, Y). This is a homomorphism: rho(AB) = rho(A) rho(B).
    For n = 1 (``j`` must be 0) it is the character a -> a^k.
    """

    def __init__(self, j: int, k: int = 0, n: int = 2):
        if j < 0:
            raise SchemaError("j must be nonnegative")
        if n == 1 and j:
            raise SchemaError("GL_1 only has the characters det^k")
        if n not in (1, 2):
            raise SchemaError("explicit representations exist for n <= 2")
        self.j, self.k, self.n = j, k, n

    @property
    def dim(self) -> int:
        return self.j + 1

    @property
    def weight(self) -> GLWeight:
        if self.n == 1:
            return GLWeight(1, (self.k,))
        return GLWeight(2, (self.j + self.k, self.k))

    def gram(self) -> np.ndarray:
        """Gram matrix of the U(n)-invariant Hermitian form in the monomial basis."""
        return np.diag([1.0 / comb(self.j, i) for i in range(self.j + 1)])

    def exact(self, A) -> RationalMatrix:
        A = RationalMatrix.parse(A)
        if A.rows != self.n or A.cols != self.n:
            raise SchemaError(f"need a {self.n}x{self.n} matrix")
        d = A.det()
        if d == 0:
            raise DomainError("singular matrix")
        if self.n == 1:
            return RationalMatrix([[d**self.k]])
        p, q, r, s = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
        cols = [self._column(p, q, r, s, i) for i in range(self.j + 1)]
        scale = d**self.k
        return RationalMatrix([[cols[i][t] * scale for i in range(self.j + 1)] for t in range(self.j + 1)])

    def _column(self, p, q, r, s, i):
        # (pX + rY)^(j-i) (qX + sY)^i expanded in X^(j-t) Y^t
        j = self.j
        a, b = j - i, i
        out = []
        for t in range(j + 1):
            acc = 0
            for u in range(max(0, t - b), min(a, t) + 1):
                acc += comb(a, u) * p ** (a - u) * r**u * comb(b, t - u) * q ** (b - t + u) * s ** (t - u)
            out.append(acc)
        return out

    def numeric(self, A: np.ndarray) -> np.ndarray:
        """rho evaluated on a stack of matrices (shape (..., n, n)), complex or real."""
        A = np.asarray(A)
        if self.n == 1:
            return (A[..., 0, 0] ** self.k)[..., None, None]
        p, q, r, s = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
        j = self.j
        out = np.zeros(A.shape[:-2] + (j + 1, j + 1), dtype=np.result_type(A.dtype, float))
        for i in range(j + 1):
            col = self._column(p, q, r, s, i)
            for t in range(j + 1):
                out[..., t, i] = col[t]
        det = p * s - q * r
        return out * (det**self.k)[..., None, None]

    def to_json(self):
        return {"n": self.n, "j": self.j, "k": self.k, "dim": self.dim, "weight": list(self.weight.entries)}


def materialize_sym_rep(j: int, k: int = 0) -> SymRep:
    return SymRep(j, k, 2)
