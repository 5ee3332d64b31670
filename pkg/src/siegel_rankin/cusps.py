"""Representatives of Q(F_p) \\ Sp_n(F_p) / P_{n-1}(F_p) and their CRT products.

Conventions: Sp_n acts on column vectors of length 2n and preserves the form
with matrix eta = [[0, -1], [1, 0]]. P_{n-1} is the Klingen parabolic, taken
as the stabilizer of the isotropic line spanned by e_1; an element lies in it
iff its first column is a multiple of e_1. For n = 1 this is the upper
triangular Borel subgroup. Q(F_p) = {diag(a, a^-T) : a in GL_n(F_p)}.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import factorint

from .errors import DomainError, GuardExceeded

CUSP_GUARD = 10**6


def eta(n: int) -> np.ndarray:
    z, one = np.zeros((n, n), dtype=np.int64), np.eye(n, dtype=np.int64)
    return np.block([[z, -one], [one, z]])


def translation(s: np.ndarray) -> np.ndarray:
    n = s.shape[0]
    one = np.eye(n, dtype=np.int64)
    return np.block([[one, s], [np.zeros((n, n), dtype=np.int64), one]])


@dataclass(frozen=True)
class SymplecticModP:
    p: int
    entries: tuple

    @staticmethod
    def of(M: np.ndarray, p: int) -> "SymplecticModP":
        return SymplecticModP(p, tuple(map(tuple, (np.asarray(M) % p).tolist())))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.entries) // 2

    def is_symplectic(self) -> bool:
        a = self.matrix
        J = eta(self.n)
        return bool(np.all((a.T @ J @ a - J) % self.p == 0))


@dataclass(frozen=True)
class LocalRep:
    p: int
    kind: str  # "m(s)" or "m(s)eta"
    s: tuple

    @property
    def element(self) -> SymplecticModP:
        s = np.array(self.s, dtype=np.int64)
        M = translation(s)
        if self.kind == "m(s)eta":
            M = M @ eta(s.shape[0])
        return SymplecticModP.of(M, self.p)

    def to_json(self):
        return {"p": self.p, "kind": self.kind, "s": [list(r) for r in self.s]}


def symmetric_mod_p(n: int, p: int):
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    for vals in itertools.product(range(p), repeat=len(idx)):
        s = np.zeros((n, n), dtype=np.int64)
        for (i, j), v in zip(idx, vals):
            s[i, j] = s[j, i] = v
        yield s


def _guard(n: int, p: int):
    if n > 2 or 2 * p ** (n * (n + 1) // 2) > CUSP_GUARD:
        raise GuardExceeded("cusp enumeration is limited to n <= 2 and small p")


def candidate_reps(n: int, p: int) -> list[LocalRep]:
    """The 2 p^(n(n+1)/2) matrices m(s) and m(s) eta, s symmetric mod p."""
    _guard(n, p)
    out = []
    for kind in ("m(s)", "m(s)eta"):
        for s in symmetric_mod_p(n, p):
            out.append(LocalRep(p, kind, tuple(map(tuple, s.tolist()))))
    return out


@lru_cache(maxsize=None)
def gl_mod_p(n: int, p: int) -> tuple:
    out = []
    for vals in itertools.product(range(p), repeat=n * n):
        a = np.array(vals, dtype=np.int64).reshape(n, n)
        if round(np.linalg.det(a)) % p:
            out.append(a)
    return tuple(out)


def inv_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Inverse of an integer matrix modulo p, via the adjugate."""
    n = a.shape[0]
    d = int(round(np.linalg.det(a))) % p
    if d == 0:
        raise DomainError("matrix is singular mod p")
    adj = np.zeros_like(a)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, i, 0), j, 1)
            adj[j, i] = (-1) ** (i + j) * (int(round(np.linalg.det(minor))) if n > 1 else 1)
    return (adj * pow(d, -1, p)) % p


def levi(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    z = np.zeros((n, n), dtype=np.int64)
    return np.block([[a % p, z], [z, inv_mod(a, p).T]])


def in_klingen(g: np.ndarray, p: int) -> bool:
    """Membership in P_{n-1}(F_p): the first column is a multiple of e_1."""
    return bool(np.all(g[1:, 0] % p == 0))


def equivalent(c1: LocalRep, c2: LocalRep) -> bool:
    """c1 ~ c2 iff some q in Q(F_p) has c1^-1 q^-1 c2 in P_{n-1}(F_p)."""
    p = c1.p
    n = c1.element.n
    g1 = c1.element.matrix
    g1inv = (-eta(n) @ g1.T @ eta(n)) % p  # symplectic inverse: J^-1 g^T J with J^-1 = -J
    g2 = c2.element.matrix
    for a in gl_mod_p(n, p):
        qinv = levi(inv_mod(a, p), p)
        if in_klingen((g1inv @ qinv @ g2) % p, p):
            return True
    return False


def _line_key(v: np.ndarray, p: int) -> tuple:
    v = v % p
    lead = next(x for x in v if x)
    return tuple((v * pow(int(lead), -1, p)) % p)


@lru_cache(maxsize=None)
def _levi_stack(n: int, p: int) -> np.ndarray:
    return np.stack([levi(a, p) for a in gl_mod_p(n, p)])


def _orbit_key(rep: LocalRep) -> tuple:
    # class invariant: the Q-orbit of the line c e_1, represented by its least element
    p = rep.p
    n = rep.element.n
    v = rep.element.matrix[:, 0]
    W = (_levi_stack(n, p) @ v) % p
    lead = W[np.arange(len(W)), (W != 0).argmax(axis=1)]
    inv = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
    W = (W * inv[lead][:, None]) % p
    codes = W @ (p ** np.arange(W.shape[1] - 1, -1, -1, dtype=np.int64))
    return tuple(W[int(codes.argmin())].tolist())


def dedup_double_cosets(n: int, p: int, candidates: list[LocalRep] | None = None) -> list[LocalRep]:
    """One representative per double coset, the first candidate in enumeration order.

    Classes are grouped by the Q-orbit of the line c e_1 (the coset c P_{n-1}
    determines that line), and each grouping is confirmed with :func:`equivalent`.
    """
    cands = candidate_reps(n, p) if candidates is None else list(candidates)
    reps: list[LocalRep] = []
    keys: dict[tuple, LocalRep] = {}
    for c in cands:
        k = _orbit_key(c)
        if k in keys:
            continue
        keys[k] = c
        reps.append(c)
    return reps


def full_group_class_count(p: int) -> int:
    """|Q \\ SL_2(F_p) / B| by enumerating every element of SL_2(F_p) (n = 1 oracle)."""
    G = [np.array(v, dtype=np.int64).reshape(2, 2) for v in itertools.product(range(p), repeat=4)]
    G = [g for g in G if (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % p == 1]
    Qs = [np.array([[a, 0], [0, pow(a, -1, p)]]) for a in range(1, p)]
    B = [g for g in G if g[1, 0] % p == 0]
    seen: set = set()
    count = 0
    for g in G:
        key = tuple(g.ravel() % p)
        if key in seen:
            continue
        count += 1
        for q in Qs:
            for b in B:
                seen.add(tuple(((q @ g @ b) % p).ravel()))
    return count


def covers_group(n: int, p: int, reps: list[LocalRep]) -> bool:
    """Whether the double cosets of ``reps`` exhaust Sp_1(F_p) = SL_2(F_p) (n = 1 only)."""
    if n != 1:
        raise GuardExceeded("full coverage check is done for n = 1")
    G = [np.array(v, dtype=np.int64).reshape(2, 2) for v in itertools.product(range(p), repeat=4)]
    G = [g for g in G if (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % p == 1]
    keys = {_orbit_key(r) for r in reps}
    for g in G:
        rep = _line_key(g[:, 0], p)
        if min(_line_key(levi(np.array([[a]]), p) @ np.array(rep), p) for a in range(1, p)) not in keys:
            return False
    return True


@dataclass(frozen=True)
class CuspRep:
    m: int
    local: tuple  # LocalRep per prime, ascending

    @property
    def kinds(self) -> tuple:
        return tuple(r.kind for r in self.local)

    def to_json(self):
        return {"m": self.m, "primes": [r.p for r in self.local], "kind_vector": list(self.kinds),
                "local": [r.to_json() for r in self.local]}


def crt_combine(m: int, n: int = 1, local: dict[int, list[LocalRep]] | None = None) -> list[CuspRep]:
    """Product of the local representative lists over the primes of squarefree m."""
    fac = factorint(m)
    if any(e > 1 for e in fac.values()):
        raise DomainError(f"{m} is not squarefree")
    primes = sorted(fac)
    if local is None:
        local = {p: dedup_double_cosets(n, p) for p in primes}
    return [CuspRep(m, combo) for combo in itertools.product(*[local[p] for p in primes])]


def kind_vectors(reps: list[CuspRep]) -> list[tuple]:
    return sorted({r.kinds for r in reps})
