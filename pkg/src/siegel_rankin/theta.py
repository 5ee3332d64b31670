"""Vector-valued theta series: level ideals, Fourier coefficients, truncated
evaluation on the Siegel upper half space and cusp-support reports."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import factorint

from .chars import DirichletCharacter, QuadCharacter, epsilon_tau, squarefree_kernel, trivial_character
from .cusps import crt_combine, dedup_double_cosets
from .errors import DomainError, SchemaError
from .exactmath import (QI, CyclotomicNumber, RationalMatrix, as_sym_pos_def, fmt_q, lattice_solutions,
                        p_adic_membership, rational_sqrt)
from .gauss import vanishing_certificate
from .pluriharm import MatrixPolynomial, VectorPolynomial, is_pluriharmonic, kv_generator, sym_pluriharmonic, weight_profile
from .weights import GLWeight


# ---------------------------------------------------------------------------
# fractional ideals of Q, represented by their positive generator


def q_gcd(vals) -> Fraction:
    """Generator of the ideal sum of the (nonzero) rationals in vals."""
    vals = [Fraction(v) for v in vals if v]
    if not vals:
        return Fraction(0)
    num = math.gcd(*[v.numerator for v in vals])
    den = math.lcm(*[v.denominator for v in vals])
    return Fraction(num, den)


def q_lcm(*vals) -> Fraction:
    """Generator of the intersection of the ideals generated by vals."""
    vals = [abs(Fraction(v)) for v in vals]
    num = math.lcm(*[v.numerator for v in vals])
    den = math.gcd(*[v.denominator for v in vals])
    return Fraction(num, den)


def form_value_ideal(A: RationalMatrix) -> Fraction:
    """Ideal generated by v^T A v over v in Z^n: gcd of A_ii and 2 A_ij."""
    n = A.rows
    return q_gcd([A[i, i] for i in range(n)] + [2 * A[i, j] for i in range(n) for j in range(i + 1, n)])


# ---------------------------------------------------------------------------
# specs


@dataclass
class ThetaSpec:
    n: int
    tau: RationalMatrix
    Q: RationalMatrix
    chi: DirichletCharacter
    P: VectorPolynomial
    rho: GLWeight | None = None
    label: str = ""
    mu: int | None = None

    def __post_init__(self):
        self.tau = as_sym_pos_def(self.tau)
        self.Q = RationalMatrix.parse(self.Q)
        if self.tau.rows != self.n or self.Q.rows != self.n:
            raise SchemaError("tau and Q must be n x n")
        if self.Q.det() == 0:
            raise DomainError("Q must be invertible")
        if self.P.n != self.n:
            raise SchemaError("P lives on the wrong matrix space")
        rep = is_pluriharmonic(self.P)
        if not rep.ok:
            raise DomainError(f"component {rep.component} of P is not pluriharmonic (pair {rep.pair})")
        if self.rho is not None:
            prof = weight_profile(self.P.components[0])
            if prof.exponents != self.rho.entries or not prof.unipotent_invariant:
                raise DomainError(f"first component of P has profile {prof.exponents}, expected {self.rho.entries}")
        if self.mu is None:
            self.mu = column_flip_parity(self.P)
            if self.mu is None:
                self.mu = 0 if self.chi.parity == 1 else 1
        if self.mu not in (0, 1):
            raise SchemaError("mu must be 0 or 1")

    @property
    def parity_consistent(self) -> bool:
        """chi(-1) = (-1)^mu, i.e. the infinity type of chi matches the sign character used."""
        return self.chi.parity == (-1) ** self.mu

    def weight(self, d: int) -> CyclotomicNumber:
        """(chi_infty chi^*)(d) = sgn(d)^mu chi(|d|)."""
        w = self.chi(abs(d))
        return -w if (d < 0 and self.mu) else w

    def weight_complex(self, d: int) -> complex:
        w = self.chi.complex(abs(d))
        return -w if (d < 0 and self.mu) else w

    @classmethod
    def from_json(cls, d: dict) -> "ThetaSpec":
        try:
            n = int(d["n"])
            tau = RationalMatrix.parse(d["tau"])
            Q = RationalMatrix.parse(d.get("Q", RationalMatrix.identity(n).to_json()))
            c = d.get("chi", {"modulus": 1, "exponents": []})
            chi = DirichletCharacter(int(c["modulus"]), c.get("exponents", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad theta spec: {exc}") from exc
        rho = GLWeight.of(d["rho"]) if d.get("rho") is not None else None
        P = parse_polynomial(n, d.get("P", "1"), rho)
        mu = d.get("mu")
        return cls(n, tau, Q, chi, P, rho, d.get("label", ""), None if mu is None else int(mu))

    def to_json(self):
        return {"n": self.n, "tau": self.tau.to_json(), "Q": self.Q.to_json(), "chi": self.chi.to_json(),
                "rho": list(self.rho.entries) if self.rho else None, "P_dim": self.P.dim, "label": self.label,
                "mu": self.mu, "parity_consistent": self.parity_consistent}


def column_flip_parity(P: VectorPolynomial) -> int | None:
    """mu with P(x d) = (-1)^mu P(x), d = diag(-1, 1, ..., 1), or None if P has no such parity."""
    n = P.n
    pars = {sum(e[r * n] for r in range(n)) % 2 for c in P.components for e in c.terms}
    return pars.pop() if len(pars) == 1 else None


def parse_polynomial(n: int, spec, rho: GLWeight | None = None) -> VectorPolynomial:
    """Shorthands: "1", "det", "x" (n = 1), "sym:J" (n = 2), "kv" (needs rho), or polynomial JSON."""
    if isinstance(spec, dict):
        return VectorPolynomial.from_json(spec)
    if not isinstance(spec, str):
        raise SchemaError("P must be a shorthand string or polynomial JSON")
    s = spec.strip()
    if s == "1":
        return VectorPolynomial([MatrixPolynomial.const(n, 1)])
    if s == "det":
        return VectorPolynomial([MatrixPolynomial.det(n)])
    if s == "x":
        if n != 1:
            raise SchemaError('"x" is the coordinate polynomial of degree 1')
        return VectorPolynomial([MatrixPolynomial.var(1, 0, 0)])
    if s.startswith("sym:"):
        if n != 2:
            raise SchemaError("sym:J needs n = 2")
        return sym_pluriharmonic(int(s[4:]))
    if s == "kv":
        if rho is None:
            raise SchemaError('"kv" needs rho')
        return VectorPolynomial([kv_generator(rho)])
    raise SchemaError(f"unknown polynomial shorthand {spec!r}")


# ---------------------------------------------------------------------------
# level


@dataclass
class LevelData:
    r: Fraction
    t: Fraction
    a: Fraction
    f: int
    h: int
    b: Fraction
    c: Fraction
    eps: QuadCharacter
    nebentype_modulus: int
    two_adic_ok: bool | None

    @property
    def gamma_pair(self) -> tuple[Fraction, Fraction]:
        """(b^-1, bc): the group is Gamma = G cap D[b^-1, bc]."""
        return 1 / self.b, self.b * self.c

    def to_json(self):
        bi, bc = self.gamma_pair
        return {
            "r": fmt_q(self.r), "t": fmt_q(self.t), "a": fmt_q(self.a), "f": self.f, "h": self.h,
            "b": fmt_q(self.b), "c": fmt_q(self.c), "D": [fmt_q(bi), fmt_q(bc)],
            "epsilon_tau": self.eps.to_json(), "nebentype_modulus": self.nebentype_modulus,
            "two_adic_conditions": self.two_adic_ok, "exact": True,
        }


def level_data(spec: ThetaSpec) -> LevelData:
    n, tau, Q = spec.n, spec.tau, spec.Q
    r = form_value_ideal((Q.T @ tau @ Q).scale(2))
    Qinv = Q.inverse()
    J = form_value_ideal(Qinv @ tau.scale(2).inverse() @ Qinv.T)
    t = 4 / J
    a = q_lcm(1 / r, 1)
    f = spec.chi.conductor
    eps = epsilon_tau(tau, n)
    h = eps.conductor
    if n % 2 == 0:
        b = r / 2
        c = q_lcm(h, f, (f * f * t) / r)
        two = None
    else:
        b = 1 / (2 * a)
        c = q_lcm(h, f, 4 * a, a * f * f * t)
        two = (1 / b).denominator == 1 and (1 / b).numerator % 2 == 0 and (b * c).denominator == 1 and (b * c).numerator % 2 == 0
    return LevelData(r, t, a, f, h, b, c, eps, math.lcm(spec.chi.modulus, h), two)


# ---------------------------------------------------------------------------
# coefficients


def _qi_to_cyc(z: QI) -> CyclotomicNumber:
    return CyclotomicNumber(4, [z.re, z.im])


@dataclass
class ThetaCoefficient:
    """c(R) = sqrt(sqrt_of) * components, exact, or a float vector with an error bound."""

    R: RationalMatrix
    solutions: int
    exact: bool
    components: list
    sqrt_of: int = 1
    error: float = 0.0

    def numeric(self) -> np.ndarray:
        if self.exact:
            return np.array([complex(c) for c in self.components]) * math.sqrt(self.sqrt_of)
        return np.asarray(self.components, dtype=complex)

    def to_json(self):
        d = {"R": self.R.to_json(), "solutions": self.solutions, "exact": self.exact}
        if self.exact:
            d["components"] = [c.to_json() for c in self.components]
            d["sqrt_factor"] = self.sqrt_of
        else:
            d["components"] = [{"re": c.real, "im": c.imag} for c in self.components]
            d["error_bound"] = self.error
        v = self.numeric()
        d["complex"] = [{"re": c.real, "im": c.imag} for c in v]
        return d


def _sqrt_mode(tau: RationalMatrix):
    """("diag", sqrt entries) | ("scalar", c) | ("numeric", None)."""
    n = tau.rows
    if all(tau[i, j] == 0 for i in range(n) for j in range(n) if i != j):
        roots = [rational_sqrt(tau[i, i]) for i in range(n)]
        if all(r is not None for r in roots):
            return "diag", roots
        if len({tau[i, i] for i in range(n)}) == 1:
            return "scalar", tau[0, 0]
    return "numeric", None


def _split_by_degree(p: MatrixPolynomial) -> dict[int, MatrixPolynomial]:
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        out.setdefault(sum(e), {})[e] = c
    return {d: MatrixPolynomial(p.n, t) for d, t in out.items()}


def sqrt_tau_numeric(tau: RationalMatrix) -> np.ndarray:
    w, v = np.linalg.eigh(tau.to_numpy())
    return (v * np.sqrt(w)) @ v.T


def theta_coefficient(spec: ThetaSpec, R) -> ThetaCoefficient:
    """sum over xi in X_R of sgn(det xi)^mu chi(|det xi|) P(sqrt(tau) xi)."""
    R = as_sym_pos_def(R, semidefinite=True)
    if R.det() == 0:
        # X_R only contains nonsingular xi
        return ThetaCoefficient(R, 0, True, [CyclotomicNumber.rational(0)] * spec.P.dim)
    sols = lattice_solutions(spec.tau, R)
    mode, data = _sqrt_mode(spec.tau)
    dim = spec.P.dim
    if mode == "diag":
        S = RationalMatrix.diag(data)
        acc = [CyclotomicNumber.rational(0)] * dim
        for xi in sols:
            w = spec.weight(int(xi.det()))
            if w.is_zero():
                continue
            vals = spec.P.evaluate(S @ xi)
            acc = [a + w * _qi_to_cyc(v) for a, v in zip(acc, vals)]
        return ThetaCoefficient(R, len(sols), True, acc)
    if mode == "scalar":
        c = Fraction(data)
        pieces = [_split_by_degree(p) for p in spec.P.components]
        parities = {d % 2 for pc in pieces for d in pc}
        if len(parities) <= 1:
            odd = parities == {1}
            # sqrt(c)^d = c^(d//2) * sqrt(c)^(d%2); sqrt(c) = sqrt(num*den)/den
            m = c.numerator * c.denominator
            k = squarefree_kernel(Fraction(m))
            root = Fraction(math.isqrt(m // k), c.denominator)
            acc = [CyclotomicNumber.rational(0)] * dim
            for xi in sols:
                w = spec.weight(int(xi.det()))
                if w.is_zero():
                    continue
                for idx, pc in enumerate(pieces):
                    for d, p in pc.items():
                        scale = c ** (d // 2) * (root if odd else 1)
                        acc[idx] = acc[idx] + w * _qi_to_cyc(p.evaluate(xi)) * scale
            return ThetaCoefficient(R, len(sols), True, acc, k if odd else 1)
    # numeric fallback
    S = sqrt_tau_numeric(spec.tau)
    acc = np.zeros(dim, dtype=complex)
    for xi in sols:
        w = spec.weight_complex(int(xi.det()))
        if w:
            acc += w * spec.P.numeric(S @ xi.to_numpy())
    err = 1e-13 * max(1, len(sols)) * (1 + float(np.max(np.abs(acc))) if dim else 1)
    return ThetaCoefficient(R, len(sols), False, list(acc), 1, err)


def coefficient_by_transport(spec: ThetaSpec, R, u) -> ThetaCoefficient:
    """c(u^T R u) computed by enumerating X_R and mapping xi -> xi u (second enumeration route)."""
    R = as_sym_pos_def(R)
    u = RationalMatrix.parse(u)
    if abs(u.det()) != 1 or not u.is_integral():
        raise DomainError("u must be unimodular")
    R2 = u.T @ R @ u
    mode, data = _sqrt_mode(spec.tau)
    if mode != "diag":
        raise DomainError("transport check is done in the exact diagonal mode")
    S = RationalMatrix.diag(data)
    acc = [CyclotomicNumber.rational(0)] * spec.P.dim
    sols = lattice_solutions(spec.tau, R)
    for xi in sols:
        x2 = xi @ u
        w = spec.weight(int(x2.det()))
        if w.is_zero():
            continue
        acc = [a + w * _qi_to_cyc(v) for a, v in zip(acc, spec.P.evaluate(S @ x2))]
    return ThetaCoefficient(R2, len(sols), True, acc)


# ---------------------------------------------------------------------------
# truncated evaluation


@dataclass
class ThetaValue:
    value: np.ndarray
    tail_estimate: float
    terms: int
    trace_bound: float

    def to_json(self):
        return {"value": [{"re": v.real, "im": v.imag} for v in self.value], "tail_bound": self.tail_estimate,
                "terms": self.terms, "trace_bound": self.trace_bound, "exact": False}


def _lattice_box(tau_np: np.ndarray, T: float, n: int) -> np.ndarray:
    inv = np.linalg.inv(tau_np)
    bounds = [int(math.isqrt(int(math.floor(T * inv[i, i]))) + 1) for i in range(n)]
    rng = [np.arange(-bounds[i], bounds[i] + 1) for i in range(n) for _ in range(n)]
    grid = np.stack(np.meshgrid(*rng, indexing="ij"), axis=-1).reshape(-1, n * n)
    return grid.reshape(-1, n, n)


def theta_truncated_eval(spec: ThetaSpec, z, trace_bound: float) -> ThetaValue:
    """Sum of chi(det xi) P(sqrt(tau) xi) e(tr(xi^T tau xi z)/2) over integral xi with tr(xi^T tau xi) <= T."""
    n = spec.n
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    if z.shape != (n, n) or not np.allclose(z, z.T):
        raise SchemaError("z must be a symmetric n x n matrix")
    Y = z.imag
    ev = np.linalg.eigvalsh(Y)
    if ev.min() <= 0:
        raise DomainError("Im z is not positive definite")
    tau = spec.tau.to_numpy()
    xis = _lattice_box(tau, trace_bound, n)
    forms = np.einsum("kji,jl,klm->kim", xis, tau, xis)
    tr = np.trace(forms, axis1=1, axis2=2)
    keep = tr <= trace_bound + 1e-9
    xis, forms = xis[keep], forms[keep]
    dets = np.rint(np.linalg.det(xis)).astype(np.int64) if n > 1 else xis[:, 0, 0]
    w = np.array([spec.weight_complex(int(d)) for d in dets])
    S = sqrt_tau_numeric(spec.tau)
    Pv = spec.P.numeric(np.einsum("ij,kjl->kil", S, xis))
    phase = np.exp(1j * np.pi * np.einsum("kij,ji->k", forms, z))
    val = (w[:, None] * Pv * phase[:, None]).sum(axis=0)
    return ThetaValue(val, _tail_bound(spec, ev.min(), trace_bound), int(keep.sum()), trace_bound)


def _tail_bound(spec: ThetaSpec, mu: float, T: float) -> float:
    # terms with N - 1 < tr <= N: at most (2 sqrt(N / l_min) + 1)^(n^2) of them, each
    # bounded by |P|_1 N^(deg/2) exp(-pi mu (N - 1)), since entries of sqrt(tau) xi are <= sqrt(N)
    n = spec.n
    lmin = float(np.linalg.eigvalsh(spec.tau.to_numpy()).min())
    norm1 = max(sum(abs(complex(c)) for c in p.terms.values()) for p in spec.P.components)
    deg = max(p.degree() for p in spec.P.components)
    total = 0.0
    N = math.floor(T) + 1
    while True:
        term = (2 * math.sqrt(N / lmin) + 1) ** (n * n) * norm1 * N ** (deg / 2) * math.exp(-math.pi * mu * (N - 1))
        total += term
        if term < 1e-18 * max(total, 1e-300) or N > T + 10**5:
            break
        N += 1
    return total


# ---------------------------------------------------------------------------
# cuspidality


CUSP_LABELS = {("m(s)", "m(s)"): "m/m", ("m(s)", "m(s)eta"): "m/m.eta", ("m(s)eta", "m(s)"): "m.eta/m",
               ("m(s)eta", "m(s)eta"): "m.eta/m.eta"}
CUSP_ORDER = list(CUSP_LABELS.values())


def local_component(chi: DirichletCharacter, p: int) -> DirichletCharacter:
    """chi_p: the character mod p with chi_p(a) = chi(a') for a' = a mod p, a' = 1 mod F/p."""
    F = chi.modulus
    rest = F // p
    if F % p or rest % p == 0:
        raise DomainError("p must divide the modulus exactly once")

    def lift(a):
        if rest == 1:
            return a % p
        return (a * rest * pow(rest, -1, p) + p * pow(p, -1, rest)) % F

    return DirichletCharacter.from_exponent_function(p, lambda a: chi.exp(lift(a)), chi.order_base)


@dataclass
class CuspVerdict:
    kinds: tuple
    label: str
    local: list
    method: str
    passed: bool

    def to_json(self):
        return {"kind_vector": list(self.kinds), "label": self.label, "local": self.local, "method": self.method,
                "passed": self.passed}


@dataclass
class CuspReport:
    verdict: str
    reasons: list[str] = field(default_factory=list)
    level: dict | None = None
    m: int | None = None
    cusps: list[CuspVerdict] = field(default_factory=list)
    certificates: dict = field(default_factory=dict)

    @property
    def kinds_certified(self) -> list[str]:
        return sorted({c.label for c in self.cusps if c.passed}, key=lambda l: (CUSP_ORDER.index(l) if l in CUSP_ORDER else len(CUSP_ORDER), l))

    def to_json(self):
        return {"verdict": self.verdict, "reasons": self.reasons, "level": self.level, "m": self.m,
                "kinds_certified": self.kinds_certified, "cusps": [c.to_json() for c in self.cusps],
                "certificates": self.certificates, "exact": True}


def hypothesis_gate(spec: ThetaSpec) -> list[str]:
    chi = spec.chi
    notes = []
    if chi.is_trivial() or chi.conductor == 1:
        notes.append("character is trivial")
        return notes
    if not chi.is_odd():
        notes.append("character is even")
    f = chi.conductor
    if f != chi.modulus:
        notes.append("character is not given at its conductor")
    if f % 2 == 0:
        notes.append("conductor is even")
    if any(e > 1 for e in factorint(f).values()):
        notes.append("conductor is not squarefree")
    if spec.n > 2:
        notes.append("Gauss-sum sweeps are limited to n <= 2")
    return notes


def cuspidality_report(spec: ThetaSpec) -> CuspReport:
    """Check every cusp of Gamma[2f, 2f] for the support or Gauss-sum vanishing that kills
    the constant terms. The verdict is "cuspidal" only when every cusp passes."""
    notes = hypothesis_gate(spec)
    if notes:
        return CuspReport("not covered", notes)
    n, chi = spec.n, spec.chi
    f = chi.conductor
    m = 2 * f
    lv = level_data(spec)
    bi, bc = lv.gamma_pair
    report = CuspReport("cuspidal", [], lv.to_json(), m)
    if (bi, bc) != (Fraction(m), Fraction(m)):
        report.verdict = "not covered"
        report.reasons.append(f"level is D[{fmt_q(bi)}, {fmt_q(bc)}], not of the shape D[{m}, {m}]")
        return report
    primes = sorted(factorint(f))
    eta_zero: dict[int, bool] = {}
    for p in primes:
        chi_p = local_component(chi, p)
        # after eta at p the quadratic part is p tau[Q]; the sweep covers every b and every singular x
        tau_p = spec.tau.scale(p)
        M = spec.Q.T @ tau_p @ spec.Q
        if not p_adic_membership(M, p, 0):
            report.verdict = "not covered"
            report.reasons.append(f"p tau[Q] is not {p}-integral")
            return report
        cert = vanishing_certificate(n, p, tau_p, spec.Q, parity="odd" if chi_p.is_odd() else "even",
                                     stop_at_first=True)
        eta_zero[p] = cert.zero
        report.certificates[str(p)] = cert.to_json()
    local = {q: dedup_double_cosets(n, q) for q in sorted(factorint(m))}
    for rep in crt_combine(m, n, local):
        methods = []
        for loc in rep.local:
            if loc.p not in primes:
                continue
            if loc.kind == "m(s)":
                methods.append(f"support nonsingular by translation invariance at {loc.p}")
            elif eta_zero[loc.p]:
                methods.append(f"Gauss-sum vanishing certificate at {loc.p}")
        passed = bool(methods)
        label = CUSP_LABELS.get(rep.kinds, "") if len(rep.local) == 2 else ""
        report.cusps.append(CuspVerdict(rep.kinds, label, [l.to_json() for l in rep.local],
                                        methods[0] if methods else "no vanishing mechanism", passed))
    if not all(c.passed for c in report.cusps):
        report.verdict = "not certified"
        report.reasons.append("some cusp has a local Gauss sum that does not vanish")
    return report


def default_spec(n: int, p: int, chi: DirichletCharacter | None = None, P: str | None = None) -> ThetaSpec:
    """tau = 2p I_n, Q = (2p)^-1 I_n and an odd character mod p (the first one).

    P defaults to det for n <= 3, whose sign type matches odd characters, and to 1 above.
    """
    from .chars import odd_characters

    if chi is None:
        odd = odd_characters(p)
        chi = odd[0] if odd else trivial_character(p)
    if P is None:
        P = "det" if n <= 3 else "1"
    tau = RationalMatrix.identity(n).scale(2 * p)
    Q = RationalMatrix.identity(n).scale(Fraction(1, 2 * p))
    return ThetaSpec(n, tau, Q, chi, parse_polynomial(n, P), None, f"tau=2pI, Q=(2p)^-1 I, p={p}")


__all__ = [
    "ThetaSpec", "LevelData", "ThetaCoefficient", "ThetaValue", "CuspReport", "level_data", "theta_coefficient",
    "coefficient_by_transport", "theta_truncated_eval", "cuspidality_report", "default_spec", "parse_polynomial",
    "q_gcd", "q_lcm", "form_value_ideal", "local_component", "hypothesis_gate",
]
