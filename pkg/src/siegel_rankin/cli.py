"""Command line entry point: one subcommand per operation, JSON reports on stdout.

Exit codes: 0 success, 1 a verify-paper criterion failed, 2 schema error,
3 domain error, 4 guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

THREAD_ENV = "SIEGEL_RANKIN_THREADS"

TOLERANCES = {
    "quadrature_refinement": 1e-9,
    "hermitian_defect": 1e-9,
    "conjugation_law": 1e-8,
    "maass_n1": 1e-8,
    "maass_n2": 1e-6,
    "unfolding": 1e-6,
    "lambda_tail": 1e-6,
}


# ---------------------------------------------------------------------------
# parsing helpers


def _schema_error(msg: str):
    from .errors import SchemaError
    return SchemaError(msg)


def load_data(text):
    """Inline JSON, or a path (optionally prefixed by @) to a .json or .toml file."""
    if text is None or isinstance(text, (dict, list, int, float)):
        return text
    s = str(text)
    path = Path(s[1:] if s.startswith("@") else s)
    if s.startswith("@") or (path.suffix in (".json", ".toml") and path.exists()):
        if not path.exists():
            raise _schema_error(f"no such file: {path}")
        raw = path.read_text()
        try:
            return tomllib.loads(raw) if path.suffix == ".toml" else json.loads(raw)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
            raise _schema_error(f"cannot parse {path}: {exc}") from exc
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise _schema_error(f"cannot parse JSON argument {s!r}: {exc}") from exc


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        try:
            return complex(float(Fraction(str(text))))
        except (ValueError, ZeroDivisionError) as exc:
            raise _schema_error(f"not a number: {text!r}") from exc


def parse_int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(a) for a in text]
    try:
        return [int(a) for a in str(text).replace(";", ",").split(",") if a.strip()]
    except ValueError as exc:
        raise _schema_error(f"not an integer list: {text!r}") from exc


def parse_matrix(text):
    from .exactmath import RationalMatrix
    data = load_data(text)
    try:
        return RationalMatrix.parse(data)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise _schema_error(f"bad matrix {text!r}: {exc}") from exc


def parse_character(modulus, exponents):
    from .chars import DirichletCharacter, trivial_character
    if modulus is None:
        return trivial_character()
    return DirichletCharacter(int(modulus), parse_int_list(exponents or []))


def to_plain(obj):
    """Make a report JSON-safe: complex -> {re, im}, Fraction -> "p/q", numpy scalars -> Python."""
    import numpy as np
    from .exactmath import fmt_q
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return fmt_q(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# handlers


def cmd_kv_map(a):
    from .weights import GLWeight, OrthWeight, kv_tau, tau_sigma_membership
    if a.rho is not None:
        rho = GLWeight.of(parse_int_list(a.rho))
        lam = tau_sigma_membership(rho)
        return {"rho": list(rho.entries), "lambda": lam.to_json() if lam else None, "in_image": lam is not None,
                "exact": True}
    if a.n is None or a.lam is None:
        raise _schema_error("kv-map needs --n and --lambda (or --rho)")
    lam = OrthWeight.parse(int(a.n), a.lam)
    return {"lambda": lam.to_json(), "tau": list(kv_tau(lam).entries), "exact": True}


def _polynomial(a):
    from .theta import parse_polynomial
    from .weights import GLWeight
    rho = GLWeight.of(parse_int_list(a.rho)) if getattr(a, "rho", None) else None
    spec = a.poly
    if isinstance(spec, str) and spec.strip()[:1] in "{@" or (isinstance(spec, str) and spec.endswith(".json")):
        spec = load_data(spec)
    return parse_polynomial(int(a.n), spec, rho)


def cmd_pluriharmonic_check(a):
    from .pluriharm import is_pluriharmonic, weight_profile
    P = _polynomial(a)
    out = {"report": is_pluriharmonic(P).to_json()}
    if len(P.components) == 1:
        out["profile"] = weight_profile(P.components[0]).to_json()
    return out


def cmd_kv_generator(a):
    from .pluriharm import is_pluriharmonic, kv_generator, weight_profile
    from .weights import GLWeight
    rho = GLWeight.of(parse_int_list(a.rho))
    P = kv_generator(rho)
    return {"rho": list(rho.entries), "polynomial": P.to_json(), "pluriharmonic": is_pluriharmonic(P).to_json(),
            "profile": weight_profile(P).to_json()}


def cmd_gauss_sum(a):
    from .chars import enumerate_characters
    from .gauss import GaussSumParams, gauss_sum
    F, n = int(a.F), int(a.n)
    chars = enumerate_characters(F)
    idx = int(a.chi_index)
    if not 0 <= idx < len(chars):
        raise _schema_error(f"--chi-index must lie in [0, {len(chars)})")
    params = GaussSumParams(n, chars[idx], parse_matrix(a.X), parse_matrix(a.R), F, parse_matrix(a.tauQ), a.order)
    val = gauss_sum(params)
    q = val.as_rational()
    return {"character": chars[idx].to_json(), "value": str(q) if q is not None else val.to_json(),
            "cyclotomic": val.to_json(), "abs_value": abs(complex(val)), "exact": True}


def cmd_vanishing_certificate(a):
    from .gauss import vanishing_certificate
    cert = vanishing_certificate(int(a.n), int(a.p), parse_matrix(a.tau), parse_matrix(a.Q) if a.Q else None,
                                 a.parity, a.order, bool(a.stop_at_first))
    return cert.to_json()


def _theta_spec(a):
    from .chars import odd_characters
    from .theta import ThetaSpec, default_spec
    if a.spec is not None:
        return ThetaSpec.from_json(load_data(a.spec))
    if getattr(a, "p", None) is None or a.n is None:
        raise _schema_error("give --spec or --n with --p for the default theta data")
    p = int(a.p)
    chi = None
    if getattr(a, "chi_index", None) is not None:
        odd = odd_characters(p)
        chi = odd[int(a.chi_index)]
    return default_spec(int(a.n), p, chi)


def cmd_theta_level(a):
    from .theta import level_data
    spec = _theta_spec(a)
    return {"spec": spec.to_json(), "level": level_data(spec).to_json()}


def cmd_theta_coeffs(a):
    from .theta import theta_coefficient
    spec = _theta_spec(a)
    data = load_data(a.R)
    if not data:
        raise _schema_error("--R needs a matrix or a list of matrices")
    mats = data if isinstance(data[0][0], list) else [data]
    return {"spec": spec.to_json(), "coefficients": [theta_coefficient(spec, parse_matrix(m)).to_json() for m in mats]}


def cmd_theta_cusp_report(a):
    from .theta import cuspidality_report
    spec = _theta_spec(a)
    return {"spec": spec.to_json(), "report": cuspidality_report(spec).to_json()}


def cmd_cusp_reps(a):
    from .cusps import crt_combine, kind_vectors
    reps = crt_combine(int(a.m), int(a.n))
    return {"n": int(a.n), "m": int(a.m), "count": len(reps), "kind_vectors": [list(k) for k in kind_vectors(reps)],
            "representatives": [r.to_json() for r in reps], "exact": True}


def cmd_gamma_factors(a):
    from .analytic import gamma_kn, gamma_rho, siegel_gamma
    from .exactmath import to_fraction
    from .weights import GLWeight
    n, s = int(a.n), parse_complex(a.s)
    out = {"n": n, "s": s, "siegel_gamma": siegel_gamma(n, s)}
    if a.rho is not None:
        rho = GLWeight.of(parse_int_list(a.rho))
        out["gamma_rho"] = gamma_rho(rho, to_fraction(a.h), s)
    if a.k is not None:
        out["gamma_kn"] = gamma_kn(to_fraction(a.k), n, s)
    out["error_bound"] = "double precision special functions"
    return out


def cmd_lambda_values(a):
    from .analytic import lambda_factor
    from .exactmath import to_fraction
    eta = parse_character(a.eta_modulus, a.eta_exponents)
    v = lambda_factor(int(a.m), to_fraction(a.kappa), int(a.x), eta, parse_complex(a.s), int(a.pmax))
    return v.to_json()


def _satake(a):
    from .analytic import SatakeData
    return SatakeData.from_json(load_data(a.satake))


def cmd_euler_factor(a):
    from .analytic import euler_factor
    data = _satake(a)
    at = None if a.at_level is None else a.at_level == "yes"
    coeffs = euler_factor(int(a.p), data, at)
    return {"p": int(a.p), "degree": len(coeffs) - 1, "coefficients_ascending": [complex(c) for c in coeffs],
            "error_bound": "double precision products"}


def cmd_standard_l(a):
    from .analytic import truncated_standard_L
    data = _satake(a)
    chi = parse_character(a.chi_modulus, a.chi_exponents) if a.chi_modulus else None
    remove = tuple(parse_int_list(a.remove)) if a.remove else ()
    v = truncated_standard_L(parse_complex(a.s), data, chi, int(a.prime_bound) if a.prime_bound else None, remove)
    return v.to_json()


def cmd_pole_report(a):
    from .analytic import pole_report
    from .exactmath import to_fraction
    eta = parse_character(a.eta_modulus, a.eta_exponents) if a.eta_modulus else None
    sq = {"yes": True, "no": False}.get(str(a.psi_chi_square_trivial).lower())
    if sq is None:
        raise _schema_error("--psi-chi-square-trivial must be yes or no")
    return pole_report(to_fraction(a.k), int(a.n), sq, int(a.c), int(a.y), eta).to_json()


def _family(text, seed: int, sign: int = 1):
    from .rankin import CoefficientFamily, random_family
    from .weights import SymRep
    d = load_data(text)
    if isinstance(d, dict) and d.get("random"):
        r = d["random"]
        n = int(r["n"])
        rho = SymRep(int(r.get("j", 0)), int(r.get("k", 0)), n)
        return random_family(n, rho, int(r.get("det_bound", 10)), int(r.get("sign", sign)), int(r.get("seed", seed)))
    return CoefficientFamily.from_json(d)


def cmd_rankin_eval(a):
    from .rankin import rankin_series, validate_family
    from .theta import ThetaSpec
    f = _family(a.family, a.seed)
    if a.g in (None, "self"):
        g = f
    else:
        d = load_data(a.g)
        g = ThetaSpec.from_json(d) if "tau" in d else _family(d, a.seed)
    res = rankin_series(parse_complex(a.s), f, g, int(a.det_bound), Fraction(str(a.h)))
    return {"family_check": validate_family(f).to_json(), "series": res.to_json()}


def cmd_unfold_check(a):
    from .rankin import unfolding_check
    from .theta import ThetaSpec
    th = ThetaSpec.from_json(load_data(a.theta))
    f = _family(a.family, a.seed, (-1) ** (th.mu or 0))
    return unfolding_check(f, th, parse_complex(a.s), int(a.det_bound), Fraction(str(a.h))).to_json()


def cmd_maass_check(a):
    from .rankin import maass_integral_check
    lam = parse_int_list(a.lam)
    n = int(a.n) if a.n is not None else len(lam)
    return maass_integral_check(lam, parse_complex(a.sigma), n).to_json()


def cmd_verify_paper(a):
    from .acceptance import SUITES, run_suite
    if a.suite not in SUITES:
        raise _schema_error(f"unknown suite {a.suite!r}; choose from {', '.join(sorted(SUITES))}")
    results = run_suite(a.suite, a.quick, a.seed)
    return {"suite": a.suite, "quick": a.quick, "passed": all(r.passed for r in results),
            "criteria": [r.to_json() for r in results]}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="siegel-rankin", description=__doc__.splitlines()[0])
    p.add_argument("--out", help="write the report here as well as to stdout")
    p.add_argument("--config", help="JSON or TOML file of parameters for the subcommand")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks (recorded in the report)")
    p.add_argument("--threads", type=int, help=f"BLAS thread count (default: ${THREAD_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *args):
        sp = sub.add_parser(name)
        for flag, kw in args:
            sp.add_argument(flag, **kw)
        sp.set_defaults(handler=fn)
        return sp

    opt = lambda **kw: kw  # noqa: E731
    add("kv-map", cmd_kv_map, ("--n", opt()), ("--lambda", opt(dest="lam")), ("--rho", opt()))
    add("pluriharmonic-check", cmd_pluriharmonic_check, ("--n", opt()), ("--poly", opt()), ("--rho", opt()))
    add("kv-generator", cmd_kv_generator, ("--rho", opt()))
    add("gauss-sum", cmd_gauss_sum, ("--n", opt()), ("--F", opt()), ("--chi-index", opt(default=0)),
        ("--X", opt()), ("--R", opt()), ("--tauQ", opt()), ("--order", opt(default="TRT^t")))
    add("vanishing-certificate", cmd_vanishing_certificate, ("--n", opt()), ("--p", opt()), ("--tau", opt()),
        ("--Q", opt()), ("--parity", opt(default="odd")), ("--order", opt(default="TRT^t")),
        ("--stop-at-first", opt(action="store_true")))
    theta_args = (("--spec", opt()), ("--n", opt()), ("--p", opt()), ("--chi-index", opt()))
    add("theta-level", cmd_theta_level, *theta_args)
    add("theta-coeffs", cmd_theta_coeffs, *theta_args, ("--R", opt()))
    add("theta-cusp-report", cmd_theta_cusp_report, *theta_args)
    add("cusp-reps", cmd_cusp_reps, ("--n", opt(default=1)), ("--m", opt()))
    add("gamma-factors", cmd_gamma_factors, ("--n", opt()), ("--s", opt()), ("--rho", opt()), ("--h", opt(default="0")),
        ("--k", opt()))
    add("lambda-values", cmd_lambda_values, ("--m", opt()), ("--kappa", opt(default="0")), ("--x", opt(default=1)),
        ("--eta-modulus", opt()), ("--eta-exponents", opt()), ("--s", opt()), ("--pmax", opt(default=100000)))
    add("euler-factor", cmd_euler_factor, ("--satake", opt()), ("--p", opt()),
        ("--at-level", opt(choices=["yes", "no"])))
    add("standard-l", cmd_standard_l, ("--satake", opt()), ("--s", opt()), ("--chi-modulus", opt()),
        ("--chi-exponents", opt()), ("--prime-bound", opt()), ("--remove", opt()))
    add("pole-report", cmd_pole_report, ("--k", opt()), ("--n", opt()), ("--psi-chi-square-trivial", opt(default="yes")),
        ("--c", opt(default=1)), ("--y", opt(default=1)), ("--eta-modulus", opt()), ("--eta-exponents", opt()))
    add("rankin-eval", cmd_rankin_eval, ("--family", opt()), ("--g", opt()), ("--s", opt()),
        ("--det-bound", opt(default=10)), ("--h", opt(default="0")))
    add("unfold-check", cmd_unfold_check, ("--family", opt()), ("--theta", opt()), ("--s", opt()),
        ("--det-bound", opt(default=10)), ("--h", opt(default="0")))
    add("maass-check", cmd_maass_check, ("--lambda", opt(dest="lam")), ("--sigma", opt()), ("--n", opt()))
    add("verify-paper", cmd_verify_paper, ("--suite", opt(default="all")), ("--quick", opt(action="store_true")))
    return p


REQUIRED = {
    "pluriharmonic-check": ("n", "poly"), "kv-generator": ("rho",), "gauss-sum": ("n", "F", "X", "R", "tauQ"),
    "vanishing-certificate": ("n", "p", "tau"), "theta-coeffs": ("R",), "cusp-reps": ("m",),
    "gamma-factors": ("n", "s"), "lambda-values": ("m", "s"), "euler-factor": ("satake", "p"),
    "standard-l": ("satake", "s"), "pole-report": ("k", "n"), "rankin-eval": ("family", "s"),
    "unfold-check": ("family", "theta", "s"), "maass-check": ("lam", "sigma"),
}


def _apply_config(args, parser):
    if not args.config:
        return
    cfg = load_data("@" + args.config if not args.config.startswith("@") else args.config)
    if not isinstance(cfg, dict):
        raise _schema_error("config must be a table of parameters")
    defaults = {}
    for action in parser._subparsers._group_actions[0].choices[args.command]._actions:
        defaults[action.dest] = action.default
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest == "lambda":
            dest = "lam"
        if dest not in defaults:
            raise _schema_error(f"unknown parameter {key!r} for {args.command}")
        if getattr(args, dest) == defaults[dest]:
            setattr(args, dest, val if not isinstance(val, (dict, list)) else json.dumps(val))


def _echo(args) -> dict:
    skip = {"handler", "out", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads or os.environ.get(THREAD_ENV)
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(threads))
    from .errors import DomainError, GuardExceeded, SchemaError
    try:
        _apply_config(args, parser)
        for dest in REQUIRED.get(args.command, ()):
            if getattr(args, dest) is None:
                raise SchemaError(f"{args.command} needs --{dest.replace('_', '-').replace('lam', 'lambda')}")
        result = args.handler(args)
        code = 0 if result.get("passed", True) else 1
    except SchemaError as exc:
        result, code = {"error": "schema", "message": str(exc)}, 2
    except GuardExceeded as exc:
        result, code = {"error": "guard exceeded", "message": str(exc)}, 4
    except DomainError as exc:
        result, code = {"error": "domain", "message": str(exc)}, 3
    except (KeyError, TypeError, ValueError) as exc:
        result, code = {"error": "schema", "message": f"{type(exc).__name__}: {exc}"}, 2
    report = {"command": args.command, "input": _echo(args), "result": result, "tolerances": TOLERANCES,
              "seed": args.seed, "exit_code": code}
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    (sys.stdout if code in (0, 1) else sys.stderr).write(text)
    return code
