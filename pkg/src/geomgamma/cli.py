"""Command-line front end: ``geomgamma {zeta0,gr-eval,verify,unit-example}``.

Exit codes: 0 success, 1 invalid input, 2 computation error, 3 failed check.
Exact rationals are printed as "p/q"; complex numbers as decimal strings.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any

import jsonschema
import mpmath as mp

from . import gammaeval as ge
from . import suites
from .bernoulli import PoleError
from .numfield import NFElement, SignUndecidableError
from .shintani import SamplingError, ValidationError, quadratic_shintani, zeta_report

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE, EXIT_CHECK = 0, 1, 2, 3

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_COMPLEX = {"oneOf": [{"type": "number"}, {"type": "string"}]}

ZETA_SCHEMA = {
    "type": "object",
    "required": ["field", "lattice_basis", "units"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "field": {
            "type": "object",
            "required": ["minpoly"],
            "properties": {"minpoly": {"type": "array", "items": {"type": "integer"}, "minItems": 2}},
        },
        "lattice_basis": {"type": "array", "items": {"type": "array", "items": _RATIONAL, "minItems": 1}},
        "units": {"type": "array", "items": {"type": "array", "items": _RATIONAL, "minItems": 1}},
        "expected": {"type": "object"},
        "max_sign_prec": {"type": "integer", "minimum": 64},
    },
}

GR_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["G_r", "theta", "elliptic_gamma", "expsum", "geometric"]},
        "z": _COMPLEX,
        "taus": {"type": "array", "items": _COMPLEX, "minItems": 1},
        "forms": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "v": {"type": "array", "items": _RATIONAL},
        "w": _COMPLEX,
        "x": {"type": "array", "items": _COMPLEX},
        "precision": {"type": "integer", "minimum": 10},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "geometric"}}},
         "then": {"required": ["forms", "v", "w", "x"]},
         "else": {"required": ["z", "taus"]}},
    ],
}


class CheckFailed(Exception):
    pass


# --- helpers --------------------------------------------------------------------

def digits_to_bits(digits: int) -> int:
    return math.ceil(digits * math.log2(10))


def fmt_q(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_nf(x: NFElement) -> list[str]:
    return [fmt_q(c) for c in x.coeffs]


def fmt_c(z, digits: int) -> dict:
    return {"re": mp.nstr(mp.re(z), digits, strip_zeros=False),
            "im": mp.nstr(mp.im(z), digits, strip_zeros=False), "digits": digits}


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _zeta_config(args) -> dict:
    if args.config:
        cfg = _load_json(args.config)
    elif args.field:
        cfg = suites.load_bundled(args.field)
    else:
        raise ValidationError("give --config PATH or --field {quad,cubic1,cubic2}")
    jsonschema.validate(cfg, ZETA_SCHEMA)
    return cfg


# --- zeta0 ----------------------------------------------------------------------

def zeta_payload(cfg: dict, max_sign_prec: int) -> dict:
    from .shintani import signed_domain

    inp = suites.ray_class_input(cfg)
    dom = signed_domain(inp, max_sign_bits=max_sign_prec)
    rep = zeta_report(inp, dom)
    blocks = []
    for b in dom.blocks:
        entry = {"rho": b.label, "in_S": b.in_S, "generators": [fmt_nf(f) for f in b.f]}
        if b.in_S:
            entry.update(
                mu=b.mu, w=b.w, nu=b.nu,
                b=[[fmt_q(c) for c in row] for row in b.b],
                a=[list(f) for f in b.a],
            )
            if b.label in rep.traces:
                entry["E"] = fmt_nf(rep.elements[b.label])
                entry["R"] = fmt_q(rep.traces[b.label])
        blocks.append(entry)
    payload = {"config": cfg, "zeta": fmt_q(rep.value), "blocks": blocks, "global_sign": dom.global_sign}
    if inp.degree == 2:
        payload["zeta_quadratic_route"] = fmt_q(quadratic_shintani(inp))
    return payload


def parse_zeta_payload(payload: dict) -> dict:
    """Inverse of ``zeta_payload`` for the exact data: rationals back to Fractions."""
    out = {"zeta": Fraction(payload["zeta"]), "R": {}, "mu": {}, "nu": {}, "w": {}}
    for b in payload["blocks"]:
        if b.get("in_S"):
            out["mu"][b["rho"]] = list(b["mu"])
            out["nu"][b["rho"]] = b["nu"]
            out["w"][b["rho"]] = b["w"]
            if "R" in b:
                out["R"][b["rho"]] = Fraction(b["R"])
    out["input"] = suites.ray_class_input(payload["config"])
    return out


def cmd_zeta0(args) -> int:
    cfg = _zeta_config(args)
    payload = zeta_payload(cfg, args.max_sign_prec or cfg.get("max_sign_prec", 2 ** 14))
    lines = [f"{cfg.get('name', 'input')}: zeta(0) = {payload['zeta']}"]
    for b in payload["blocks"]:
        if not b["in_S"]:
            lines.append(f"  rho {b['rho']}: generators dependent, skipped")
            continue
        lines.append(f"  rho {b['rho']}: mu={b['mu']} w={b['w']} nu={b['nu']} R={b.get('R', '-')}")
        lines.append(f"    forms a = {b['a']}")
    if "zeta_quadratic_route" in payload:
        lines.append(f"  two-cone formula: {payload['zeta_quadratic_route']}")
    ok = True
    exp = cfg.get("expected", {})
    if "zeta" in exp:
        ok = Fraction(exp["zeta"]) == Fraction(payload["zeta"])
        if "zeta_quadratic_route" in payload:
            ok = ok and Fraction(payload["zeta_quadratic_route"]) == Fraction(exp["zeta"])
    for label, val in exp.get("R", {}).items():
        got = next((b.get("R") for b in payload["blocks"] if b["rho"] == label), None)
        ok = ok and got is not None and Fraction(got) == Fraction(val)
    if exp:
        payload["matches_expected"] = ok
        lines.append(f"  expected values {'reproduced' if ok else 'NOT reproduced'}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


# --- gr-eval --------------------------------------------------------------------

def _cx(s) -> mp.mpc:
    return mp.mpc(mp.mpmathify(s))


def cmd_gr_eval(args) -> int:
    if not args.config:
        raise ValidationError("gr-eval needs --config PATH")
    cfg = _load_json(args.config)
    jsonschema.validate(cfg, GR_SCHEMA)
    digits = args.prec or cfg.get("precision", 30)
    bits = args.bits or digits_to_bits(digits)
    kind = cfg["kind"]
    with mp.workprec(bits + 16):
        if kind == "geometric":
            forms = [tuple(f) for f in cfg["forms"]]
            v = [suites.parse_rational(c) for c in cfg["v"]]
            val = ge.geometric_G(forms, v, _cx(cfg["w"]), [_cx(c) for c in cfg["x"]], bits)
        else:
            z, taus = _cx(cfg["z"]), [_cx(t) for t in cfg["taus"]]
            if kind == "theta":
                val = ge.theta(z, taus[0], bits)
            elif kind == "elliptic_gamma":
                val = ge.elliptic_gamma(z, taus[0], taus[1], bits)
            elif kind == "expsum":
                val = ge.G_r_expsum(z, taus, bits)
            else:
                val = ge.G_r(z, taus, bits)
    payload = {"input": cfg, "value": fmt_c(val, digits), "precision_bits": bits,
               "relative_error_exponent": 8 - bits}
    text = f"{kind}: {mp.nstr(val, digits)}  (relative error <= 2^{8 - bits})"
    _emit(args, payload, text)
    return EXIT_OK


# --- verify ---------------------------------------------------------------------

def _fields(args) -> list[str]:
    return [args.field] if args.field else list(suites.BUNDLED)


def _run_modular_n(n: int, trials: int, bits: int, seed: int) -> suites.SuiteResult:
    return suites.suite_modular(ns=(n,), trials=trials, bits=bits, seed=seed + n)


def run_suite(name: str, args) -> list[suites.SuiteResult]:
    bits = args.bits or (digits_to_bits(args.prec) if args.prec else 256)
    seed = args.seed
    if name == "modular":
        ns = [args.n] if args.n else [2, 3, 4]
        trials = args.trials or 20
        if args.threads > 1 and len(ns) > 1:
            with ProcessPoolExecutor(max_workers=args.threads) as ex:
                return list(ex.map(_run_modular_n, ns, [trials] * len(ns), [bits] * len(ns), [seed] * len(ns)))
        return [_run_modular_n(n, trials, bits, seed) for n in ns]
    if name == "distribution":
        rs = [args.n - 2] if args.n else [0, 1, 2]
        return [suites.suite_distribution(rs=rs, bits=bits, seed=seed, trials=args.trials or 2)]
    if name == "cocycle":
        out = []
        for f in ([args.field] if args.field else ["cubic1"]):
            inp = suites.ray_class_input(suites.load_bundled(f))
            res = suites.suite_cocycle(inp, trials=args.trials or 200, seed=seed)
            res.name = f"cocycle[{f}]"
            out.append(res)
        return out
    if name == "kappa":
        return [suites.suite_kappa(trials=args.trials if args.trials is not None else 1000, seed=seed)]
    if name == "sampling":
        out = []
        for f in _fields(args):
            inp = suites.ray_class_input(suites.load_bundled(f))
            res = suites.suite_sampling(inp, trials=args.trials or 100, seed=seed + 1)
            res.name = f"sampling[{f}]"
            mut = suites.SuiteResult(f"sampling-mutation[{f}]")
            mut.add(suites.mutation_detected(inp, trials=args.trials or 100, seed=seed + 1),
                    note="flipped weight must break the identity")
            out.extend([res, mut])
        return out
    if name == "oracle":
        ns = [args.n] if args.n else [2, 3, 4]
        return [suites.suite_oracle(ns=tuple(ns), trials=args.trials or 100, seed=seed)]
    if name == "counts":
        return [suites.suite_counts(trials=args.trials or 50, seed=seed)]
    raise ValidationError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args)
    ok = all(r.ok for r in results)
    payload = {"suite": args.suite, "ok": ok,
               "results": [{"name": r.name, "passed": r.passed, "total": r.total, "cases": r.cases} for r in results]}
    lines = [f"{r.name}: {r.passed}/{r.total} {'PASS' if r.ok else 'FAIL'}" for r in results]
    for r in results:
        for c in r.cases:
            if not c["ok"]:
                lines.append(f"  failed: {json.dumps(c, default=str)}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


# --- unit-example -----------------------------------------------------------------

def cmd_unit_example(args) -> int:
    digits = args.prec or 60
    bits = args.bits or digits_to_bits(digits)
    if bits < 200:
        raise ValidationError("unit-example needs at least 200 bits (61 digits)")
    res = ge.quartic_unit_example(bits)
    palindromic = list(ge.UNIT_POLY) == list(reversed(ge.UNIT_POLY))
    ok = res.digits >= 8 and res.poly_residual < mp.mpf(10) ** -20 and palindromic
    payload = {
        "value": fmt_c(res.value, 30),
        "matching_digits": res.digits,
        "poly_residual": mp.nstr(res.poly_residual, 5),
        "palindromic": palindromic,
        "precision_bits": bits,
        "ok": ok,
    }
    text = (f"value = {mp.nstr(res.value, 30)}\n"
            f"digits matching 4.1210208 - 5.0617720i: {res.digits}\n"
            f"|P(value)| = {mp.nstr(res.poly_residual, 5)}\n"
            f"P palindromic: {palindromic}")
    _emit(args, payload, text)
    return EXIT_OK if ok else EXIT_CHECK


# --- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--prec", type=int, metavar="DIGITS", help="working precision in decimal digits")
    common.add_argument("--bits", type=int, metavar="BITS", help="working precision in bits (overrides --prec)")
    common.add_argument("--trials", type=int, metavar="N")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--threads", type=int, default=1, metavar="N")
    common.add_argument("--max-sign-prec", type=int, metavar="BITS", dest="max_sign_prec")
    common.add_argument("--field", choices=sorted(suites.BUNDLED))
    common.add_argument("--n", type=int, choices=[2, 3, 4])

    p = argparse.ArgumentParser(prog="geomgamma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("zeta0", parents=[common], help="exact partial zeta value at s=0").set_defaults(func=cmd_zeta0)
    sub.add_parser("gr-eval", parents=[common], help="evaluate G_r or a geometric G").set_defaults(func=cmd_gr_eval)
    pv = sub.add_parser("verify", parents=[common], help="run a verification suite")
    pv.add_argument("suite", choices=sorted(suites.SUITES))
    pv.set_defaults(func=cmd_verify)
    sub.add_parser("unit-example", parents=[common], help="quartic G_2 product").set_defaults(func=cmd_unit_example)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PoleError, SignUndecidableError, SamplingError, ge.DomainError, ArithmeticError) as exc:
        _error(args, "computation", exc)
        return EXIT_COMPUTE
    except (ValidationError, jsonschema.ValidationError, ValueError, KeyError, OSError) as exc:
        _error(args, "input", exc)
        return EXIT_INPUT


def _error(args, kind: str, exc: Exception) -> None:
    msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
    payload: dict[str, Any] = {"error": kind, "type": type(exc).__name__, "message": msg}
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"error ({kind}): {msg}\n")


if __name__ == "__main__":
    sys.exit(main())
