"""Command-line front end.

Subcommands:
  verify    run the identity suite (optionally a subset) on a system
  rewrite   normal-form an expression in the symmetry algebra
  basis     enumerate PBW basis monomials, optionally with a rank certificate
  phi       verify the central-quotient isomorphism at a fixed central value
  superint  emit a superintegrability certificate

Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage error,
3 step budget or group cap exceeded.  JSON reports are deterministic for a
fixed seed; timing fields are only included with --timings.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from fractions import Fraction

from . import identities, opalg, rgw, superint
from .coxeter import System
from .errors import (BadCentralValue, BadDimension, BadSpec, CapExceeded,
                     DunklAlgError, IndexOutOfRange, ParseError,
                     StepBudgetExceeded, UnsupportedField)

USAGE_ERRORS = (BadSpec, BadDimension, UnsupportedField, ParseError,
                BadCentralValue, IndexOutOfRange, ValueError)
BUDGET_ERRORS = (StepBudgetExceeded, CapExceeded)


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _build_system(args) -> System:
    gamma = "symbolic" if args.gamma == "symbolic" else _fraction(args.gamma)
    if args.g == "symbolic":
        gvals = "symbolic"
    else:
        gvals = [_fraction(v) for v in args.g.split(",")]
    return System.build(args.system, gvals=gvals, gamma=gamma, cap=args.cap)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_verify(args) -> int:
    sys = _build_system(args)
    names = None if args.identities in (None, "all") else args.identities.split(",")
    suite = identities.check_all(sys, names)
    if args.format == "json":
        _emit(args, suite.to_json(include_timing=args.timings))
    else:
        lines = [f"identity suite: {suite.system}  ({suite.passed} pass, {suite.failed} fail)"]
        for r in suite.reports:
            mark = "ok " if r.status == "pass" else "FAIL"
            timing = f"  {r.millis} ms" if args.timings else ""
            lines.append(f"  [{mark}] {r.identity:16s} checks={r.checks}{timing}")
            if r.status != "pass":
                lines.append(f"         residual: {r.residual}")
        _emit(args, "\n".join(lines))
    return 0 if suite.ok() else 1


def _cmd_rewrite(args) -> int:
    sys = _build_system(args)
    element = rgw.parse_word(sys, args.expression)
    normal = rgw.rewrite(element, budget=args.budget)
    if args.check:
        lhs = rgw.rho(element)
        rhs = rgw.rho(rgw.Element(sys, {m.word(): c for m, c in normal}))
        sound = (lhs - rhs).is_zero()
    else:
        sound = None
    if args.format == "json":
        payload = {
            "system": sys.rs.kind,
            "input": args.expression,
            "monomials": [
                {"monomial": m.render(), "coefficient": str(c),
                 "exponents": _exps_dict(m, sys.dim)}
                for m, c in normal
            ],
        }
        if sound is not None:
            payload["rho_consistent"] = sound
        _emit(args, json.dumps(payload, indent=2, sort_keys=True))
    else:
        lines = [f"normal form of {args.expression} over {sys.rs.kind}:"]
        for m, c in normal:
            lines.append(f"  ({c}) * {m.render()}")
        if not normal:
            lines.append("  0")
        if sound is not None:
            lines.append(f"rho-consistency: {'ok' if sound else 'FAILED'}")
        _emit(args, "\n".join(lines))
    return 0 if sound in (None, True) else 1


def _exps_dict(m, N):
    l_exp, a_exp, hpow, w = m.exponent_vector(N)
    return {"L": l_exp, "A": a_exp, "H": hpow, "w": w}


def _cmd_basis(args) -> int:
    sys = _build_system(args)
    group = "all" if args.group == "all" else None
    basis = rgw.enumerate_basis(sys, args.degree, group=group,
                                include_h=not args.no_h, l_only=args.l_only)
    rank = None
    if args.rank:
        rank = rgw.independence_rank(basis, sys, test_degree=args.test_degree,
                                     seed=args.seed)
    if args.format == "json":
        payload = {
            "system": sys.rs.kind,
            "degree_bound": args.degree,
            "count": len(basis),
            "monomials": [
                {"monomial": m.render(), "exponents": _exps_dict(m, sys.dim)}
                for m in basis
            ],
        }
        if rank is not None:
            payload["independence_rank"] = rank
        _emit(args, json.dumps(payload, indent=2, sort_keys=True))
    else:
        lines = [f"PBW basis of {sys.rs.kind} up to degree {args.degree}: "
                 f"{len(basis)} monomials"]
        for m in basis:
            l_exp, a_exp, hpow, w = m.exponent_vector(sys.dim)
            lines.append(f"  L:{l_exp} A:{a_exp} H:{hpow} w:{w}  | {m.render()}")
        if rank is not None:
            lines.append(f"independence rank: {rank} / {len(basis)}")
        _emit(args, "\n".join(lines))
    if rank is not None and rank < len(basis):
        return 1
    return 0


def _cmd_phi(args) -> int:
    sys = _build_system(args)
    result = rgw.phi_check(sys, _fraction(args.central))
    if args.format == "json":
        _emit(args, json.dumps(result, indent=2, sort_keys=True))
    else:
        lines = [f"central quotient isomorphism for {result['system']} "
                 f"at H = {result['central_value']}:",
                 f"  scale c = {result['scale']},  Casimir value b = {result['b']}",
                 f"  relations checked: {result['relations_checked']}",
                 f"  status: {result['status']}"]
        for f in result["failures"]:
            lines.append(f"  FAILED: {f}")
        _emit(args, "\n".join(lines))
    return 0 if result["status"] == "pass" else 1


def _cmd_superint(args) -> int:
    sys = _build_system(args)
    cert = superint.certificate(sys, degree=args.degree,
                                test_degree=args.test_degree, seed=args.seed,
                                record_pairwise=args.pairwise)
    if args.format == "json":
        _emit(args, cert.to_json())
    else:
        d = cert.as_dict()
        lines = [f"superintegrability certificate for {d['system']} (N={d['N']}):",
                 f"  Jacobian rank {d['rank']} / target {d['target']} "
                 f"(from {d['invariants_found']} invariants of degree <= {d['degree']})"]
        for entry in d["commutation"]:
            lines.append(f"  [{'ok ' if entry['status'] == 'pass' else 'FAIL'}] "
                         f"{entry['generator']}")
        lines.append(f"  status: {d['status']}")
        _emit(args, "\n".join(lines))
    return 0 if cert.ok() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dunklalg",
        description="Exact verification toolkit for Dunkl operator hidden symmetries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--system", required=True,
                       help="root system spec, e.g. A2, B3, A1xA1, G2@3")
        p.add_argument("--gamma", default="symbolic",
                       help="Coulomb charge: 'symbolic' or a rational like -3/2")
        p.add_argument("--g", default="symbolic",
                       help="multiplicities: 'symbolic' or comma-separated rationals per orbit")
        p.add_argument("--cap", type=int, default=1200, help="group order cap")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write the report to a file instead of stdout")

    p = sub.add_parser("verify", help="run the identity suite")
    common(p)
    p.add_argument("--identities", default="all",
                   help="'all' or comma-separated identity names")
    p.add_argument("--timings", action="store_true",
                   help="include timing fields (breaks byte-determinism)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("rewrite", help="PBW normal form of an expression")
    common(p)
    p.add_argument("expression", help="e.g. 'A(1)*L(1,2) + 3*H'")
    p.add_argument("--budget", type=int, default=rgw.DEFAULT_STEP_BUDGET)
    p.add_argument("--check", action="store_true",
                   help="also verify the normal form against the operator realization")
    p.set_defaults(func=_cmd_rewrite)

    p = sub.add_parser("basis", help="enumerate PBW basis monomials")
    common(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--group", choices=("id", "all"), default="id")
    p.add_argument("--no-h", action="store_true", help="exclude H factors")
    p.add_argument("--l-only", action="store_true", help="only L factors")
    p.add_argument("--rank", action="store_true",
                   help="certify independence by exact rank")
    p.add_argument("--test-degree", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("phi", help="central-quotient isomorphism check")
    common(p)
    p.add_argument("--central", default="-1",
                   help="central value a (must have -a a rational square)")
    p.set_defaults(func=_cmd_phi)

    p = sub.add_parser("superint", help="superintegrability certificate")
    common(p)
    p.add_argument("--degree", type=int, default=4,
                   help="symbol degree bound for invariant generation")
    p.add_argument("--test-degree", type=int, default=6,
                   help="degree bound D for restriction test functions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairwise", action="store_true",
                   help="record (not assert) pairwise commutators of the integrals")
    p.set_defaults(func=_cmd_superint)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except BUDGET_ERRORS as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 3
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except DunklAlgError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
