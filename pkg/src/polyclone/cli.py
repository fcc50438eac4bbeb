"""Command-line interface.

Subcommands: gen, ppcheck, witness, decide, trace, bounds.  All output is
JSON on stdout; identical invocations (including seeds) produce identical
bytes.  Exit codes: 0 ok / sat, 1 violation / unsat / failed identity,
2 usage error, 3 budget exceeded or unknown verdict.  The environment
variable POLYCLONE_BUDGET overrides the enumeration caps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import compat, indicator, structures, trace, witness
from .relations import BudgetExceededError, structure_to_json

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _env_budget(default: int) -> int:
    raw = os.environ.get("POLYCLONE_BUDGET")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"POLYCLONE_BUDGET must be an integer, got {raw!r}") from exc


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _family_structure(family: str, n: int, m: int | None):
    if family == "A":
        if m is None:
            raise ValueError("family A needs m")
        spec = structures.SpecA(n, m)
        return spec, structures.structure_a(spec)
    spec = structures.SpecB(n)
    return spec, structures.structure_b(spec)


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "A" and args.n == 0 and args.m == 2:
        print(
            "warning: (n=0, m=2) carries no lower-bound claim (the excluded arity is below 3)",
            file=sys.stderr,
        )
    _, struct = _family_structure(fam, args.n, args.m)
    obj = {"family": fam, "n": args.n}
    if fam == "A":
        obj["m"] = args.m
    obj.update(structure_to_json(struct))
    _emit(obj)
    return EXIT_OK


def cmd_ppcheck(args) -> int:
    if args.family == "A":
        holds = structures.chain_matches_congruence_a(structures.SpecA(args.n, 2), args.i)
    else:
        holds = structures.chain_matches_congruence_b(structures.SpecB(args.n), args.i)
    _emit({"family": args.family, "n": args.n, "i": args.i, "holds": holds})
    return EXIT_OK if holds else EXIT_VIOLATION


def cmd_witness(args) -> int:
    fam = args.family
    _, struct = _family_structure(fam, args.n, args.m)
    op = witness.witness_a(args.n, args.m) if fam == "A" else witness.witness_b(args.n)
    budget = _env_budget(args.budget)
    results = []
    ok = True
    for name, rel in struct.relations.items():
        if args.mode == "exact":
            verdict = compat.check_compat_symmetric(op, rel, budget=budget, jobs=args.jobs)
        else:
            verdict = compat.check_compat_sampled(op, rel, args.trials, args.seed)
        ok = ok and verdict.ok
        results.append({"relation": name, **verdict.to_json(struct.domain)})
    _emit(
        {
            "family": fam,
            "n": args.n,
            "m": op.m,
            "arity": str(op.arity),
            "mode": args.mode,
            "seed": args.seed if args.mode == "sampled" else None,
            "nu": witness.is_nu_symmetric(op),
            "ok": ok,
            "relations": results,
        }
    )
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_decide(args) -> int:
    fam = args.family
    _, struct = _family_structure(fam, args.n, args.m)
    budget = _env_budget(args.matrix_budget)
    report = indicator.decide_nu(
        struct,
        args.k,
        pin=args.pin,
        var_cap=args.var_cap,
        matrix_budget=budget,
        node_limit=args.node_limit,
    )
    obj = {
        "structure": {"family": fam, "n": args.n, "m": args.m if fam == "A" else 2},
        "arity": args.k,
        "pin": args.pin,
        **report.to_json(),
    }
    if report.table is not None:
        obj["witness"]["names"] = list(struct.domain.names)
    _emit(obj)
    if report.verdict == "sat":
        return EXIT_OK
    if report.verdict == "unsat":
        return EXIT_VIOLATION
    return EXIT_BUDGET


def cmd_trace(args) -> int:
    fam = args.family
    _, struct = _family_structure(fam, args.n, args.m)
    if fam == "A":
        cert = trace.certify_lower_bound_a(args.n, args.m)
    else:
        cert = trace.certify_lower_bound_b(args.n)
    report = trace.check_certificate(cert, struct)
    obj = trace.certificate_to_json(cert)
    obj["checked"] = report.ok
    if not report.ok:
        obj["faults"] = list(report.faults)
    _emit(obj)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_bounds(args) -> int:
    vals = structures.bounds(args.universe, args.max_arity)
    _emit(
        {
            "universe": args.universe,
            "max_arity": args.max_arity,
            "upper": str(vals["upper"]),
            "lower": str(vals["lower"]),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyclone",
        description="Extremal structures, their symmetric witness operations, "
        "near-unanimity search, and lower-bound certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family(p, need_m):
        p.add_argument("family", choices=["A", "B"])
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int, default=None, help="required for family A" if need_m else None)

    p = sub.add_parser("gen", help="emit a structure as JSON")
    add_family(p, True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("ppcheck", help="verify a congruence ladder identity")
    add_family(p, False)
    p.add_argument("--i", type=int, required=True, help="congruence level")
    p.set_defaults(fn=cmd_ppcheck)

    p = sub.add_parser("witness", help="check the witness operation against every relation")
    add_family(p, True)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--trials", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=witness.DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=int, default=compat.DEFAULT_MULTISET_BUDGET)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("decide", help="search for a near-unanimity table of a given arity")
    add_family(p, True)
    p.add_argument("--k", type=int, required=True, help="arity to decide")
    p.add_argument("--pin", choices=["nu", "remark"], default="nu")
    p.add_argument("--node-limit", type=int, default=indicator.DEFAULT_NODE_LIMIT)
    p.add_argument("--var-cap", type=int, default=indicator.DEFAULT_VAR_CAP)
    p.add_argument("--matrix-budget", type=int, default=indicator.DEFAULT_MATRIX_BUDGET)
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("trace", help="build and re-check a lower-bound certificate")
    add_family(p, True)
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("bounds", help="arity bound formulas")
    p.add_argument("universe", type=int)
    p.add_argument("max_arity", type=int)
    p.set_defaults(fn=cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
