"""``growth-lab`` command line.

Exit codes: 0 when every audit passed, 1 when an audit was falsified,
2 for usage, input or resource errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from growth_lab import harness, set_arith
from growth_lab.errors import AuditFailure, CapabilityError
from growth_lab.field_core import PrimeField, build_dlog_table, find_primitive_root, is_prime
from growth_lab.harness import FamilySpec, derive_seed

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2

SETOPS = {
    "sum": lambda A, B: set_arith.sumset(A, B),
    "prod": lambda A, B: set_arith.product_set(A, B),
    "diff": lambda A, B: set_arith.difference_set(A, B),
    "shifted": lambda A, B: set_arith.shifted_product(A),
    "ratio": lambda A, B: set_arith.ratio_set(A),
    "2a-2a": lambda A, B: set_arith.two_a_minus_two_a(A),
}
PROOFLAB_AUDITS = ("anchor", "levels", "injection", "bsg", "ruzsa", "lemma2", "thm1")


class UsageError(Exception):
    pass


def parse_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment. Keys use flag names."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _common(suppress: bool = False) -> argparse.ArgumentParser:
    # Subcommands repeat the global flags with suppressed defaults so a value
    # given before the subcommand name is not overwritten.
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default(0), help="master seed (default 0)")
    common.add_argument("--json", metavar="PATH", default=default(None), help="write reports as JSON")
    common.add_argument("--csv", metavar="PATH", default=default(None),
                        help="write reports as long-format CSV")
    common.add_argument("--quiet", action="store_true", default=default(False),
                        help="print only the summary line")
    common.add_argument("--config", metavar="PATH", default=default(None),
                        help="key = value file supplying flag defaults")
    return common


def _trial_flags(sp, size=12, trials=1):
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--size", type=int, default=size)
    sp.add_argument("--trials", type=int, default=trials)
    sp.add_argument("--family", default="random", help="random, interval, ap, gp or extremal")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="growth-lab", parents=[_common()],
                                     description="Exact experiments on the growth of A(A+1) in F_p.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(suppress=True)

    sp = sub.add_parser("prime-tools", parents=[common], help="primality, primitive root, dlog table")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--table-check", action="store_true", help="build the dlog table and check it")

    sp = sub.add_parser("setops", parents=[common], help="sumsets, product sets and relatives")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=_int_list, required=True, metavar="CSV")
    sp.add_argument("--b", type=_int_list, metavar="CSV")
    sp.add_argument("--op", choices=sorted(SETOPS), required=True)

    sp = sub.add_parser("extremal", parents=[common], help="build and verify a small-A(A+1) set")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("thm2", parents=[common], help="audit the J-count sandwich")
    _trial_flags(sp, size=16, trials=10)

    sp = sub.add_parser("thm3", parents=[common], help="audit the Elekes incidence configuration")
    sp.add_argument("--size", type=int, default=16)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--family", default="random", help="random, ap or gp (rationals)")
    sp.add_argument("--c-st", type=float, default=2.5, help="constant in the incidence bound")

    sp = sub.add_parser("prooflab", parents=[common], help="step-by-step lemma audits")
    sp.add_argument("audit", choices=PROOFLAB_AUDITS)
    _trial_flags(sp, size=12, trials=10)

    sp = sub.add_parser("grid", parents=[common], help="run an experiment plan")
    sp.add_argument("--plan", metavar="PATH", help="JSON list of cells {audit, kind, size, p, params}")
    sp.add_argument("--audit", choices=sorted(harness.AUDITS))
    sp.add_argument("--p", type=int)
    sp.add_argument("--sizes", type=_int_list, default=[])
    sp.add_argument("--family", default="random")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("fit", parents=[common], help="fit v ~ n^beta by least squares")
    sp.add_argument("--pairs", help="n:v,n:v,...")
    sp.add_argument("--input", metavar="PATH", help="CSV with columns n,v")
    return parser


def _apply_config(parser: argparse.ArgumentParser, path) -> None:
    """Turn config entries into defaults of every subcommand that has the flag."""
    try:
        config = parse_config(path)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    subparsers = parser._subparsers._group_actions[0].choices.values()
    for key, value in config.items():
        if key in ("help", "config", "command"):
            raise UsageError(f"config key {key!r} is not allowed")
        owners = [(sp, a) for sp in subparsers for a in sp._actions if a.dest == key]
        if not owners:
            raise UsageError(f"unknown config key {key!r}")
        for sp, action in owners:
            if isinstance(action, argparse._StoreTrueAction):
                converted = value.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                try:
                    converted = action.type(value)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"config key {key!r}: {exc}") from exc
            else:
                converted = value
            sp.set_defaults(**{key: converted})
            action.required = False


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        # Explicit command-line flags still win over the file.
        _apply_config(parser, known.config)
    return parser.parse_args(argv)


def _out(args, line: str) -> None:
    if not args.quiet:
        print(line)


def _cmd_prime_tools(args) -> int:
    p = args.p
    prime = is_prime(p)
    _out(args, f"p={p}")
    print(f"is_prime={str(prime).lower()}")
    if not prime:
        return EXIT_OK
    _out(args, f"primitive_root={find_primitive_root(p)}")
    if args.table_check:
        table = build_dlog_table(PrimeField.of(p))
        x = (p // 3) or 1
        ok = table.exp(table.log(x)) == x and table.power[0] == 1
        print(f"table_check={'ok' if ok else 'failed'}")
        return EXIT_OK if ok else EXIT_FALSIFIED
    return EXIT_OK


def _cmd_setops(args) -> int:
    if not is_prime(args.p):
        raise ValueError(f"p={args.p} is not prime")
    A = set_arith.FpSet(args.p, args.a)
    B = set_arith.FpSet(args.p, args.b) if args.b is not None else A
    result = SETOPS[args.op](A, B)
    if isinstance(result, set_arith.AllOfFp):
        result = set_arith.FpSet.full(args.p)
    print(",".join(str(v) for v in result))
    print(f"card={result.card}")
    return EXIT_OK


def _trial_plan(audit, args, count, p=None, size=None):
    return [(audit, FamilySpec(args.family, size if size is not None else args.size, p=p,
                               seed=derive_seed(args.seed, i)))
            for i in range(count)]


def _cmd_extremal(args) -> int:
    plan = [("extremal", FamilySpec("extremal", args.n, p=args.p, seed=args.seed))]
    return _finish(args, harness.run_grid(plan))


def _cmd_thm2(args) -> int:
    return _finish(args, harness.run_grid(_trial_plan("thm2", args, args.trials, p=args.p)))


def _cmd_thm3(args) -> int:
    plan = _trial_plan("thm3", args, args.trials)
    return _finish(args, harness.run_grid(plan, c_st=args.c_st))


def _cmd_prooflab(args) -> int:
    return _finish(args, harness.run_grid(_trial_plan(args.audit, args, args.trials, p=args.p)))


def _load_plan(path) -> list:
    try:
        cells = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read plan: {exc}") from exc
    plan = []
    for i, cell in enumerate(cells):
        try:
            spec = FamilySpec(cell.get("kind", "random"), int(cell["size"]), p=cell.get("p"),
                              seed=int(cell.get("seed", 0)), exclude=tuple(cell.get("exclude", ())),
                              params=dict(cell.get("params", {})))
            plan.append((cell["audit"], spec))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"plan cell {i}: {exc}") from exc
    return plan


def _cmd_grid(args) -> int:
    if args.plan:
        plan = _load_plan(args.plan)
    elif args.audit:
        plan = [(args.audit, FamilySpec(args.family, size, p=args.p))
                for size in args.sizes for _ in range(args.trials)]
    else:
        raise UsageError("grid needs --plan or --audit")
    reports = harness.run_grid(plan, master_seed=args.seed, workers=args.workers)
    if not args.quiet:
        for audit, entry in harness.summarize(reports).items():
            ratios = " ".join(f"{name}[min={r['min']:.6g},median={r['median']:.6g}]"
                              for name, r in entry["ratios"].items())
            print(f"summary {audit}: {entry['passed']}/{entry['runs']} passed {ratios}")
    return _finish(args, reports)


def _cmd_fit(args) -> int:
    pairs = []
    if args.pairs:
        for item in args.pairs.split(","):
            n, _, v = item.partition(":")
            pairs.append((float(n), float(v)))
    elif args.input:
        import csv

        with open(args.input, newline="") as fh:
            pairs = [(float(row["n"]), float(row["v"])) for row in csv.DictReader(fh)]
    else:
        raise UsageError("fit needs --pairs or --input")
    beta, r2 = harness.fit_exponent(pairs)
    print(f"beta={beta:.12g} r2={r2:.12g}")
    return EXIT_OK


def _finish(args, reports) -> int:
    if args.json:
        harness.emit_report(reports, "json", args.json)
    if args.csv:
        harness.emit_report(reports, "csv", args.csv)
    for r in reports:
        bounds = " ".join(f"{b.name}={b.ratio:.6g}" for b in r.bounds)
        failed = [k for k, v in r.flags.items() if not v]
        status = "pass" if r.passed else "FAIL " + ",".join(failed)
        _out(args, f"{r.run_id} {r.family} p={r.p} size={r.size} {status} {bounds}")
    passed = sum(r.passed for r in reports)
    print(f"{passed}/{len(reports)} reports passed")
    return EXIT_OK if passed == len(reports) else EXIT_FALSIFIED


COMMANDS = {
    "prime-tools": _cmd_prime_tools,
    "setops": _cmd_setops,
    "extremal": _cmd_extremal,
    "thm2": _cmd_thm2,
    "thm3": _cmd_thm3,
    "prooflab": _cmd_prooflab,
    "grid": _cmd_grid,
    "fit": _cmd_fit,
}


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(f"growth-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except AuditFailure as exc:
        print(f"growth-lab: audit falsified: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except (UsageError, ValueError, CapabilityError, OSError, ZeroDivisionError) as exc:
        print(f"growth-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
