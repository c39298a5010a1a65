"""``collatz-lab`` command line.

Exit codes: 0 ok, 1 verification failure (or an exact cycle), 2 fuel
exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from . import certificates as certs
from .collatztree import export_graph, hotel_coords, max_depth_limit, stratum
from .numdomain import DomainError, JElem, parse_nat, parse_rat
from .reverse import ic_walk
from .sweep import CHECKS, run_sweep
from .trajectories import ALGORITHMS, Outcome, run, trace_to_json, trace_to_text

EXIT_OK, EXIT_FAIL, EXIT_FUEL, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _nat(text: str) -> int:
    try:
        return parse_nat(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _emit(line: str = ""):
    sys.stdout.write(line + "\n")


def cmd_run(args) -> int:
    if args.domain == "jaskowski":
        if args.k is None or args.w is None:
            raise UsageError("--domain jaskowski needs --k and --w")
        try:
            start = JElem(args.k, parse_rat(args.w))
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    else:
        if args.n is None:
            raise UsageError("--n is required in the natural domain")
        start = args.n
    try:
        trace = run(args.algo, start, args.fuel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        _emit(json.dumps(trace_to_json(trace), separators=(",", ":")))
    else:
        for line in trace_to_text(trace):
            _emit(line)
    kind = trace.outcome.kind
    if kind is Outcome.HALTED:
        return EXIT_OK
    if kind is Outcome.FUEL_EXHAUSTED:
        return EXIT_FUEL
    return EXIT_FAIL


def cmd_certify(args) -> int:
    if args.n < 1:
        raise UsageError("n must be >= 1")
    try:
        cert = certs.certify(args.n, args.fuel)
    except certs.CertificationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FUEL
    _emit(certs.to_json(cert))
    return EXIT_OK


def cmd_verify_cert(args) -> int:
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        cert = certs.from_json(text)
    except certs.CertificateError as exc:
        raise UsageError(str(exc)) from None
    verdict = certs.verify(cert)
    if verdict.ok:
        _emit("valid")
        return EXIT_OK
    _emit(f"invalid: {verdict.clause}: {verdict.detail}")
    return EXIT_FAIL


def cmd_reverse(args) -> int:
    last = None
    for s in ic_walk(args.x, args.y, args.z, args.fuel):
        _emit(json.dumps(s.to_dict(), separators=(",", ":")))
        last = s
    if last.err:
        return EXIT_FAIL
    return EXIT_OK if last.done else EXIT_FUEL


def _check_depth(depth: int):
    limit = max_depth_limit()
    if depth > limit:
        raise UsageError(f"depth {depth} exceeds COLLATZ_LAB_MAX_DEPTH={limit}")


def cmd_tree(args) -> int:
    _check_depth(args.depth)
    sys.stdout.write(export_graph("tree", args.depth, args.format))
    return EXIT_OK


def cmd_hotel(args) -> int:
    if args.max < 1:
        raise UsageError("--max must be >= 1")
    sys.stdout.write(export_graph("hotel", args.max, args.format))
    return EXIT_OK


def cmd_strata(args) -> int:
    if args.max < 1:
        raise UsageError("--max must be >= 1")
    rows = []
    for n in range(1, args.max + 1):
        tower, floor = hotel_coords(n)
        rows.append((n, stratum(n), tower, floor))
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["n", "stratum", "tower", "floor"])
        w.writerows(rows)
    else:
        doc = [{"n": str(n), "stratum": s, "tower": str(t), "floor": f}
               for n, s, t, f in rows]
        _emit(json.dumps(doc, separators=(",", ":")))
    return EXIT_OK


def cmd_sweep(args) -> int:
    start, stop = getattr(args, "from"), args.to
    if start < 1 or start > stop:
        raise UsageError(f"bad range {start}..{stop}")
    checks = CHECKS if args.checks == "all" else tuple(args.checks.split(","))
    bad = set(checks) - set(CHECKS)
    if bad:
        raise UsageError(f"unknown checks {sorted(bad)}; choose from {', '.join(CHECKS)}")
    t0 = time.perf_counter()
    rep = run_sweep(start, stop, args.fuel, checks, workers=args.workers)
    elapsed = time.perf_counter() - t0
    doc = rep.to_dict()
    if args.format == "json":
        _emit(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _emit(f"range {start}..{stop}")
        for name in rep.checks:
            line = f"{name}: passed={rep.passed[name]} failed={rep.failed[name]}"
            if name in rep.first_failure:
                f = rep.first_failure[name]
                line += f" first_failure=n:{f['n']} ({f['reason']})"
            _emit(line)
        _emit(f"max trajectory length {rep.max_steps} at n={rep.max_steps_n}")
        _emit("PASS" if rep.ok else "FAIL")
    # timing varies run to run, so it stays off stdout
    print(f"wall time {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="collatz-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one algorithm and print its trace")
    r.add_argument("--algo", choices=sorted(ALGORITHMS), default="cl")
    r.add_argument("--domain", choices=["nat", "jaskowski"], default="nat")
    r.add_argument("--n", type=_nat)
    r.add_argument("--k", type=_int, help="integer part of a Jaskowski element")
    r.add_argument("--w", help="non-negative rational part, e.g. 1/2")
    r.add_argument("--fuel", type=_nat, default=10**6)
    r.add_argument("--format", choices=["text", "json"], default="text")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("certify", help="emit the halting certificate of n as JSON")
    c.add_argument("--n", type=_nat, required=True)
    c.add_argument("--fuel", type=_nat, default=10**6)
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify-cert", help="check a certificate JSON file ('-' for stdin)")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify_cert)

    rv = sub.add_parser("reverse", help="walk IC' from (x, y, z), one JSON line per state")
    rv.add_argument("--x", type=_nat, required=True)
    rv.add_argument("--y", type=_nat, required=True)
    rv.add_argument("--z", type=_nat, required=True)
    rv.add_argument("--fuel", type=_nat, default=10**6)
    rv.set_defaults(func=cmd_reverse)

    t = sub.add_parser("tree", help="export the Collatz tree down to a depth")
    t.add_argument("--depth", type=_nat, required=True)
    t.add_argument("--format", choices=["dot", "json"], default="dot")
    t.set_defaults(func=cmd_tree)

    h = sub.add_parser("hotel", help="export the Hotel Collatz graph on 1..max")
    h.add_argument("--max", type=_nat, required=True)
    h.add_argument("--format", choices=["dot", "json"], default="dot")
    h.set_defaults(func=cmd_hotel)

    s = sub.add_parser("strata", help="stratum, tower and floor of every n in 1..max")
    s.add_argument("--max", type=_nat, required=True)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_strata)

    sw = sub.add_parser("sweep", help="run property checks over a range")
    sw.add_argument("--from", type=_nat, required=True)
    sw.add_argument("--to", type=_nat, required=True)
    sw.add_argument("--fuel", type=_nat, default=10**6)
    sw.add_argument("--checks", default="all",
                    help=f"comma-separated subset of {','.join(CHECKS)}, or 'all'")
    sw.add_argument("--workers", type=_nat, default=None,
                    help="parallel worker processes (default: CPU count)")
    sw.add_argument("--format", choices=["text", "json"], default="text")
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"collatz-lab {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
