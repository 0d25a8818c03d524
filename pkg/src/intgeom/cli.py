"""Command line entry point.

Exit codes: 0 every check passed, 2 some check failed, 3 no failure but at
least one inconclusive check, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
import time

from . import __version__
from .bodyspec import BodySpecError, load_body_spec
from .geometry import RngStream, grassmann_volume
from .homogeneous_fourier import c_constant
from .membership import DEFAULT_L, bp_k_test, i_k_test
from .petkantschin import PetkantschinConfig, integrand_by_name, verify as petkantschin_verify
from .report import VerificationReport, emit_report
from .suites import DEFAULTS, SUITES, SuiteConfig, SuiteError, run_suite

EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def int_list(text: str) -> tuple:
    """Parse '3,4,5' or '2-10' (inclusive) or a mix like '2,4-6'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part[1:]:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected integers like '3,4,5' or '2-10', got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return tuple(out)


def _defaults_help() -> str:
    rows = []
    for name in SUITES:
        d = DEFAULTS[name]
        rows.append(
            f"  {name:<13} n={','.join(map(str, d['n']))} k={','.join(map(str, d['k'])) or '-'} "
            f"L={d['L'] if d['L'] is not None else '-'} samples={d['samples'] or '-'} "
            f"count={d['count'] or '-'} tol={d['tol']:g}"
        )
    return "suite defaults:\n" + "\n".join(rows)


def _add_output(p):
    p.add_argument("--out", help="write the report to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default json)")
    p.add_argument("--timing", action="store_true", help="include wall time (makes reports non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="intgeom", description="Numerical integral geometry of generalized intersection bodies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser(
        "verify",
        help="run a seeded verification suite",
        epilog=_defaults_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    v.add_argument("suite", nargs="?", choices=SUITES, help="suite name (may come from --config)")
    v.add_argument("--config", help="suite config file with a [suite] section; flags override it")
    v.add_argument("--n", type=int_list, help="ambient dimension(s), e.g. 3,4,5 or 2-10")
    v.add_argument("--k", type=int_list, help="codimension / level list")
    v.add_argument("--L", type=int, help="harmonic band limit (even)")
    v.add_argument("--samples", type=int, help="Monte Carlo samples per estimate (BP nodes for membership)")
    v.add_argument("--count", type=int, help="number of random cases")
    v.add_argument("--seed", type=int, help="master seed (default 0)")
    v.add_argument("--tol", type=float, help="override of the suite's primary tolerance")
    _add_output(v)

    m = sub.add_parser("membership", help="I_k (and optionally BP_k) tests for a body spec file")
    m.add_argument("body", help="body specification file")
    m.add_argument("--k", type=int, required=True, help="level k, 1 <= k <= n - 1")
    m.add_argument("--L", type=int, default=DEFAULT_L, help=f"band limit (default {DEFAULT_L})")
    m.add_argument("--tol", type=float, default=0.0, help="extra margin required for a decided verdict (default 0)")
    m.add_argument("--samples", type=int, default=0, help="BP atoms; 0 skips the BP probe (default 0)")
    m.add_argument("--seed", type=int, default=0, help="seed for the BP atoms (default 0)")
    m.add_argument(
        "--expect", choices=("positive", "negative", "any"), default="any",
        help="expected I_k verdict; a mismatch exits with 2 (default any)",
    )
    _add_output(m)

    p = sub.add_parser("petkantschin", help="verify the Grassmannian integration formula for one configuration")
    p.add_argument("--config", help="file with a [petkantschin] section (n, k_list, d, integrand, samples, seed)")
    p.add_argument("--n", type=int, help="ambient dimension")
    p.add_argument("--k", type=int_list, help="codimension list k_1,...,k_r")
    p.add_argument("--d", type=int, help="pole dimension (default 0)")
    p.add_argument("--integrand", choices=("one", "zonal", "omega2"), help="integrand (default one)")
    p.add_argument("--samples", type=int, help="samples per side (default 1000000)")
    p.add_argument("--seed", type=int, help="seed (default 0)")
    p.add_argument("--tol", type=float, help="z threshold (default 3)")
    _add_output(p)

    t = sub.add_parser("table", help="print c(n,p) and |G(a,b)| tables")
    t.add_argument("--n", type=int_list, default=tuple(range(2, 11)), help="dimensions (default 2-10)")
    t.add_argument("--p", default="0.5,1,1.5,2", help="comma-separated degrees p (default 0.5,1,1.5,2)")
    t.add_argument("--format", choices=("text", "json", "csv"), default="text")
    t.add_argument("--out", help="write to this path instead of stdout")
    return parser


def _emit(rep: VerificationReport, args, started: float) -> int:
    if args.timing:
        rep.wall_time = time.perf_counter() - started
    data = emit_report(rep, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return rep.exit_code


def _input_error(payload: dict) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return EXIT_USAGE


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    over = dict(n=args.n, k=args.k, L=args.L, samples=args.samples, count=args.count, seed=args.seed, tol=args.tol)
    try:
        if args.config:
            cfg = SuiteConfig.from_file(args.config, suite=args.suite, **over)
        elif args.suite is None:
            return _input_error({"error": "give a suite name or --config"})
        else:
            cfg = SuiteConfig(args.suite, **{k: v for k, v in over.items() if v is not None})
        rep = run_suite(cfg)
    except SuiteError as e:
        return _input_error({"error": str(e)})
    if args.out is None and cfg.out:
        args.out = cfg.out
    return _emit(rep, args, started)


def _cmd_membership(args) -> int:
    started = time.perf_counter()
    try:
        K = load_body_spec(args.body)
    except BodySpecError as e:
        return _input_error(e.as_dict())
    if not 1 <= args.k <= K.n - 1:
        return _input_error({"error": f"need 1 <= k <= n - 1 = {K.n - 1}, got {args.k}"})
    if args.L < 2 or args.L % 2:
        return _input_error({"error": f"L must be an even integer >= 2, got {args.L}"})
    params = {"body": K.describe(), "k": args.k, "L": args.L, "tol": args.tol, "bp_nodes": args.samples,
              "expect": args.expect}
    rep = VerificationReport("membership", params, args.seed)
    v = i_k_test(K, args.k, args.L, args.tol)
    if v.verdict == "inconclusive":
        status = "inconclusive"
    elif args.expect in ("any", v.verdict):
        status = "pass"
    else:
        status = "fail"
    details = v.as_dict()
    details["outcome"] = details.pop("verdict")
    rep.add(f"I_{args.k} test", v.margin, 0.0, v.truncation_bound, status, **details)
    if args.samples:
        res = bp_k_test(K, args.k, min(args.L, 8), args.samples, RngStream(args.seed))
        status = "pass" if res.converged else "inconclusive"
        rep.add(f"BP_{args.k} probe (evidence only)", res.relative, 0.0, 0.0, status, **res.as_dict())
    return _emit(rep, args, started)


def _cmd_petkantschin(args) -> int:
    started = time.perf_counter()
    vals = {"n": None, "k": None, "d": 0, "integrand": "one", "samples": 1_000_000, "seed": 0, "tol": 3.0}
    try:
        if args.config:
            cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
            with open(args.config) as fh:
                cp.read_file(fh)
            if not cp.has_section("petkantschin"):
                return _input_error({"error": f"{args.config}: missing [petkantschin] section"})
            sec = cp["petkantschin"]
            extra = set(sec) - {"n", "k_list", "d", "integrand", "samples", "seed", "tol"}
            if extra:
                return _input_error({"error": f"{args.config}: unknown field(s) {', '.join(sorted(extra))}"})
            for key, conv in (("n", int), ("d", int), ("samples", int), ("seed", int), ("tol", float)):
                if key in sec:
                    vals[key] = conv(sec[key])
            if "k_list" in sec:
                vals["k"] = int_list(sec["k_list"])
            vals["integrand"] = sec.get("integrand", vals["integrand"]).strip()
        for key in vals:
            if getattr(args, key, None) is not None:
                vals[key] = getattr(args, key)
        if vals["n"] is None or vals["k"] is None:
            return _input_error({"error": "need --n and --k (or a config file providing them)"})
        cfg = PetkantschinConfig(
            vals["n"], vals["k"], sum(vals["k"]), vals["d"], integrand_by_name(vals["integrand"], vals["n"]),
            vals["samples"], vals["seed"],
        )
    except (OSError, configparser.Error, ValueError, argparse.ArgumentTypeError) as e:
        return _input_error({"error": str(e)})
    rep = petkantschin_verify(cfg)
    out = VerificationReport("petkantschin", dict(cfg.parameters(), tol=vals["tol"]), cfg.seed)
    for c in rep.checks:
        out.add(c.name, c.estimate, c.standard_error, vals["tol"], "pass" if c.details["z"] < vals["tol"] else "fail",
                **c.details)
    return _emit(out, args, started)


def _cmd_table(args) -> int:
    try:
        ps = [float(x) for x in args.p.split(",") if x.strip()]
    except ValueError:
        return _input_error({"error": f"--p expects comma-separated numbers, got {args.p!r}"})
    rows_c = []
    for n in args.n:
        for p in ps:
            if 0 < p < n:
                rows_c.append((n, p, c_constant(n, p)))
    amax = max(args.n)
    rows_g = [(a, b, grassmann_volume(a, b)) for a in range(1, amax + 1) for b in range(a + 1)]
    if args.format == "json":
        text = json.dumps(
            {"c": [{"n": n, "p": p, "value": v} for n, p, v in rows_c],
             "grassmann": [{"a": a, "b": b, "value": v} for a, b, v in rows_g]},
            indent=2,
        ) + "\n"
    elif args.format == "csv":
        lines = ["table,x,y,value"]
        lines += [f"c,{n},{p:.17g},{v:.17g}" for n, p, v in rows_c]
        lines += [f"G,{a},{b},{v:.17g}" for a, b, v in rows_g]
        text = "\n".join(lines) + "\n"
    else:
        lines = ["c(n,p) = pi^(n/2) 2^(n-p) Gamma((n-p)/2) / Gamma(p/2)", f"{'n':>3} {'p':>6} {'c(n,p)':>22}"]
        lines += [f"{n:>3} {p:>6g} {v:>22.15g}" for n, p, v in rows_c]
        lines += ["", "|G(a,b)|", f"{'a':>3} {'b':>3} {'volume':>22}"]
        lines += [f"{a:>3} {b:>3} {v:>22.15g}" for a, b, v in rows_g]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "verify": _cmd_verify,
        "membership": _cmd_membership,
        "petkantschin": _cmd_petkantschin,
        "table": _cmd_table,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
