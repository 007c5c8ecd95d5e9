"""Command-line entry point: ``exptwist <subcommand> [options]``.

Exit status: 0 all hard checks passed, 1 a hard check failed, 2 bad
configuration, 3 a quadrature or truncation failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace

from .errors import ConfigInvalid, QuadratureNonConvergence, TruncationBudgetExceeded
from .suites import (
    SUITES,
    GridConfig,
    VerificationReport,
    cancellation_csv,
    config_from_mapping,
    emit_report,
    load_config,
    run_suite,
    suite_cancellation,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = {
    "verify-charsum": "charsum",
    "verify-delta": "delta",
    "scan-cancellation": "cancellation",
    "voronoi-gl2": "voronoi-gl2",
    "scan-decay": "decay",
    "transforms": "transforms",
    "all": "all",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file; [grid] and the suite's own section are read")
    p.add_argument("--report", help="write the report here (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--tolerance", type=float, help="override the tolerance of every hard check")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exptwist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-charsum", help="brute-force vs factored character sums, correlation sums")
    _common(p)
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--q-max", type=int)
    p.add_argument("--r-max", type=int)
    p.add_argument("--n2-max", type=int)
    p.add_argument("--char-index", action="append", metavar="J1:J2",
                   help="primitive-root exponents of chi1 and chi2 (repeatable)")
    p.add_argument("--no-correlation", action="store_true", help="skip the correlation scan")

    p = sub.add_parser("verify-delta", help="delta-symbol rearrangement and the DFI expansion")
    _common(p)
    p.add_argument("--Q", type=float, action="append")
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--n-range", metavar="LO:HI")
    p.add_argument("--stub", choices=("one", "rational", "dfi"), action="append")

    p = sub.add_parser("scan-cancellation", help="trace-function identities and the cancellation statistic")
    _common(p)
    p.add_argument("--moduli", help="comma-separated primes")
    p.add_argument("--tuples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threshold", type=float, help="monitored soft threshold for |sum|/sqrt(M1)")

    p = sub.add_parser("voronoi-gl2", help="Voronoi summation for Ramanujan's Delta")
    _common(p)
    p.add_argument("--c-max", type=int)
    p.add_argument("--N", type=float, action="append")

    for name, text in (("scan-decay", "decay of H, K, W-dagger and Psi-minus"),
                       ("transforms", "gamma factors, stationary phase, J, R and Psi checks"),
                       ("all", "every suite")):
        _common(sub.add_parser(name, help=text))
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    """Flag values as config-file strings, so both paths share one parser."""
    out: dict[str, str] = {}
    if args.jobs is not None:
        out["jobs"] = str(args.jobs)
    if args.tolerance is not None:
        out["tolerance"] = str(args.tolerance)
    get = lambda name: getattr(args, name, None)
    if get("m1") is not None or get("m2") is not None:
        if get("m1") is None or get("m2") is None:
            raise ConfigInvalid({"prime_pairs": "--m1 and --m2 go together"})
        out["prime_pairs"] = f"{args.m1}:{args.m2}"
    if get("q_max") is not None:
        out["q_values"] = ",".join(str(q) for q in range(1, args.q_max + 1))
    if get("r_max") is not None:
        out["r_values"] = ",".join(str(r) for r in range(1, args.r_max + 1))
    if get("n2_max") is not None:
        out["n2_values"] = ",".join(str(n) for n in range(1, args.n2_max + 1))
    if get("char_index"):
        out["char_pairs"] = ",".join(args.char_index)
    if get("no_correlation"):
        out["correlation"] = "false"
    if get("Q"):
        out["delta_Q"] = ",".join(str(q) for q in args.Q)
    if get("n_range"):
        out["n_range"] = args.n_range
    if get("stub"):
        out["stubs"] = ",".join(args.stub)
    if get("moduli"):
        out["cancellation_moduli"] = args.moduli
    if get("tuples") is not None:
        out["cancellation_tuples"] = str(args.tuples)
    if get("seed") is not None:
        out["seed"] = str(args.seed)
    if get("threshold") is not None:
        out["soft_threshold"] = str(args.threshold)
    if get("c_max") is not None:
        out["voronoi_c_max"] = str(args.c_max)
    if get("N"):
        out["voronoi_N"] = ",".join(str(n) for n in args.N)
    return out


def _config(args: argparse.Namespace, suite: str) -> GridConfig:
    base = load_config(args.config, suite) if args.config else GridConfig()
    return config_from_mapping(_overrides(args), base).validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    suite = COMMANDS[args.command]
    names = list(SUITES) if suite == "all" else [suite]
    reports: list[VerificationReport] = []
    start = time.perf_counter()
    try:
        for name in names:
            cfg = _config(args, name)
            t0 = time.perf_counter()
            try:
                if name == "cancellation" and args.format == "csv" and suite != "all":
                    rep, rows = suite_cancellation(cfg)
                    reports.append(rep)
                    text = cancellation_csv(rows)
                    if args.report:
                        try:
                            with open(args.report, "w") as fh:
                                fh.write(text)
                        except OSError as exc:
                            raise ConfigInvalid({"report": str(exc)}) from exc
                    else:
                        sys.stdout.write(text)
                    continue
                reports.append(run_suite(name, cfg))
            except (QuadratureNonConvergence, TruncationBudgetExceeded) as exc:
                rep = VerificationReport(name, cfg.echo())
                rep.numeric_failure = f"{type(exc).__name__}: {exc}"
                reports.append(rep)
            finally:
                print(f"{name}: {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    except ConfigInvalid as exc:
        for field, problem in sorted(exc.problems.items()):
            print(f"config error: {field}: {problem}", file=sys.stderr)
        return EXIT_CONFIG

    if not (suite == "cancellation" and args.format == "csv"):
        try:
            text = emit_report(reports, args.format, args.report)
        except OSError as exc:
            print(f"cannot write report: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if args.report is None:
            sys.stdout.write(text)
    for rep in reports:
        s = rep.summary
        status = "numeric failure" if rep.numeric_failure else ("pass" if rep.passed else "FAIL")
        print(f"{rep.suite}: {status}; {s['hard'] - s['hard_failed']}/{s['hard']} hard checks, "
              f"{s['monitored_flagged']}/{s['monitored']} monitored flagged", file=sys.stderr)
    print(f"total wall clock {time.perf_counter() - start:.1f} s", file=sys.stderr)

    if any(r.numeric_failure for r in reports):
        return EXIT_NUMERIC
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
