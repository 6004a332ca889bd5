"""
Command-line front end.

    python cli.py check fixtures/pendulum.json --method all --partition "1,2;3,4;5,6"
    python cli.py compose fixtures/example1_sigma1.json fixtures/example1_sigma2.json -o composite.json
    python cli.py verify fixtures/pendulum.json fixtures/pendulum_certificate.json

Exit status: 0 controllable or certified, 1 not controllable (or a certificate
that fails verification), 2 inconclusive, 3 input error. Logs go to stderr,
reports to stdout.
"""
import argparse
import logging
import sys
from typing import List, Optional, TextIO

from scmatroid.domains.CheckReport import SystemReport
from scmatroid.services.controllabilityService import (
    CheckLimits,
    CheckMethod,
    RowPartition,
    SystemDef,
    Verdict,
    VerdictStatus,
    audit_certificate,
    block_matroids,
    compose_parallel,
    overall_status,
    run_checks,
)
from scmatroid.services.errors import ScMatroidError
from scmatroid.services.settingsService import configure_logging, load_settings
from scmatroid.services.systemFileService import (
    audit_to_report,
    dump_json,
    load_certificate,
    load_system,
    save_certificate,
    save_system,
    verdict_to_report,
)
from scmatroid.services.vectorMatroid import max_base_union_size, union_rank_formula

logger = logging.getLogger("scmatroid.cli")

EXIT_OK = 0
EXIT_NOT_CONTROLLABLE = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3

EXIT_CODES = {
    VerdictStatus.CONTROLLABLE: EXIT_OK,
    VerdictStatus.CERTIFIED: EXIT_OK,
    VerdictStatus.NOT_CONTROLLABLE: EXIT_NOT_CONTROLLABLE,
    VerdictStatus.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

METHODS = {
    "pbh": [CheckMethod.PBH],
    "kalman": [CheckMethod.KALMAN],
    "matroid": [CheckMethod.MATROID],
    "all": [CheckMethod.PBH, CheckMethod.KALMAN, CheckMethod.MATROID],
}


class CliArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the input-error status, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = CliArgumentParser(
        prog="scmatroid",
        description="Structural controllability of linear systems over F(z) via matroid certificates.",
    )
    parser.add_argument("--settings", help="settings.json to use (default: the project root)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run controllability checks on a system file")
    check.add_argument("path")
    check.add_argument("--method", choices=sorted(METHODS), default="all",
                       help="which test to run (default: all)")
    check.add_argument("--partition",
                       help='row blocks for the matroid search, e.g. "1,2;3,4,5" (default: one block per row)')
    check.add_argument("--json", action="store_true", help="print the report as JSON")
    check.add_argument("--seed", type=int,
                       help="enable the probabilistic rank fast path with this seed (default: off)")
    check.add_argument("--max-bases", type=int,
                       help="cap on bases examined per block (default: settings max_bases, 10000)")
    check.add_argument("--max-columns", type=int,
                       help="cap on pencil columns for minor enumeration (default: settings max_columns, 12)")
    check.add_argument("--certificate-out", help="write the matroid certificate here when one is found")

    compose = sub.add_parser("compose", help="compose system files in parallel")
    compose.add_argument("paths", nargs="+")
    compose.add_argument("-o", "--out", required=True, help="where to write the composite system file")
    compose.add_argument("--name", help="name of the composite (default: names joined by ' || ')")

    verify = sub.add_parser("verify", help="verify an exported certificate against a system")
    verify.add_argument("system")
    verify.add_argument("certificate")
    verify.add_argument("--json", action="store_true", help="print the audit as JSON")

    union = sub.add_parser("union", help="rank of the union of the row-block matroids")
    union.add_argument("path")
    union.add_argument("--partition", help="row blocks (default: one block per row)")

    return parser


def _limits(args, settings: dict) -> CheckLimits:
    limits = CheckLimits.from_settings(settings)
    return CheckLimits(
        max_bases=args.max_bases if args.max_bases is not None else limits.max_bases,
        max_columns=args.max_columns if args.max_columns is not None else limits.max_columns,
        seed=args.seed if args.seed is not None else limits.seed,
    )


def print_verdict(sys_def: SystemDef, verdict: Verdict, out: TextIO) -> None:
    report = verdict_to_report(sys_def, verdict)
    out.write(f"[{report.method}] {report.status}: {report.detail}\n")
    if report.evidence is not None:
        out.write(f"  evidence: {report.evidence}\n")
    if report.certificate is not None:
        for block, base in zip(report.certificate.partition, report.certificate.bases):
            rows = ",".join(str(r) for r in block)
            out.write(f"  block {base.block} rows {rows}: {{{','.join(base.labels)}}} witness {base.witness}\n")
        out.write(f"  totals: {'+'.join(str(t) for t in report.certificate.totals)} = {sys_def.n}\n")
        closure = report.certificate.closure
        if closure is not None:
            out.write(f"  closure: {closure.kind} {closure.value}\n")


def cmd_check(args, settings: dict, out: TextIO) -> int:
    limits = _limits(args, settings)
    sys_def = load_system(args.path, settings.get("gcd_threshold", 64))
    partition = RowPartition.parse(args.partition) if args.partition else None
    if partition is not None:
        partition.validate(sys_def.n)
    verdicts = run_checks(sys_def, METHODS[args.method], partition, limits)
    status = overall_status(verdicts)
    for verdict in verdicts:
        logger.info("%s [%s] %s", sys_def.name, verdict.method.value, verdict.status.value)

    certified = next((v for v in verdicts if v.status is VerdictStatus.CERTIFIED), None)
    if args.certificate_out and certified is not None:
        save_certificate(sys_def, certified.evidence, args.certificate_out)

    if args.json:
        report = SystemReport(system=sys_def.name, status=status.value,
                              reports=[verdict_to_report(sys_def, v) for v in verdicts])
        out.write(dump_json(report))
    else:
        out.write(f"system: {sys_def.name} (n={sys_def.n}, m={sys_def.m})\n")
        for verdict in verdicts:
            print_verdict(sys_def, verdict, out)
        out.write(f"overall: {status.value}\n")
    return EXIT_CODES[status]


def cmd_compose(args, settings: dict, out: TextIO) -> int:
    subs = [load_system(path, settings.get("gcd_threshold", 64)) for path in args.paths]
    composite = compose_parallel(subs, args.name)
    save_system(composite, args.out)
    out.write(f"wrote {composite.name} (n={composite.n}, m={composite.m}) to {args.out}\n")
    return EXIT_OK


def cmd_verify(args, settings: dict, out: TextIO) -> int:
    sys_def = load_system(args.system, settings.get("gcd_threshold", 64))
    cert = load_certificate(args.certificate, sys_def)
    audit = audit_certificate(sys_def, cert, int(settings.get("max_columns", 12)))
    if args.json:
        out.write(dump_json(audit_to_report(audit)))
    else:
        for ub, witness in zip(cert.bases, audit.witnesses):
            out.write(f"{ub.base}: witness {witness.render() if witness is not None else '-'}\n")
        if audit.closure is not None:
            out.write(f"closure: {audit.closure.kind.value} {audit.closure.value.render()}\n")
        for failure in audit.failures:
            out.write(f"FAILED {failure}\n")
        out.write("certificate valid\n" if audit.valid else "certificate invalid\n")
    return EXIT_OK if audit.valid else EXIT_NOT_CONTROLLABLE


def cmd_union(args, settings: dict, out: TextIO) -> int:
    sys_def = load_system(args.path, settings.get("gcd_threshold", 64))
    partition = RowPartition.parse(args.partition) if args.partition else RowPartition.singletons(sys_def.n)
    partition.validate(sys_def.n)
    matroids = block_matroids(sys_def, partition, settings.get("seed"))
    ground = matroids[0].ground
    rank = union_rank_formula(matroids, ground, int(settings.get("max_union_subset", 20)))
    out.write(f"block ranks: {[m.rank for m in matroids]}\n")
    out.write(f"union rank: {rank}\n")
    out.write(f"largest base union: {max_base_union_size(matroids, int(settings.get('max_bases', 10000)))}\n")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "compose": cmd_compose,
    "verify": cmd_verify,
    "union": cmd_union,
}


def main(argv: Optional[List[str]] = None, out: TextIO = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.settings)
        configure_logging("DEBUG" if args.verbose else settings.get("log_level", "INFO"))
        return COMMANDS[args.command](args, settings, out)
    except ScMatroidError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (OSError, ValueError, RecursionError) as e:
        logger.debug("unhandled input failure", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
