"""Command-line front end.

    bellkit analyze <file>      CHSH, marginal law and category for tables or a model
    bellkit classify <file>     category only
    bellkit lhv <file>          local hidden variable feasibility certificate
    bellkit synthesize <file>   build a quantum model reproducing the tables
    bellkit demo <kind>         reference models: nnmb2, nonlocal_box, singlet, pr_box_tables

Exit codes: 0 success, 1 analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import BellkitError
from .lhv import LHV_TOL, lhv_feasible
from .refmodels import REFERENCE_KINDS, build_reference
from .scenario import CATEGORY_NAMES, JointTables, analyze_model, analyze_tables
from .schema import (
    ReportFile,
    ScenarioFile,
    canonical_digest,
    model_document,
    parse_scenario,
    render_report,
)
from .synthesis import SYNTHESIS_TOL, SynthesisRequest, synthesize_model


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None, help="numerical tolerance for the command")
    common.add_argument("--json", action="store_true", help="emit the bellkit-report/1 JSON document")
    common.add_argument("--out", type=Path, default=None, help="write the report to this path")
    common.add_argument("--seed", type=int, default=None, help="seed for the synthesis refinement")

    parser = argparse.ArgumentParser(prog="bellkit", description="Quantum models of bipartite Bell scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("analyze", "analyze tables or a model"),
        ("classify", "print the scenario category"),
        ("lhv", "check for a local hidden variable model"),
        ("synthesize", "synthesize a quantum model for the tables"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file", type=Path)
    p = sub.add_parser("demo", parents=[common], help="analyze a built-in reference model")
    p.add_argument("kind", choices=REFERENCE_KINDS)
    return parser


def _analyze(scenario: ScenarioFile, tol: Optional[float]):
    if scenario.kind == "model":
        return analyze_model(scenario.model, tol)
    return analyze_tables(scenario.tables, tol)


def execute(args: argparse.Namespace) -> ReportFile:
    if args.command == "demo":
        ref = build_reference(args.kind)
        digest = canonical_digest({"demo": args.kind})
        if isinstance(ref, JointTables):
            return ReportFile("demo", digest, analyze_tables(ref, args.tolerance))
        return ReportFile("demo", digest, analyze_model(ref, args.tolerance))

    scenario = parse_scenario(args.file.read_text(encoding="utf-8"))
    if args.command in ("analyze", "classify"):
        return ReportFile(args.command, scenario.digest, _analyze(scenario, args.tolerance), scenario.adjustments)
    if args.command == "lhv":
        tol = LHV_TOL if args.tolerance is None else args.tolerance
        cert = lhv_feasible(scenario.joint_tables(), tol)
        return ReportFile("lhv", scenario.digest, _analyze(scenario, None), scenario.adjustments, lhv=cert.to_dict())
    if args.command == "synthesize":
        tol = SYNTHESIS_TOL if args.tolerance is None else args.tolerance
        req = SynthesisRequest(scenario.joint_tables(), scenario.state_hint, tol, args.seed)
        result = synthesize_model(req)
        summary = {**result.summary(), "model": model_document(result.model)}
        return ReportFile(
            "synthesize", scenario.digest, analyze_model(result.model), scenario.adjustments, synthesis=summary
        )
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = execute(args)
    except (BellkitError, OSError) as e:
        print(f"bellkit: error: {e}", file=sys.stderr)
        return 1

    if args.command == "classify" and not args.json:
        a = report.analysis
        text = f"{a.category} {CATEGORY_NAMES[a.category]}\n"
    else:
        text = render_report(report, "json" if args.json else "text")
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def run_command(argv: Sequence[str]) -> int:
    """Run the CLI in-process, turning argparse's SystemExit into an exit code."""
    try:
        return main(argv)
    except SystemExit as e:
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
