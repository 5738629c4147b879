import argparse
import logging
import sys
from typing import Any, Dict, List, Tuple

from real_pinwheel.pinwheel.checker import verify
from real_pinwheel.pinwheel.constructions import schedule, three_period_schedule
from real_pinwheel.pinwheel.errors import NotInJ, OutOfScope, StateCapExceeded
from real_pinwheel.pinwheel.model import FIVE_SIXTHS, density, emit, format_rational, parse_instance, parse_rational, parse_schedule
from real_pinwheel.pinwheel.regions import CASE_REGIONS, J, REGIONS, cover_check
from real_pinwheel.pinwheel.report import (
    dumps,
    regions_frame,
    regions_report,
    schedule_report,
    search_report,
    verdict_report,
    write_report_json,
)
from real_pinwheel.pinwheel.search import (
    DEFAULT_MAX_PERIOD,
    DEFAULT_NODE_BUDGET,
    DEFAULT_STATE_CAP,
    Status,
    find_schedule,
    prove_unschedulable,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 3

log = logging.getLogger(__name__)

# (exit code, machine report, human-readable lines)
Result = Tuple[int, Dict[str, Any], List[str]]


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format="%(message)s")


def _bars(text: str) -> str:
    return f"|{text}|"


def _cmd_schedule(args) -> Result:
    instance = parse_instance(args.instance)
    try:
        result, trace = schedule(instance, workers=args.threads)
    except OutOfScope as e:
        if e.unschedulable:
            return EXIT_NEGATIVE, {"status": "unschedulable", "reason": str(e)}, [f"UNSCHEDULABLE: {e}"]
        return EXIT_UNDECIDED, {"status": "out-of-scope", "reason": str(e)}, [f"OUT OF SCOPE: {e}"]
    report = schedule_report(result, trace)
    lines = [f"schedule {_bars(emit(result))}", f"period {result.n}"]
    for step in trace.folds:
        lines.append(
            f"fold {step.multiplicity} x {format_rational(step.period)} -> {format_rational(step.folded_period)}"
        )
    for lowered in trace.lowerings:
        lines.append(f"lower -> {emit(lowered)}")
    for shrunk in trace.shrinks:
        lines.append(f"shrink -> {emit(shrunk)}")
    lines.append("cases " + (", ".join(c.value for c in trace.cases) if trace.cases else "none"))
    return EXIT_OK, report, lines


def _cmd_verify(args) -> Result:
    sched = parse_schedule(args.schedule)
    instance = parse_instance(args.instance)
    verdict = verify(sched, instance, workers=args.threads)
    report = verdict_report(verdict)
    report.update({"schedule": emit(sched), "instance": emit(instance)})
    if verdict.is_valid:
        return EXIT_OK, report, ["VALID"]
    c = verdict.counterexample
    line = f"INVALID counterexample: task={c.task} l={c.l} m={c.m} window={c.window_length} found={c.found}"
    return EXIT_NEGATIVE, report, [line]


def _cmd_density(args) -> Result:
    instance = parse_instance(args.instance)
    target = parse_rational(args.target)
    d = density(instance)
    within = d <= target
    report = {"instance": emit(instance), "density": format_rational(d), "target": format_rational(target), "within_target": within}
    lines = [f"density {format_rational(d)}", f"target {format_rational(target)}: {'within' if within else 'exceeds'}"]
    return EXIT_OK, report, lines


def _cmd_classify(args) -> Result:
    a1 = parse_rational(args.a1)
    a2 = parse_rational(args.a2)
    case, sched = three_period_schedule(a1, a2)
    a3 = 1 / (FIVE_SIXTHS - 1 / a1 - 1 / a2)
    report = {"case": case.value, "a1": format_rational(a1), "a2": format_rational(a2), "a3": format_rational(a3), "schedule": emit(sched)}
    lines = [f"case {case.value}", f"a3 {format_rational(a3)}", f"schedule {_bars(emit(sched))}"]
    return EXIT_OK, report, lines


def _union_label(names: List[str]) -> str:
    indices = [int(n[1:]) for n in names]
    if len(indices) > 2 and indices == list(range(indices[0], indices[-1] + 1)):
        return f"{names[0]}∪…∪{names[-1]}"
    return "∪".join(names)


def _cmd_cover_check(args) -> Result:
    dropped = [d.strip() for d in args.drop.split(",") if d.strip()] if args.drop else []
    known = [r.name for r in CASE_REGIONS]
    unknown = [d for d in dropped if d not in known]
    if unknown:
        raise ValueError(f"unknown region(s) {', '.join(unknown)}; expected names among {', '.join(known)}")
    covers = [r for r in CASE_REGIONS if r.name not in dropped]
    label = _union_label([r.name for r in covers]) if covers else "∅"
    result = cover_check(J, covers, workers=args.threads)
    report = {
        "target": J.name,
        "covers": [r.name for r in covers],
        "covered": result.covered,
        "branches": result.branches,
        "witness": None if result.covered else [format_rational(result.witness.x), format_rational(result.witness.y)],
    }
    if result.covered:
        return EXIT_OK, report, [f"COVERED ({J.name} ⊆ {label})"]
    return EXIT_NEGATIVE, report, [f"UNCOVERED ({J.name} ⊄ {label}) witness {result.witness}"]


def _cmd_search(args) -> Result:
    instance = parse_instance(args.instance)
    outcome = find_schedule(instance, max_period=args.max_period, node_budget=args.node_budget)
    report = search_report(outcome)
    if outcome.is_schedulable:
        return EXIT_OK, report, [f"SCHEDULABLE {_bars(emit(outcome.certificate))}", f"nodes {outcome.nodes}"]
    return EXIT_UNDECIDED, report, [f"INCONCLUSIVE: {outcome.reason}"]


def _cmd_prove(args) -> Result:
    instance = parse_instance(args.instance)
    try:
        outcome = prove_unschedulable(instance, state_cap=args.state_cap, workers=args.threads)
    except StateCapExceeded as e:
        return EXIT_UNDECIDED, {"status": "inconclusive", "reason": str(e)}, [f"INCONCLUSIVE: {e}"]
    report = search_report(outcome)
    if outcome.status is Status.UNSCHEDULABLE:
        return EXIT_NEGATIVE, report, ["UNSCHEDULABLE", f"states {outcome.states_explored}"]
    return EXIT_OK, report, [f"SCHEDULABLE {_bars(emit(outcome.certificate))}", f"states {outcome.states_explored}"]


def _cmd_regions_dump(args) -> Result:
    regions = list(REGIONS.values())
    if args.output:
        regions_frame(regions).to_csv(args.output, index=False)
        log.info("Wrote region vertices to %s", args.output)
    report = regions_report(regions)
    lines = []
    for name, entry in report.items():
        lines.append(f"{name}:")
        lines.extend(entry["constraints"])
        lines.append("vertices " + " ".join(f"({x}, {y})" for x, y in entry["vertices"]))
    return EXIT_OK, report, lines


COMMANDS = {
    "schedule": _cmd_schedule,
    "verify": _cmd_verify,
    "density": _cmd_density,
    "classify": _cmd_classify,
    "cover-check": _cmd_cover_check,
    "search": _cmd_search,
    "prove": _cmd_prove,
    "regions-dump": _cmd_regions_dump,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the machine-readable report instead of text")
    common.add_argument("--threads", type=int, default=1, help="Worker threads for checks and searches (results do not change)")
    common.add_argument("--report", "-r", default=None, help="Optional path to write the report JSON")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    p = argparse.ArgumentParser(prog="real-pinwheel", description="Real-period pinwheel scheduling")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("schedule", parents=[common], help="Construct a valid cyclic schedule")
    s.add_argument("--instance", "-i", required=True, help="Comma-separated periods, e.g. 2,7/2")

    s = sub.add_parser("verify", parents=[common], help="Check a schedule against an instance")
    s.add_argument("--schedule", "-s", required=True, help="Slots, e.g. 1213, |1213| or 1,2,1,3")
    s.add_argument("--instance", "-i", required=True)

    s = sub.add_parser("density", parents=[common], help="Exact density of an instance")
    s.add_argument("--instance", "-i", required=True)
    s.add_argument("--target", default=format_rational(FIVE_SIXTHS), help="Threshold to compare against (default 5/6)")

    s = sub.add_parser("classify", parents=[common], help="Case used for (a1, a2) with density 5/6")
    s.add_argument("--a1", required=True)
    s.add_argument("--a2", required=True)

    s = sub.add_parser("cover-check", parents=[common], help="Check J is covered by the case regions")
    s.add_argument("--drop", default=None, help="Comma-separated case regions to leave out, e.g. M4,M5")

    s = sub.add_parser("search", parents=[common], help="Depth-first search for a short schedule")
    s.add_argument("--instance", "-i", required=True)
    s.add_argument("--max-period", type=int, default=DEFAULT_MAX_PERIOD)
    s.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)

    s = sub.add_parser("prove", parents=[common], help="Decide schedulability by exhaustive state search")
    s.add_argument("--instance", "-i", required=True)
    s.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)

    s = sub.add_parser("regions-dump", parents=[common], help="Vertices of J and M1..M7")
    s.add_argument("--output", "-o", default=None, help="Optional path to write the vertex table as CSV")
    return p


def main(argv=None):
    argv = argv if argv is not None else sys.argv[1:]
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    configure_logging(args.verbose)
    if args.verbose:
        log.debug("Verbose mode enabled")
    if args.threads < 1:
        log.error("--threads must be at least 1, got %d", args.threads)
        return EXIT_USAGE

    try:
        rc, report, lines = COMMANDS[args.command](args)
    except (OutOfScope, StateCapExceeded, NotInJ) as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_UNDECIDED
    except ValueError as e:
        # parse errors, malformed instances and schedules
        log.error("error: %s", e)
        return EXIT_USAGE

    if args.json:
        print(dumps(report))
    else:
        for line in lines:
            print(line)

    if args.report:
        write_report_json(report, args.report)
        log.info("Wrote report to %s", args.report)
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
