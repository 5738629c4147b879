import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import pandas as pd

from .checker import Verdict
from .constructions import CaseTrace
from .model import CyclicSchedule, FoldStep, Instance, density, emit, format_rational
from .regions import Region, region_vertices
from .search import SearchOutcome


def _to_json_value(value: Any) -> Any:
    """Fractions become "p/q" strings so no precision is lost; instances and schedules use their text form."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (Instance, CyclicSchedule)):
        return emit(value)
    if isinstance(value, dict):
        return {k: _to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_json_value(v) for v in value]
    return value


def _fold_dict(step: FoldStep) -> Dict[str, Any]:
    return {
        "members": list(step.members),
        "period": step.period,
        "multiplicity": step.multiplicity,
        "folded_period": step.folded_period,
    }


def trace_report(trace: CaseTrace) -> Dict[str, Any]:
    return {
        "instance": trace.instance,
        "density": density(trace.instance),
        "folds": [_fold_dict(s) for s in trace.folds],
        "shrinks": list(trace.shrinks),
        "lowerings": list(trace.lowerings),
        "distinct_counts": list(trace.distinct_counts),
        "cases": [c.value for c in trace.cases],
    }


def schedule_report(schedule: CyclicSchedule, trace: CaseTrace) -> Dict[str, Any]:
    """Report for one run of the constructions pipeline."""
    report = {"schedule": schedule, "period": schedule.n}
    report.update(trace_report(trace))
    return _to_json_value(report)


def verdict_report(verdict: Verdict) -> Dict[str, Any]:
    if verdict.is_valid:
        return {"valid": True}
    c = verdict.counterexample
    return {
        "valid": False,
        "counterexample": {"task": c.task, "l": c.l, "m": c.m, "window": c.window_length, "found": c.found},
    }


def search_report(outcome: SearchOutcome) -> Dict[str, Any]:
    report = {
        "status": outcome.status.value,
        "certificate": outcome.certificate,
        "states_explored": outcome.states_explored,
        "nodes": outcome.nodes,
    }
    if outcome.reason:
        report["reason"] = outcome.reason
    return _to_json_value(report)


def regions_frame(regions: Iterable[Region]) -> pd.DataFrame:
    """One row per vertex of each region's closure, counter-clockwise from the lowest-leftmost.

    Coordinates are kept exact as "p/q" strings; `x_float`/`y_float` are for plotting only.
    """
    rows = []
    for region in regions:
        for order, v in enumerate(region_vertices(region)):
            rows.append(
                {
                    "region": region.name,
                    "vertex": order,
                    "x": format_rational(v.x),
                    "y": format_rational(v.y),
                    "x_float": float(v.x),
                    "y_float": float(v.y),
                }
            )
    return pd.DataFrame(rows, columns=["region", "vertex", "x", "y", "x_float", "y_float"])


def regions_report(regions: Iterable[Region]) -> Dict[str, Any]:
    return {
        region.name: {
            "constraints": [str(c) for c in region.constraints],
            "vertices": [[format_rational(v.x), format_rational(v.y)] for v in region_vertices(region)],
        }
        for region in regions
    }


def write_report_json(report: Dict[str, Any], out_path: str) -> None:
    p = Path(out_path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8") as fh:
        json.dump(_to_json_value(report), fh, indent=2)


def dumps(report: Dict[str, Any], indent: Optional[int] = None) -> str:
    """Deterministic JSON text for stdout."""
    return json.dumps(_to_json_value(report), indent=indent, ensure_ascii=False)
