"""Valid cyclic schedules for instances whose periods take at most three
distinct values with density at most 5/6.

The pipeline folds equal periods together, shrinks the largest period until
the density is exactly 5/6, picks a case from the two- or three-period case
tables, then unfolds the schedule again. Every lowering of a period is
justified because a schedule valid for an instance stays valid when any period
grows. The result is always re-verified against the caller's instance.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import List, Mapping, Optional, Tuple

from .checker import verify
from .errors import InvalidInstance, NotInJ, NotShrinkable, OutOfRange, OutOfScope, PartitionViolation, SelfVerificationFailed
from .model import FIVE_SIXTHS, CyclicSchedule, FoldPlan, FoldStep, Instance, density, format_rational, normalize
from .regions import CASE_REGIONS, J, contains, frequency_point

log = logging.getLogger(__name__)


class CaseId(str, Enum):
    TWO_I = "TwoI"
    TWO_II = "TwoII"
    TWO_III = "TwoIII"
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"


TWO_PERIOD_CASES = (CaseId.TWO_I, CaseId.TWO_II, CaseId.TWO_III)
THREE_PERIOD_CASES = (CaseId.I, CaseId.II, CaseId.III, CaseId.IV, CaseId.V, CaseId.VI, CaseId.VII)


@dataclass(frozen=True)
class AnchorPeriod:
    """A period value; `open` marks a strict lower bound (value + ε, ε > 0)."""

    value: Fraction
    open: bool = False

    def __str__(self) -> str:
        return format_rational(self.value) + ("+" if self.open else "")


@dataclass(frozen=True)
class Fixture:
    case: CaseId
    anchor: Tuple[AnchorPeriod, ...]
    template: CyclicSchedule

    def instance(self, epsilon: Fraction = Fraction(0)) -> Instance:
        """The anchor with `epsilon` added to every open period."""
        eps = Fraction(epsilon)
        return Instance(p.value + eps if p.open else p.value for p in self.anchor)

    @property
    def has_epsilon(self) -> bool:
        return any(p.open for p in self.anchor)

    def anchor_text(self) -> str:
        return ",".join(str(p) for p in self.anchor)


def _fixture(case: CaseId, anchor: str, template: str) -> Fixture:
    periods = []
    for token in anchor.split(","):
        open_ = token.endswith("+")
        periods.append(AnchorPeriod(Fraction(token.rstrip("+")), open_))
    return Fixture(case, tuple(periods), CyclicSchedule(int(ch) for ch in template))


FIXTURES: Mapping[CaseId, Fixture] = MappingProxyType(
    {
        CaseId.TWO_I: _fixture(CaseId.TWO_I, "6/5,6", "111112"),
        CaseId.TWO_II: _fixture(CaseId.TWO_II, "3/2,3", "112"),
        CaseId.TWO_III: _fixture(CaseId.TWO_III, "2,2", "12"),
        CaseId.II: _fixture(CaseId.II, "3/2,5+,9", "112112113"),
        CaseId.III: _fixture(CaseId.III, "11/7,4+,11", "11211211213"),
        CaseId.IV: _fixture(CaseId.IV, "12/7,3+,12", "121121211213"),
        CaseId.V: _fixture(CaseId.V, "2+,3,6", "121123"),
        CaseId.VI: _fixture(CaseId.VI, "2+,12/5,12", "121211212123"),
        CaseId.VII: _fixture(CaseId.VII, "12/5,12/5,6", "121213212123"),
    }
)


def is_density_tight(fixture: Fixture) -> bool:
    """True when the anchor (ε = 0) has density exactly 1, so no period can be lowered."""
    return density(fixture.instance()) == 1


@dataclass
class CaseTrace:
    """How schedule() reached its answer: folds, shrinks, lowerings and cases, in order."""

    instance: Instance
    cases: List[CaseId] = field(default_factory=list)
    folds: List[FoldStep] = field(default_factory=list)
    shrinks: List[Instance] = field(default_factory=list)
    lowerings: List[Instance] = field(default_factory=list)
    distinct_counts: List[int] = field(default_factory=list)


def shrink_to_exact(instance: Instance, target: Fraction = FIVE_SIXTHS) -> Instance:
    """Lower the largest period of a sorted, distinct instance until its density equals `target`.

    Raises NotShrinkable when the new period would fall below the second-largest
    one; the caller must then lower and fold instead.
    """
    if instance.k not in (2, 3):
        raise InvalidInstance(f"shrink_to_exact expects 2 or 3 tasks, got {instance.k}")
    total = density(instance)
    if total > target:
        raise OutOfScope(f"density {format_rational(total)} exceeds {format_rational(target)}", unschedulable=total > 1)
    rest = total - 1 / instance.periods[-1]
    shrunk = 1 / (target - rest)
    if shrunk < instance.periods[-2]:
        raise NotShrinkable(
            f"shrunk period {format_rational(shrunk)} is below {format_rational(instance.periods[-2])}"
        )
    return instance.with_period(instance.k, shrunk)


def two_period_schedule(a1: Fraction) -> Tuple[CaseId, CyclicSchedule]:
    """Template for (a1, 1 / (5/6 - 1/a1)); the lowest-index matching case wins."""
    a1 = Fraction(a1)
    if a1 <= Fraction(6, 5) or a1 > 3:
        raise OutOfRange(f"a1 = {format_rational(a1)} is outside (6/5, 3]")
    if a1 <= Fraction(3, 2):
        case = CaseId.TWO_I
    elif a1 <= 2:
        case = CaseId.TWO_II
    else:
        case = CaseId.TWO_III
    return case, FIXTURES[case].template


def _days(step: Fraction, offset: Fraction, horizon: int, ceil_minus_one: bool) -> List[int]:
    count = math.ceil(horizon / step) + 2
    out = []
    for j in range(-2, count + 1):
        x = (j + offset) * step
        t = math.ceil(x) - 1 if ceil_minus_one else math.floor(x)
        if 0 <= t < horizon:
            out.append(t)
    return out


def beatty_schedule(a1: Fraction) -> CyclicSchedule:
    """Case I schedule of period 2*p1 for a1 = p1/q1.

    Task 1 runs on days ceil(j*a1) - 1; with a2' = 2 / (1 - 1/a1), task 2 runs
    on days floor(j*a2') and task 3 on days floor((j + 1/2)*a2'). Tasks 2 and 3
    together form the complementary sequence of task 1, so the three day sets
    partition every period.
    """
    a1 = Fraction(a1)
    if a1 <= Fraction(6, 5):
        raise OutOfRange(f"a1 = {format_rational(a1)} must exceed 6/5")
    horizon = 2 * a1.numerator
    a2 = 2 / (1 - 1 / a1)
    slots: List[Optional[int]] = [None] * horizon
    for task, days in (
        (1, _days(a1, Fraction(0), horizon, True)),
        (2, _days(a2, Fraction(0), horizon, False)),
        (3, _days(a2, Fraction(1, 2), horizon, False)),
    ):
        for t in days:
            if slots[t] is not None:
                raise PartitionViolation(f"day {t} claimed by tasks {slots[t]} and {task}")
            slots[t] = task
    gaps = [t for t, s in enumerate(slots) if s is None]
    if gaps:
        raise PartitionViolation(f"days {gaps} are not covered")
    return CyclicSchedule(slots)


def classify_case(a1: Fraction, a2: Fraction) -> CaseId:
    """Smallest case I..VII whose region contains (1/a1, 1/a2).

    Raises NotInJ when the point is not the image of a sorted three-period
    instance with density 5/6.
    """
    p = frequency_point(a1, a2)
    if not contains(J, p):
        raise NotInJ(f"frequency point {p} of ({format_rational(Fraction(a1))}, {format_rational(Fraction(a2))}) is not in J")
    for case, region in zip(THREE_PERIOD_CASES, CASE_REGIONS):
        if contains(region, p):
            return case
    raise SelfVerificationFailed(f"point {p} of J lies in no case region")


def three_period_schedule(a1: Fraction, a2: Fraction) -> Tuple[CaseId, CyclicSchedule]:
    case = classify_case(a1, a2)
    if case is CaseId.I:
        return case, beatty_schedule(a1)
    return case, FIXTURES[case].template


def expand(schedule: CyclicSchedule, plan: FoldPlan) -> CyclicSchedule:
    """Undo a fold plan: every folded task is handed to its copies round-robin.

    The schedule is first repeated until the folded task occurs a multiple of
    m times, so the round-robin lines up across the cyclic seam.
    """
    for step in reversed(plan.steps):
        rest = step.rest()
        folded = step.folded_index
        m = step.multiplicity
        c = schedule.occurrences(folded)
        reps = m // math.gcd(c, m) if c else 1
        out = []
        r = 0
        for s in schedule.slots * reps:
            if s == folded:
                out.append(step.members[r % m])
                r += 1
            else:
                out.append(rest[s - 1])
        schedule = CyclicSchedule(out)
    return schedule


def _construct(instance: Instance, trace: CaseTrace) -> CyclicSchedule:
    folded, plan = normalize(instance)
    trace.folds.extend(plan.steps)
    ordered, order = folded.canonical()
    base = _construct_distinct(ordered, trace)
    relabelled = base.relabel({i + 1: order[i] + 1 for i in range(ordered.k)})
    return expand(relabelled, plan)


def _construct_distinct(ordered: Instance, trace: CaseTrace) -> CyclicSchedule:
    k = ordered.k
    trace.distinct_counts.append(k)
    if k == 1:
        return CyclicSchedule((1,))
    try:
        shrunk = shrink_to_exact(ordered)
    except NotShrinkable:
        shrunk = None
    if shrunk is None or shrunk.periods[-1] == shrunk.periods[-2]:
        # the two largest periods become equal and fold into one task
        lowered = ordered.with_period(k, ordered.periods[-2])
        log.debug("lowering %s to %s", ordered, lowered)
        trace.lowerings.append(lowered)
        return _construct(lowered, trace)
    trace.shrinks.append(shrunk)
    if k == 2:
        case, result = two_period_schedule(shrunk.periods[0])
    else:
        case, result = three_period_schedule(shrunk.periods[0], shrunk.periods[1])
    log.debug("case %s for %s", case.value, shrunk)
    trace.cases.append(case)
    return result


def schedule(instance: Instance, workers: int = 1) -> Tuple[CyclicSchedule, CaseTrace]:
    """Build a valid cyclic schedule for an instance with at most three distinct
    periods and density at most 5/6 (or up to 1 when every task folds into one).

    Raises OutOfScope for anything else (with `unschedulable` set when the
    density exceeds 1) and SelfVerificationFailed if the result does not verify.
    """
    total = density(instance)
    if total > 1:
        raise OutOfScope(f"density {format_rational(total)} exceeds 1: the instance is unschedulable", unschedulable=True)
    # equal periods that fold to a single task are schedulable up to density 1
    if total > FIVE_SIXTHS and normalize(instance)[0].k != 1:
        raise OutOfScope(f"density {format_rational(total)} exceeds 5/6")
    distinct = len(instance.distinct_values())
    if distinct > 3:
        raise OutOfScope(f"{distinct} distinct periods; at most 3 are supported")

    trace = CaseTrace(instance)
    result = _construct(instance, trace)
    verdict = verify(result, instance, workers=workers)
    if not verdict.is_valid:
        raise SelfVerificationFailed(f"schedule {result} fails for {instance}: {verdict.counterexample}")
    log.debug("schedule %s for %s", result, instance)
    return result, trace


def pareto_anchor(instance: Instance) -> Fixture:
    """First two-period anchor that a two-task instance dominates componentwise (after sorting)."""
    if instance.k != 2:
        raise InvalidInstance(f"expected 2 tasks, got {instance.k}")
    ordered, _ = instance.canonical()
    for case in TWO_PERIOD_CASES:
        fixture = FIXTURES[case]
        if all(a >= b for a, b in zip(ordered.periods, fixture.instance().periods)):
            return fixture
    raise OutOfRange(f"{instance} dominates none of the two-period anchors")
