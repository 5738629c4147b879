import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from .errors import FoldedPeriodBelowOne, InvalidInstance, ParseError

log = logging.getLogger(__name__)

Rational = Fraction

ONE = Fraction(1)
FIVE_SIXTHS = Fraction(5, 6)

# Rational token: `p/q`, an integer, or a decimal with at most 9 fractional digits.
_ratio_re = re.compile(r"^(\d+)/(\d+)$")
_decimal_re = re.compile(r"^\d+(?:\.\d{1,9})?$")
_slot_re = re.compile(r"^\d+$")


def as_rational(value: Union[int, str, Fraction]) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact period; pass int, str or Fraction")


def format_rational(value: Fraction) -> str:
    """Return `p` for integers and `p/q` otherwise (lowest terms)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def ceil_mul(l: int, a: Fraction) -> int:
    """Return the window length ceil(l * a), computed exactly."""
    return math.ceil(l * a)


@dataclass(frozen=True)
class Instance:
    """A multiset of task periods in user order; task i has period periods[i - 1]."""

    periods: Tuple[Fraction, ...]

    def __init__(self, periods: Iterable[Union[int, str, Fraction]]):
        values = tuple(as_rational(p) for p in periods)
        if not values:
            raise InvalidInstance("an instance needs at least one task")
        for i, p in enumerate(values, start=1):
            if p < 1:
                raise InvalidInstance(f"period of task {i} is {format_rational(p)}, below 1")
        object.__setattr__(self, "periods", values)

    @property
    def k(self) -> int:
        return len(self.periods)

    def period(self, task: int) -> Fraction:
        return self.periods[task - 1]

    def distinct_values(self) -> List[Fraction]:
        return sorted(set(self.periods))

    def canonical(self) -> Tuple["Instance", Tuple[int, ...]]:
        """Return the non-decreasing instance and the permutation back to user order.

        order[i] is the 0-based user position of the task at sorted position i
        (stable by input position).
        """
        order = tuple(sorted(range(self.k), key=lambda i: (self.periods[i], i)))
        return Instance(self.periods[i] for i in order), order

    def with_period(self, task: int, value: Fraction) -> "Instance":
        periods = list(self.periods)
        periods[task - 1] = value
        return Instance(periods)

    def __str__(self) -> str:
        return emit(self)


@dataclass(frozen=True)
class CyclicSchedule:
    """Finite slot sequence S(0)..S(n-1) repeated over all days."""

    slots: Tuple[int, ...]

    def __init__(self, slots: Iterable[int]):
        values = tuple(int(s) for s in slots)
        if not values:
            raise InvalidInstance("a schedule needs at least one slot")
        if min(values) < 1:
            raise InvalidInstance("task indices in a schedule are 1-based")
        object.__setattr__(self, "slots", values)

    @property
    def n(self) -> int:
        return len(self.slots)

    def at(self, t: int) -> int:
        return self.slots[t % self.n]

    def occurrences(self, task: int) -> int:
        return self.slots.count(task)

    def relabel(self, mapping: dict) -> "CyclicSchedule":
        return CyclicSchedule(mapping.get(s, s) for s in self.slots)

    def repeated(self, times: int) -> "CyclicSchedule":
        return CyclicSchedule(self.slots * times)

    def __str__(self) -> str:
        return emit(self)


@dataclass(frozen=True)
class FoldStep:
    """One fold: `members` (1-based, in an instance of `size` tasks) all have
    period `period` and become one task of period period / multiplicity.

    After the step the unfolded tasks keep their relative order and the folded
    task is appended last.
    """

    size: int
    members: Tuple[int, ...]
    period: Fraction

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    @property
    def folded_period(self) -> Fraction:
        return self.period / self.multiplicity

    def rest(self) -> List[int]:
        taken = set(self.members)
        return [i for i in range(1, self.size + 1) if i not in taken]

    @property
    def folded_index(self) -> int:
        return self.size - self.multiplicity + 1

    def apply(self, periods: Sequence[Fraction]) -> List[Fraction]:
        return [periods[i - 1] for i in self.rest()] + [self.folded_period]

    def undo(self, periods: Sequence[Fraction]) -> List[Fraction]:
        out: List[Fraction] = [self.period] * self.size
        for j, i in enumerate(self.rest()):
            out[i - 1] = periods[j]
        return out


@dataclass(frozen=True)
class FoldPlan:
    steps: Tuple[FoldStep, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.steps)

    def replay(self, instance: Instance) -> Instance:
        periods = list(instance.periods)
        for step in self.steps:
            periods = step.apply(periods)
        return Instance(periods)

    def restore(self, instance: Instance) -> Instance:
        periods = list(instance.periods)
        for step in reversed(self.steps):
            periods = step.undo(periods)
        return Instance(periods)


def density(instance: Instance) -> Fraction:
    """Exact sum of reciprocals of all periods."""
    return sum((1 / p for p in instance.periods), Fraction(0))


def normalize(instance: Instance) -> Tuple[Instance, FoldPlan]:
    """Fold every group of equal periods into one task until all periods differ.

    A group of m tasks with period v becomes one task with period v / m. The
    smallest duplicated value is folded first and the process repeats, since a
    fold can create a new duplicate. Density is preserved exactly.

    Raises FoldedPeriodBelowOne if a fold produces a period below 1 (the group
    alone has density above 1).
    """
    periods = list(instance.periods)
    steps: List[FoldStep] = []
    while True:
        duplicated = sorted(v for v, c in Counter(periods).items() if c >= 2)
        if not duplicated:
            break
        v = duplicated[0]
        members = tuple(i for i, p in enumerate(periods, start=1) if p == v)
        step = FoldStep(size=len(periods), members=members, period=v)
        if step.folded_period < 1:
            raise FoldedPeriodBelowOne(
                f"folding {step.multiplicity} tasks of period {format_rational(v)} gives "
                f"{format_rational(step.folded_period)}, below 1"
            )
        log.debug("fold %d x %s -> %s", step.multiplicity, format_rational(v), format_rational(step.folded_period))
        periods = step.apply(periods)
        steps.append(step)
    return Instance(periods), FoldPlan(tuple(steps))


def identify_tasks(schedule: CyclicSchedule, tasks: Iterable[int]) -> CyclicSchedule:
    """Rename every task in `tasks` to the smallest of them and renumber the rest densely."""
    merged = set(tasks)
    target = min(merged)
    labels = {}
    next_label = 1
    for s in sorted(set(schedule.slots) | merged):
        key = target if s in merged else s
        if key not in labels:
            labels[key] = next_label
            next_label += 1
    return CyclicSchedule(labels[target if s in merged else s] for s in schedule.slots)


def parse_rational(token: str, position: int = 0) -> Fraction:
    t = re.sub(r"\s+", "", token)
    if t == "":
        raise ParseError("empty value", position)
    m = _ratio_re.match(t)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ParseError(f"zero denominator in '{t}'", position)
        return Fraction(num, den)
    if _decimal_re.match(t):
        return Fraction(t)
    raise ParseError(f"'{t}' is not a rational p/q or a decimal with at most 9 fractional digits", position)


def _tokens(text: str) -> List[Tuple[str, int]]:
    out = []
    start = 0
    for piece in text.split(","):
        out.append((piece, start + (len(piece) - len(piece.lstrip()))))
        start += len(piece) + 1
    return out


def parse_instance(text: str) -> Instance:
    """Parse comma-separated periods such as "2,7/2" or "1.2, 6" into an Instance.

    Raises ParseError with the position of the offending token.
    """
    if text is None or text.strip() == "":
        raise ParseError("empty instance", 0)
    periods = []
    for token, position in _tokens(text):
        value = parse_rational(token, position)
        if value < 1:
            raise ParseError(f"period {format_rational(value)} is below 1", position)
        periods.append(value)
    return Instance(periods)


def parse_schedule(text: str) -> CyclicSchedule:
    """Parse "1,2,1,3", the compact digit form "1213", or "|1213|"."""
    if text is None:
        raise ParseError("empty schedule", 0)
    t = text.strip().strip("|")
    if t.strip() == "":
        raise ParseError("empty schedule", 0)
    if "," in t:
        slots = []
        for token, position in _tokens(t):
            s = token.strip()
            if not _slot_re.match(s) or int(s) < 1:
                raise ParseError(f"'{s}' is not a 1-based task index", position)
            slots.append(int(s))
        return CyclicSchedule(slots)
    compact = re.sub(r"\s+", "", t)
    for position, ch in enumerate(compact):
        if ch not in "123456789":
            raise ParseError(f"'{ch}' is not a task digit 1-9", position)
    return CyclicSchedule(int(ch) for ch in compact)


def emit(obj: Union[Instance, CyclicSchedule]) -> str:
    """Canonical text for an instance or schedule (inverse of the parsers)."""
    if isinstance(obj, Instance):
        return ",".join(format_rational(p) for p in obj.periods)
    if isinstance(obj, CyclicSchedule):
        if max(obj.slots) <= 9:
            return "".join(str(s) for s in obj.slots)
        return ",".join(str(s) for s in obj.slots)
    raise TypeError(f"cannot emit {type(obj).__name__}")
