"""Validity of cyclic schedules for real-valued pinwheel instances.

A task with period a = p/q (lowest terms) is satisfied when, for every l >= 1,
it occurs at least l times in every ceil(l * a) consecutive days. Writing
l = q*u + r gives ceil(l * a) = u*p + ceil(r * a), so a window for l splits
into u windows for q and one window for r; checking l = 1..q is enough.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import accumulate
from typing import List, Optional

from .errors import TaskIndexOutOfRange
from .model import CyclicSchedule, Instance, ceil_mul

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Counterexample:
    """Window [m, m + window_length) holds only `found` < l occurrences of `task`."""

    task: int
    l: int
    m: int
    window_length: int
    found: int

    def as_tuple(self):
        return (self.task, self.l, self.m, self.window_length, self.found)


@dataclass(frozen=True)
class Verdict:
    counterexample: Optional[Counterexample] = None

    @property
    def is_valid(self) -> bool:
        return self.counterexample is None

    def __bool__(self) -> bool:
        return self.is_valid


VALID = Verdict()


def _prefix_counts(schedule: CyclicSchedule, task: int) -> List[int]:
    """Prefix sums of occurrences of `task` over two copies of the schedule."""
    marks = [1 if s == task else 0 for s in schedule.slots * 2]
    return [0] + list(accumulate(marks))


def _window_counts(schedule: CyclicSchedule, task: int, y: int, prefix: Optional[List[int]] = None) -> List[int]:
    """Occurrences of `task` in [m, m + y) for every start m in [0, n)."""
    n = schedule.n
    if prefix is None:
        prefix = _prefix_counts(schedule, task)
    full, partial = divmod(y, n)
    base = full * prefix[n]
    return [base + prefix[m + partial] - prefix[m] for m in range(n)]


def window_min_count(schedule: CyclicSchedule, task: int, y: int) -> int:
    """Minimum number of occurrences of `task` over all windows of `y` consecutive days.

    Windows longer than the schedule are counted as whole periods plus the
    minimal partial window, never by unrolling.
    """
    if y <= 0:
        return 0
    return min(_window_counts(schedule, task, y))


def required_multiplicities(period) -> range:
    """The values of l that must be checked for a task: 1..q where period = p/q."""
    return range(1, period.denominator + 1)


def _check_task(schedule: CyclicSchedule, task: int, period) -> Optional[Counterexample]:
    prefix = _prefix_counts(schedule, task)
    for l in required_multiplicities(period):
        window = ceil_mul(l, period)
        counts = _window_counts(schedule, task, window, prefix)
        for m, found in enumerate(counts):
            if found < l:
                return Counterexample(task=task, l=l, m=m, window_length=window, found=found)
    return None


def verify(schedule: CyclicSchedule, instance: Instance, workers: int = 1) -> Verdict:
    """Decide whether `schedule` is valid for `instance`.

    On failure the counterexample with the smallest (task, l, m) is returned.
    Raises TaskIndexOutOfRange if the schedule names a task beyond the instance.
    """
    top = max(schedule.slots)
    if top > instance.k:
        raise TaskIndexOutOfRange(f"schedule uses task {top} but the instance has only {instance.k} tasks")

    tasks = range(1, instance.k + 1)
    if workers > 1 and instance.k > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _check_task(schedule, i, instance.period(i)), tasks))
    else:
        results = [_check_task(schedule, i, instance.period(i)) for i in tasks]

    for found in results:
        if found is not None:
            log.debug("counterexample %s", found)
            return Verdict(found)
    return VALID
