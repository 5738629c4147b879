"""Exhaustive schedulability decisions for small rational instances.

Both searches walk the same transition system. A state records, for every
task i with period p_i/q_i, the ages of its last q_i occurrences (capped at
p_i). That is all the window constraints with l <= q_i can see, so the state
space is finite. The start state pretends every task was just performed,
which only adds slack; every certificate is re-verified exactly.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .checker import verify
from .errors import CertificateRejected, StateCapExceeded
from .model import CyclicSchedule, Instance, ceil_mul

log = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 10**7
DEFAULT_NODE_BUDGET = 1_000_000
DEFAULT_MAX_PERIOD = 24

Ages = Tuple[int, ...]
State = Tuple[Ages, ...]


class Status(str, Enum):
    SCHEDULABLE = "schedulable"
    UNSCHEDULABLE = "unschedulable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SearchOutcome:
    status: Status
    certificate: Optional[CyclicSchedule] = None
    states_explored: int = 0
    nodes: int = 0
    reason: str = ""

    @classmethod
    def schedulable(cls, certificate: CyclicSchedule, **counts) -> "SearchOutcome":
        return cls(Status.SCHEDULABLE, certificate=certificate, **counts)

    @classmethod
    def unschedulable(cls, states_explored: int) -> "SearchOutcome":
        return cls(Status.UNSCHEDULABLE, states_explored=states_explored)

    @classmethod
    def inconclusive(cls, reason: str, nodes: int = 0) -> "SearchOutcome":
        return cls(Status.INCONCLUSIVE, nodes=nodes, reason=reason)

    @property
    def is_schedulable(self) -> bool:
        return self.status is Status.SCHEDULABLE


class UrgencyModel:
    """Urgency-state transition system for one instance."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.caps = tuple(p.numerator for p in instance.periods)
        # limits[i][l - 1]: the l-th most recent occurrence of task i + 1 may be at most this old
        self.limits = tuple(
            tuple(ceil_mul(l, p) - 1 for l in range(1, p.denominator + 1)) for p in instance.periods
        )

    def initial(self) -> State:
        return tuple((0,) * len(lim) for lim in self.limits)

    def step(self, state: State, task: int) -> State:
        """State after one more day on which `task` (1-based) is performed."""
        out = []
        for i, (ages, cap) in enumerate(zip(state, self.caps), start=1):
            if i == task:
                out.append((0,) + tuple(min(a + 1, cap) for a in ages[:-1]))
            else:
                out.append(tuple(min(a + 1, cap) for a in ages))
        return tuple(out)

    def alive(self, state: State) -> bool:
        return all(a <= m for ages, lim in zip(state, self.limits) for a, m in zip(ages, lim))

    def successors(self, state: State) -> List[Tuple[int, State]]:
        out = []
        for task in range(1, self.instance.k + 1):
            nxt = self.step(state, task)
            if self.alive(nxt):
                out.append((task, nxt))
        return out


def state_space_estimate(instance: Instance) -> int:
    """Upper bound on the number of states: non-decreasing age tuples per task."""
    return math.prod(math.comb(p.numerator + p.denominator, p.denominator) for p in instance.periods)


class _BudgetExhausted(Exception):
    pass


def find_schedule(
    instance: Instance,
    max_period: int = DEFAULT_MAX_PERIOD,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> SearchOutcome:
    """Depth-first search for a cyclic schedule of length 1..max_period.

    Tasks are tried in ascending order, so the first certificate is the
    lexicographically smallest among the shortest that survive pruning.
    Returns Inconclusive when nothing is found or the node budget runs out;
    a failed search never proves anything.
    """
    model = UrgencyModel(instance)
    k = instance.k
    nodes = 0

    for n in range(1, max_period + 1):
        # a valid schedule of length n holds task i at least ceil(n / a_i) times
        need = [math.ceil(n / p) for p in instance.periods]
        if sum(need) > n:
            continue
        slots: List[int] = []
        counts = [0] * k

        def dfs(state: State) -> Optional[CyclicSchedule]:
            nonlocal nodes
            nodes += 1
            if nodes > node_budget:
                raise _BudgetExhausted
            depth = len(slots)
            if depth == n:
                candidate = CyclicSchedule(slots)
                return candidate if verify(candidate, instance).is_valid else None
            deficit = sum(max(0, need[i] - counts[i]) for i in range(k))
            if deficit > n - depth:
                return None
            for task, nxt in model.successors(state):
                slots.append(task)
                counts[task - 1] += 1
                found = dfs(nxt)
                slots.pop()
                counts[task - 1] -= 1
                if found is not None:
                    return found
            return None

        try:
            found = dfs(model.initial())
        except _BudgetExhausted:
            log.debug("node budget %d exhausted at length %d", node_budget, n)
            return SearchOutcome.inconclusive(f"node budget {node_budget} exhausted at length {n}", nodes=nodes)
        if found is not None:
            log.debug("certificate %s after %d nodes", found, nodes)
            return SearchOutcome.schedulable(found, nodes=nodes)

    return SearchOutcome.inconclusive(f"no schedule of length at most {max_period}", nodes=nodes)


def _explore(model: UrgencyModel, workers: int) -> Tuple[List[State], List[List[Tuple[int, int]]]]:
    """Breadth-first enumeration of the alive states reachable from the start.

    Frontiers are expanded level by level; with workers > 1 each level is
    expanded in a thread pool, and indices are assigned in frontier order so
    the graph does not depend on the worker count.
    """
    start = model.initial()
    index = {start: 0}
    states = [start]
    edges: List[List[Tuple[int, int]]] = [[]]
    frontier = [0]

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    mapper: Callable[[Callable, Iterable], Iterable] = pool.map if pool else map
    try:
        while frontier:
            expanded = list(mapper(lambda v: model.successors(states[v]), frontier))
            nxt = []
            for v, succ in zip(frontier, expanded):
                out = []
                for task, state in succ:
                    w = index.get(state)
                    if w is None:
                        w = len(states)
                        index[state] = w
                        states.append(state)
                        edges.append([])
                        nxt.append(w)
                    out.append((task, w))
                edges[v] = out
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    return states, edges


def _prune_dead(edges: Sequence[Sequence[Tuple[int, int]]]) -> List[bool]:
    """Greatest fixpoint: repeatedly drop states whose successors are all dropped."""
    size = len(edges)
    outdeg = [len(e) for e in edges]
    preds: List[List[int]] = [[] for _ in range(size)]
    for v, out in enumerate(edges):
        for _, w in out:
            preds[w].append(v)
    removed = [False] * size
    queue = [v for v in range(size) if outdeg[v] == 0]
    for v in queue:
        removed[v] = True
    while queue:
        w = queue.pop()
        for v in preds[w]:
            if removed[v]:
                continue
            outdeg[v] -= 1
            if outdeg[v] == 0:
                removed[v] = True
                queue.append(v)
    return removed


def prove_unschedulable(
    instance: Instance,
    state_cap: int = DEFAULT_STATE_CAP,
    workers: int = 1,
) -> SearchOutcome:
    """Decide schedulability exactly.

    Returns Unschedulable when no infinite alive path leaves the start state.
    Otherwise the smallest surviving action is followed until a state repeats
    and the repeated part is returned as a verified certificate.

    Raises StateCapExceeded when the state space estimate is above `state_cap`.
    """
    estimate = state_space_estimate(instance)
    if estimate > state_cap:
        raise StateCapExceeded(estimate, state_cap)

    model = UrgencyModel(instance)
    states, edges = _explore(model, workers)
    removed = _prune_dead(edges)
    log.debug("%d alive states, %d survive", len(states), removed.count(False))

    if removed[0]:
        return SearchOutcome.unschedulable(states_explored=len(states))

    seen = {}
    actions: List[int] = []
    v = 0
    while v not in seen:
        seen[v] = len(actions)
        task, v = next((t, w) for t, w in edges[v] if not removed[w])
        actions.append(task)
    certificate = CyclicSchedule(actions[seen[v]:])

    verdict = verify(certificate, instance)
    if not verdict.is_valid:
        raise CertificateRejected(f"cycle {certificate} is not valid for {instance}", str(verdict.counterexample))
    return SearchOutcome.schedulable(certificate, states_explored=len(states))
