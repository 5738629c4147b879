"""Half-plane regions in frequency space (X, Y) = (1/a1, 1/a2).

J is the image of every three-period instance with density exactly 5/6 and
M1..M7 are the images of the instances handled by cases I..VII. The cover
J ⊆ M1 ∪ ... ∪ M7 is checked by expanding the complement of the union into
single negated constraints and deciding each conjunction exactly.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .model import FIVE_SIXTHS, format_rational

log = logging.getLogger(__name__)


class Relation(str, Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    @property
    def strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    def negated(self) -> "Relation":
        return {
            Relation.LT: Relation.GE,
            Relation.LE: Relation.GT,
            Relation.GT: Relation.LE,
            Relation.GE: Relation.LT,
        }[self]


@dataclass(frozen=True)
class Point:
    x: Fraction
    y: Fraction

    def __str__(self) -> str:
        return f"({format_rational(self.x)}, {format_rational(self.y)})"


@dataclass(frozen=True)
class LinearConstraint:
    """cx * X + cy * Y <relation> c."""

    cx: Fraction
    cy: Fraction
    relation: Relation
    c: Fraction

    def lhs(self, p: Point) -> Fraction:
        return self.cx * p.x + self.cy * p.y

    def holds(self, p: Point) -> bool:
        v = self.lhs(p)
        return {
            Relation.LT: v < self.c,
            Relation.LE: v <= self.c,
            Relation.GT: v > self.c,
            Relation.GE: v >= self.c,
        }[self.relation]

    def negated(self) -> "LinearConstraint":
        return LinearConstraint(self.cx, self.cy, self.relation.negated(), self.c)

    def as_upper(self) -> Tuple[Fraction, Fraction, Fraction, bool]:
        """Rewrite as a*X + b*Y <= c (or < c when strict)."""
        if self.relation in (Relation.LT, Relation.LE):
            return self.cx, self.cy, self.c, self.relation.strict
        return -self.cx, -self.cy, -self.c, self.relation.strict

    def __str__(self) -> str:
        return " ".join(
            [format_rational(self.cx), format_rational(self.cy), self.relation.value, format_rational(self.c)]
        )


def constraint(cx, cy, relation: str, c) -> LinearConstraint:
    return LinearConstraint(Fraction(cx), Fraction(cy), Relation(relation), Fraction(c))


@dataclass(frozen=True)
class Region:
    name: str
    constraints: Tuple[LinearConstraint, ...] = field(default_factory=tuple)

    def contains(self, p: Point) -> bool:
        return contains(self, p)

    def intersect(self, other: "Region", name: Optional[str] = None) -> "Region":
        return Region(name or f"{self.name}&{other.name}", self.constraints + other.constraints)


def contains(region: Region, p: Point) -> bool:
    """Exact membership test honouring strict and non-strict relations."""
    return all(c.holds(p) for c in region.constraints)


def point_constraints(p: Point) -> List[LinearConstraint]:
    """Constraints pinning (X, Y) to a single point."""
    return [
        constraint(1, 0, ">=", p.x),
        constraint(1, 0, "<=", p.x),
        constraint(0, 1, ">=", p.y),
        constraint(0, 1, "<=", p.y),
    ]


@dataclass(frozen=True)
class Feasibility:
    witness: Optional[Point] = None

    @property
    def feasible(self) -> bool:
        return self.witness is not None

    def __bool__(self) -> bool:
        return self.feasible


INFEASIBLE = Feasibility()

# A bound is (value, strict).
Bound = Tuple[Fraction, bool]


def _tightest(bounds: List[Bound], lower: bool) -> Optional[Bound]:
    if not bounds:
        return None
    best = max(v for v, _ in bounds) if lower else min(v for v, _ in bounds)
    return best, any(s for v, s in bounds if v == best)


def _pick(lo: Optional[Bound], hi: Optional[Bound]) -> Optional[Fraction]:
    """A value inside the interval given by the bounds, or None if it is empty."""
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi[0] - 1
    if hi is None:
        return lo[0] + 1
    (lv, ls), (hv, hs) = lo, hi
    if lv < hv:
        return (lv + hv) / 2
    if lv == hv and not ls and not hs:
        return lv
    return None


def fm_feasible(constraints: Sequence[LinearConstraint]) -> Feasibility:
    """Decide a conjunction of constraints over (X, Y) exactly.

    Y is eliminated by pairing every lower bound with every upper bound (a pair
    is strict if either side is), which leaves bounds on X. A witness is built
    back to front: X from the middle of its interval, then Y from the middle of
    its interval at that X.
    """
    y_lower: List[Tuple[Fraction, Fraction, bool]] = []  # Y >= slope*X + icpt
    y_upper: List[Tuple[Fraction, Fraction, bool]] = []
    x_rows: List[Tuple[Fraction, Fraction, bool]] = []  # a*X <= c
    for row in constraints:
        a, b, c, strict = row.as_upper()
        if b > 0:
            y_upper.append((-a / b, c / b, strict))
        elif b < 0:
            y_lower.append((-a / b, c / b, strict))
        else:
            x_rows.append((a, c, strict))

    for ls, li, lstrict in y_lower:
        for us, ui, ustrict in y_upper:
            # ls*X + li <= us*X + ui
            x_rows.append((ls - us, ui - li, lstrict or ustrict))

    x_lo: List[Bound] = []
    x_hi: List[Bound] = []
    for a, c, strict in x_rows:
        if a > 0:
            x_hi.append((c / a, strict))
        elif a < 0:
            x_lo.append((c / a, strict))
        elif c < 0 or (c == 0 and strict):
            return INFEASIBLE

    x = _pick(_tightest(x_lo, True), _tightest(x_hi, False))
    if x is None:
        return INFEASIBLE

    lo = _tightest([(s * x + i, st) for s, i, st in y_lower], True)
    hi = _tightest([(s * x + i, st) for s, i, st in y_upper], False)
    y = _pick(lo, hi)
    if y is None:
        return INFEASIBLE
    witness = Point(x, y)
    assert all(c.holds(witness) for c in constraints), f"witness {witness} violates the system"
    return Feasibility(witness)


@dataclass(frozen=True)
class CoverResult:
    witness: Optional[Point] = None
    branches: int = 0

    @property
    def covered(self) -> bool:
        return self.witness is None


def _uncovered(base: List[LinearConstraint], covers: Sequence[Region], counter: List[int]) -> Optional[Point]:
    counter[0] += 1
    found = fm_feasible(base)
    if not found:
        return None
    if not covers:
        return found.witness
    head, tail = covers[0], covers[1:]
    for c in head.constraints:
        witness = _uncovered(base + [c.negated()], tail, counter)
        if witness is not None:
            return witness
    return None


def cover_check(target: Region, covers: Sequence[Region], workers: int = 1) -> CoverResult:
    """Check target ⊆ ∪ covers.

    Being outside every cover means violating one constraint of each, so the
    complement splits into one conjunction per choice of violated constraints.
    Branches are pruned as soon as their prefix is infeasible. Returns a
    witness point of target \\ ∪ covers, or a covered result.
    """
    covers = list(covers)
    base = list(target.constraints)
    if not covers:
        found = fm_feasible(base)
        return CoverResult(found.witness, 1)

    head, tail = covers[0], covers[1:]
    branches = [base + [c.negated()] for c in head.constraints]

    def run(branch):
        counter = [0]
        return _uncovered(branch, tail, counter), counter[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, branches))
    else:
        results = [run(branch) for branch in branches]

    total = 1 + sum(n for _, n in results)
    for witness, _ in results:
        if witness is not None:
            assert contains(target, witness) and not any(contains(r, witness) for r in covers)
            log.debug("cover of %s fails at %s after %d branches", target.name, witness, total)
            return CoverResult(witness, total)
    log.debug("%s covered by %s (%d branches)", target.name, ",".join(r.name for r in covers), total)
    return CoverResult(None, total)


def _intersection(p: LinearConstraint, q: LinearConstraint) -> Optional[Point]:
    det = p.cx * q.cy - p.cy * q.cx
    if det == 0:
        return None
    x = (p.c * q.cy - p.cy * q.c) / det
    y = (p.cx * q.c - p.c * q.cx) / det
    return Point(x, y)


def _closed(c: LinearConstraint) -> LinearConstraint:
    relation = {Relation.LT: Relation.LE, Relation.GT: Relation.GE}.get(c.relation, c.relation)
    return LinearConstraint(c.cx, c.cy, relation, c.c)


def region_vertices(region: Region) -> List[Point]:
    """Vertices of the closure of a bounded region, counter-clockwise."""
    closure = [_closed(c) for c in region.constraints]
    points = []
    for p, q in combinations(closure, 2):
        v = _intersection(p, q)
        if v is not None and all(c.holds(v) for c in closure) and v not in points:
            points.append(v)
    if len(points) < 3:
        return points
    cx = sum((p.x for p in points), Fraction(0)) / len(points)
    cy = sum((p.y for p in points), Fraction(0)) / len(points)

    def half(p: Point) -> int:
        dx, dy = p.x - cx, p.y - cy
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def compare(p: Point, q: Point) -> int:
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = (p.x - cx) * (q.y - cy) - (p.y - cy) * (q.x - cx)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(points, key=cmp_to_key(compare))


def _band(name: str, x_rel: str, x_max, y_rel: str, y_max, sum_min) -> Region:
    return Region(
        name,
        (
            constraint(1, 0, x_rel, x_max),
            constraint(0, 1, y_rel, y_max),
            constraint(1, 1, ">=", sum_min),
            constraint(1, 1, "<", FIVE_SIXTHS),
        ),
    )


J = Region(
    "J",
    (
        constraint(1, -1, ">", 0),
        constraint(1, 2, ">", FIVE_SIXTHS),
        constraint(1, 1, "<", FIVE_SIXTHS),
    ),
)

M1 = Region(
    "M1",
    (
        constraint(1, -1, ">", 0),
        constraint(1, 2, ">", FIVE_SIXTHS),
        constraint(1, 2, "<=", 1),
        constraint(1, 1, "<", FIVE_SIXTHS),
    ),
)
M2 = _band("M2", "<=", Fraction(2, 3), "<", Fraction(1, 5), FIVE_SIXTHS - Fraction(1, 9))
M3 = _band("M3", "<=", Fraction(7, 11), "<", Fraction(1, 4), FIVE_SIXTHS - Fraction(1, 11))
M4 = _band("M4", "<=", Fraction(7, 12), "<", Fraction(1, 3), FIVE_SIXTHS - Fraction(1, 12))
M5 = _band("M5", "<", Fraction(1, 2), "<=", Fraction(1, 3), FIVE_SIXTHS - Fraction(1, 6))
M6 = _band("M6", "<", Fraction(1, 2), "<=", Fraction(5, 12), FIVE_SIXTHS - Fraction(1, 12))
M7 = _band("M7", "<=", Fraction(5, 12), "<=", Fraction(5, 12), FIVE_SIXTHS - Fraction(1, 6))

CASE_REGIONS: Tuple[Region, ...] = (M1, M2, M3, M4, M5, M6, M7)
REGIONS: Dict[str, Region] = {r.name: r for r in (J,) + CASE_REGIONS}

# J without M1: the part of J above the line X + 2Y = 1.
J_MINUS_M1 = Region(
    "J\\M1",
    (
        constraint(1, -1, ">", 0),
        constraint(1, 2, ">", 1),
        constraint(1, 1, "<", FIVE_SIXTHS),
    ),
)


def inclusion_strips() -> List[Tuple[Region, List[Region]]]:
    """The vertical strips of J \\ M1 and the case regions that cover each one."""
    unit_y = (constraint(0, 1, ">", 0), constraint(0, 1, "<=", 1))
    strips = [
        ("X in (7/11, 1]", (constraint(1, 0, ">", Fraction(7, 11)), constraint(1, 0, "<=", 1)), [M2]),
        ("X in (7/12, 7/11]", (constraint(1, 0, ">", Fraction(7, 12)), constraint(1, 0, "<=", Fraction(7, 11))), [M3]),
        ("X in [1/2, 7/12]", (constraint(1, 0, ">=", Fraction(1, 2)), constraint(1, 0, "<=", Fraction(7, 12))), [M4]),
        ("X in (5/12, 1/2)", (constraint(1, 0, ">", Fraction(5, 12)), constraint(1, 0, "<", Fraction(1, 2))), [M5, M6]),
        ("X in (0, 5/12]", (constraint(1, 0, ">", 0), constraint(1, 0, "<=", Fraction(5, 12))), [M7]),
    ]
    return [
        (Region(f"{J_MINUS_M1.name} & {label}", J_MINUS_M1.constraints + bounds + unit_y), covers)
        for label, bounds, covers in strips
    ]


def frequency_point(a1: Fraction, a2: Fraction) -> Point:
    return Point(1 / Fraction(a1), 1 / Fraction(a2))
