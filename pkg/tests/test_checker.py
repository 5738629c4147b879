from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from real_pinwheel.pinwheel.checker import Counterexample, required_multiplicities, verify, window_min_count
from real_pinwheel.pinwheel.errors import TaskIndexOutOfRange
from real_pinwheel.pinwheel.model import CyclicSchedule, Instance, ceil_mul, parse_instance, parse_schedule


def test_folded_example_valid():
    assert verify(parse_schedule("1213"), parse_instance("2,4,4")).is_valid


def test_real_period_schedule_valid():
    assert verify(parse_schedule("1112112"), parse_instance("2,7/2"))


def test_identified_schedule_is_rejected():
    verdict = verify(parse_schedule("1111212"), parse_instance("2,7/2"))
    assert not verdict.is_valid
    assert verdict.counterexample == Counterexample(task=2, l=1, m=0, window_length=4, found=0)


def test_counterexample_for_zero_epsilon_anchor():
    verdict = verify(parse_schedule("112112113"), parse_instance("3/2,5,9"))
    assert verdict.counterexample.as_tuple() == (2, 1, 6, 5, 0)


@pytest.mark.parametrize(
    "schedule,instance",
    [
        ("111112", "6/5,6"),
        ("112", "3/2,3"),
        ("12", "2,2"),
        ("121213212123", "12/5,12/5,6"),
    ],
)
def test_two_period_and_case_seven_fixtures(schedule, instance):
    assert verify(parse_schedule(schedule), parse_instance(instance)).is_valid


@pytest.mark.parametrize(
    "schedule,task,y,expected",
    [
        ("1213", 1, 2, 1),
        ("111112", 2, 6, 1),
        ("111112", 2, 5, 0),
        ("1213", 2, 0, 0),
        ("1213", 2, 9, 2),
        ("1213", 1, 9, 4),
    ],
)
def test_window_min_count(schedule, task, y, expected):
    assert window_min_count(parse_schedule(schedule), task, y) == expected


def test_required_multiplicities():
    assert list(required_multiplicities(Fraction(7, 2))) == [1, 2]
    assert list(required_multiplicities(Fraction(12, 5))) == [1, 2, 3, 4, 5]
    assert list(required_multiplicities(Fraction(6))) == [1]


def test_task_index_out_of_range():
    with pytest.raises(TaskIndexOutOfRange):
        verify(parse_schedule("123"), parse_instance("2,2"))


def test_threaded_verify_matches():
    sched = parse_schedule("112112113")
    inst = parse_instance("3/2,5,9")
    assert verify(sched, inst, workers=3) == verify(sched, inst)


def _brute_force_valid(schedule: CyclicSchedule, instance: Instance, factor: int = 3) -> bool:
    for task, a in enumerate(instance.periods, start=1):
        for l in range(1, factor * a.denominator + 1):
            window = ceil_mul(l, a)
            for m in range(schedule.n):
                found = sum(1 for t in range(m, m + window) if schedule.at(t) == task)
                if found < l:
                    return False
    return True


@st.composite
def rational_periods(draw, max_den=6, max_value=6):
    den = draw(st.integers(min_value=1, max_value=max_den))
    num = draw(st.integers(min_value=den, max_value=max_value * den))
    return Fraction(num, den)


@st.composite
def schedule_and_instance(draw):
    k = draw(st.integers(min_value=1, max_value=4))
    inst = Instance(draw(st.lists(rational_periods(), min_size=k, max_size=k)))
    n = draw(st.integers(min_value=1, max_value=12))
    slots = draw(st.lists(st.integers(min_value=1, max_value=k), min_size=n, max_size=n))
    return CyclicSchedule(slots), inst


@settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(schedule_and_instance())
def test_finite_criterion_matches_brute_force(pair):
    schedule, instance = pair
    assert verify(schedule, instance).is_valid == _brute_force_valid(schedule, instance)


@settings(max_examples=200, deadline=None)
@given(schedule_and_instance(), st.integers(min_value=0, max_value=30), st.integers(min_value=0, max_value=30))
def test_windows_compose(pair, y1, y2):
    schedule, _ = pair
    task = schedule.slots[0]
    l1 = window_min_count(schedule, task, y1)
    l2 = window_min_count(schedule, task, y2)
    assert window_min_count(schedule, task, y1 + y2) >= l1 + l2


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])
@given(schedule_and_instance(), st.data())
def test_raising_a_period_keeps_validity(pair, data):
    schedule, instance = pair
    assume(verify(schedule, instance).is_valid)
    task = data.draw(st.integers(min_value=1, max_value=instance.k))
    bump = data.draw(rational_periods()) - 1
    raised = instance.with_period(task, instance.period(task) + bump)
    assert verify(schedule, raised).is_valid


@settings(max_examples=200, deadline=None)
@given(schedule_and_instance())
def test_integer_instances_need_only_one_window(pair):
    schedule, instance = pair
    integral = Instance(Fraction(p.numerator // p.denominator) for p in instance.periods)
    assert all(list(required_multiplicities(p)) == [1] for p in integral.periods)
    single = all(
        window_min_count(schedule, task, int(a)) >= 1 for task, a in enumerate(integral.periods, start=1)
    )
    assert verify(schedule, integral).is_valid == single
