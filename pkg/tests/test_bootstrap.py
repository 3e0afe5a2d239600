import math

import pytest

from bdistill.bootstrap import (
    BOOTSTRAP_COLUMNS,
    SuccessBound,
    activating_copies,
    always_succeeds,
    bootstrap_csv,
    bootstrap_row,
    effective_rate,
    make_plan,
    success_bound,
)

# (1 - 1/s) (1 - k exp(-c s))^s from mpmath at 40 digits
BOUND_ORACLE = [
    (10**8, 2.0, 0.001, 0.4032736860516445784826959),
    (10**6, 3.0, 0.005, 1.351654110764167189197367e-9),
    (160_000, 2.0, 0.02, 0.7626444842056175448084675),
    (10**8, 2.0, 0.01, 0.9999),
]


def one_minus_inverse(s):
    return 1.0 - 1.0 / s


def test_small_example_blocks():
    plan = make_plan(10**4, k=0.01, r=0.1)
    assert plan.seed_ebits == 100
    assert plan.activating_copies == 10_000
    assert plan.blocks[:4] == (100, 110, 121, 133)
    assert sum(plan.blocks) == 10**4


def test_activating_copies_rounds_up():
    assert activating_copies(10**4, 0.03) == 3334
    assert activating_copies(99, 0.5) == 18
    with pytest.raises(ValueError):
        activating_copies(10, 0.0)


@pytest.mark.parametrize("n", [10**4, 12_345, 10**6, 777_777])
def test_replay_keeps_pool_nonnegative(n):
    plan = make_plan(n, k=0.05, r=0.3)
    balances = plan.replay()
    assert all(b >= 0 for b in balances)
    assert balances[-1] >= plan.seed_ebits
    assert sum(plan.blocks) == n
    assert all(b > 0 for b in plan.blocks)


@pytest.mark.parametrize("n", [100, 10**4, 98_765, 10**6, 10**8])
def test_closed_form_matches_replay(n):
    assert make_plan(n, 0.05, 0.3).effective_rate == pytest.approx(effective_rate(n, 0.05, 0.3), rel=1e-15)


def test_rate_near_target_at_one_million():
    assert abs(make_plan(10**6, 0.05, 0.3).effective_rate - 0.3) < 0.01


def test_rate_approaches_target():
    rates = [effective_rate(10**e, 0.05, 0.3) for e in range(4, 13)]
    assert all(b >= a for a, b in zip(rates, rates[1:]))
    assert abs(rates[-1] - 0.3) < 1e-2
    assert abs(rates[-1] - 0.3) < 1e-5


def test_plan_validation():
    with pytest.raises(ValueError):
        make_plan(0, 0.1, 0.1)
    with pytest.raises(ValueError):
        make_plan(100, 0.1, -0.1)
    with pytest.raises(ValueError):
        make_plan(10.5, 0.1, 0.1)
    assert make_plan(1e4, 0.1, 0.1).n == 10**4


@pytest.mark.parametrize("n,k_err,c,expected", BOUND_ORACLE)
def test_success_bound_oracle(n, k_err, c, expected):
    assert success_bound(n, one_minus_inverse, k_err, c) == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_success_bound_grows_along_doubling_sequence():
    values = [success_bound(2**j, one_minus_inverse, 2.0, 0.01) for j in range(10, 41)]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert all(b >= a for a, b in zip(values[12:], values[13:]))
    assert values[-1] > 0.999


def test_success_bound_uninformative_and_invalid():
    assert success_bound(100, always_succeeds, 2.0, 0.01) == 0.0
    assert success_bound(10**8, lambda s: 0.0, 2.0, 0.01) == 0.0
    with pytest.raises(ValueError):
        success_bound(100, always_succeeds, 2.0, 0.0)
    with pytest.raises(ValueError):
        success_bound(100, always_succeeds, 0.0, 0.1)
    with pytest.raises(ValueError):
        success_bound(100, lambda s: 1.5, 2.0, 0.1)


def test_success_bound_dataclass():
    sb = SuccessBound(10**8, one_minus_inverse, 2.0, 0.01)
    assert sb.bound == success_bound(10**8, one_minus_inverse, 2.0, 0.01)


def test_rows_and_csv():
    row = bootstrap_row(10**6, 0.05, 0.3, 2.0, 0.01)
    assert row[:3] == (10**6, 20_000, len(make_plan(10**6, 0.05, 0.3).blocks))
    assert math.isclose(row[3], effective_rate(10**6, 0.05, 0.3), rel_tol=1e-15)
    lines = bootstrap_csv([row]).splitlines()
    assert lines[0] == ",".join(BOOTSTRAP_COLUMNS)
    assert lines[1].startswith("1000000,20000,")
