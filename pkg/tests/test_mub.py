import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcgmub import (
    DegenerateAngle,
    ExcludedAngle,
    InvalidM,
    MubConfig,
    check_pair,
    consistency_residual,
    is_valid_m,
    pair_period,
    quadruple_residual,
    search_quadruples,
    solve_three_directions,
    triple_periods,
    valid_m_values,
)


def test_valid_m_examples():
    assert valid_m_values(4, 8) == [1, 3, 5, 7]
    for d in range(2, 101):
        vals = valid_m_values(d, 2 * d)
        assert 1 in vals and d not in vals and 2 * d not in vals


def test_valid_m_matches_coprimality():
    for d in range(2, 101):
        expected = [m for m in range(1, 10 * d + 1) if math.gcd(m, d) == 1]
        assert valid_m_values(d, 10 * d) == expected


def test_is_valid_m_agrees_with_enumeration():
    for d in (2, 6, 12):
        vals = set(valid_m_values(d, 40))
        assert all(is_valid_m(m, d) == (m in vals) for m in range(1, 41))


def test_check_pair_examples():
    for d in (2, 3, 7):
        t = math.sqrt(2 * math.pi * d)
        assert check_pair(t, t, math.pi / 2, d) == 1
        t = math.sqrt(math.sqrt(3) * math.pi * d)
        assert check_pair(t, t, 2 * math.pi / 3, d) == 1
        # m* = d is excluded
        t = math.sqrt(2 * math.pi * math.sin(1.0))
        assert check_pair(t, t, 1.0, d) is None
    assert check_pair(2.0, 2.0, 1.0, 3) is None
    with pytest.raises(DegenerateAngle):
        check_pair(1.0, 1.0, math.pi, 3)


def test_check_pair_tolerance_is_relative():
    t = math.sqrt(2 * math.pi * 5)
    assert check_pair(t * (1 + 1e-8), t, math.pi / 2, 5) == 1
    assert check_pair(t * (1 + 1e-4), t, math.pi / 2, 5) is None
    assert check_pair(t * (1 + 1e-4), t, math.pi / 2, 5, tol=1e-3) == 1


def test_pair_period_examples():
    d, delta, m = 5, 1.1, 2
    fixed = math.sqrt(2 * math.pi * d * abs(math.sin(delta)) / m)
    assert pair_period(fixed, delta, d, m) == pytest.approx(fixed)
    assert pair_period(2.0, delta, d) == pytest.approx(pair_period(1.0, delta, d) / 2)
    with pytest.raises(InvalidM):
        pair_period(1.0, delta, 4, 2)


@settings(max_examples=60, deadline=None)
@given(t=st.floats(0.1, 50), delta=st.floats(0.01, math.pi - 0.01), d=st.integers(2, 10))
def test_pair_period_swap_invariance(t, delta, d):
    assert pair_period(pair_period(t, delta, d), delta, d) == pytest.approx(t, abs=1e-12 * max(1, t))


def test_check_pair_round_trips_pair_period():
    for d in range(2, 11):
        for m in valid_m_values(d, 2 * d):
            for delta in (0.3, 2 * math.pi / 3, math.radians(23)):
                assert check_pair(1.7, pair_period(1.7, delta, d, m), delta, d) == m


def test_triple_periods_examples():
    assert triple_periods(1, 1, 1, 2) == pytest.approx((3.2989,) * 3, abs=1e-4)
    tx, tr, ts = triple_periods(1, 1, 2, 5)
    c = math.sqrt(3) * math.pi * 5
    assert tx * tr == pytest.approx(c)
    assert tx * ts == pytest.approx(c)
    assert tr * ts == pytest.approx(c / 2)
    with pytest.raises(InvalidM):
        triple_periods(1, 2, 1, 4)


def test_triple_periods_pass_pair_checks():
    thetas = (0.0, 2 * math.pi / 3, 4 * math.pi / 3)
    for d in range(2, 9):
        vals = valid_m_values(d, 2 * d)[:3]
        for m1 in vals:
            for m2 in vals:
                for m3 in vals:
                    t = triple_periods(m1, m2, m3, d)
                    cfg = MubConfig(d, tuple(zip(thetas, t)),
                                    {(0, 1): m1, (0, 2): m2, (1, 2): m3})
                    assert cfg.is_unbiased()


def test_mub_config_rejects_parallel_directions():
    with pytest.raises(DegenerateAngle):
        MubConfig(3, ((0.0, 1.0), (math.pi, 1.0)))


def test_mub_config_detects_bias():
    cfg = MubConfig(3, ((0.0, 2.0), (1.0, 2.0)))
    assert not cfg.is_unbiased()
    assert cfg.pair_m() == {(0, 1): None}


def test_three_arbitrary_directions_solvable():
    for thetas in ((0.0, 0.5, 2.0), (0.3, 1.9, 2.9), (0.0, 2 * math.pi / 3, 4 * math.pi / 3)):
        for d in (2, 5):
            periods = solve_three_directions(thetas, d)
            cfg = MubConfig(d, tuple(zip(thetas, periods)))
            assert consistency_residual(cfg) < 1e-12
            assert cfg.is_unbiased()


def test_quadruple_residual_examples():
    r = quadruple_residual(2 * math.pi / 3, 4 * math.pi / 3, math.pi / 4)
    assert r.residual > 0.1 and not r.degenerate
    same = quadruple_residual(1.0, 1.0 + math.pi, 1.0)
    assert same.zeta3 == pytest.approx(1) and same.zeta4 == pytest.approx(1)
    assert same.residual == pytest.approx(0, abs=1e-12) and same.degenerate
    for t3, t4 in ((math.pi / 2, 2.0), (2.5, math.pi / 2)):
        assert quadruple_residual(1.0, t3, t4).residual > 0


@pytest.mark.parametrize("angles", [(0.0, 1.0, 2.0), (1.0, math.pi, 2.0), (math.pi / 2, 1.0, 2.0)])
def test_quadruple_excluded_angles(angles):
    with pytest.raises(ExcludedAngle):
        quadruple_residual(*angles)


@settings(max_examples=100, deadline=None)
@given(st.tuples(*(st.floats(0.01, math.pi - 0.01) for _ in range(3))))
def test_quadruple_residual_invariant(angles):
    t2, t3, t4 = angles
    if abs(math.cos(t2)) < 1e-6:
        return
    r = quadruple_residual(t2, t3, t4)
    a, b, c = abs(r.zeta3 - 1), abs(r.zeta4 - 1), abs(r.zeta4 - r.zeta3)
    assert r.residual == pytest.approx(max(abs(a - b), abs(c - b)))
    assert r.residual >= 0


def test_search_is_deterministic_and_positive():
    a = search_quadruples(20_000, 5)
    b = search_quadruples(20_000, 5)
    assert a == b
    assert a.min_residual > 1e-3
    assert a.trials == 20_000


def test_search_rejects_bad_trials():
    with pytest.raises(ValueError):
        search_quadruples(0, 1)
