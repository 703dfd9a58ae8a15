"""
test_intervals.py
ε-极值区间测试：直接计算、跳变列表、区间剖面与 ε* (含暴力校验)。
"""
import math

import numpy as np
import pytest

from conftest import make_series
from core.exceptions import InputError
from core.schema import DiscreteInterval, MIN
from evaluation.oracles import oracle_eps_star
from intervals.extremal_interval import (eps_intersection, eps_jumps, eps_jumps_left, eps_jumps_right,
                                         extremal_interval, extremum_label, interval_profile)
from persistence.extrema import find_extrema
from persistence.merge_tree import node_lives

ZIGZAG = make_series([0, 2, 1, 3])


# --- 区间 ---
def test_interval_stops_before_higher_neighbour():
    assert extremal_interval(ZIGZAG, 0, 0.5) == DiscreteInterval(0.0, 1.0)


def test_interval_passes_over_small_maximum():
    assert extremal_interval(ZIGZAG, 2, 0.6) == DiscreteInterval(0.0, 3.0)


def test_interval_at_zero_is_grid_neighbourhood():
    ts = make_series([0, 2, 1, 3, 0.5], times=[0, 0.5, 1.5, 2, 4])
    for e in find_extrema(ts):
        iv = extremal_interval(ts, e.index, 0.0)
        lo = ts.times[max(e.index - 1, 0)]
        hi = ts.times[min(e.index + 1, len(ts) - 1)]
        assert iv == DiscreteInterval(lo, hi)


def test_interval_rejects_negative_eps_and_non_extremum():
    with pytest.raises(InputError):
        extremal_interval(ZIGZAG, 0, -0.1)
    with pytest.raises(InputError):
        extremum_label(make_series([0, 1, 2]), 1)


def test_interval_is_nested_and_monotone(rng):
    for _ in range(50):
        ts = make_series(rng.normal(size=int(rng.integers(3, 15))))
        for e in find_extrema(ts):
            previous = None
            for eps in sorted(set([0.0] + eps_jumps(ts, e.index) + list(rng.uniform(0, 3, size=5)))):
                iv = extremal_interval(ts, e.index, eps)
                assert iv.left <= e.time <= iv.right
                if previous is not None:
                    assert iv.left <= previous.left and iv.right >= previous.right
                previous = iv


def test_containment_of_adjacent_extremum(rng):
    for _ in range(50):
        ts = make_series(rng.normal(size=int(rng.integers(3, 15))))
        extrema = find_extrema(ts)
        for a, b in zip(extrema, extrema[1:]):
            half = abs(a.height - b.height) / 2
            below = extremal_interval(ts, a.index, half * (1 - 1e-9))
            above = extremal_interval(ts, a.index, half * (1 + 1e-9))
            assert below.right == b.time
            assert above.right > b.time or b.index == len(ts) - 1
            assert extremal_interval(ts, b.index, half * (1 - 1e-9)).left == a.time
            assert extremal_interval(ts, b.index, half * (1 + 1e-9)).left < a.time or a.index == 0


def test_same_label_intervals_are_disjoint_below_node_life(rng):
    for _ in range(50):
        ts = make_series(rng.normal(size=int(rng.integers(4, 15))))
        lives = node_lives(ts)
        minima = [e for e in find_extrema(ts) if e.label == MIN]
        for a, b in zip(minima, minima[1:]):
            eps = 0.99 * min(lives[a.index], lives[b.index])
            assert not extremal_interval(ts, a.index, eps).intersects(extremal_interval(ts, b.index, eps))


# --- 跳变列表 ---
def test_eps_jumps_right_zigzag():
    assert eps_jumps_right(ZIGZAG, 0) == [1.0, 1.5]


def test_eps_jumps_right_last_point_is_empty():
    assert eps_jumps_right(ZIGZAG, 3) == []


def test_eps_jumps_right_monotone():
    assert eps_jumps_right(make_series([0, 1, 2]), 0) == [0.5, 1.0]


def test_eps_jumps_interior_merges_both_sides():
    assert eps_jumps_left(ZIGZAG, 2) == [0.5]
    assert eps_jumps_right(ZIGZAG, 2) == [1.0]
    assert eps_jumps(ZIGZAG, 2) == [0.5, 1.0]


def test_eps_jumps_boundary_equals_right():
    assert eps_jumps(ZIGZAG, 0) == eps_jumps_right(ZIGZAG, 0)


def test_eps_jumps_keeps_duplicates():
    assert eps_jumps(make_series([0, 2, 0]), 1) == [1.0, 1.0]


def test_jump_lists_are_sorted_positive_and_short(rng):
    for _ in range(100):
        ts = make_series(rng.normal(size=int(rng.integers(2, 20))))
        for e in find_extrema(ts):
            jumps = eps_jumps(ts, e.index)
            assert jumps == sorted(jumps)
            assert all(j > 0 for j in jumps)
            assert len(jumps) < len(ts)


def test_profile_agrees_with_direct_walk(rng):
    for _ in range(50):
        n = int(rng.integers(2, 15))
        ts = make_series(rng.normal(size=n), times=np.cumsum(rng.uniform(0.1, 1.0, size=n)))
        for e in find_extrema(ts):
            profile = interval_profile(ts, e.index)
            jumps = eps_jumps(ts, e.index)
            eps_values = [0.0] + jumps + [j * (1 + 1e-9) for j in jumps] + list(rng.uniform(0, 3, size=4))
            for eps in eps_values:
                assert profile.interval_at(eps) == extremal_interval(ts, e.index, eps)


# --- ε* ---
def test_eps_intersection_same_time_is_zero():
    a = make_series([0, 2, 1, 3], name="a")
    b = make_series([5, 1, 4, 2], name="b")
    assert eps_intersection(a, 1, b, 1) == 0.0


def test_eps_intersection_sine_cosine(sin_cos_dataset):
    sine, cosine = sin_cos_dataset.get("sine"), sin_cos_dataset.get("cosine")
    assert eps_intersection(sine, 250, cosine, 500) == pytest.approx((2 - math.sqrt(2)) / 4, abs=5e-3)


def test_eps_intersection_is_symmetric(rng):
    for _ in range(100):
        a = make_series(rng.normal(size=8), name="a")
        b = make_series(rng.normal(size=8), name="b", times=np.linspace(0, 7, 8) + np.r_[0, rng.uniform(-0.4, 0.4, 6), 0])
        for ea in find_extrema(a):
            for eb in find_extrema(b):
                assert eps_intersection(a, ea.index, b, eb.index) == eps_intersection(b, eb.index, a, ea.index)


def test_eps_intersection_matches_scan_oracle(rng):
    resolution = 1e-3
    checked = 0
    while checked < 200:
        a = make_series(rng.normal(size=8), name="a")
        times_b = np.linspace(0, 7, 8) + np.r_[0, rng.uniform(-0.4, 0.4, 6), 0]
        b = make_series(rng.normal(size=8), name="b", times=times_b)
        ea = find_extrema(a)[int(rng.integers(len(find_extrema(a))))]
        eb = find_extrema(b)[int(rng.integers(len(find_extrema(b))))]
        if ea.time == eb.time:
            continue
        exact = eps_intersection(a, ea.index, b, eb.index)
        scanned = oracle_eps_star(a, ea.index, b, eb.index, resolution)
        assert exact <= scanned + 1e-12
        assert scanned - exact <= resolution + 1e-9
        checked += 1


def test_eps_intersection_different_domains_may_be_infinite():
    a = make_series([0, 1, 0], name="a", times=[0, 1, 2])
    b = make_series([0, 1, 0], name="b", times=[5, 6, 7])
    assert eps_intersection(a, 1, b, 1) == math.inf
