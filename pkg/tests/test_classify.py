import random

import pytest

from pindim.classify import (
    is_blue,
    is_green,
    is_red,
    is_teal,
    is_yellow,
    maximal_green_at,
    yellow_reach,
)
from pindim.profile import Profile, make_adversary

from conftest import SUITE_PAIRS, random_envelope_profile

LINE1 = Profile(((0.0, 0.0), (100.0, 100.0)))
LINE15 = Profile(((0.0, 0.0), (100.0, 150.0)))
LINE2 = Profile(((0.0, 0.0), (100.0, 200.0)))
TWO_SLOPE = Profile(((0.0, 0.0), (4.0, 8.0), (8.0, 8.0)))


# -- predicate examples -------------------------------------------------------------

def test_yellow_examples():
    assert is_yellow(LINE15, 10.0, 60.0)
    assert is_yellow(TWO_SLOPE, 0.0, 8.0)   # early steep growth carries every prefix
    assert not is_yellow(TWO_SLOPE, 4.0, 8.0)
    assert is_yellow(TWO_SLOPE, 0.0, 4.0)


def test_teal_examples():
    assert is_teal(TWO_SLOPE, 4.0, 8.0)
    assert is_teal(TWO_SLOPE, 0.0, 8.0)     # average rate 1 overall
    assert not is_teal(TWO_SLOPE, 0.0, 4.0)
    assert is_teal(LINE1, 3.0, 97.0)
    assert is_yellow(LINE1, 3.0, 97.0)


def test_green_examples():
    assert is_green(LINE1, 3.0, 7.0, 10.0)
    assert not is_green(LINE1, 3.0, 7.0, 2.0)  # fails the length cap
    assert is_green(TWO_SLOPE, 2.0, 6.0)
    assert is_green(TWO_SLOPE, 2.0, 6.0, 4.0)


def test_red_blue_examples():
    assert is_red(TWO_SLOPE, 0.5, 3.5)
    assert is_blue(TWO_SLOPE, 4.5, 7.5)
    assert not is_red(TWO_SLOPE, 2.0, 6.0)
    assert not is_blue(TWO_SLOPE, 2.0, 6.0)
    assert is_red(LINE1, 10.0, 20.0)  # unit slope is strictly increasing


def test_degenerate_interval_is_every_color():
    assert is_yellow(LINE2, 5.0, 5.0)
    assert is_teal(LINE2, 5.0, 5.0)
    assert is_green(LINE2, 5.0, 5.0, 1.0)


# -- maximal greens -----------------------------------------------------------------

def test_maximal_green_on_unit_line():
    g = maximal_green_at(LINE1, 50.0, 10.0)
    assert g is not None
    assert g.length == pytest.approx(10.0)
    assert g.a <= 50.0 <= g.b
    assert is_green(LINE1, g.a, g.b, 10.0)


def test_no_green_on_steep_line():
    assert maximal_green_at(LINE2, 50.0, 10.0) is None


def test_maximal_green_straddles_tooth_kink():
    p = make_adversary(1.2, 1.44, 100.0, phases=1)
    kink = next(s for s, v in p.breakpoints if abs(v - 1.44 * s) < 1e-9 and s > 0)
    g = maximal_green_at(p, kink, 10.0)
    # symmetric contact slopes (+1 / -1 in surplus): the cap splits evenly
    assert g is not None
    assert g.a == pytest.approx(kink - 5.0, abs=1e-6)
    assert g.b == pytest.approx(kink + 5.0, abs=1e-6)
    assert is_green(p, g.a, g.b, 10.0)


def test_maximal_green_maximality():
    p = make_adversary(1.2, 1.6, 100.0, phases=1)
    kink = next(s for s, v in p.breakpoints if abs(v - 1.6 * s) < 1e-9 and s > 0)
    t = 12.0
    g = maximal_green_at(p, kink, t)
    pad = 1e-4
    assert g.length == pytest.approx(t, abs=1e-6)
    assert not is_green(p, g.a - pad, g.b + pad, t)


# -- brute-force agreement -----------------------------------------------------------

def _dense_yellow(p, a, b, steps=1000):
    base = p.surplus(a)
    return all(p.surplus(a + (b - a) * i / steps) >= base - 1e-7 for i in range(steps + 1))


def _dense_teal(p, a, b, steps=1000):
    top = p.surplus(b)
    return all(p.surplus(a + (b - a) * i / steps) >= top - 1e-7 for i in range(steps + 1))


def test_predicates_agree_with_dense_sampling():
    rng = random.Random(4242)
    for i in range(1000):
        d, D = SUITE_PAIRS[i % len(SUITE_PAIRS)]
        p = random_envelope_profile(rng, d, D, n_cells=8)
        a = rng.uniform(1.0, 60.0)
        b = a + rng.uniform(2.0, 35.0)
        # breakpoint-only decisions vs dense sampling at step 1e-3*(b-a)
        assert is_yellow(p, a, b) == _dense_yellow(p, a, b)
        assert is_teal(p, a, b) == _dense_teal(p, a, b)


# -- structural properties ------------------------------------------------------------

def test_union_of_adjacent_yellow_is_yellow():
    rng = random.Random(99)
    found = 0
    while found < 50:
        d, D = SUITE_PAIRS[found % len(SUITE_PAIRS)]
        p = random_envelope_profile(rng, d, D, n_cells=8)
        a, m, b = sorted(rng.uniform(1.0, 99.0) for _ in range(3))
        if m - a < 0.5 or b - m < 0.5:
            continue
        if is_yellow(p, a, m) and is_yellow(p, m, b):
            assert is_yellow(p, a, b)
            found += 1
        if is_teal(p, a, m) and is_teal(p, m, b):
            assert is_teal(p, a, b)


def test_monotone_nesting():
    rng = random.Random(123)
    for i in range(200):
        d, D = SUITE_PAIRS[i % len(SUITE_PAIRS)]
        p = random_envelope_profile(rng, d, D, n_cells=8)
        a, c, b = sorted(rng.uniform(1.0, 99.0) for _ in range(3))
        if b - a < 1.0 or c - a < 0.1 or b - c < 0.1:
            continue
        if is_yellow(p, a, b):
            assert is_yellow(p, a, c)
        if is_teal(p, a, b):
            assert is_teal(p, c, b)


def test_green_implies_yellow_and_teal():
    p = make_adversary(1.2, 1.6, 100.0, phases=2)
    kink = next(s for s, v in p.breakpoints if abs(v - 1.6 * s) < 1e-9 and s > 20)
    g = maximal_green_at(p, kink, 15.0)
    assert is_yellow(p, g.a, g.b) and is_teal(p, g.a, g.b)


def test_subintervals_of_unit_plus_red_are_yellow_and_of_blue_are_teal():
    p = TWO_SLOPE
    # slope-2 stretch: every sub-interval is yellow
    assert is_yellow(p, 1.0, 3.0)
    # flat stretch: every sub-interval is teal
    assert is_teal(p, 5.0, 7.0)


def test_yellow_reach_on_line_halves_to_floor():
    reach, pieces = yellow_reach(LINE15, 100.0, 1.0)
    assert reach == pytest.approx(1.0, abs=1e-9)
    for a, b in pieces:
        assert b <= 2.0 * a + 1e-9
        assert is_yellow(LINE15, a, b)


def test_yellow_reach_stops_at_flat():
    reach, pieces = yellow_reach(TWO_SLOPE, 8.0, 0.5)
    # the flat [4, 8] window has its surplus minimum at the right endpoint
    assert reach == pytest.approx(8.0)
    assert pieces == []
