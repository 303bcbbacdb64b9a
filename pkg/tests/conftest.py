"""Shared profile generators for the test suite.

The structural suite is seeded: every run sees the same 1000 profiles.
Generated profiles satisfy their (d, D) envelope at every node by clamping
the per-cell slope into the feasible corridor; the first cell is linear
through the origin and flats only follow clearly-rising cells, so every
rate-stops-increasing junction admits a green cover.
"""

import random

import pytest

from pindim.profile import TOL, Profile

SUITE_PAIRS = [(1.2, 1.6), (1.1, 1.9), (1.3, 1.5), (1.25, 1.45), (1.05, 1.8)]
SUITE_SEED = 20250809
SUITE_R = 100.0


def random_envelope_profile(rng, d, D, r=SUITE_R, n_cells=16):
    """Random profile satisfying d*s <= f(s) <= D*s at (and between) all nodes."""
    h = r / n_cells
    slopes, f = [], 0.0
    for k in range(n_cells):
        s_next = (k + 1) * h
        lo = max(0.0, (d * s_next - f) / h)
        hi = min(2.0, (D * s_next - f) / h)
        if k == 0:
            m = rng.uniform(d, D)
        else:
            flat_ok = lo <= TOL and (
                slopes[-1] >= 1.2
                or (slopes[-1] == 0.0 and len(slopes) >= 2 and slopes[-2] >= 1.2)
            )
            if flat_ok and rng.random() < 0.35:
                m = 0.0
            else:
                m = rng.uniform(max(1.0, lo), hi)
        f += m * h
        slopes.append(m)
    bps = [(0.0, 0.0)]
    acc = 0.0
    for k, m in enumerate(slopes):
        acc += m * h
        bps.append(((k + 1) * h, acc))
    return Profile(tuple(bps))


def near_regular_profile(rng, base=1.3, amp=0.004, r=SUITE_R, n_cells=16):
    """Profile hugging the line base*s with per-node ratio wiggle below amp."""
    h = r / n_cells
    bps = [(0.0, 0.0)]
    for k in range(1, n_cells + 1):
        s = k * h
        bps.append((s, (base + rng.uniform(-amp, amp)) * s))
    return Profile(tuple(bps))


def structural_suite(count=1000, seed=SUITE_SEED):
    """The seeded (profile, d, D) triples used by the acceptance criteria."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        d, D = SUITE_PAIRS[i % len(SUITE_PAIRS)]
        out.append((random_envelope_profile(rng, d, D), d, D))
    return out


@pytest.fixture(scope="session")
def suite1000():
    return structural_suite(1000)


@pytest.fixture(scope="session")
def suite200():
    return structural_suite(200, seed=SUITE_SEED + 1)
