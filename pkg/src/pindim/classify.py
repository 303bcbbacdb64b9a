"""Interval colors over a profile, and the exact geometry behind them.

Every predicate works on the surplus function g(s) = f(s) - s:

* ``[a, b]`` is yellow  iff g(c) >= g(a) for all c in [a, b]
  (complexity grows at rate >= 1 measured from the left endpoint);
* ``[a, b]`` is teal    iff g(c) >= g(b) for all c in [a, b]
  (rate <= 1 measured from the right endpoint);
* green = yellow and teal (optionally length-capped), which forces
  g(a) = g(b) = min g on [a, b];
* red / blue = f strictly increasing / constant.

g is piecewise linear, so every predicate and every "largest/smallest
point such that ..." query below is decided exactly from breakpoints and
per-segment line intersections; there are no iterative solvers.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .profile import TOL, Profile

YELLOW = "yellow"
TEAL = "teal"
GREEN = "green"
RED = "red"
BLUE = "blue"

COLORS = (YELLOW, TEAL, GREEN, RED, BLUE)


@dataclass(frozen=True)
class ColoredInterval:
    a: float
    b: float
    color: str
    growth: float

    @property
    def length(self) -> float:
        return self.b - self.a


def _nodes(p: Profile, a: float, b: float) -> list:
    """a, b and the breakpoints strictly between them."""
    pts = [a]
    for s in p._ss:
        if a + TOL < s < b - TOL:
            pts.append(s)
    pts.append(b)
    return pts


def _clipped_segments(p: Profile, lo: float, hi: float) -> list:
    """Profile segments intersected with [lo, hi] as (x0, u0, x1, u1) surplus pairs."""
    out = []
    for s0, v0, s1, v1 in p.segments():
        if s1 <= lo + TOL or s0 >= hi - TOL:
            continue
        x0, x1 = max(s0, lo), min(s1, hi)
        if x1 - x0 <= TOL:
            continue
        out.append((x0, p.surplus(x0), x1, p.surplus(x1)))
    return out


# -- color predicates ---------------------------------------------------------

def is_yellow(p: Profile, a: float, b: float) -> bool:
    if b - a <= TOL:
        return True  # degenerate intervals are every color by convention
    base = p.surplus(a)
    return all(p.surplus(c) >= base - TOL for c in _nodes(p, a, b))


def is_teal(p: Profile, a: float, b: float) -> bool:
    if b - a <= TOL:
        return True
    top = p.surplus(b)
    return all(p.surplus(c) >= top - TOL for c in _nodes(p, a, b))


def is_green(p: Profile, a: float, b: float, t: float | None = None) -> bool:
    if t is not None and b - a > t + TOL:
        return False
    return is_yellow(p, a, b) and is_teal(p, a, b)


def _overlapping_slopes(p: Profile, a: float, b: float):
    for s0, v0, s1, v1 in p.segments():
        if s1 <= a + TOL:
            continue
        if s0 >= b - TOL:
            break
        yield (v1 - v0) / (s1 - s0)


def is_red(p: Profile, a: float, b: float) -> bool:
    return all(m > TOL for m in _overlapping_slopes(p, a, b))


def is_blue(p: Profile, a: float, b: float) -> bool:
    return all(m <= TOL for m in _overlapping_slopes(p, a, b))


def check_color(p: Profile, ci: ColoredInterval, t: float | None = None) -> bool:
    """Re-check that an interval's color label passes its predicate."""
    if ci.color == YELLOW:
        return is_yellow(p, ci.a, ci.b)
    if ci.color == TEAL:
        return is_teal(p, ci.a, ci.b)
    if ci.color == GREEN:
        return is_green(p, ci.a, ci.b, t)
    if ci.color == RED:
        return is_red(p, ci.a, ci.b)
    if ci.color == BLUE:
        return is_blue(p, ci.a, ci.b)
    return False


def colored(p: Profile, a: float, b: float, color: str) -> ColoredInterval:
    return ColoredInterval(a, b, color, p.growth(a, b))


# -- anchor and crossing queries ----------------------------------------------

def rightmost_surplus_min(p: Profile, a: float, b: float):
    """Rightmost minimizer of the surplus over [a, b] and its value.

    The surplus is linear per segment, so the minimum is attained at a node;
    ties resolve to the larger precision.
    """
    nodes = _nodes(p, a, b)
    vals = [p.surplus(x) for x in nodes]
    m = min(vals)
    for x, v in zip(reversed(nodes), reversed(vals)):
        if v <= m + TOL:
            return x, v
    return nodes[0], vals[0]  # unreachable


def leftmost_valid_anchor(p: Profile, w: float, cur: float):
    """Leftmost x in [w, cur) such that [x, cur] is yellow, or None.

    x qualifies iff g(x) <= g(c) for every c in (x, cur]; scanning nodes
    right-to-left with a running minimum decides this exactly (on a segment
    with positive surplus slope the best point is its left node, on a
    negative-slope segment no interior point qualifies).
    """
    if cur - w <= TOL:
        return None
    nodes = _nodes(p, w, cur)
    vals = [p.surplus(x) for x in nodes]
    best = None
    runmin = None
    for x, v in zip(reversed(nodes), reversed(vals)):
        if x >= cur - TOL:
            runmin = v
            continue
        if v <= runmin + TOL:
            best = x
        runmin = min(runmin, v)
    return best


def yellow_reach(p: Profile, b: float, floor: float):
    """Smallest left endpoint reachable from b by at-most-doubling yellow pieces.

    Returns (reach, pieces) with pieces ascending; reach == b means no yellow
    piece with left endpoint in [b/2, b) exists.  Greedily stepping to the
    leftmost valid anchor of each doubling window is optimal: any competing
    chain stays (inductively) at or to the right of the greedy one.
    """
    pieces = []
    cur = b
    while cur > floor + TOL:
        w = max(cur / 2.0, floor)
        a = leftmost_valid_anchor(p, w, cur)
        if a is None or a >= cur - TOL:
            break
        pieces.append((a, cur))
        cur = a
    pieces.reverse()
    return cur, pieces


def last_line_crossing(p: Profile, lo: float, hi: float, c0: float, c1: float):
    """Largest s in [lo, hi) with f(s) = c0 + c1*s, or None.

    Scans segments right-to-left; within a segment the crossing is unique
    (both sides linear), and ties at segment joints resolve rightmost.
    """
    if hi - lo <= TOL:
        return None
    for x0, u0, x1, u1 in reversed(_clipped_segments(p, lo, hi)):
        # errors relative to the line, in f-space
        e0 = (u0 + x0) - (c0 + c1 * x0)
        e1 = (u1 + x1) - (c0 + c1 * x1)
        if abs(e1) <= TOL and x1 <= hi - TOL:
            return x1
        if e0 * e1 < 0:
            x = x0 + (0.0 - e0) * (x1 - x0) / (e1 - e0)
            if x <= hi - TOL:
                return min(max(x, x0), x1)
        if abs(e0) <= TOL and x0 <= hi - TOL:
            return x0
    return None


def leftmost_green_anchor(p: Profile, b: float, floor: float):
    """Smallest a in [floor, b) such that [a, b] is green (no length cap), or None.

    Walks left from b: any point where g returns to g(b) before g first dips
    below it is a valid anchor; the dip boundary itself is the smallest one.
    """
    tgt = p.surplus(b)
    best = None
    for x0, u0, x1, u1 in reversed(_clipped_segments(p, floor, b)):
        if u0 < tgt - TOL:
            if u1 - u0 <= TOL:
                break
            x = x0 + (tgt - u0) * (x1 - x0) / (u1 - u0)
            x = min(max(x, x0), x1)
            return x if x < b - TOL else best
        if u0 <= tgt + TOL:
            best = x0
    if best is not None and best < b - TOL:
        return best
    return None


# -- level-set machinery for maximal green intervals ---------------------------

def _reach_right(p: Profile, s: float, lam: float, hi: float):
    """Farthest q in [s, hi] with g(q) = lam and g >= lam on [s, q], or None."""
    last = s if abs(p.surplus(s) - lam) <= TOL else None
    for x0, u0, x1, u1 in _clipped_segments(p, s, hi):
        if u0 < lam - TOL:
            return last  # defensive: should have stopped at the previous dip
        if u1 < lam - TOL:
            x = x0 + (lam - u0) * (x1 - x0) / (u1 - u0)
            return min(max(x, x0), x1)
        if u1 <= lam + TOL:
            last = x1
    return last


def _reach_left(p: Profile, s: float, lam: float, lo: float):
    """Nearest-to-lo a in [lo, s] with g(a) = lam and g >= lam on [a, s], or None."""
    last = s if abs(p.surplus(s) - lam) <= TOL else None
    for x0, u0, x1, u1 in reversed(_clipped_segments(p, lo, s)):
        if u1 < lam - TOL:
            return last
        if u0 < lam - TOL:
            x = x0 + (lam - u0) * (x1 - x0) / (u1 - u0)
            return min(max(x, x0), x1)
        if u0 <= lam + TOL:
            last = x0
    return last


def _seg_index_at(p: Profile, x: float, prefer_left: bool) -> int:
    ss = p._ss
    i = bisect.bisect_right(ss, x) - 1
    i = max(0, min(i, len(ss) - 2))
    if prefer_left and i > 0 and abs(x - ss[i]) <= TOL:
        i -= 1
    if not prefer_left and i < len(ss) - 2 and abs(x - ss[i + 1]) <= TOL:
        i += 1
    return i


def _surplus_slope_at(p: Profile, x: float, prefer_left: bool) -> float:
    return p.slope(_seg_index_at(p, x, prefer_left)) - 1.0


def _candidate_levels(p: Profile, lam0: float, lo: float, hi: float) -> list:
    levels = set()
    for s in p._ss:
        if lo - TOL <= s <= hi + TOL:
            u = p.surplus(min(max(s, 0.0), p.domain_end))
            if u < lam0 - TOL:
                levels.add(u)
    for edge in (lo, hi):
        u = p.surplus(edge)
        if u < lam0 - TOL:
            levels.add(u)
    return sorted(levels, reverse=True)


def _touch_intervals(p: Profile, s: float, lam: float, lo: float, hi: float, rightward: bool):
    """Maximal stretches where g == lam, walking outward from s until g dips."""
    raw = [(s, s)]
    segs = _clipped_segments(p, s, hi) if rightward else list(reversed(_clipped_segments(p, lo, s)))
    for x0, u0, x1, u1 in segs:
        far = u1 if rightward else u0
        if far < lam - TOL:
            x = x0 + (lam - u0) * (x1 - x0) / (u1 - u0)
            raw.append((min(max(x, x0), x1),) * 2)
            break
        if abs(u0 - lam) <= TOL and abs(u1 - lam) <= TOL:
            raw.append((x0, x1))
        elif rightward and abs(u1 - lam) <= TOL:
            raw.append((x1, x1))
        elif not rightward and abs(u0 - lam) <= TOL:
            raw.append((x0, x0))
    raw.sort()
    merged = []
    for a, b in raw:
        if merged and a <= merged[-1][1] + TOL:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _green_at_top_level(p: Profile, s: float, lam0: float, t: float, lo: float, hi: float):
    """Longest green of length <= t through s whose endpoints sit at g = g(s)."""
    left = _touch_intervals(p, s, lam0, lo, hi, rightward=False)
    right = _touch_intervals(p, s, lam0, lo, hi, rightward=True)
    best = None
    for la, lb in left:
        for ra, rb in right:
            if ra - lb > t + TOL:
                continue
            length = min(t, rb - la)
            if length <= TOL:
                continue
            alo = max(la, ra - length)
            ahi = min(lb, rb - length)
            if alo > ahi + TOL:
                continue
            a = min(max(s - length / 2.0, alo), ahi)
            if best is None or length > best[0] + TOL:
                best = (length, a, a + length)
    if best is None:
        return None
    _, a, b = best
    return colored(p, a, b, GREEN)


def maximal_green_at(p: Profile, s: float, t: float, lo: float = 0.0,
                     hi: float | None = None):
    """A green interval of maximal length <= t containing s, or None.

    Sweeps the level lam of the endpoints downward from g(s); between two
    structural levels (surplus values of breakpoints) both endpoints move
    linearly with lam, so the cap is hit either at an exactly solvable level
    or at a structural jump, whose attained (inner-contact) span is used.
    """
    if hi is None:
        hi = p.domain_end
    if not (lo - TOL <= s <= hi + TOL):
        return None
    lam0 = p.surplus(s)
    prev = None
    best = None
    for lam in [lam0] + _candidate_levels(p, lam0, lo, hi):
        a = _reach_left(p, s, lam, lo)
        q = _reach_right(p, s, lam, hi)
        if a is None or q is None:
            break
        length = q - a
        if length <= t + TOL:
            best = (a, q)
            prev = (lam, a, q, length)
            continue
        if prev is None:
            return _green_at_top_level(p, s, lam0, t, lo, hi)
        lamp, ap, qp, lp = prev
        sa = _surplus_slope_at(p, ap, prefer_left=True)
        sq = _surplus_slope_at(p, qp, prefer_left=False)
        rate = 0.0
        if sa > TOL:
            rate += 1.0 / sa
        if sq < -TOL:
            rate += 1.0 / (-sq)
        lam_t = lamp - (t - lp) / rate if rate > TOL else lam
        if lam_t > lam + TOL:
            a_t = _reach_left(p, s, lam_t, lo)
            q_t = _reach_right(p, s, lam_t, hi)
            if a_t is not None and q_t is not None and q_t - a_t <= t + 1e-6:
                best = (a_t, q_t)
                break
        # the cap is crossed by a structural jump at this level: take the
        # attained inner-contact span at the jump level itself
        a_in = ap - (lamp - lam) / sa if sa > TOL else ap
        q_in = qp + (lamp - lam) / (-sq) if sq < -TOL else qp
        if q_in - a_in <= t + 1e-6 and q_in - a_in > (best[1] - best[0] if best else 0.0):
            best = (a_in, q_in)
        break
    if best is None:
        return None
    a, q = best
    if q - a <= TOL:
        return None
    return colored(p, a, q, GREEN)


def green_block_at(p: Profile, s: float, t: float, lo: float, hi: float):
    """A block of adjacent greens (shared endpoint level) strictly containing s.

    Returns a list of (a, b) pieces, each of length <= t, whose union has
    total length >= t whenever the surrounding geometry allows the block to
    keep extending; otherwise the longest feasible block.  None if s cannot
    be interior to any green here.
    """
    if not (lo + TOL < s < hi - TOL):
        return None
    lam0 = p.surplus(s)
    best = None
    prev = None
    for lam in [lam0] + _candidate_levels(p, lam0, lo, hi):
        a = _reach_left(p, s, lam, lo)
        q = _reach_right(p, s, lam, hi)
        if a is None or q is None:
            break
        touches = _block_touches(p, lam, a, q, s)
        if touches is None:  # a gap between touches exceeds the piece cap
            break
        interior = a < s - TOL and q > s + TOL
        total = q - a
        if interior:
            best = touches
            if total >= t - TOL:
                refined = _refine_block(p, s, lam, prev, t, lo, hi)
                if refined is not None:
                    best = refined
                break
        prev = (lam, a, q, total)
    if best is None:
        return None
    pieces = [(u, v) for u, v in zip(best, best[1:]) if v - u > TOL]
    return pieces or None


def _block_touches(p: Profile, lam: float, a: float, q: float, s: float):
    """Sorted points of g == lam in [a, q]; None if consecutive gaps exceed the cap.

    Gap feasibility is checked by the caller via the returned list; here we
    only collect the touch points (segment joints at the level, crossings,
    and flat-span endpoints).
    """
    pts = {a, q}
    for x0, u0, x1, u1 in _clipped_segments(p, a, q):
        if abs(u0 - lam) <= TOL:
            pts.add(x0)
        if abs(u1 - lam) <= TOL:
            pts.add(x1)
        if (u0 - lam) * (u1 - lam) < -TOL * TOL:
            x = x0 + (lam - u0) * (x1 - x0) / (u1 - u0)
            pts.add(min(max(x, x0), x1))
    return sorted(pts)


def _refine_block(p: Profile, s: float, lam: float, prev, t: float, lo: float, hi: float):
    """Trim a block that overshot total length t back toward t when possible."""
    if prev is None:
        return None
    lamp, ap, qp, lp = prev
    sa = _surplus_slope_at(p, ap, prefer_left=True)
    sq = _surplus_slope_at(p, qp, prefer_left=False)
    rate = (1.0 / sa if sa > TOL else 0.0) + (1.0 / (-sq) if sq < -TOL else 0.0)
    if rate <= TOL:
        return None
    lam_t = lamp - (t - lp) / rate
    if lam_t <= lam + TOL:
        return None
    a_t = _reach_left(p, s, lam_t, lo)
    q_t = _reach_right(p, s, lam_t, hi)
    if a_t is None or q_t is None:
        return None
    if not (a_t < s - TOL and q_t > s + TOL):
        return None
    return _block_touches(p, lam_t, a_t, q_t, s)
