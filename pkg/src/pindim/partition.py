"""Partition constructions: good, admissible, red/green/blue, all-yellow,
general yellow/teal, and the regular-pin variant.

All constructions cover [s_min, r] with contiguous colored intervals and are
pure functions of their inputs: identical inputs give bit-identical output.
Left endpoints of steps are found by closed-form per-segment solves (see
``classify``), scanning right-to-left so every "largest real such that"
choice resolves to the largest precision.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classify import (
    BLUE,
    GREEN,
    RED,
    TEAL,
    YELLOW,
    check_color,
    colored,
    green_block_at,
    last_line_crossing,
    leftmost_green_anchor,
    rightmost_surplus_min,
    yellow_reach,
)
from .errors import ConstructionError, EnvelopeViolation, PreconditionError
from .profile import TOL, Envelope, Profile, envelope_check

KINDS = ("good", "admissible", "rgb", "all_yellow", "general", "regular_pin")


def default_s_min(r: float) -> float:
    """Head threshold below which constructions stop refining."""
    return r / 100.0


@dataclass(frozen=True)
class Partition:
    intervals: tuple
    kind: str
    params: dict

    @property
    def lo(self) -> float:
        return self.intervals[0].a

    @property
    def hi(self) -> float:
        return self.intervals[-1].b

    def total_length(self, color: str) -> float:
        return sum(iv.length for iv in self.intervals if iv.color == color)


def partition_to_json(part: Partition) -> dict:
    params = {}
    for k, v in part.params.items():
        params[k] = [list(x) if isinstance(x, tuple) else x for x in v] if isinstance(v, tuple) else v
    return {
        "kind": part.kind,
        "params": params,
        "intervals": [
            {"a": iv.a, "b": iv.b, "color": iv.color, "growth": iv.growth}
            for iv in part.intervals
        ],
    }


def _merge_adjacent(p: Profile, pieces, mergeable, merged_color):
    out = []
    for iv in pieces:
        if out and mergeable(out[-1], iv):
            prev = out[-1]
            out[-1] = colored(p, prev.a, iv.b, merged_color(prev, iv))
        else:
            out.append(iv)
    return out


def _check_range(p: Profile, r: float):
    if r > p.domain_end + TOL:
        raise PreconditionError(f"r={r} beyond profile domain end {p.domain_end}")
    if r <= 0:
        raise PreconditionError("r must be positive")


# -- good partitions -----------------------------------------------------------

def _good_pieces(p: Profile, lo: float, hi: float):
    """Yellow/teal cover of [lo, hi] with every piece at most doubling.

    From the right endpoint b, the rightmost minimizer a* of the surplus over
    the doubling window is a yellow left endpoint whenever a* < b; otherwise b
    minimizes the surplus over the window, which makes the window itself teal.
    """
    pieces = []
    cur = hi
    while cur > lo + TOL:
        w = max(cur / 2.0, lo)
        a, _ = rightmost_surplus_min(p, w, cur)
        if a < cur - TOL:
            pieces.append(colored(p, a, cur, YELLOW))
            cur = a
        else:
            pieces.append(colored(p, w, cur, TEAL))
            cur = w
    pieces.reverse()
    return pieces


def good_partition(p: Profile, r: float, s_min: float | None = None) -> Partition:
    """Cover of [s_min, r]: yellow/teal pieces, each at most doubling, with any
    two consecutive pieces jointly more than doubling after the merge pass."""
    if s_min is None:
        s_min = default_s_min(r)
    _check_range(p, r)
    if r < 2.0 * s_min - TOL:
        raise PreconditionError(f"good partition needs r >= 2*s_min, got r={r}, s_min={s_min}")
    pieces = _good_pieces(p, s_min, r)
    merged = _merge_adjacent(
        p, pieces,
        mergeable=lambda u, v: u.color == v.color and v.b <= 2.0 * u.a + TOL,
        merged_color=lambda u, v: u.color,
    )
    return Partition(tuple(merged), "good", {"r": r, "s_min": s_min})


# -- admissible partitions -------------------------------------------------------

def admissible_partition(p: Profile, a: float, b: float, t: float, M: int) -> Partition:
    """Cover of [a, b] by at most M yellow/teal pieces, each of length <= t."""
    _check_range(p, b)
    if b - a <= TOL:
        raise PreconditionError("admissible partition needs a < b")
    if t < (b - a) / M - TOL:
        raise PreconditionError(f"t={t} too small: {M} intervals of length <= t cannot cover [{a}, {b}]")
    pieces = []
    cur = b
    while cur > a + TOL:
        w = max(cur - t, a)
        x, _ = rightmost_surplus_min(p, w, cur)
        if x < cur - TOL:
            pieces.append(colored(p, x, cur, YELLOW))
            cur = x
        else:
            pieces.append(colored(p, w, cur, TEAL))
            cur = w
    pieces.reverse()
    merged = _merge_adjacent(
        p, pieces,
        mergeable=lambda u, v: u.color == v.color and v.b - u.a <= t + TOL,
        merged_color=lambda u, v: u.color,
    )
    if len(merged) > M:
        short = min(merged, key=lambda iv: iv.length)
        raise PreconditionError(
            f"admissible partition needs {len(merged)} intervals > M={M}; "
            f"bottleneck interval [{short.a:.6g}, {short.b:.6g}]"
        )
    return Partition(tuple(merged), "admissible", {"a": a, "b": b, "t": t, "M": M})


# -- red/green/blue partitions ---------------------------------------------------

def _red_blue_runs(p: Profile, lo: float, hi: float, t: float):
    """Label [lo, hi] by maximal runs: strictly increasing is red, constant is
    blue, and exact unit slope (green no matter where it is chopped) becomes
    green pieces of length at most t."""
    runs = []
    for s0, v0, s1, v1 in p.segments():
        if s1 <= lo + TOL or s0 >= hi - TOL:
            continue
        x0, x1 = max(s0, lo), min(s1, hi)
        if x1 - x0 <= TOL:
            continue
        slope = (v1 - v0) / (s1 - s0)
        if abs(slope - 1.0) <= TOL:
            cat = GREEN
        elif slope > TOL:
            cat = RED
        else:
            cat = BLUE
        if runs and runs[-1][2] == cat:
            runs[-1][1] = x1
        else:
            runs.append([x0, x1, cat])
    out = []
    for a, b, c in runs:
        if c == GREEN and b - a > t + TOL:
            n = int((b - a) / t) + 1
            step = (b - a) / n
            out.extend(colored(p, a + k * step, a + (k + 1) * step, GREEN)
                       for k in range(n))
        else:
            out.append(colored(p, a, b, c))
    return out


def _junctions(p: Profile, lo: float, hi: float):
    """Breakpoints inside (lo, hi) where a strictly-increasing segment meets a flat one."""
    out = []
    ss = p._ss
    for i in range(1, len(ss) - 1):
        s = ss[i]
        if not (lo + TOL < s < hi - TOL):
            continue
        if p.slope(i - 1) > TOL and p.slope(i) <= TOL:
            out.append(s)
    return out


def rgb_partition(p: Profile, r: float, t: float, s_min: float | None = None) -> Partition:
    """Cover of [s_min, r] by red, blue and green (cap t) intervals.

    Every junction where the profile stops strictly increasing and goes flat
    is covered by the interior of a green block; blocks flanked by red on the
    left and blue on the right are extended until their total green length
    reaches t.  Construction fails if some junction admits no green cover at
    the cap, or if an extension cannot reach t while flanked.
    """
    if s_min is None:
        s_min = default_s_min(r)
    _check_range(p, r)
    if t >= r - TOL:
        raise PreconditionError(f"rgb partition needs t < r, got t={t}, r={r}")
    blocks = []
    floor = s_min
    for j in _junctions(p, s_min, r):
        if blocks and j <= blocks[-1][-1][1] + TOL:
            if any(u + TOL < j < v - TOL for u, v in blocks[-1]):
                continue
            raise ConstructionError(
                f"junction at {j:.6g} falls on a green piece boundary of the previous block"
            )
        pieces = green_block_at(p, j, t, lo=floor, hi=r)
        if not pieces or not any(u + TOL < j < v - TOL for u, v in pieces):
            raise ConstructionError(
                f"red-to-blue junction at {j:.6g} admits no green cover with cap {t:.6g}"
            )
        blocks.append(pieces)
        floor = pieces[-1][1]
    out = []
    cursor = s_min
    for pieces in blocks:
        if pieces[0][0] > cursor + TOL:
            out.extend(_red_blue_runs(p, cursor, pieces[0][0], t))
        out.extend(colored(p, u, v, GREEN) for u, v in pieces)
        cursor = pieces[-1][1]
    if r > cursor + TOL:
        out.extend(_red_blue_runs(p, cursor, r, t))
    part = Partition(tuple(out), "rgb", {"r": r, "t": t, "s_min": s_min})
    for _, _, total, _, _ in sequence_green_blocks(part):
        if total < t - 1e-6:
            raise ConstructionError(
                f"flanked green block of total length {total:.6g} < t={t:.6g}"
            )
    return part


def count_rgb_sequences(part: Partition) -> int:
    """Number of consecutive red, green-block, blue runs."""
    if part.kind != "rgb":
        raise PreconditionError(f"expected an rgb partition, got kind={part.kind!r}")
    return len(sequence_green_blocks(part))


def sequence_green_blocks(part: Partition):
    """(start_idx, end_idx, green_total, block_lo, block_hi) per red-green-blue run."""
    ivs = part.intervals
    res = []
    i = 0
    while i < len(ivs):
        if ivs[i].color != RED:
            i += 1
            continue
        j = i + 1
        while j < len(ivs) and ivs[j].color == GREEN:
            j += 1
        if j > i + 1 and j < len(ivs) and ivs[j].color == BLUE:
            total = sum(iv.length for iv in ivs[i + 1:j])
            res.append((i, j, total, ivs[i + 1].a, ivs[j - 1].b))
            i = j
        else:
            i = j if j > i + 1 else i + 1
    return res


# -- all-yellow partitions -------------------------------------------------------

def all_yellow_partition(p: Profile, r: float, d: float, D: float, eps: float,
                         s_min: float | None = None) -> Partition:
    """Cover of [eps*r/2, r] by at-most-doubling yellow intervals.

    Preconditions: the envelope (d - eps/4, D + eps/4) must hold from eps*r/4
    on, and the spread must satisfy D + eps/4 < 2*(d - eps/4) - 1, which is
    exactly what forces the slope-1 line sent from (cur/2, f(cur/2)) to
    re-cross the profile strictly below cur.  The remaining head
    [s_min, eps*r/2] is covered by good-partition pieces.
    """
    if s_min is None:
        s_min = default_s_min(r)
    _check_range(p, r)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if not D + eps / 4.0 < 2.0 * (d - eps / 4.0) - 1.0 - TOL:
        raise PreconditionError(
            f"upper rate too far from lower rate: need D + eps/4 < 2*(d - eps/4) - 1, "
            f"got d={d}, D={D}, eps={eps}"
        )
    chk = envelope_check(p, Envelope(max(d - eps / 4.0, 0.0), D + eps / 4.0, eps * r / 4.0))
    if not chk.ok:
        raise EnvelopeViolation(
            f"profile leaves the ({d - eps / 4.0:.6g}, {D + eps / 4.0:.6g}) envelope "
            f"at s={chk.first_violation:.6g} ({chk.side} side)",
            at=chk.first_violation,
        )
    head_top = eps * r / 2.0
    main = []
    cur = r
    while cur > head_top + TOL:
        half = cur / 2.0
        nxt = last_line_crossing(p, half, cur, p.eval(half) - half, 1.0)
        if nxt is None:
            nxt = half
        if nxt >= cur - TOL:
            raise ConstructionError(f"slope-1 crossing failed to advance below {cur}")
        main.append(colored(p, nxt, cur, YELLOW))
        cur = nxt
    main.reverse()
    main = _merge_adjacent(
        p, main,
        mergeable=lambda u, v: v.b <= 2.0 * u.a + TOL,
        merged_color=lambda u, v: YELLOW,
    )
    head = _good_pieces(p, s_min, cur) if cur > s_min + TOL else []
    head = _merge_adjacent(
        p, head,
        mergeable=lambda u, v: u.color == v.color and v.b <= 2.0 * u.a + TOL,
        merged_color=lambda u, v: u.color,
    )
    return Partition(tuple(head + main), "all_yellow",
                     {"r": r, "d": d, "D": D, "eps": eps, "s_min": s_min,
                      "head_top": cur})


# -- the general yellow/teal partition --------------------------------------------

def general_partition(p: Profile, r: float, d: float, D: float,
                      s_min: float | None = None) -> Partition:
    """Alternating yellow blocks and teal steps covering [s_min, r].

    Yellow blocks are maximal unions of at-most-doubling yellow pieces (the
    greedy reach is exactly the minimal attainable left endpoint).  When no
    yellow piece exists, the next left endpoint is the larger of two
    right-to-left line solves below cur:

    * the largest t with f(t) = f(cur) - (d/D)*cur + ((d+1-D)/D)*t, and
    * the largest t with f(t) = f(cur) - (cur - t) (the green crossing).

    Both land at or below cur/2, so teal steps always at least halve; under
    the (d, D) envelope the chosen endpoint also stays above
    d(D-1)/(D^2+D-d-1)*cur whenever it stays above the floor.
    """
    if s_min is None:
        s_min = default_s_min(r)
    _check_range(p, r)
    if not (1.0 - TOL <= d <= D + TOL and D <= 2.0 + TOL):
        raise PreconditionError(f"need 1 <= d <= D <= 2, got d={d}, D={D}")
    chk = envelope_check(p, Envelope(d, D, s_min))
    if not chk.ok:
        raise EnvelopeViolation(
            f"profile leaves the ({d}, {D}) envelope at s={chk.first_violation:.6g} "
            f"({chk.side} side)",
            at=chk.first_violation,
        )
    desc = []
    teal_steps = []
    cur = r
    while cur > s_min + TOL:
        reach, ypieces = yellow_reach(p, cur, s_min)
        if reach < cur - TOL:
            desc.extend(reversed([colored(p, a, b, YELLOW) for a, b in ypieces]))
            cur = reach
            continue
        c0 = p.eval(cur) - (d / D) * cur
        c1 = (d + 1.0 - D) / D
        t1 = last_line_crossing(p, s_min, cur, c0, c1)
        t2 = last_line_crossing(p, s_min, cur, p.eval(cur) - cur, 1.0)
        cands = [x for x in (t1, t2) if x is not None]
        if cands and max(cands) > cur / 2.0 + TOL:
            raise ConstructionError(
                f"teal step from {cur:.6g} landed above the halving bound"
            )
        nxt = max(cands) if cands else s_min
        nxt = max(nxt, s_min)
        desc.append(colored(p, nxt, cur, TEAL))
        teal_steps.append((nxt, cur))
        cur = nxt
    intervals = tuple(reversed(desc))
    return Partition(intervals, "general",
                     {"r": r, "d": d, "D": D, "s_min": s_min,
                      "teal_steps": tuple(teal_steps)})


# -- the regular-pin partition -----------------------------------------------------

def regular_pin_partition(p: Profile, r: float, d_y: float, eps: float,
                          s_min: float | None = None) -> Partition:
    """Yellow blocks and green intervals covering [s_min, r].

    Where no at-most-doubling yellow piece exists, the step retreats to the
    smallest precision whose interval up to cur is green (the dip boundary of
    the surplus level), so no strictly-teal interval is ever used.  Needs
    (d_y - eps)*s <= f(s) <= (2 + eps)*s on the working window.
    """
    if s_min is None:
        s_min = default_s_min(r)
    _check_range(p, r)
    if not (1.0 + TOL < d_y <= 2.0 + TOL):
        raise PreconditionError(f"need 1 < d_y <= 2, got {d_y}")
    if not (0.0 < eps < (d_y - 1.0) / 2.0 + TOL):
        raise PreconditionError(f"need 0 < eps < (d_y - 1)/2, got eps={eps}")
    window_lo = max((d_y - 1.0) / 8.0 * s_min, TOL * r)
    for s, f_lo, f_hi in _window_scan(p, window_lo, r):
        if f_lo < (d_y - eps) * s - TOL or f_hi > (2.0 + eps) * s + TOL:
            raise EnvelopeViolation(
                f"profile leaves the ({d_y - eps:.6g}, {2.0 + eps:.6g}) window at s={s:.6g}",
                at=s,
            )
    desc = []
    green_steps = []
    cur = r
    while cur > s_min + TOL:
        reach, ypieces = yellow_reach(p, cur, s_min)
        if reach < cur - TOL:
            desc.extend(reversed([colored(p, a, b, YELLOW) for a, b in ypieces]))
            cur = reach
            continue
        anchor = leftmost_green_anchor(p, cur, s_min)
        if anchor is None:
            if cur <= 2.0 * s_min + TOL:
                desc.extend(reversed(_good_pieces(p, s_min, cur)))
                cur = s_min
                break
            raise EnvelopeViolation(
                f"no green crossing below {cur:.6g}; the envelope window must be violated",
                at=cur,
            )
        desc.append(colored(p, anchor, cur, GREEN))
        green_steps.append((anchor, cur))
        cur = anchor
    pieces = list(reversed(desc))
    merged = _merge_adjacent(
        p, pieces,
        mergeable=lambda u, v: {u.color, v.color} <= {YELLOW, GREEN} and v.b <= 2.0 * u.a + TOL,
        merged_color=lambda u, v: GREEN if u.color == v.color == GREEN else YELLOW,
    )
    return Partition(tuple(merged), "regular_pin",
                     {"r": r, "d_y": d_y, "eps": eps, "s_min": s_min,
                      "green_steps": tuple(green_steps)})


def _window_scan(p: Profile, lo: float, hi: float):
    pts = [lo] + [s for s in p._ss if lo + TOL < s <= hi] + [hi]
    for s in pts:
        if s <= 0:
            continue
        v = p.eval(min(s, p.domain_end))
        yield s, v, v


# -- validation ---------------------------------------------------------------------

def partition_problems(p: Profile, part: Partition) -> list:
    """Re-check structural invariants and interval colors; empty list when clean."""
    problems = []
    ivs = part.intervals
    if not ivs:
        return ["empty partition"]
    cap = part.params.get("t")
    for i, iv in enumerate(ivs):
        if iv.b - iv.a <= TOL:
            problems.append(f"degenerate interval {i}")
        if abs(iv.growth - p.growth(iv.a, iv.b)) > 1e-6:
            problems.append(f"growth mismatch at interval {i}")
        if not check_color(p, iv, cap if part.kind == "rgb" else None):
            problems.append(f"color {iv.color} fails its predicate at interval {i}")
        if i + 1 < len(ivs) and abs(iv.b - ivs[i + 1].a) > 1e-9:
            problems.append(f"gap between intervals {i} and {i + 1}")
    checker = {
        "good": _problems_good,
        "admissible": _problems_admissible,
        "rgb": _problems_rgb,
        "general": _problems_general,
        "all_yellow": _problems_all_yellow,
        "regular_pin": _problems_regular_pin,
    }.get(part.kind)
    if checker is None:
        problems.append(f"unknown kind {part.kind!r}")
    else:
        problems.extend(checker(p, part))
    return problems


def _problems_good(p, part):
    out = []
    ivs = part.intervals
    for i, iv in enumerate(ivs):
        if iv.color not in (YELLOW, TEAL):
            out.append(f"interval {i} is {iv.color}, expected yellow or teal")
        if iv.b > 2.0 * iv.a + 1e-9:
            out.append(f"interval {i} more than doubles")
    for i in range(len(ivs) - 1):
        if ivs[i + 1].b <= 2.0 * ivs[i].a + 1e-9:
            out.append(f"intervals {i}, {i + 1} do not jointly more than double")
    return out


def _problems_admissible(p, part):
    out = []
    t, M = part.params["t"], part.params["M"]
    if len(part.intervals) > M:
        out.append(f"{len(part.intervals)} intervals exceed M={M}")
    for i, iv in enumerate(part.intervals):
        if iv.color not in (YELLOW, TEAL):
            out.append(f"interval {i} is {iv.color}")
        if iv.length > t + 1e-9:
            out.append(f"interval {i} longer than t")
    return out


def _problems_rgb(p, part):
    out = []
    t = part.params["t"]
    for i, iv in enumerate(part.intervals):
        if iv.color not in (RED, GREEN, BLUE):
            out.append(f"interval {i} is {iv.color}")
        if iv.color == GREEN and iv.length > t + 1e-9:
            out.append(f"green interval {i} exceeds the cap")
    for _, _, total, _, _ in sequence_green_blocks(part):
        if total < t - 1e-6:
            out.append(f"flanked green block shorter than t: {total}")
    greens = [iv for iv in part.intervals if iv.color == GREEN]
    for j in _junctions(p, part.lo, part.hi):
        if not any(g.a + TOL < j < g.b - TOL for g in greens):
            out.append(f"junction at {j} not interior to a green interval")
    return out


def _problems_general(p, part):
    out = []
    s_min = part.params["s_min"]
    d, D = part.params["d"], part.params["D"]
    ratio = d * (2.0 - D) / (2.0 + d * (2.0 - D))
    for a, b in part.params["teal_steps"]:
        if b > 2.0 * s_min + TOL and a > b / 2.0 + 1e-9:
            out.append(f"teal step [{a}, {b}] does not halve")
        if a >= s_min - TOL and a < ratio * b - 1e-6 * b:
            out.append(f"teal step [{a}, {b}] left endpoint below {ratio:.6g}*b")
    for i, iv in enumerate(part.intervals):
        if iv.color == YELLOW and iv.b > 2.0 * iv.a + 1e-9:
            out.append(f"yellow piece {i} more than doubles")
        if iv.color not in (YELLOW, TEAL):
            out.append(f"interval {i} is {iv.color}")
    return out


def _problems_all_yellow(p, part):
    out = []
    head_top = part.params["head_top"]
    for i, iv in enumerate(part.intervals):
        if iv.a >= head_top - TOL:
            if iv.color != YELLOW:
                out.append(f"interval {i} above the head is {iv.color}")
            if iv.b > 2.0 * iv.a + 1e-9:
                out.append(f"interval {i} more than doubles")
    covered_from = part.params["eps"] * part.params["r"] / 2.0
    if part.lo > covered_from + TOL or part.hi < part.params["r"] - TOL:
        out.append("partition does not cover the required range")
    return out


def _problems_regular_pin(p, part):
    out = []
    ivs = part.intervals
    s_min = part.params["s_min"]
    for i, iv in enumerate(ivs):
        if iv.color == TEAL and iv.a > 2.0 * s_min + TOL:
            out.append(f"strictly-teal interval {i} outside the head")
    bounds = [ivs[0].a] + [iv.b for iv in ivs]
    for i in range(len(bounds) - 2):
        if bounds[i + 2] <= 2.0 * bounds[i] + 1e-9 and bounds[i] > s_min + TOL:
            out.append(f"boundaries {i}, {i + 2} not more than doubling")
    d_y, eps = part.params["d_y"], part.params["eps"]
    lower = (d_y - 1.0 - eps) / (3.0 + eps)
    for a, b in part.params["green_steps"]:
        if a >= s_min - TOL and a < lower * b - 1e-6:
            out.append(f"green step [{a}, {b}] left endpoint below {lower:.6g}*b")
    return out
