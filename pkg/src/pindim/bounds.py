"""Closed-form bounds and the partition-based bound assemblers.

Closed forms take raw rates (d, D) and evaluate with zero slack; assemblers
take a profile, build the matching partition, and produce a BoundReport whose
ledger rows sum exactly to the assembled value.  Every report carries the
closed-form value it is compared against and a soundness flag at the module
slack (relative, default 1e-3).

The distance closed form is evaluated with the denominator
``2*D^2 + (2 - 4*d)*D + d^2 + d - 2``; this is the form the explicit
L-equalization reproduces (see :func:`minimize_over_L`, which is the internal
consistency check), and every report carries a note saying so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .classify import GREEN, TEAL, YELLOW, is_teal
from .errors import ConstructionError, EnvelopeViolation, PreconditionError
from .partition import (
    Partition,
    admissible_partition,
    all_yellow_partition,
    default_s_min,
    general_partition,
    regular_pin_partition,
    rgb_partition,
    sequence_green_blocks,
)
from .profile import TOL, Envelope, Profile, envelope_check, measured_envelope
from .classify import yellow_reach

SQRT5 = math.sqrt(5.0)
DEFAULT_EPS = 1e-3

DENOMINATOR_NOTE = (
    "distance closed form evaluated with the equalization-consistent denominator "
    "2*D^2 + (2 - 4*d)*D + d^2 + d - 2"
)


@dataclass(frozen=True)
class DimParams:
    """Dimension rates for the two sides of a pinned pair.

    The bounds only depend on d = min of the lower rates and D = max of the
    upper rates; eps is the relative slack granted to the assemblers.
    """

    d_x: float
    d_y: float
    D_x: float
    D_y: float
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not (1.0 < self.d <= self.D <= 2.0 + TOL):
            raise PreconditionError(
                f"need 1 < min(d_x, d_y) <= max(D_x, D_y) <= 2, got d={self.d}, D={self.D}"
            )
        if self.eps < 0:
            raise PreconditionError("eps must be non-negative")

    @property
    def d(self) -> float:
        return min(self.d_x, self.d_y)

    @property
    def D(self) -> float:
        return max(self.D_x, self.D_y)

    @classmethod
    def collapsed(cls, d: float, D: float, eps: float = DEFAULT_EPS) -> "DimParams":
        return cls(d, d, D, D, eps)


@dataclass(frozen=True)
class LedgerRow:
    rule: str
    amount: float
    a: float | None = None
    b: float | None = None


@dataclass(frozen=True)
class BoundReport:
    r: float
    assembled_value: float
    closed_form_value: float
    ledger: tuple
    L: float
    B: float
    S: int | None
    case_taken: str
    sound: bool
    eps: float
    transfer_total: float
    partition: Partition | None = None
    notes: tuple = ()

    def ledger_sum(self) -> float:
        return sum(row.amount for row in self.ledger)


# -- closed forms ---------------------------------------------------------------

def _check_rates(d: float, D: float, cap: bool = True) -> None:
    if not (1.0 - TOL <= d <= D + TOL):
        raise PreconditionError(f"need 1 <= d <= D, got d={d}, D={D}")
    if cap and D > 2.0 + TOL:
        raise PreconditionError(f"need D <= 2, got D={D}")


def teal_growth_rate(d: float, D: float) -> float:
    """min{1, d(2D - d - 1) / (D^2 + D - D*d - 1)}.

    The denominator equals (D-1)(D+1) - D(d-1) >= D - 1 > 0 for every
    1 <= d <= D, so the rate is well defined on the whole valid range (and
    beyond D = 2, which the threshold solver exploits).
    """
    _check_rates(d, D, cap=False)
    den = D * D + D - D * d - 1.0
    if den <= TOL:
        raise PreconditionError(f"degenerate rate denominator for d={d}, D={D}")
    return min(1.0, d * (2.0 * D - d - 1.0) / den)


def full_dim_threshold(d: float) -> float:
    """The unique D at which the certified teal growth rate drops below 1.

    Equals ((3 + sqrt5)*d - 1 - sqrt5) / 2: the larger root of
    D^2 + (1 - 3d)D + d^2 + d - 1 = 0, i.e. of rate == 1.
    """
    if d < 1.0 - TOL:
        raise PreconditionError(f"need d >= 1, got {d}")
    return ((3.0 + SQRT5) * d - 1.0 - SQRT5) / 2.0


def hausdorff_bound(d: float, D: float) -> float:
    """Lower bound on the distance growth rate: 1 below the full-dimension
    threshold, else d*(1 - (D-1)(D-d) / (2D^2 + (2-4d)D + d^2 + d - 2))."""
    _check_rates(d, D)
    if D <= full_dim_threshold(d) + TOL:
        return 1.0
    num = (D - 1.0) * (D - d)
    den = 2.0 * D * D + (2.0 - 4.0 * d) * D + d * d + d - 2.0
    if den <= 0:
        raise ConstructionError(f"unexpected non-positive denominator at d={d}, D={D}")
    return d * (1.0 - num / den)


def hausdorff_bound_D2(d: float) -> float:
    """The D = 2 specialization: min{1, d(d - 4)/(d - 5)}."""
    if not (1.0 - TOL <= d <= 2.0 + TOL):
        raise PreconditionError(f"need 1 <= d <= 2, got {d}")
    return min(1.0, d * (d - 4.0) / (d - 5.0))


def l_tradeoff(d: float, D: float, L: float, r: float) -> float:
    """max{L + rate*(r - L), d*r - L} with rate = teal_growth_rate(d, D)."""
    _check_rates(d, D)
    if not (-TOL <= L <= r + TOL):
        raise PreconditionError(f"need 0 <= L <= r, got L={L}, r={r}")
    rho = teal_growth_rate(d, D)
    return max(L + rho * (r - L), d * r - L)


class LMinimum(NamedTuple):
    l_frac: float   # minimizing yellow mass, as a fraction of r
    value: float    # bound at the minimum, as a fraction of r
    interior: bool  # False when the teal rate is already 1 (no interior minimum)


def minimize_over_L(d: float, D: float) -> LMinimum:
    """Equalize the two branches of the L trade-off.

    The first branch increases and the second decreases in L, so the minimum
    over L sits where they meet: L*/r = (d - rate)/(2 - rate).  The value
    there reproduces hausdorff_bound(d, D) exactly; this identity is the
    consistency check between the partition ledger and the closed form.
    """
    rho = teal_growth_rate(d, D)
    if rho >= 1.0 - 1e-15:
        return LMinimum(1.0, 1.0, False)
    l_frac = (d - rho) / (2.0 - rho)
    return LMinimum(l_frac, d - l_frac, True)


def projection_closed_form(d: float, D: float, t: float, r: float, K: float) -> float:
    """max{(D-1)/D * (d*r - t) + K - d*r, K - r}, guarded by the t floor."""
    _check_rates(d, D)
    floor = d * (2.0 - D) / 2.0 * r
    if t < floor - TOL:
        raise PreconditionError(
            f"(P2) t >= d(2-D)/2*r violated: t={t} < {floor}"
        )
    return max((D - 1.0) / D * (d * r - t) + K - d * r, K - r)


def packing_closed_form(D: float) -> float:
    """(3D^2 - D + 6) / (8D); minimized over [1, 2] at D = sqrt2."""
    if not (1.0 - TOL <= D <= 2.0 + TOL):
        raise PreconditionError(f"need 1 <= D <= 2, got {D}")
    return (3.0 * D * D - D + 6.0) / (8.0 * D)


# -- assemblers -------------------------------------------------------------------

def _require_envelope(p: Profile, d: float, D: float, s_min: float) -> None:
    chk = envelope_check(p, Envelope(d, D, s_min))
    if not chk.ok:
        raise EnvelopeViolation(
            f"profile leaves the ({d:.6g}, {D:.6g}) envelope at s={chk.first_violation:.6g} "
            f"({chk.side} side)",
            at=chk.first_violation,
        )


def _transfer_rows(p: Profile, part: Partition, s_min: float):
    """Head credit plus the per-interval transfers: length on yellow pieces,
    measured growth on teal and green ones."""
    rows = [LedgerRow("head-credit", s_min, 0.0, s_min)]
    for iv in part.intervals:
        if iv.color == YELLOW:
            rows.append(LedgerRow("yellow-length", iv.length, iv.a, iv.b))
        elif iv.color == GREEN:
            rows.append(LedgerRow("green-growth", iv.growth, iv.a, iv.b))
        else:
            rows.append(LedgerRow("teal-growth", iv.growth, iv.a, iv.b))
    return rows


def _bad_mass(p: Profile, part: Partition) -> float:
    return sum(iv.length for iv in part.intervals if not is_teal(p, iv.a, iv.b))


def _assemble_distance(p_y: Profile, r: float, d: float, D: float, eps: float,
                       s_min: float) -> BoundReport:
    """Rate-based distance assembly; tolerates the d = 1 boundary, which the
    packing chain and the search evaluate the machinery at."""
    part = general_partition(p_y, r, d, D, s_min=s_min)
    rows = _transfer_rows(p_y, part, s_min)
    transfer_total = sum(row.amount for row in rows)
    L = part.total_length(YELLOW)
    alt = p_y.eval(r) - L
    if alt > transfer_total:
        rows.append(LedgerRow("complexity-minus-yellow-slack", alt - transfer_total))
        assembled, case = alt, "complexity-minus-yellow"
    else:
        assembled, case = transfer_total, "transfer-sum"
    closed = hausdorff_bound(d, D) * r
    return BoundReport(
        r=r, assembled_value=assembled, closed_form_value=closed,
        ledger=tuple(rows), L=L, B=_bad_mass(p_y, part), S=None,
        case_taken=case, sound=assembled >= closed - eps * r,
        eps=eps, transfer_total=transfer_total, partition=part,
        notes=(DENOMINATOR_NOTE,),
    )


def assemble_distance_bound(p_y: Profile, r: float, params: DimParams,
                            s_min: float | None = None) -> BoundReport:
    """Distance-growth lower bound certified by the general partition.

    The ledger transfers interval length on yellow pieces and measured growth
    on teal steps; the assembled value is the larger of the ledger total and
    the dual branch f(r) - L, both measured rather than formulaic.
    """
    if s_min is None:
        s_min = default_s_min(r)
    return _assemble_distance(p_y, r, params.d, params.D, params.eps, s_min)


def assemble_all_yellow_distance_bound(p_y: Profile, r: float, d: float, D: float,
                                       eps: float, s_min: float | None = None) -> BoundReport:
    """Full-rate bound via the all-yellow construction; assembled >= (1 - eps)*r."""
    if s_min is None:
        s_min = default_s_min(r)
    part = all_yellow_partition(p_y, r, d, D, eps, s_min=s_min)
    rows = _transfer_rows(p_y, part, s_min)
    assembled = sum(row.amount for row in rows)
    closed = (1.0 - eps) * r
    return BoundReport(
        r=r, assembled_value=assembled, closed_form_value=closed,
        ledger=tuple(rows), L=part.total_length(YELLOW), B=_bad_mass(p_y, part),
        S=None, case_taken="all-yellow", sound=assembled >= closed - TOL,
        eps=eps, transfer_total=assembled, partition=part,
    )


def assemble_projection_bound(p_x: Profile, r: float, t: float, d: float, D: float,
                              s_min: float | None = None,
                              eps: float = DEFAULT_EPS) -> BoundReport:
    """Projection-complexity upper bound from the red/green/blue structure.

    Builds the rgb partition, counts its red-green-blue sequences S, and
    applies the matching case formula with the bad (non-teal) mass B measured
    from admissible partitions of everything outside the sequences' green
    blocks.  The result is checked against the closed form at slack eps*r.
    """
    if s_min is None:
        s_min = default_s_min(r)
    _check_rates(d, D)
    floor = d * (2.0 - D) / 2.0 * r
    if t < floor - TOL:
        raise PreconditionError(f"(P2) t >= d(2-D)/2*r violated: t={t} < {floor}")
    _require_envelope(p_x, d, D, s_min)
    part = rgb_partition(p_x, r, t, s_min=s_min)
    blocks = sequence_green_blocks(part)
    S = len(blocks)
    K = p_x.eval(r)

    def bad_outside(segments) -> float:
        total = 0.0
        for u, v in segments:
            if v - u <= max(TOL, 1e-9 * r):
                continue
            M = int(2.0 * (v - u) / t) + 4
            total += _bad_mass(p_x, admissible_partition(p_x, u, v, t, M))
        return total

    if S == 0:
        B = 0.0
        assembled = K - r
        rows = [LedgerRow("complexity-at-r", K), LedgerRow("minus-unit-rate", -r)]
        case = "s0"
    elif S == 1:
        _, _, _, gb_a, gb_b = blocks[0]
        B = bad_outside([(s_min, gb_a), (gb_b, r)])
        arm_scaled = (D - 1.0) * B + K - d * r
        arm_green = K - t - B
        if arm_scaled <= arm_green:
            assembled = arm_scaled
            rows = [LedgerRow("bad-mass-scaled", (D - 1.0) * B),
                    LedgerRow("complexity-at-r", K),
                    LedgerRow("minus-d-r", -d * r)]
            case = "s1-bad-scaled"
        else:
            assembled = arm_green
            rows = [LedgerRow("complexity-at-r", K),
                    LedgerRow("minus-green-floor", -t),
                    LedgerRow("minus-bad-mass", -B)]
            case = "s1-complexity-minus-green"
    else:
        gaps = [(s_min, blocks[0][3])]
        for i in range(S - 1):
            gaps.append((blocks[i][4], blocks[i + 1][3]))
        gaps.append((blocks[-1][4], r))
        B = bad_outside(gaps)
        arm_bad = B
        arm_comp = K - B - 2.0 * t
        if arm_bad <= arm_comp:
            assembled = arm_bad
            rows = [LedgerRow("bad-mass", B)]
            case = "s2-bad-mass"
        else:
            assembled = arm_comp
            rows = [LedgerRow("complexity-at-r", K),
                    LedgerRow("minus-bad-mass", -B),
                    LedgerRow("minus-twice-green-floor", -2.0 * t)]
            case = "s2-complexity-minus-bad"
    closed = projection_closed_form(d, D, t, r, K)
    return BoundReport(
        r=r, assembled_value=assembled, closed_form_value=closed,
        ledger=tuple(rows), L=part.total_length(GREEN), B=B, S=S,
        case_taken=case, sound=assembled <= closed + eps * r,
        eps=eps, transfer_total=assembled, partition=part,
    )


@dataclass(frozen=True)
class AlternateProjection:
    value: float
    feasible_eps: float
    C: float


def alternate_projection_bound(p_x: Profile, r: float, t: float, d_x: float,
                               eps_x: float, s_min: float | None = None) -> AlternateProjection:
    """Near-regular pins compute their projections at full rate: f(r) - r.

    Requires the pin's measured envelope spread to stay below eps_x, and
    eps_x itself to satisfy the regularity feasibility inequality
    -d_x/C + 2e - e/C - 1/C < 0, whose equality point is e = (d_x+1)/(2C-1)
    for C = r/t.
    """
    if s_min is None:
        s_min = default_s_min(r)
    if not (TOL < t <= r + TOL):
        raise PreconditionError(f"need 0 < t <= r, got t={t}")
    if d_x <= 1.0:
        raise PreconditionError(f"need d_x > 1, got {d_x}")
    C = r / t
    feasible = (d_x + 1.0) / (2.0 * C - 1.0)
    if eps_x > feasible + TOL:
        raise PreconditionError(
            f"eps_x={eps_x:.6g} violates the regularity feasibility bound "
            f"(d_x + 1)/(2C - 1) = {feasible:.6g} at C={C:.6g}"
        )
    spread = measured_envelope(p_x, s_min).spread
    if spread >= eps_x - TOL:
        raise PreconditionError(
            f"measured envelope spread {spread:.6g} is not below eps_x={eps_x:.6g}"
        )
    return AlternateProjection(value=p_x.eval(r) - r, feasible_eps=feasible, C=C)


def regular_pin_distance_bound(p_y: Profile, r: float, d_x: float, d_y: float,
                               eps_x: float, eps: float = DEFAULT_EPS,
                               s_min: float | None = None) -> BoundReport:
    """Distance bound for near-regular pins: long greens make it (1 - eps)*r.

    eps_x is the pin's regularity spread; it must be feasible for the window
    constant C = 16/(d_y - 1) used to invoke the full-rate projection on the
    partition's green steps.
    """
    if s_min is None:
        s_min = default_s_min(r)
    if d_y <= 1.0:
        raise PreconditionError(f"need d_y > 1, got {d_y}")
    C = 16.0 / (d_y - 1.0)
    feasible = (d_x + 1.0) / (2.0 * C - 1.0)
    if eps_x > feasible + TOL:
        raise PreconditionError(
            f"eps_x={eps_x:.6g} exceeds the feasible regularity slack "
            f"{feasible:.6g} at C={C:.6g}"
        )
    part_eps = min(max(eps, 1e-6), (d_y - 1.0) / 2.0 - TOL)
    part = regular_pin_partition(p_y, r, d_y, part_eps, s_min=s_min)
    rows = _transfer_rows(p_y, part, s_min)
    assembled = sum(row.amount for row in rows)
    closed = (1.0 - eps) * r
    return BoundReport(
        r=r, assembled_value=assembled, closed_form_value=closed,
        ledger=tuple(rows), L=part.total_length(YELLOW), B=_bad_mass(p_y, part),
        S=None, case_taken="regular-pin", sound=assembled >= closed - TOL,
        eps=eps, transfer_total=assembled, partition=part,
        notes=(f"feasible regularity slack {feasible:.9g} at C={C:.6g}",),
    )


def assemble_packing_bound(p_y: Profile, d: float, D: float,
                           eps: float = DEFAULT_EPS,
                           s_min: float | None = None) -> BoundReport:
    """Packing-side bound anchored at a maximal precision.

    A maximal precision is a breakpoint r_m with f(r_m) >= (D - eps)*r_m and
    f strictly increasing into it.  If an all-yellow stretch reaches
    (4/3)*r_m, the bound is reported at its end r_2 as the distance bound at
    r_m plus the yellow extension; otherwise the chain reports at r_2 (the
    longest all-yellow end over r_m) from a base at max(r_2/2, reach).
    """
    end = p_y.domain_end
    if s_min is None:
        s_min = default_s_min(end)
    _check_rates(d, D)
    cands = []
    for i in range(1, len(p_y.breakpoints)):
        s, v = p_y.breakpoints[i]
        if s < 2.0 * s_min or s > end + TOL:
            continue
        if v >= (D - eps) * s - TOL and p_y.slope(i - 1) > TOL:
            cands.append(s)
    if not cands:
        raise ConstructionError(
            f"no maximal precision with f(r) >= (D - eps)*r = ({D - eps:.6g})*r found; "
            "enlarge the profile domain or lower D"
        )
    best = None
    for r_m in cands:
        target = (4.0 / 3.0) * r_m
        r2 = _largest_all_yellow_end(p_y, r_m, target, end, s_min) if target <= end + TOL else None
        if r2 is not None:
            base = _assemble_distance(p_y, r_m, d, D, eps, s_min)
            assembled = base.assembled_value + (r2 - r_m)
            case = "packing-long-yellow"
            mid = r_m
        else:
            r2 = _largest_all_yellow_end(p_y, r_m, r_m, min(target, end), s_min) or r_m
            reach, _ = yellow_reach(p_y, r2, s_min)
            mid = max(r2 / 2.0, reach, s_min * 2.0)
            mid = min(mid, r2)
            base = _assemble_distance(p_y, mid, d, D, eps, s_min)
            assembled = base.assembled_value + (r2 - mid)
            case = "packing-half-chain"
        ratio = assembled / r2
        if best is None or ratio > best[0] + TOL:
            best = (ratio, r2, assembled, base, mid, case, r_m)
    _, r2, assembled, base, mid, case, r_m = best
    rows = (LedgerRow("distance-bound-at-base", base.assembled_value, None, base.r),
            LedgerRow("yellow-extension", r2 - base.r, base.r, r2))
    closed = packing_closed_form(D) * r2
    return BoundReport(
        r=r2, assembled_value=assembled, closed_form_value=closed,
        ledger=rows, L=base.L, B=base.B, S=None,
        case_taken=case, sound=assembled >= closed - eps * r2,
        eps=eps, transfer_total=assembled, partition=base.partition,
        notes=(f"anchored at maximal precision {r_m:.6g}",),
    )


def _largest_all_yellow_end(p: Profile, r_m: float, lo: float, hi: float,
                            s_min: float):
    """Largest candidate end in [lo, hi] whose at-most-doubling yellow reach
    falls at or below r_m; the valid set is downward closed above r_m."""
    cands = sorted({hi, lo} | {s for s, _ in p.breakpoints if lo - TOL <= s <= hi + TOL},
                   reverse=True)
    for c in cands:
        if c < lo - TOL or c < r_m - TOL:
            continue
        reach, _ = yellow_reach(p, c, s_min)
        if reach <= r_m + TOL:
            return c
    return None
