"""Worst-case search over envelope-valid grid profiles, and the DP oracle.

Profiles are discretized as one slope per grid cell, drawn from a small
alphabet; the envelope filter runs incrementally on node values while
enumerating.  The search minimizes a bound objective over the valid profiles
(exhaustively, or by a deterministic beam over prefixes) and reports the gap
to the matching closed form.  A negative gap beyond tolerance would mean a
certified counterexample and is treated downstream as a build-stopping
finding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bounds import (
    _assemble_distance,
    assemble_packing_bound,
    assemble_projection_bound,
    hausdorff_bound,
    packing_closed_form,
)
from .classify import is_teal, is_yellow
from .errors import BudgetExceededError, ConstructionError, PreconditionError
from .partition import default_s_min, general_partition
from .profile import TOL, Profile

DEFAULT_SLOPES = (0.0, 0.5, 1.0, 1.5, 2.0)
DEFAULT_BUDGET = 10_000_000

OBJECTIVES = ("distance_bound", "projection_bound", "packing_bound")


@dataclass(frozen=True)
class SearchConfig:
    d: float
    D: float
    r: float
    grid_n: int
    slope_levels: tuple = DEFAULT_SLOPES
    objective: str = "distance_bound"
    beam_width: int = 64
    mode: str = "exhaustive"  # "exhaustive" or "beam"
    budget: int = DEFAULT_BUDGET
    t: float | None = None    # green-length floor for the projection objective

    def __post_init__(self):
        if self.grid_n < 4:
            raise PreconditionError("grid_n must be at least 4")
        if not self.slope_levels:
            raise PreconditionError("slope level set must be non-empty")
        if any(m < -TOL or m > 2.0 + TOL for m in self.slope_levels):
            raise PreconditionError("slope levels must lie within [0, 2]")
        if not (1.0 - TOL <= self.d <= self.D <= 2.0 + TOL):
            raise PreconditionError(f"need 1 <= d <= D <= 2, got d={self.d}, D={self.D}")
        if self.objective not in OBJECTIVES:
            raise PreconditionError(f"unknown objective {self.objective!r}")
        if self.mode not in ("exhaustive", "beam"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        if self.beam_width < 1:
            raise PreconditionError("beam_width must be positive")
        object.__setattr__(self, "slope_levels",
                           tuple(sorted({float(m) for m in self.slope_levels})))


@dataclass(frozen=True)
class SearchResult:
    worst_profile: Profile
    worst_value: float
    closed_form: float
    gap: float
    visited: int
    objective: str


def _cell_values(cfg: SearchConfig, slopes) -> list:
    h = cfg.r / cfg.grid_n
    vals = [0.0]
    for m in slopes:
        vals.append(vals[-1] + m * h)
    return vals


def _node_ok(cfg: SearchConfig, k: int, f: float, tol: float) -> bool:
    s = k * (cfg.r / cfg.grid_n)
    if f < cfg.d * s - tol or f > cfg.D * s + tol:
        return False
    # remaining growth at the slope cap must still reach the lower line at r
    if f + 2.0 * (cfg.r - s) < cfg.d * cfg.r - tol:
        return False
    return True


def _to_profile(cfg: SearchConfig, slopes) -> Profile:
    h = cfg.r / cfg.grid_n
    bps = [(0.0, 0.0)]
    f = 0.0
    for k, m in enumerate(slopes):
        f += m * h
        bps.append(((k + 1) * h, f))
    return Profile(tuple(bps))


def enumerate_profiles(cfg: SearchConfig):
    """Yield the envelope-valid grid profiles, deterministically ordered.

    Exhaustive mode walks the slope tuples in lexicographic order with
    incremental envelope pruning; beam mode keeps the cfg.beam_width most
    adversarial prefixes per depth (ranked by how little certified transfer
    they admit) and yields the surviving completions.
    """
    levels = cfg.slope_levels
    if cfg.mode == "exhaustive":
        count = len(levels) ** cfg.grid_n
        if count > cfg.budget:
            raise BudgetExceededError(
                f"{len(levels)}^{cfg.grid_n} = {count} candidates exceed the budget "
                f"{cfg.budget}; use beam mode"
            )
        yield from _exhaustive(cfg, levels)
    else:
        yield from _beam(cfg, levels)


def _exhaustive(cfg: SearchConfig, levels):
    h = cfg.r / cfg.grid_n
    tol = 1e-9 * max(1.0, cfg.r)
    n = cfg.grid_n
    stack = [((), 0.0)]
    while stack:
        prefix, f = stack.pop()
        k = len(prefix)
        if k == n:
            yield _to_profile(cfg, prefix)
            continue
        # push in reverse so that smaller slopes pop first (lexicographic order)
        for m in reversed(levels):
            f2 = f + m * h
            if _node_ok(cfg, k + 1, f2, tol):
                stack.append((prefix + (m,), f2))


def _beam(cfg: SearchConfig, levels):
    h = cfg.r / cfg.grid_n
    tol = 1e-9 * max(1.0, cfg.r)
    frontier = [(0.0, (), 0.0)]  # (adversarial proxy, slopes, f)
    for k in range(cfg.grid_n):
        grown = []
        for proxy, prefix, f in frontier:
            for m in levels:
                f2 = f + m * h
                if _node_ok(cfg, k + 1, f2, tol):
                    grown.append((proxy + h * min(1.0, m), prefix + (m,), f2))
        grown.sort(key=lambda it: (it[0], it[1]))
        frontier = grown[:cfg.beam_width]
        if not frontier:
            return
    for _, prefix, _ in frontier:
        yield _to_profile(cfg, prefix)


# -- the DP transfer oracle ------------------------------------------------------

def dp_oracle(p: Profile, r: float, d: float, D: float,
              s_min: float | None = None, grid_n: int | None = None) -> float:
    """Best certified transfer total over partitions into admissible arcs.

    Arcs between nodes are either yellow and at most doubling (transfer the
    length) or teal with the left endpoint above the projection-feasibility
    ratio d(D-1)/(D^2 + D - d - 1) of the right one (transfer the growth);
    arcs resting on the partition floor are exempt from the ratio, mirroring
    the discounted head.  The node set contains the profile breakpoints, the
    halving chain under r, and the boundaries of the constructed general
    partition, so the constructed partition is one feasible DP solution and
    the oracle dominates its ledger.
    """
    if s_min is None:
        s_min = default_s_min(r)
    if grid_n is not None:
        h = r / grid_n
        for s, _ in p.breakpoints:
            if abs(s - round(s / h) * h) > 1e-6 * max(1.0, r):
                raise PreconditionError(f"breakpoint {s} is off the {grid_n}-cell grid")
    ratio = d * (D - 1.0) / (D * D + D - d - 1.0)
    part = general_partition(p, r, d, D, s_min=s_min)  # also enforces the envelope
    pts = {s_min, r}
    for iv in part.intervals:
        pts.add(iv.a)
        pts.add(iv.b)
    for s in p._ss:
        if s_min + TOL < s < r - TOL:
            pts.add(s)
    x = r / 2.0
    while x > s_min + TOL:
        pts.add(x)
        x /= 2.0
    nodes = _dedupe(sorted(pts), 1e-9 * max(1.0, r))
    n = len(nodes)
    best = [float("-inf")] * n
    best[0] = s_min  # head credit, matching the assemblers' ledger convention
    rtol = 1e-6 * max(1.0, r)
    for j in range(1, n):
        b = nodes[j]
        acc = float("-inf")
        for i in range(j):
            a = nodes[i]
            if best[i] == float("-inf"):
                continue
            if b <= 2.0 * a + TOL and is_yellow(p, a, b):
                acc = max(acc, best[i] + (b - a))
            if (a >= ratio * b - rtol or a <= s_min + TOL) and is_teal(p, a, b):
                acc = max(acc, best[i] + p.growth(a, b))
        best[j] = acc
    if best[-1] == float("-inf"):
        raise ConstructionError("no admissible arc partition found")  # cannot happen
    return best[-1]


def _dedupe(sorted_pts, tol):
    out = [sorted_pts[0]]
    for x in sorted_pts[1:]:
        if x - out[-1] > tol:
            out.append(x)
    return out


# -- the search -------------------------------------------------------------------

def _distance_value(cfg, s_min):
    closed = hausdorff_bound(cfg.d, cfg.D)

    def value(p):
        rep = _assemble_distance(p, cfg.r, cfg.d, cfg.D, 1e-3, s_min)
        return rep.assembled_value / cfg.r

    return value, closed


def _projection_value(cfg, s_min):
    t = cfg.t
    if t is None:
        t = max(cfg.d * (2.0 - cfg.D) / 2.0 * cfg.r, cfg.r / 8.0)

    def value(p):
        rep = assemble_projection_bound(p, cfg.r, t, cfg.d, cfg.D, s_min=s_min)
        return (rep.closed_form_value - rep.assembled_value) / cfg.r

    # worst_value is the minimum soundness margin; it must stay >= -tolerance
    return value, 0.0


def _packing_value(cfg, s_min):
    closed = packing_closed_form(cfg.D)

    def value(p):
        rep = assemble_packing_bound(p, cfg.d, cfg.D, s_min=s_min)
        return rep.assembled_value / rep.r

    return value, closed


def worst_case_search(cfg: SearchConfig, seeds: tuple = ()) -> SearchResult:
    """Minimize the configured objective over the enumerated profiles.

    For the distance and packing objectives the value is the assembled bound
    per unit precision and the gap compares it to the closed form; for the
    projection objective the value is the margin (closed form minus
    assembled) per unit precision, compared against zero.  Seed profiles are
    evaluated after the enumerated ones; ties keep the earlier candidate.
    """
    s_min = default_s_min(cfg.r)
    value, closed = {
        "distance_bound": _distance_value,
        "projection_bound": _projection_value,
        "packing_bound": _packing_value,
    }[cfg.objective](cfg, s_min)
    worst = None
    visited = 0
    for p in _chain(enumerate_profiles(cfg), seeds):
        visited += 1
        try:
            v = value(p)
        except ConstructionError:
            continue  # e.g. no maximal precision for the packing objective
        if worst is None or v < worst[0] - TOL:
            worst = (v, p)
    if worst is None:
        raise PreconditionError("no envelope-valid profile on this grid")
    v, p = worst
    return SearchResult(
        worst_profile=p, worst_value=v, closed_form=closed,
        gap=v - closed, visited=visited, objective=cfg.objective,
    )


def _chain(it, seeds):
    yield from it
    yield from seeds


def tightness_report(d: float, D: float, grid_n: int, r: float = 100.0,
                     objective: str = "distance_bound",
                     slope_levels: tuple = DEFAULT_SLOPES,
                     beam_width: int = 64,
                     budget: int = DEFAULT_BUDGET,
                     exhaustive_cap: int = 200_000) -> dict:
    """Run the search at grid_n/4, grid_n/2 and grid_n and report the gap trend.

    Each refinement seeds the next search with the coarser worst profile, so
    the gap sequence is non-increasing by construction; a gap that stops
    shrinking flags the closed form as possibly not tight at this (d, D).
    """
    grids = sorted({max(4, grid_n // 4), max(4, grid_n // 2), grid_n})
    gaps, values, seen = [], [], []
    seeds = ()
    for g in grids:
        mode = "exhaustive" if len(set(slope_levels)) ** g <= exhaustive_cap else "beam"
        cfg = SearchConfig(d=d, D=D, r=r, grid_n=g, slope_levels=tuple(slope_levels),
                           objective=objective, beam_width=beam_width, mode=mode,
                           budget=budget)
        res = worst_case_search(cfg, seeds=seeds)
        gaps.append(res.gap)
        values.append(res.worst_value)
        seen.append(res.visited)
        seeds = (res.worst_profile,)
    monotone = all(gaps[i + 1] <= gaps[i] + 1e-9 for i in range(len(gaps) - 1))
    return {
        "objective": objective,
        "d": d,
        "D": D,
        "grids": grids,
        "worst_values": values,
        "gaps": gaps,
        "visited": seen,
        "monotone_non_increasing": monotone,
        "gap_shrank": bool(gaps[-1] < gaps[0] - 1e-9),
    }
