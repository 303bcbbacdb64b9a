"""Piecewise-linear complexity profiles, envelopes, and adversary generators.

A profile is a non-decreasing piecewise-linear function f through (0, 0)
whose segment slopes never exceed a cap (2 by default).  It stands in for
the growth of the description complexity of a planar point as precision
increases.  Everything downstream (interval colors, partitions, bound
assembly) is exact arithmetic on the profile's breakpoints.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field

from .errors import (
    ConstructionError,
    DomainError,
    InvalidProfileError,
    PreconditionError,
    ProfileFormatError,
)

# Global absolute tolerance for coordinate/value comparisons.  All closed-form
# solves are per-segment line intersections, so this is conservative at the
# desk scales (domain ends around 1e2) the package targets.
TOL = 1e-9

DEFAULT_SLOPE_CAP = 2.0


@dataclass(frozen=True)
class Profile:
    """A non-decreasing piecewise-linear function with bounded slope.

    ``breakpoints`` is an ordered tuple of (s, v) pairs; evaluation between
    breakpoints is linear interpolation.  Instances are immutable and safe to
    share between concurrent workers.

    Construction is permissive: :meth:`validate` reports invariant violations
    instead of the constructor raising, so that malformed profiles can be
    loaded, inspected and reported on.
    """

    breakpoints: tuple
    slope_cap: float = DEFAULT_SLOPE_CAP
    _ss: tuple = field(init=False, repr=False, compare=False, default=())
    _vs: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        bps = tuple((float(s), float(v)) for s, v in self.breakpoints)
        if not bps:
            raise ConstructionError("a profile needs at least one breakpoint")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "_ss", tuple(s for s, _ in bps))
        object.__setattr__(self, "_vs", tuple(v for _, v in bps))

    @property
    def domain_end(self) -> float:
        return self._ss[-1]

    def segments(self):
        """Yield (s0, v0, s1, v1) for every linear segment."""
        ss, vs = self._ss, self._vs
        for i in range(len(ss) - 1):
            yield ss[i], vs[i], ss[i + 1], vs[i + 1]

    def slope(self, i: int) -> float:
        s0, v0, s1, v1 = self._ss[i], self._vs[i], self._ss[i + 1], self._vs[i + 1]
        return (v1 - v0) / (s1 - s0)

    def eval(self, s: float) -> float:
        """Value at precision s; exact at breakpoints, linear in between."""
        if s < -TOL or s > self.domain_end + TOL:
            raise DomainError(f"precision {s} outside [0, {self.domain_end}]")
        s = min(max(s, 0.0), self.domain_end)
        ss, vs = self._ss, self._vs
        if len(ss) == 1:
            return vs[0]
        i = bisect.bisect_right(ss, s) - 1
        i = max(0, min(i, len(ss) - 2))
        s0, s1 = ss[i], ss[i + 1]
        v0, v1 = vs[i], vs[i + 1]
        if s1 == s0:
            return v1
        return v0 + (s - s0) * (v1 - v0) / (s1 - s0)

    def growth(self, a: float, b: float) -> float:
        """Complexity gained between precisions a and b (a <= b)."""
        if a > b + TOL:
            raise PreconditionError(f"growth needs a <= b, got a={a} > b={b}")
        return self.eval(b) - self.eval(min(a, b))

    def surplus(self, s: float) -> float:
        """Complexity in excess of unit growth rate: f(s) - s."""
        return self.eval(s) - s

    def validate(self) -> list:
        """Return a list of invariant-violation messages (empty when valid)."""
        problems = []
        bps = self.breakpoints
        if abs(bps[0][0]) > TOL or abs(bps[0][1]) > TOL:
            problems.append("first breakpoint must be (0, 0)")
        if len(bps) < 2:
            problems.append("profile needs at least two breakpoints")
        for i in range(len(bps) - 1):
            (s0, v0), (s1, v1) = bps[i], bps[i + 1]
            if s1 - s0 <= TOL:
                problems.append(f"zero-width segment {i}")
                continue
            if v1 < v0 - TOL:
                problems.append(f"monotonicity violation segment {i}")
            if (v1 - v0) > self.slope_cap * (s1 - s0) + TOL:
                problems.append(f"slope violation segment {i}")
        return problems


@dataclass(frozen=True)
class Envelope:
    """Two-sided linear envelope: d_lower*s <= f(s) <= D_upper*s for s >= s_min.

    d_lower plays the role of a lower dimension bound and D_upper an upper
    one; s_min is the precision below which the envelope is not enforced.
    """

    d_lower: float
    D_upper: float
    s_min: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.d_lower <= self.D_upper + TOL):
            raise PreconditionError(
                f"envelope needs 0 <= d_lower <= D_upper, got ({self.d_lower}, {self.D_upper})"
            )
        if self.s_min < 0:
            raise PreconditionError("envelope s_min must be non-negative")

    @property
    def spread(self) -> float:
        return self.D_upper - self.d_lower


@dataclass(frozen=True)
class EnvelopeCheck:
    ok: bool
    first_violation: float | None = None
    side: str | None = None  # "lower" or "upper"


def _envelope_candidates(p: Profile, s_min: float):
    pts = [s_min]
    for s in p._ss:
        if s_min + TOL < s <= p.domain_end:
            pts.append(s)
    if pts[-1] < p.domain_end - TOL:
        pts.append(p.domain_end)
    return pts


def envelope_check(p: Profile, env: Envelope) -> EnvelopeCheck:
    """Check d_lower*s <= f(s) <= D_upper*s on [s_min, domain_end].

    By piecewise linearity it suffices to test breakpoints plus s_min; the
    reported violation point is refined to the exact envelope-line crossing
    inside the offending segment.
    """
    if env.s_min >= p.domain_end - TOL:
        return EnvelopeCheck(True)
    pts = _envelope_candidates(p, env.s_min)
    prev = None
    for s in pts:
        v = p.eval(s)
        for side, bound, lowside in (("lower", env.d_lower * s, True),
                                     ("upper", env.D_upper * s, False)):
            bad = v < bound - TOL if lowside else v > bound + TOL
            if bad:
                at = s
                if prev is not None:
                    at = _crossing(p, prev, s, env.d_lower if lowside else env.D_upper)
                return EnvelopeCheck(False, at, side)
        prev = s
    return EnvelopeCheck(True)


def _crossing(p: Profile, s0: float, s1: float, rate: float) -> float:
    """First point in [s0, s1] where f crosses the line rate*s (f linear there)."""
    e0 = p.eval(s0) - rate * s0
    e1 = p.eval(s1) - rate * s1
    if abs(e1 - e0) <= TOL:
        return s0
    x = s0 + (0.0 - e0) * (s1 - s0) / (e1 - e0)
    return min(max(x, s0), s1)


def measured_envelope(p: Profile, s_min: float) -> Envelope:
    """Tightest envelope the profile satisfies from s_min on.

    f(s)/s on a linear segment is monotone, so the extrema occur at
    breakpoints or at s_min itself.
    """
    if s_min >= p.domain_end - TOL:
        raise PreconditionError("s_min must be below the domain end")
    if s_min <= 0:
        raise PreconditionError("measured envelope needs s_min > 0")
    ratios = [p.eval(s) / s for s in _envelope_candidates(p, s_min)]
    return Envelope(min(ratios), max(ratios), s_min)


def make_adversary(d: float, D: float, r: float, phases: int = 1,
                   slope_cap: float = DEFAULT_SLOPE_CAP) -> Profile:
    """Sawtooth profile alternating maximal-slope growth with flat stretches.

    Teeth touch the line d*s at their local minima; when the tooth geometry
    permits (D strictly below the slope cap) the peaks touch D*s exactly,
    otherwise (D at the cap) the teeth are doubling and peak as high as a
    two-slope tooth can, at 4d/(2+d)*s.  The profile ends at f(r) = d*r and
    is preceded below the first tooth by the exact line d*s, so it satisfies
    the (d, D) envelope at every positive precision.
    """
    if not (1.0 - TOL <= d <= D + TOL and D <= slope_cap + TOL):
        raise PreconditionError(f"need 1 <= d <= D <= {slope_cap}, got d={d}, D={D}")
    if r <= 0:
        raise PreconditionError("domain end r must be positive")
    if phases < 1:
        raise PreconditionError("phases must be at least 1")
    d = min(max(d, 1.0), slope_cap)
    D = min(max(D, d), slope_cap)

    if D - d <= TOL:
        if phases > 1 and d >= slope_cap - TOL:
            raise ConstructionError(
                "flat stretches are impossible when both envelope rates sit at the slope cap"
            )
        return Profile(((0.0, 0.0), (r, d * r)), slope_cap=slope_cap)

    if D < slope_cap - TOL:
        kappa = D * (slope_cap - d) / (d * (slope_cap - D))
        peak_frac = (slope_cap - d) / (slope_cap - D)
    else:
        # Peaks cannot reach the line cap*s away from the origin; fall back to
        # doubling teeth that still realize the d-line minima.
        kappa = 2.0
        peak_frac = 1.0 + d / slope_cap
    if kappa <= 1.0 + TOL:
        raise ConstructionError(f"degenerate tooth ratio {kappa} for d={d}, D={D}")

    lows = [r / kappa ** (phases - i) for i in range(phases)]  # ascending tooth starts
    bps = [(0.0, 0.0)]
    if lows[0] > TOL:
        bps.append((lows[0], d * lows[0]))
    for i, lo in enumerate(lows):
        hi = lows[i + 1] if i + 1 < len(lows) else r
        peak_s = lo * peak_frac
        peak_v = d * lo + slope_cap * (peak_s - lo)
        if not (lo + TOL < peak_s < hi - TOL):
            raise ConstructionError(
                f"tooth peak {peak_s} escapes its tooth [{lo}, {hi}] for d={d}, D={D}"
            )
        bps.append((peak_s, peak_v))
        bps.append((hi, d * hi))
    out = Profile(tuple(bps), slope_cap=slope_cap)
    problems = out.validate()
    if problems:
        raise ConstructionError(f"generator produced an invalid profile: {problems[0]}")
    return out


# -- profile file format -----------------------------------------------------
#
# { "slope_cap": number, "breakpoints": [[s, v], ...] } with breakpoints
# sorted ascending in s.  The loader rejects documents that violate the
# profile invariants, naming the first bad segment.

def profile_to_json(p: Profile) -> dict:
    return {
        "slope_cap": p.slope_cap,
        "breakpoints": [[s, v] for s, v in p.breakpoints],
    }


def profile_from_json(obj) -> Profile:
    if not isinstance(obj, dict):
        raise ProfileFormatError("profile document must be a JSON object")
    if "breakpoints" not in obj:
        raise ProfileFormatError("profile document is missing 'breakpoints'")
    bps = obj["breakpoints"]
    if not isinstance(bps, list) or not bps:
        raise ProfileFormatError("'breakpoints' must be a non-empty list")
    for entry in bps:
        if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                or not all(isinstance(x, (int, float)) for x in entry)):
            raise ProfileFormatError(f"bad breakpoint entry: {entry!r}")
    cap = obj.get("slope_cap", DEFAULT_SLOPE_CAP)
    if not isinstance(cap, (int, float)) or cap <= 0:
        raise ProfileFormatError(f"bad slope_cap: {cap!r}")
    p = Profile(tuple((float(s), float(v)) for s, v in bps), slope_cap=float(cap))
    problems = p.validate()
    if problems:
        raise InvalidProfileError(problems[0], violations=problems)
    return p


def load_profile(path) -> Profile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProfileFormatError(f"not valid JSON: {exc}") from exc
    return profile_from_json(obj)


def save_profile(p: Profile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile_to_json(p), fh, indent=2, sort_keys=True)
        fh.write("\n")
