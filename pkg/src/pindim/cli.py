"""Command-line surface: validate / classify / partition / bound / search / plot.

Reports are UTF-8 JSON with sorted keys, so re-running a command on the same
input yields byte-identical output modulo the tool version.  Exit codes:
0 success, 1 domain/precondition/soundness failure, 2 usage or parse failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .adversary import (
    DEFAULT_BUDGET,
    DEFAULT_SLOPES,
    SearchConfig,
    worst_case_search,
)
from .bounds import (
    DimParams,
    assemble_all_yellow_distance_bound,
    assemble_distance_bound,
    assemble_packing_bound,
    assemble_projection_bound,
    packing_closed_form,
    regular_pin_distance_bound,
)
from .classify import GREEN, YELLOW, is_blue, is_green, is_red, is_teal, is_yellow
from .errors import (
    BudgetExceededError,
    ConstructionError,
    DomainError,
    EnvelopeViolation,
    InvalidProfileError,
    PindimError,
    PreconditionError,
    ProfileFormatError,
)
from .partition import (
    Partition,
    admissible_partition,
    all_yellow_partition,
    default_s_min,
    general_partition,
    good_partition,
    partition_to_json,
    regular_pin_partition,
    rgb_partition,
)
from .profile import Profile, load_profile, measured_envelope, profile_to_json, save_profile

SOUNDNESS_TOL = 1e-3


# -- report plumbing -----------------------------------------------------------

def _digest(path) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def _document(kind: str, payload, argv, input_path=None, notes=()) -> dict:
    return {
        "tool": {"name": "pindim", "version": __version__},
        "command": list(argv),
        "input_digest": _digest(input_path) if input_path else None,
        "kind": kind,
        "payload": payload,
        "notes": list(notes),
    }


def _emit(doc: dict, out_path=None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_payload(rep) -> dict:
    payload = {
        "r": rep.r,
        "assembled_value": rep.assembled_value,
        "closed_form_value": rep.closed_form_value,
        "L": rep.L,
        "B": rep.B,
        "S": rep.S,
        "case_taken": rep.case_taken,
        "sound": rep.sound,
        "eps": rep.eps,
        "transfer_total": rep.transfer_total,
        "ledger": [
            {"rule": row.rule, "amount": row.amount, "a": row.a, "b": row.b}
            for row in rep.ledger
        ],
        "notes": list(rep.notes),
    }
    if rep.partition is not None:
        payload["partition"] = partition_to_json(rep.partition)
    return payload


# -- shared argument handling -----------------------------------------------------

def _add_rate_args(sp):
    sp.add_argument("--d", type=float, help="lower rate (collapsed)")
    sp.add_argument("--D", dest="DD", type=float, help="upper rate (collapsed)")
    sp.add_argument("--dx", type=float)
    sp.add_argument("--dy", type=float)
    sp.add_argument("--Dx", dest="DxU", type=float)
    sp.add_argument("--Dy", dest="DyU", type=float)


def _rates(args, parser, need=True):
    """Collapse quadruple rates to (d, D) = (min of lower, max of upper)."""
    quad = [args.dx, args.dy, args.DxU, args.DyU]
    if any(v is not None for v in quad):
        if any(v is None for v in quad):
            parser.error("provide all of --dx --dy --Dx --Dy or use --d/--D")
        return min(args.dx, args.dy), max(args.DxU, args.DyU)
    if need and (args.d is None or args.DD is None):
        parser.error("rates required: --d/--D or the --dx/--dy/--Dx/--Dy quadruple")
    return args.d, args.DD


# -- subcommands ---------------------------------------------------------------

def cmd_validate(args, parser, argv):
    try:
        p = load_profile(args.file)
    except InvalidProfileError as exc:
        doc = _document("validation", {"valid": False, "violations": exc.violations},
                        argv, args.file)
        _emit(doc, args.out)
        for v in exc.violations:
            print(v)
        return 1
    payload = {
        "valid": True,
        "breakpoints": len(p.breakpoints),
        "domain_end": p.domain_end,
        "slope_cap": p.slope_cap,
    }
    _emit(_document("validation", payload, argv, args.file), args.out)
    print(f"valid profile: {len(p.breakpoints)} breakpoints up to precision {p.domain_end:g}")
    return 0


def cmd_classify(args, parser, argv):
    p = load_profile(args.file)
    a, b = args.a, args.b
    payload = {
        "a": a,
        "b": b,
        "growth": p.growth(a, b),
        "yellow": is_yellow(p, a, b),
        "teal": is_teal(p, a, b),
        "green": is_green(p, a, b, args.t),
        "red": is_red(p, a, b),
        "blue": is_blue(p, a, b),
    }
    _emit(_document("classification", payload, argv, args.file), args.out)
    flags = ", ".join(c for c in ("yellow", "teal", "green", "red", "blue") if payload[c])
    print(f"[{a:g}, {b:g}]: growth {payload['growth']:g}; {flags or 'no color'}")
    return 0


def _build_partition(p, args, parser) -> Partition:
    kind = args.kind
    r = args.r if args.r is not None else p.domain_end
    s_min = args.s_min
    if kind == "good":
        return good_partition(p, r, s_min=s_min)
    if kind == "admissible":
        if args.t is None or args.M is None:
            parser.error(f"{kind} partition requires --t and --M")
        a = args.a if args.a is not None else (s_min if s_min is not None else default_s_min(r))
        return admissible_partition(p, a, r, args.t, args.M)
    if kind == "rgb":
        if args.t is None:
            parser.error("rgb partition requires --t")
        return rgb_partition(p, r, args.t, s_min=s_min)
    if kind == "all-yellow":
        d, D = _rates(args, parser)
        return all_yellow_partition(p, r, d, D, args.eps, s_min=s_min)
    if kind == "general":
        d, D = _rates(args, parser)
        return general_partition(p, r, d, D, s_min=s_min)
    if kind == "regular-pin":
        if args.dy is None:
            parser.error("regular-pin partition requires --dy")
        return regular_pin_partition(p, r, args.dy, args.eps, s_min=s_min)
    parser.error(f"unknown partition kind {kind!r}")


def cmd_partition(args, parser, argv):
    p = load_profile(args.file)
    part = _build_partition(p, args, parser)
    _emit(_document("partition", partition_to_json(part), argv, args.file), args.out)
    counts = {}
    for iv in part.intervals:
        counts[iv.color] = counts.get(iv.color, 0) + 1
    print(f"{part.kind} partition of [{part.lo:g}, {part.hi:g}]: "
          + ", ".join(f"{n} {c}" for c, n in sorted(counts.items())))
    return 0


def cmd_bound(args, parser, argv):
    p = load_profile(args.file)
    r = args.r if args.r is not None else p.domain_end
    mode = args.mode
    if mode == "distance":
        d, D = _rates(args, parser)
        rep = assemble_distance_bound(p, r, DimParams.collapsed(d, D, args.eps),
                                      s_min=args.s_min)
    elif mode == "projection":
        d, D = _rates(args, parser)
        if args.t is None:
            parser.error("projection mode requires --t")
        rep = assemble_projection_bound(p, r, args.t, d, D, s_min=args.s_min,
                                        eps=args.eps)
    elif mode == "packing":
        d, D = _rates(args, parser, need=False)
        if D is None:
            parser.error("packing mode requires --D (or the rate quadruple)")
        if d is None:
            d = measured_envelope(p, args.s_min or default_s_min(p.domain_end)).d_lower
        rep = assemble_packing_bound(p, d, D, eps=args.eps, s_min=args.s_min)
    elif mode == "all-yellow":
        d, D = _rates(args, parser)
        rep = assemble_all_yellow_distance_bound(p, r, d, D, args.eps, s_min=args.s_min)
    elif mode == "regular-pin":
        if args.dx is None or args.dy is None:
            parser.error("regular-pin mode requires --dx and --dy")
        eps_x = args.eps_x
        if eps_x is None:
            parser.error("regular-pin mode requires --eps-x")
        rep = regular_pin_distance_bound(p, r, args.dx, args.dy, eps_x,
                                         eps=args.eps, s_min=args.s_min)
    else:
        parser.error(f"unknown mode {mode!r}")
    _emit(_document("bound_report", _report_payload(rep), argv, args.file), args.out)
    print(f"mode              {mode}")
    print(f"precision         {rep.r:g}")
    print(f"assembled value   {rep.assembled_value:.6f}  ({rep.assembled_value / rep.r:.6f} per unit)")
    print(f"closed form       {rep.closed_form_value:.6f}  ({rep.closed_form_value / rep.r:.6f} per unit)")
    print(f"case              {rep.case_taken}")
    print(f"sound             {rep.sound}")
    return 0 if rep.sound else 1


def cmd_search(args, parser, argv):
    objective = {"distance": "distance_bound", "projection": "projection_bound",
                 "packing": "packing_bound"}.get(args.objective, args.objective)
    budget = int(os.environ.get("PINDIM_BUDGET", args.budget))
    slopes = tuple(float(x) for x in args.slopes.split(",")) if args.slopes else DEFAULT_SLOPES
    cfg = SearchConfig(d=args.d, D=args.DD, r=args.r, grid_n=args.grid,
                       slope_levels=slopes, objective=objective,
                       beam_width=args.beam_width, mode=args.mode,
                       budget=budget, t=args.t)
    res = worst_case_search(cfg)
    payload = {
        "config": {
            "d": cfg.d, "D": cfg.D, "r": cfg.r, "grid_n": cfg.grid_n,
            "slope_levels": list(cfg.slope_levels), "objective": cfg.objective,
            "mode": cfg.mode, "beam_width": cfg.beam_width, "t": cfg.t,
        },
        "worst_value": res.worst_value,
        "closed_form": res.closed_form,
        "gap": res.gap,
        "visited": res.visited,
        "worst_profile": profile_to_json(res.worst_profile),
    }
    _emit(_document("search_result", payload, argv), args.out)
    if args.profile_out:
        save_profile(res.worst_profile, args.profile_out)
    print(f"objective     {cfg.objective}")
    print(f"visited       {res.visited}")
    print(f"worst value   {res.worst_value:.6f}")
    print(f"closed form   {res.closed_form:.6f}")
    print(f"gap           {res.gap:+.6f}")
    if res.gap < -SOUNDNESS_TOL:
        print("soundness gap below tolerance: certified counterexample candidate",
              file=sys.stderr)
        return 1
    return 0


# -- SVG plotting ---------------------------------------------------------------

_BAND_COLORS = {
    "yellow": "#f5c518",
    "teal": "#20808d",
    "green": "#2e8b57",
    "red": "#d9534f",
    "blue": "#4169e1",
}

_W, _H = 800.0, 500.0
_ML, _MR, _MT, _MB = 60.0, 20.0, 20.0, 45.0


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_svg(p: Profile, part: Partition | None = None, d: float | None = None,
               D: float | None = None, construction_lines=()) -> str:
    xmax = p.domain_end
    ymax = max(v for _, v in p.breakpoints)
    if D is not None:
        ymax = max(ymax, D * xmax)
    ymax = max(ymax, 1e-9)

    def sx(x):
        return _ML + x / xmax * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - y / ymax * (_H - _MT - _MB)

    rows = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_W)}" height="{int(_H)}" '
        f'viewBox="0 0 {int(_W)} {int(_H)}">',
        f'<rect x="0" y="0" width="{int(_W)}" height="{int(_H)}" fill="white"/>',
    ]
    if part is not None:
        for iv in part.intervals:
            color = _BAND_COLORS.get(iv.color, "#cccccc")
            x0, x1 = sx(iv.a), sx(iv.b)
            rows.append(
                f'<rect x="{_fmt(x0)}" y="{_fmt(_MT)}" width="{_fmt(x1 - x0)}" '
                f'height="{_fmt(_H - _MT - _MB)}" fill="{color}" fill-opacity="0.22"/>'
            )
    for rate, dash in ((d, "6,4"), (D, "6,4")):
        if rate is not None:
            rows.append(
                f'<line x1="{_fmt(sx(0))}" y1="{_fmt(sy(0))}" x2="{_fmt(sx(xmax))}" '
                f'y2="{_fmt(sy(rate * xmax))}" stroke="#888888" stroke-width="1" '
                f'stroke-dasharray="{dash}"/>'
            )
    for x0, y0, x1, y1 in construction_lines:
        rows.append(
            f'<line x1="{_fmt(sx(x0))}" y1="{_fmt(sy(y0))}" x2="{_fmt(sx(x1))}" '
            f'y2="{_fmt(sy(y1))}" stroke="#555555" stroke-width="1" '
            f'stroke-dasharray="2,3"/>'
        )
    pts = " ".join(f"{_fmt(sx(s))},{_fmt(sy(v))}" for s, v in p.breakpoints)
    rows.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    rows.append(
        f'<line x1="{_fmt(_ML)}" y1="{_fmt(_H - _MB)}" x2="{_fmt(_W - _MR)}" '
        f'y2="{_fmt(_H - _MB)}" stroke="black" stroke-width="1"/>'
    )
    rows.append(
        f'<line x1="{_fmt(_ML)}" y1="{_fmt(_MT)}" x2="{_fmt(_ML)}" '
        f'y2="{_fmt(_H - _MB)}" stroke="black" stroke-width="1"/>'
    )
    rows.append(f'<text x="{_fmt(_W / 2)}" y="{_fmt(_H - 10)}" font-size="12" '
                f'text-anchor="middle">precision</text>')
    rows.append("</svg>")
    return "\n".join(rows) + "\n"


def cmd_plot(args, parser, argv):
    p = load_profile(args.file)
    part = _build_partition(p, args, parser)
    d, D = _rates(args, parser, need=False)
    lines = []
    if part.kind == "all_yellow":
        head_top = part.params["head_top"]
        for iv in part.intervals:
            if iv.a >= head_top - 1e-9:
                half = iv.b / 2.0
                lines.append((half, p.eval(half), iv.b, p.eval(half) + (iv.b - half)))
    svg = render_svg(p, part, d=d, D=D, construction_lines=lines)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pindim",
        description="Partition machinery and worst-case bound validation over "
                    "piecewise-linear complexity profiles.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(sp, with_file=True):
        if with_file:
            sp.add_argument("file", help="profile JSON file")
        sp.add_argument("--out", help="write the full JSON report here")
        sp.add_argument("--r", type=float, help="working precision (default: domain end)")
        sp.add_argument("--t", type=float, help="green length cap / floor")
        sp.add_argument("--eps", type=float, default=1e-3, help="slack parameter")
        sp.add_argument("--s-min", dest="s_min", type=float,
                        help="partition floor (default: r/100)")
        _add_rate_args(sp)

    sp = sub.add_parser("validate", help="check profile invariants")
    sp.add_argument("file")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("classify", help="color predicates for an interval")
    common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("partition", help="build and export a partition")
    common(sp)
    sp.add_argument("--kind", required=True,
                    choices=["good", "admissible", "rgb", "all-yellow", "general",
                             "regular-pin"])
    sp.add_argument("--a", type=float, help="left endpoint (admissible)")
    sp.add_argument("--M", type=int, help="interval budget (admissible)")
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("bound", help="assemble a bound report")
    common(sp)
    sp.add_argument("--mode", required=True,
                    choices=["distance", "projection", "packing", "all-yellow",
                             "regular-pin"])
    sp.add_argument("--eps-x", dest="eps_x", type=float,
                    help="pin regularity spread (regular-pin mode)")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("search", help="worst-case adversary search")
    sp.add_argument("--objective", required=True,
                    choices=["distance", "projection", "packing",
                             "distance_bound", "projection_bound", "packing_bound"])
    sp.add_argument("--d", type=float, required=True)
    sp.add_argument("--D", dest="DD", type=float, required=True)
    sp.add_argument("--r", type=float, default=100.0)
    sp.add_argument("--grid", type=int, required=True)
    sp.add_argument("--slopes", help="comma-separated slope alphabet")
    sp.add_argument("--beam-width", dest="beam_width", type=int, default=64)
    sp.add_argument("--mode", choices=["exhaustive", "beam"], default="exhaustive")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--t", type=float, help="projection objective green floor")
    sp.add_argument("--out")
    sp.add_argument("--profile-out", dest="profile_out",
                    help="write the worst profile here for replay")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("plot", help="emit an SVG figure of a partition")
    common(sp)
    sp.add_argument("--partition", dest="kind", required=True,
                    choices=["good", "admissible", "rgb", "all-yellow", "general",
                             "regular-pin"])
    sp.add_argument("--a", type=float, help="left endpoint (admissible)")
    sp.add_argument("--M", type=int, help="interval budget (admissible)")
    sp.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser, argv)
    except ProfileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidProfileError, PreconditionError, EnvelopeViolation, DomainError,
            ConstructionError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PindimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
