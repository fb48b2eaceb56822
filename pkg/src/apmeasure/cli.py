"""Command-line front end.

Subcommands: build, verify, ap, conv, match, psi, lump.  All emitted
numbers are exact fraction strings; --decimal K appends K-digit decimal
approximations clearly marked as approximate.  Exit codes: 0 all checks
pass, 1 a check failed (or a resource guard tripped), 2 usage or parse
error.  The atom cap can be overridden with the APMEASURE_ATOM_CAP
environment variable or --cap.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import construction, matching, measures, piecewise, serialize
from .construction import AtomBudgetError, StageStabilityError
from .matching import HarnessConfigError
from .measures import Interval, WindowError, rational
from .piecewise import FaithfulnessError


@dataclass
class RunConfig:
    decimal: int | None
    atom_cap: int
    out: Path | None

    def __post_init__(self):
        if self.atom_cap < 1:
            raise ValueError("atom cap must be >= 1")


def _run_config(args) -> RunConfig:
    cap = getattr(args, "cap", None)
    if cap is None:
        cap = int(os.environ.get("APMEASURE_ATOM_CAP", construction.DEFAULT_ATOM_CAP))
    out = getattr(args, "out_report", None)
    return RunConfig(decimal=getattr(args, "decimal", None),
                     atom_cap=cap,
                     out=Path(out) if out else None)


def decimal_approx(x: Fraction, digits: int) -> str:
    sign = "-" if x < 0 else ""
    scaled = abs(x) * 10 ** digits
    whole, part = divmod(scaled.numerator // scaled.denominator, 10 ** digits)
    return f"{sign}{whole}.{str(part).zfill(digits)}"


def fmt(x, cfg: RunConfig) -> str:
    if isinstance(x, Fraction):
        if cfg.decimal:
            return f"{x} (~{decimal_approx(x, cfg.decimal)} approx)"
        return str(x)
    return str(x)


def parse_window(text: str) -> Interval:
    raw = text.strip()
    lo_open = hi_open = False
    if raw.startswith("(") and raw.endswith(")"):
        lo_open = hi_open = True
        raw = raw[1:-1]
    elif raw.startswith("[") and raw.endswith("]"):
        raw = raw[1:-1]
    lo_s, hi_s = raw.split(":")
    return Interval(rational(lo_s.strip()), rational(hi_s.strip()), lo_open, hi_open)


def parse_windows(text: str) -> list[Interval]:
    return [parse_window(part) for part in text.split(";") if part.strip()]


def _load_test_function(path: str | None) -> piecewise.PiecewiseLinearFn:
    if path is None or path == "triangle":
        return piecewise.triangle_test_function()
    f = serialize.load_plf(path)
    if not f.zero_outside:
        raise ValueError(f"test function from {path} is not compactly supported")
    return f


def _write_report(cfg: RunConfig, payload: dict) -> None:
    if cfg.out is not None:
        cfg.out.write_text(json.dumps(payload, indent=1) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    cfg = _run_config(args)
    stage = construction.build_stage(args.stage, cfg.atom_cap)
    serialize.save_stage(stage, args.out)
    print(f"atoms={len(stage.measure)} mass={stage.measure.total_mass}")
    return 0


def _check(name: str, ok: bool, detail: str = "") -> bool:
    tail = f" {detail}" if detail else ""
    print(f"{name}: {'PASS' if ok else 'FAIL'}{tail}")
    return ok


def cmd_verify(args) -> int:
    cfg = _run_config(args)
    s = args.stage
    if args.measure:
        mu = serialize.load_measure(args.measure)
        print(f"verifying {args.measure} as stage {s}")
    else:
        mu = construction.build_stage(s, cfg.atom_cap).measure

    ok = True
    expected_n = construction.projected_atom_count(s)
    ok &= _check(f"counting_law s={s}", len(mu) == expected_n,
                 f"atoms={len(mu)} expected={expected_n}")
    expected_mass = Fraction(3 ** s)
    ok &= _check(f"total_mass s={s}", mu.total_mass == expected_mass,
                 f"mass={fmt(mu.total_mass, cfg)} expected={expected_mass}")
    support = construction.verify_stage_support(s, mu)
    ok &= _check(f"stage_support s={s}", support.holds,
                 "" if support.holds else f"offender={support.offender}")
    cells = construction.verify_cell_mass(s, mu)
    detail = f"cells={2 * construction.cell_center_bound(s) + 1}"
    if not cells.holds:
        bits = [f"cell n={n} mass={fmt(m, cfg)}" for n, m in cells.bad_cells[:3]]
        bits += [f"stray atom at {p}" for p in cells.stray_positions[:3]]
        detail = "; ".join(bits)
    ok &= _check(f"cell_mass s={s}", cells.holds, detail)

    if s >= 1:
        gap = mu.min_gap()
        floor = (measures.averaging_radius(s) / s
                 - 2 * construction.radius_series_tail_bound(s + 1))
        gap_ok = gap is not None and gap > 0 and gap >= floor
        ok &= _check(f"min_gap s={s}", gap_ok, f"gap={fmt(gap, cfg)} floor={fmt(floor, cfg)}")

    if args.measure:
        print("stage_stability / mass_decay: skipped for external measure files")
    else:
        ok &= _check(f"stage_stability s={s}", construction.verify_stage_stability(s))
        if s >= 1:
            decay = construction.verify_mass_decay(s, construction.stage_window(s + 1))
            ok &= _check(f"mass_decay s={s}", decay.holds,
                         f"max_outside={fmt(decay.max_mass_outside, cfg)} bound={fmt(decay.bound, cfg)}")
    for n in range(2, args.tail_max + 1):
        est = construction.verify_tail_estimate(n)
        ok &= _check(f"tail_estimate n={n}", est.holds,
                     f"lhs<={fmt(est.lhs_upper_bound, cfg)} rhs={fmt(est.rhs, cfg)}")
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_ap(args) -> int:
    cfg = _run_config(args)
    f = _load_test_function(args.fn)
    window = parse_window(args.window)
    source = lambda region: construction.limit_window(region, cfg.atom_cap)
    cert = piecewise.almost_period_certificate(
        f, rational(args.epsilon), rational(args.range), args.stage, source, window)
    for row in cert.rows:
        print(f"tau={row.tau} defect={fmt(row.defect, cfg)} witness={fmt(row.witness, cfg)}")
    print(f"max_defect={fmt(cert.max_defect, cfg)} epsilon={fmt(cert.epsilon, cfg)} "
          f"density_gap={cert.density_gap}")
    print(f"ap_certificate: {'PASS' if cert.all_within else 'FAIL'}")
    _write_report(cfg, serialize.ap_certificate_to_dict(cert))
    return 0 if cert.all_within else 1


def cmd_conv(args) -> int:
    cfg = _run_config(args)
    f = _load_test_function(args.fn)
    mu = serialize.load_measure(args.measure)
    window = parse_window(args.window)
    g = piecewise.convolve(f, mu, window)
    rows = list(zip(g.breakpoints, g.values))
    if args.samples:
        step = window.length / args.samples
        xs = [window.lo + step * i for i in range(args.samples + 1)]
        rows = sorted(set(rows) | {(x, g.eval(x)) for x in xs})
    if args.csv:
        lines = ["x,value"]
        lines += [f"{x},{v}" for x, v in rows]
        Path(args.csv).write_text("\n".join(lines) + "\n")
        print(f"wrote {len(rows)} rows to {args.csv}")
    else:
        for x, v in rows:
            print(f"x={fmt(x, cfg)} value={fmt(v, cfg)}")
    return 0


def cmd_match(args) -> int:
    cfg = _run_config(args)
    mu = serialize.load_measure(args.mu)
    nu = serialize.load_measure(args.nu)
    windows = parse_windows(args.windows)
    report = matching.match_close(mu, nu, windows)
    print(f"pairs={len(report.pairs)} unmatched_left={len(report.unmatched_left)} "
          f"unmatched_right={len(report.unmatched_right)}")
    for pr in report.profiles:
        print(f"profile {pr.window}: pairs_outside={pr.pairs_outside} "
              f"max_pos_gap={fmt(pr.max_abs_position_gap, cfg)} "
              f"max_mass_gap={fmt(pr.max_abs_mass_gap, cfg)} "
              f"unmatched={pr.unmatched_outside}")
    closeness = "certified" if report.profile_decreasing else "not certified"
    print(f"come close: {closeness} (window {report.window})")
    print(f"coincide: {'yes' if report.coincide_on_window else 'no'}")
    print(f"measures differ: {'no' if report.coincide_on_window else 'yes'}")
    _write_report(cfg, serialize.match_report_to_dict(report))
    if args.psi:
        return _run_harness(args, cfg, mu, nu, report)
    return 0


def _harness_config(args, mu, nu) -> matching.HarnessConfig:
    if None in (args.v, args.u, args.epsilon, args.compact):
        raise ValueError("the product harness needs --v, --u, --epsilon and --compact")
    u = rational(args.u)
    n = args.n if args.n is not None else matching.sparsity_bound(mu, nu, u)
    return matching.HarnessConfig(
        v=rational(args.v), n=n, epsilon=rational(args.epsilon),
        compact=parse_window(args.compact), u=u)


def _run_harness(args, cfg: RunConfig, mu, nu,
                 match_report: matching.MatchReport | None = None) -> int:
    hc = _harness_config(args, mu, nu)
    print(f"harness: n={hc.n} v={hc.v} u={hc.u} epsilon={hc.epsilon} compact={hc.compact}")
    ok = True
    if args.zero_identity:
        ident = matching.origin_product_identity(mu, nu, hc)
        flag = " (degenerate)" if ident.degenerate else ""
        ok &= _check("origin_identity",
                     ident.holds, f"value={fmt(ident.value, cfg)} "
                                  f"expected={fmt(ident.expected, cfg)}{flag}")
    if args.samples:
        samples = [rational(b.strip()) for b in args.samples.split(",") if b.strip()]
        report = matching.far_field_check(mu, nu, hc, samples, match_report)
        print(f"examined={report.examined} C={fmt(report.c_bound, cfg)}")
        _check("matching_hypothesis", report.hypothesis_ok, report.hypothesis_note)
        for row in report.samples:
            _check(f"far_field b={row.point}", row.holds,
                   f"|product|={fmt(abs(row.product), cfg)} bound={fmt(row.bound, cfg)}")
        ok &= report.all_hold
        _write_report(cfg, serialize.far_field_report_to_dict(report))
    print(f"harness: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_psi(args) -> int:
    cfg = _run_config(args)
    mu = serialize.load_measure(args.mu)
    nu = serialize.load_measure(args.nu)
    return _run_harness(args, cfg, mu, nu)


def cmd_lump(args) -> int:
    cfg = _run_config(args)
    mu = serialize.load_measure(args.mu)
    nu = serialize.load_measure(args.nu)
    dec = matching.lump_decompose(mu, nu, rational(args.v),
                                  rational(args.u) if args.u else None)
    print(f"lumps={len(dec.lumps)} link={dec.link} "
          f"max_per_neighborhood={dec.max_lumps_per_neighborhood} "
          f"witness={fmt(dec.count_witness, cfg)}")
    for i, lump in enumerate(dec.lumps):
        print(f"lump {i}: span=[{lump.lo}, {lump.hi}] diameter={fmt(lump.diameter, cfg)} "
              f"left={len(lump.left_positions)} right={len(lump.right_positions)} "
              f"mass_gap={fmt(lump.mass_gap, cfg)}")
    print(f"all_pairwise_close: {'yes' if dec.all_pairwise_close else 'no'}")
    _write_report(cfg, serialize.lump_decomposition_to_dict(dec))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--decimal", type=int, default=None, metavar="K",
                   help="append K-digit decimal approximations (marked approximate)")
    p.add_argument("--cap", type=int, default=None,
                   help="atom cap override (also APMEASURE_ATOM_CAP)")
    p.add_argument("--out-report", default=None, metavar="PATH",
                   help="also write the structured report as JSON")


def _add_harness_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--v", required=required, help="bump half width (fraction)")
    p.add_argument("--u", required=required, help="separation radius (fraction)")
    p.add_argument("--epsilon", required=required, help="mass gap tolerance (fraction)")
    p.add_argument("--compact", required=required, metavar="LO:HI",
                   help="compact region outside which closeness is assumed")
    p.add_argument("--n", type=int, default=None,
                   help="number of bump factors (default: sparsity bound)")
    p.add_argument("--samples", default=None,
                   help="comma-separated far-field sample points")
    p.add_argument("--zero-identity", action="store_true",
                   help="also check the product identity at the origin")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apmeasure",
        description="Exact discrete-measure construction and certificates on the line.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a construction stage and write it with provenance")
    p.add_argument("stage", type=int)
    p.add_argument("--out", required=True, help="measure output path (JSON)")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run the certificate suite for a stage")
    p.add_argument("stage", type=int)
    p.add_argument("--measure", default=None,
                   help="verify this measure file instead of a fresh build")
    p.add_argument("--tail-max", type=int, default=12,
                   help="largest tail-estimate index to check (default 12)")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ap", help="almost-period defect table at shifts p*3^s")
    p.add_argument("stage", type=int, help="scale exponent s of the candidate shifts")
    p.add_argument("--epsilon", required=True, help="defect tolerance (fraction)")
    p.add_argument("--range", required=True, help="largest |tau| to test (fraction)")
    p.add_argument("--fn", default=None, help="test function JSON (default: built-in triangle)")
    p.add_argument("--window", default="-1/2:1/2", metavar="LO:HI")
    _add_common(p)
    p.set_defaults(func=cmd_ap)

    p = sub.add_parser("conv", help="convolve a test function with a measure file")
    p.add_argument("--measure", required=True)
    p.add_argument("--window", required=True, metavar="LO:HI")
    p.add_argument("--fn", default=None, help="test function JSON (default: built-in triangle)")
    p.add_argument("--csv", default=None, help="write (x, value) rows to this CSV file")
    p.add_argument("--samples", type=int, default=0,
                   help="add this many uniform sample points to the output")
    _add_common(p)
    p.set_defaults(func=cmd_conv)

    p = sub.add_parser("match", help="match two measure files and profile their closeness")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--windows", required=True,
                   help="nested windows, e.g. '-2:2;-10:10;-40:40'")
    p.add_argument("--psi", action="store_true", help="also run the product harness")
    _add_harness_flags(p, required=False)
    _add_common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("psi", help="product harness: origin identity and far-field bound")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    _add_harness_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("lump", help="single-linkage lump decomposition of two measure files")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--v", required=True, help="linking distance (fraction)")
    p.add_argument("--u", default=None, help="lump-count radius (default: v)")
    _add_common(p)
    p.set_defaults(func=cmd_lump)

    # values like "-1/2" or "-10:10" start with a minus; treat any
    # dash-digit token as a value, not an option
    value_matcher = re.compile(r"^-\d")
    for sp in [parser, *sub.choices.values()]:
        sp._negative_number_matcher = value_matcher
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (AtomBudgetError, StageStabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (HarnessConfigError, FaithfulnessError, WindowError, ValueError,
            KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
