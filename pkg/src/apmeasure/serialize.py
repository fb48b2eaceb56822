"""Lossless text formats: every rational is an exact fraction string.

Measures, stage provenance sidecars, piecewise-linear functions and the
report objects all serialize to JSON whose numeric fields are strings like
"-17/16" or "3".  Parsing them back reproduces the original values bit for
bit; no decimals ever enter a file.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .construction import StageMeasure
from .matching import FarFieldReport, LumpDecomposition, MatchReport
from .measures import DiscreteMeasure, Interval, make_measure
from .piecewise import AlmostPeriodCertificate, PiecewiseLinearFn


def frac(x: Fraction) -> str:
    return str(x)


def parse_frac(text: str) -> Fraction:
    return Fraction(str(text))


def interval_to_dict(J: Interval) -> dict[str, Any]:
    return {"lo": frac(J.lo), "hi": frac(J.hi),
            "lo_open": J.lo_open, "hi_open": J.hi_open}


def interval_from_dict(d: dict[str, Any]) -> Interval:
    return Interval(parse_frac(d["lo"]), parse_frac(d["hi"]),
                    bool(d.get("lo_open", False)), bool(d.get("hi_open", False)))


def measure_to_dict(mu: DiscreteMeasure) -> dict[str, Any]:
    return {
        "window": interval_to_dict(mu.window),
        "atoms": [{"pos": frac(a.position), "mass": frac(a.mass)} for a in mu.atoms],
    }


def measure_from_dict(d: dict[str, Any]) -> DiscreteMeasure:
    window = interval_from_dict(d["window"])
    pairs = [(parse_frac(a["pos"]), parse_frac(a["mass"])) for a in d["atoms"]]
    return make_measure(pairs, window)


def save_measure(mu: DiscreteMeasure, path: str | Path) -> None:
    Path(path).write_text(json.dumps(measure_to_dict(mu), indent=1) + "\n")


def load_measure(path: str | Path) -> DiscreteMeasure:
    return measure_from_dict(json.loads(Path(path).read_text()))


def provenance_sidecar_path(measure_path: str | Path) -> Path:
    p = Path(measure_path)
    return p.with_name(p.stem + ".provenance.json")


def stage_to_dicts(stage: StageMeasure) -> tuple[dict[str, Any], dict[str, Any]]:
    sidecar = {
        "stage": stage.stage,
        "atoms": [
            {
                "pos": frac(atom.position),
                "stages": [step.stage for step in prov],
                "shifts": [frac(step.shift) for step in prov],
                "offsets": [frac(step.offset) for step in prov],
            }
            for atom, prov in zip(stage.measure.atoms, stage.provenance)
        ],
    }
    return measure_to_dict(stage.measure), sidecar


def save_stage(stage: StageMeasure, path: str | Path) -> Path:
    """Write the stage measure plus its provenance sidecar; returns the sidecar path."""
    measure_dict, sidecar = stage_to_dicts(stage)
    Path(path).write_text(json.dumps(measure_dict, indent=1) + "\n")
    side = provenance_sidecar_path(path)
    side.write_text(json.dumps(sidecar, indent=1) + "\n")
    return side


def plf_to_dict(f: PiecewiseLinearFn) -> dict[str, Any]:
    return {
        "breakpoints": [frac(b) for b in f.breakpoints],
        "values": [frac(v) for v in f.values],
        "zero_outside": f.zero_outside,
    }


def plf_from_dict(d: dict[str, Any]) -> PiecewiseLinearFn:
    return PiecewiseLinearFn(
        tuple(parse_frac(b) for b in d["breakpoints"]),
        tuple(parse_frac(v) for v in d["values"]),
        bool(d.get("zero_outside", True)),
    )


def save_plf(f: PiecewiseLinearFn, path: str | Path) -> None:
    Path(path).write_text(json.dumps(plf_to_dict(f), indent=1) + "\n")


def load_plf(path: str | Path) -> PiecewiseLinearFn:
    return plf_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Report serialization (one way: reports are outputs, not inputs)
# ---------------------------------------------------------------------------

def match_report_to_dict(report: MatchReport) -> dict[str, Any]:
    return {
        "window": interval_to_dict(report.window),
        "pairs": [
            {
                "left_pos": frac(p.left.position), "right_pos": frac(p.right.position),
                "position_gap": frac(p.position_gap), "mass_gap": frac(p.mass_gap),
            }
            for p in report.pairs
        ],
        "unmatched_left": [frac(a.position) for a in report.unmatched_left],
        "unmatched_right": [frac(a.position) for a in report.unmatched_right],
        "profiles": [
            {
                "window": interval_to_dict(pr.window),
                "pairs_outside": pr.pairs_outside,
                "max_abs_position_gap": frac(pr.max_abs_position_gap),
                "max_abs_mass_gap": frac(pr.max_abs_mass_gap),
                "unmatched_outside": pr.unmatched_outside,
            }
            for pr in report.profiles
        ],
        "profile_decreasing": report.profile_decreasing,
        "coincide_on_window": report.coincide_on_window,
    }


def far_field_report_to_dict(report: FarFieldReport) -> dict[str, Any]:
    return {
        "examined": interval_to_dict(report.examined),
        "c_bound": frac(report.c_bound),
        "n": report.n,
        "epsilon": frac(report.epsilon),
        "samples": [
            {"point": frac(s.point), "product": frac(s.product),
             "bound": frac(s.bound), "holds": s.holds}
            for s in report.samples
        ],
        "hypothesis_ok": report.hypothesis_ok,
        "hypothesis_note": report.hypothesis_note,
        "all_hold": report.all_hold,
    }


def lump_decomposition_to_dict(dec: LumpDecomposition) -> dict[str, Any]:
    return {
        "link": frac(dec.link),
        "count_radius": frac(dec.count_radius),
        "max_lumps_per_neighborhood": dec.max_lumps_per_neighborhood,
        "count_witness": frac(dec.count_witness),
        "all_pairwise_close": dec.all_pairwise_close,
        "lumps": [
            {
                "lo": frac(lump.lo), "hi": frac(lump.hi),
                "diameter": frac(lump.diameter),
                "left_positions": [frac(p) for p in lump.left_positions],
                "right_positions": [frac(p) for p in lump.right_positions],
                "left_mass": frac(lump.left_mass),
                "right_mass": frac(lump.right_mass),
                "mass_gap": frac(lump.mass_gap),
            }
            for lump in dec.lumps
        ],
    }


def ap_certificate_to_dict(cert: AlmostPeriodCertificate) -> dict[str, Any]:
    return {
        "scale_exponent": cert.scale_exponent,
        "epsilon": frac(cert.epsilon),
        "window": interval_to_dict(cert.window),
        "tau_range": frac(cert.tau_range),
        "density_gap": frac(cert.density_gap),
        "rows": [
            {"tau": frac(r.tau), "defect": frac(r.defect), "witness": frac(r.witness)}
            for r in cert.rows
        ],
        "max_defect": frac(cert.max_defect),
        "all_within": cert.all_within,
    }
