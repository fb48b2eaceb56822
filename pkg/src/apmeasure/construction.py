"""Stage-by-stage construction of the self-similar averaged lattice measure.

Stage 0 is a unit mass at the origin.  Stage s adds two translated copies
(by +-3**(s-1)) of the stage-(s-1) measure smeared by the s-th averaging
operator.  Every finite window of the weak limit is eventually frozen: once
a stage covers the window, later stages never change it.  All positions and
masses stay exact rationals, and every atom carries provenance: the list of
(stage, lattice shift, averaging offset) steps that produced it from the
origin atom.

Besides the builder, this module certifies the arithmetic facts the
construction relies on: support confinement, unit mass per lattice cell,
the geometric tail bound on the averaging radii, mass decay outside a
stage's window, stage stability, and per-cluster counting certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .measures import (
    Atom,
    DiscreteMeasure,
    Interval,
    RationalLike,
    averaging_radius,
    rational,
    restrict,
)

DEFAULT_ATOM_CAP = 10_000_000


class AtomBudgetError(RuntimeError):
    """Projected atom count exceeds the configured cap."""


class StageStabilityError(RuntimeError):
    """A later stage changed a window that should already be frozen.

    This cannot happen for a correct builder; treat it as an implementation
    bug, never as data.
    """


def stage_window(s: int) -> Interval:
    """Open interval confining the stage-s support: ((1-3^s)/2 - 1/3, (3^s-1)/2 + 1/3)."""
    if s < 0:
        raise ValueError(f"stage must be >= 0, got {s}")
    half = Fraction(3 ** s - 1, 2) + Fraction(1, 3)
    return Interval.open(-half, half)


def cell_center_bound(s: int) -> int:
    """Largest |n| of a lattice cell (n-1/3, n+1/3) inside the stage-s window."""
    return (3 ** s - 1) // 2


def projected_atom_count(s: int) -> int:
    """Closed-form atom count n_s = prod_{k<=s} (1+4k) before building."""
    count = 1
    for k in range(1, s + 1):
        count *= 1 + 4 * k
    return count


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ProvenanceStep:
    """One averaging pass applied to an atom: stage index, lattice shift, offset."""

    stage: int
    shift: Fraction
    offset: Fraction


@dataclass(frozen=True)
class StageMeasure:
    """A built stage: the measure plus per-atom provenance, index-aligned."""

    stage: int
    measure: DiscreteMeasure
    provenance: tuple[tuple[ProvenanceStep, ...], ...]


_stage_cache: dict[int, StageMeasure] = {}


def _averaging_offsets(k: int) -> list[Fraction]:
    radius = averaging_radius(k)
    return [radius * j / k for j in range(-k, k + 1) if j != 0]


def _expand_entries(entries, k: int, shift_value: Fraction):
    offsets = _averaging_offsets(k)
    weight = Fraction(1, 2 * k)
    out = []
    for pos, mass, prov in entries:
        base = pos + shift_value
        new_mass = mass * weight
        for off in offsets:
            out.append((base + off, new_mass, prov + (ProvenanceStep(k, shift_value, off),)))
    return out


def build_stage(s: int, atom_cap: int | None = None) -> StageMeasure:
    """Build (and cache) the stage-s measure with full provenance.

    Raises `AtomBudgetError` before doing any work if the closed-form count
    n_s = prod(1+4k) exceeds the cap (default 10**7).  The builder emits the
    three blocks of each stage already in increasing position order and
    asserts strict increase, so any accidental atom collision (a merge
    event) fails loudly.
    """
    if s < 0:
        raise ValueError(f"stage must be >= 0, got {s}")
    cap = DEFAULT_ATOM_CAP if atom_cap is None else atom_cap
    if cap < 1:
        raise ValueError("atom cap must be >= 1")
    projected = projected_atom_count(s)
    if projected > cap:
        raise AtomBudgetError(f"stage {s} needs {projected} atoms, cap is {cap}")
    if s in _stage_cache:
        return _stage_cache[s]

    start = max((k for k in _stage_cache if k < s), default=-1)
    if start == -1:
        entries = [(Fraction(0), Fraction(1), ())]
        _stage_cache[0] = _finish_stage(0, entries)
        start = 0
    for k in range(start + 1, s + 1):
        prev = _stage_cache[k - 1]
        prev_entries = list(zip(
            (a.position for a in prev.measure.atoms),
            (a.mass for a in prev.measure.atoms),
            prev.provenance,
        ))
        shift_mag = Fraction(3 ** (k - 1))
        left = _expand_entries(prev_entries, k, -shift_mag)
        right = _expand_entries(prev_entries, k, shift_mag)
        _stage_cache[k] = _finish_stage(k, left + prev_entries + right)
    return _stage_cache[s]


def _finish_stage(s: int, entries) -> StageMeasure:
    for (p, _, _), (q, _, _) in zip(entries, entries[1:]):
        if not p < q:
            raise AssertionError(f"stage {s}: atom collision or misorder at {p} / {q}")
    atoms = tuple(Atom(p, m) for p, m, _ in entries)
    provenance = tuple(prov for _, _, prov in entries)
    measure = DiscreteMeasure(atoms, stage_window(s).closure())
    return StageMeasure(s, measure, provenance)


def _atoms_within(s: int, J: Interval) -> list[tuple[Fraction, Fraction]]:
    """(position, mass) list of the stage-s measure inside J, without
    materializing the stage: branches that cannot land in J are pruned."""
    cached = _stage_cache.get(s)
    if cached is not None:
        overlap = J.intersect(cached.measure.window)
        if overlap is None:
            return []
        return [(a.position, a.mass) for a in restrict(cached.measure, overlap).atoms]
    if s == 0:
        return [(Fraction(0), Fraction(1))] if J.contains(0) else []
    radius = averaging_radius(s)
    offsets = _averaging_offsets(s)
    weight = Fraction(1, 2 * s)
    shift_mag = Fraction(3 ** (s - 1))
    blocks = []
    for sign in (-1, 1):
        sh = sign * shift_mag
        source_window = Interval.closed(J.lo - sh - radius, J.hi - sh + radius)
        block = []
        for pos, mass in _atoms_within(s - 1, source_window):
            base = pos + sh
            new_mass = mass * weight
            for off in offsets:
                q = base + off
                if J.contains(q):
                    block.append((q, new_mass))
        blocks.append(block)
    middle = _atoms_within(s - 1, J)
    out = blocks[0] + middle + blocks[1]
    for (p, _), (q, _) in zip(out, out[1:]):
        if not p < q:
            raise AssertionError(f"windowed stage {s}: atom collision at {p} / {q}")
    return out


def limit_window(J: Interval, atom_cap: int | None = None) -> DiscreteMeasure:
    """The weak-limit measure restricted to the bounded interval J.

    Picks the smallest stage whose window contains J, restricts it, and
    cross-checks the result against a window-pruned expansion of the next
    stage; any mismatch raises `StageStabilityError`.
    """
    cap = DEFAULT_ATOM_CAP if atom_cap is None else atom_cap
    s = 0
    while not stage_window(s).contains_interval(J):
        s += 1
        if projected_atom_count(s) > cap:
            raise AtomBudgetError(f"window {J} needs stage {s} ({projected_atom_count(s)} atoms), cap is {cap}")
    out = restrict(build_stage(s, cap).measure, J)
    expected = [(a.position, a.mass) for a in out.atoms]
    if _atoms_within(s + 1, J) != expected:
        raise StageStabilityError(f"stage {s + 1} disagrees with stage {s} on {J}")
    return out


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def radius_series_tail_bound(n: int, terms: int = 8) -> Fraction:
    """Rigorous upper bound for the infinite sum of averaging radii from n on.

    Sums the radii for k = n..n+terms exactly, then dominates the remainder
    by a geometric series: consecutive radii shrink by at least
    2**-(2M+5) beyond the truncation point M.
    """
    if n < 1:
        raise ValueError(f"tail start must be >= 1, got {n}")
    m = n + terms
    partial = sum((averaging_radius(k) for k in range(n, m + 1)), Fraction(0))
    ratio = Fraction(1, 2 ** (2 * m + 5))
    return partial + averaging_radius(m + 1) / (1 - ratio)


@dataclass(frozen=True)
class TailEstimate:
    n: int
    lhs_upper_bound: Fraction
    rhs: Fraction
    holds: bool

    def __bool__(self) -> bool:
        return self.holds


def verify_tail_estimate(n: int, terms: int = 8) -> TailEstimate:
    """Certify that the radius tail from n is below radius(n-1)/(3(n-1)).

    For n = 1 the right-hand side is 1/3 (the comparison the support
    confinement argument needs).  Comparison is exact on rationals.
    """
    if n < 1:
        raise ValueError(f"tail estimate needs n >= 1, got {n}")
    lhs = radius_series_tail_bound(n, terms)
    rhs = Fraction(1, 3) if n == 1 else averaging_radius(n - 1) / (3 * (n - 1))
    return TailEstimate(n, lhs, rhs, lhs < rhs)


@dataclass(frozen=True)
class SupportCheck:
    stage: int
    holds: bool
    offender: Fraction | None

    def __bool__(self) -> bool:
        return self.holds


def verify_stage_support(s: int, measure: DiscreteMeasure | None = None) -> SupportCheck:
    """Check that every atom lies strictly inside the open stage window."""
    mu = measure if measure is not None else build_stage(s).measure
    window = stage_window(s)
    for a in mu.atoms:
        if not window.contains(a.position):
            return SupportCheck(s, False, a.position)
    return SupportCheck(s, True, None)


@dataclass(frozen=True)
class CellMassCheck:
    stage: int
    holds: bool
    bad_cells: tuple[tuple[int, Fraction], ...]
    stray_positions: tuple[Fraction, ...]

    def __bool__(self) -> bool:
        return self.holds


def verify_cell_mass(s: int, measure: DiscreteMeasure | None = None) -> CellMassCheck:
    """Check unit mass on every full lattice cell (n-1/3, n+1/3) of stage s.

    Also checks the support side: each atom must lie strictly within 1/3 of
    an admissible integer cell center.  Returns the offending cells and
    stray atom positions, so a corrupted measure is pinpointed exactly.
    """
    mu = measure if measure is not None else build_stage(s).measure
    bound = cell_center_bound(s)
    third = Fraction(1, 3)
    totals: dict[int, Fraction] = {}
    strays: list[Fraction] = []
    for a in mu.atoms:
        n = math.floor(a.position + Fraction(1, 2))
        if abs(a.position - n) >= third or abs(n) > bound:
            strays.append(a.position)
            continue
        totals[n] = totals.get(n, Fraction(0)) + a.mass
    bad = [(n, totals.get(n, Fraction(0)))
           for n in range(-bound, bound + 1)
           if totals.get(n, Fraction(0)) != 1]
    return CellMassCheck(s, not bad and not strays, tuple(bad), tuple(strays))


@dataclass(frozen=True)
class MassDecayCheck:
    stage: int
    max_mass_outside: Fraction
    bound: Fraction
    holds: bool
    witness: Fraction | None

    def __bool__(self) -> bool:
        return self.holds


def verify_mass_decay(s: int, J: Interval) -> MassDecayCheck:
    """Check that atom masses outside the stage-s window stay below 1/(2s).

    J must strictly contain the stage window, so the check actually sees
    atoms created by later stages.
    """
    if s < 1:
        raise ValueError("mass decay bound is undefined for stage 0")
    inner = stage_window(s)
    if not J.contains_interval(inner) or (J.lo == inner.lo and J.hi == inner.hi):
        raise ValueError(f"window {J} must strictly contain the stage window {inner}")
    mu = limit_window(J)
    worst = Fraction(0)
    witness: Fraction | None = None
    for a in mu.atoms:
        if not inner.contains(a.position) and abs(a.mass) > worst:
            worst = abs(a.mass)
            witness = a.position
    bound = Fraction(1, 2 * s)
    return MassDecayCheck(s, worst, bound, worst < bound, witness)


def verify_stage_stability(s: int) -> bool:
    """Exact structural equality of stage s with stage s+1 on the stage-s window."""
    cur = build_stage(s)
    nxt = build_stage(s + 1)
    return restrict(nxt.measure, cur.measure.window) == cur.measure


@dataclass(frozen=True)
class ClusterCertificate:
    """Counting certificate for one descendant cluster of an ancestor atom.

    Following `branch` (one (stage, lattice shift) pair per averaging pass),
    the ancestor's unit of mass spreads over exactly q = prod(2k) atoms, all
    within `spread` = sum of radii of the cluster center, each carrying
    ancestor mass / q.
    """

    ancestor_stage: int
    ancestor_position: Fraction
    stages: tuple[int, ...]
    shifts: tuple[Fraction, ...]
    center: Fraction
    q: int
    spread: Fraction
    members: tuple[Fraction, ...]
    member_mass: Fraction


def cluster_certificate(target: StageMeasure, ancestor_stage: int,
                        ancestor_position: RationalLike,
                        branch: Sequence[tuple[int, RationalLike]]) -> ClusterCertificate:
    """Certify the cluster obtained from an ancestor atom along a branch.

    `branch` lists the averaging passes applied after `ancestor_stage`, as
    (stage, shift) with shift = +-3**(stage-1).  The certificate is built by
    re-expanding the iterated averaging offsets independently of the stage
    builder, checking that the intermediate offset sets are collision free
    and mutually disjoint, and then comparing against the actual atoms of
    `target` near the shifted center.
    """
    y = rational(ancestor_position)
    if not 0 <= ancestor_stage <= target.stage:
        raise ValueError(f"ancestor stage {ancestor_stage} out of range for target {target.stage}")
    ancestor_mass = build_stage(ancestor_stage).measure.mass_at(y)
    if ancestor_mass == 0:
        raise ValueError(f"{y} is not an atom of stage {ancestor_stage}")

    stages: list[int] = []
    shifts: list[Fraction] = []
    prev = ancestor_stage
    for k, sh in branch:
        sh = rational(sh)
        if k <= prev or k > target.stage:
            raise ValueError(f"branch stage {k} must increase within ({ancestor_stage}, {target.stage}]")
        if abs(sh) != 3 ** (k - 1):
            raise ValueError(f"branch shift {sh} is not a stage-{k} lattice step")
        stages.append(k)
        shifts.append(sh)
        prev = k

    level_offsets: list[set[Fraction]] = [{Fraction(0)}]
    for k in stages:
        step = set()
        for base in level_offsets[-1]:
            for off in _averaging_offsets(k):
                step.add(base + off)
        if len(step) != len(level_offsets[-1]) * 2 * k:
            raise AssertionError(f"offset collision while expanding stage {k}")
        level_offsets.append(step)
    for i in range(len(level_offsets)):
        for j in range(i + 1, len(level_offsets)):
            if level_offsets[i] & level_offsets[j]:
                raise AssertionError("iterated averaging images are not disjoint")

    q = math.prod(2 * k for k in stages)
    spread = sum((averaging_radius(k) for k in stages), Fraction(0))
    center = y + sum(shifts, Fraction(0))
    expected = sorted(center + off for off in level_offsets[-1])
    hood = Interval.closed(center - spread, center + spread)
    found = restrict(target.measure, hood)
    if found.positions() != expected:
        raise AssertionError(f"cluster near {center} does not match the branch expansion")
    mass = ancestor_mass / q
    if any(a.mass != mass for a in found.atoms):
        raise AssertionError(f"cluster near {center} has masses differing from {mass}")
    return ClusterCertificate(
        ancestor_stage=ancestor_stage,
        ancestor_position=y,
        stages=tuple(stages),
        shifts=tuple(shifts),
        center=center,
        q=q,
        spread=spread,
        members=tuple(expected),
        member_mass=mass,
    )
