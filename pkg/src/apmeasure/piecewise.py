"""Exact calculus of piecewise-linear test functions on the line.

Functions are stored as breakpoint/value lists with rational coordinates.
Two flavors exist: compactly supported functions (zero off their breakpoint
span, first and last values must be 0) and window functions (faithful only
on their span, e.g. the result of convolving against a windowed measure).
Because everything stays piecewise linear, suprema are attained at
breakpoints and every certificate below is an exact rational statement.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .measures import (
    DiscreteMeasure,
    Interval,
    RationalLike,
    rational,
    restrict,
)


class FaithfulnessError(ValueError):
    """A value was requested where the measure or function is not certified."""


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function given by breakpoints and values.

    With ``zero_outside`` the function is defined on all of the line and
    vanishes off the breakpoint span (so the boundary values must be zero);
    otherwise it is only defined on the span and evaluating outside raises.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    zero_outside: bool = True

    def __post_init__(self):
        bps = tuple(rational(b) for b in self.breakpoints)
        vals = tuple(rational(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if len(bps) != len(vals):
            raise ValueError("breakpoint and value lists differ in length")
        if not bps:
            raise ValueError("need at least one breakpoint")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if self.zero_outside:
            if len(bps) < 2 or vals[0] != 0 or vals[-1] != 0:
                raise ValueError("a compactly supported function must start and end at 0")

    @property
    def span(self) -> Interval:
        return Interval.closed(self.breakpoints[0], self.breakpoints[-1])

    def defined_on(self, J: Interval) -> bool:
        return self.zero_outside or self.span.contains_interval(J)

    def eval(self, x: RationalLike) -> Fraction:
        x = rational(x)
        bps = self.breakpoints
        if x < bps[0] or x > bps[-1]:
            if self.zero_outside:
                return Fraction(0)
            raise FaithfulnessError(f"{x} is outside the definition range {self.span}")
        i = bisect_right(bps, x) - 1
        if i == len(bps) - 1:
            return self.values[-1]
        x0, x1 = bps[i], bps[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0)

    def slopes(self) -> list[Fraction]:
        return [
            (v1 - v0) / (x1 - x0)
            for (x0, x1, v0, v1) in zip(self.breakpoints, self.breakpoints[1:],
                                        self.values, self.values[1:])
        ]

    def max_abs_slope(self) -> Fraction:
        slopes = self.slopes()
        return max((abs(s) for s in slopes), default=Fraction(0))

    def slope_changes(self) -> list[tuple[Fraction, Fraction]]:
        """(breakpoint, slope jump) pairs, including the jumps from/to zero
        at the support boundary.  Only meaningful for compactly supported
        functions."""
        slopes = [Fraction(0)] + self.slopes() + [Fraction(0)]
        return [
            (b, after - before)
            for b, before, after in zip(self.breakpoints, slopes, slopes[1:])
            if after != before
        ]

    def translate(self, t: RationalLike) -> "PiecewiseLinearFn":
        t = rational(t)
        return PiecewiseLinearFn(tuple(b + t for b in self.breakpoints),
                                 self.values, self.zero_outside)

    def scale(self, c: RationalLike) -> "PiecewiseLinearFn":
        c = rational(c)
        if c == 0 and not self.zero_outside:
            return PiecewiseLinearFn(self.breakpoints,
                                     (Fraction(0),) * len(self.values), False)
        return PiecewiseLinearFn(self.breakpoints,
                                 tuple(c * v for v in self.values), self.zero_outside)

    def canonical(self) -> "PiecewiseLinearFn":
        """Drop interior breakpoints where the slope does not change."""
        if len(self.breakpoints) <= 2:
            return self
        keep = [0]
        for i in range(1, len(self.breakpoints) - 1):
            left = (self.values[i] - self.values[keep[-1]]) / (self.breakpoints[i] - self.breakpoints[keep[-1]])
            right = (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
            if left != right:
                keep.append(i)
        keep.append(len(self.breakpoints) - 1)
        return PiecewiseLinearFn(tuple(self.breakpoints[i] for i in keep),
                                 tuple(self.values[i] for i in keep),
                                 self.zero_outside)


def triangle_test_function(half_width: RationalLike = Fraction(1, 6),
                           height: RationalLike = 1) -> PiecewiseLinearFn:
    """Tent of the given height supported on [-half_width, half_width]."""
    h = rational(half_width)
    if h <= 0:
        raise ValueError("half width must be positive")
    return PiecewiseLinearFn((-h, Fraction(0), h), (Fraction(0), rational(height), Fraction(0)))


def bump(v: RationalLike, j: int) -> PiecewiseLinearFn:
    """Trapezoid bump: 1 on [-(3j-1)v, (3j-1)v], 0 outside [-(3j+1)v, (3j+1)v].

    This is the closed form of the normalized convolution of the interval
    indicators of [-v, v] and [-3jv, 3jv].
    """
    v = rational(v)
    if v <= 0:
        raise ValueError("bump half width must be positive")
    if j < 1:
        raise ValueError("bump index must be >= 1")
    inner = (3 * j - 1) * v
    outer = (3 * j + 1) * v
    one = Fraction(1)
    zero = Fraction(0)
    return PiecewiseLinearFn((-outer, -inner, inner, outer), (zero, one, one, zero))


# ---------------------------------------------------------------------------
# Convolution against discrete measures
# ---------------------------------------------------------------------------

def _needed_region(f: PiecewiseLinearFn, J: Interval) -> Interval:
    # Boundary atoms meet f exactly at its vanishing support endpoints, so
    # the open region suffices for faithfulness.
    return Interval.open(J.lo - f.breakpoints[-1], J.hi - f.breakpoints[0])


def _check_faithful(f: PiecewiseLinearFn, mu: DiscreteMeasure, J: Interval) -> Interval:
    if not f.zero_outside:
        raise ValueError("convolution needs a compactly supported test function")
    needed = _needed_region(f, J)
    if not mu.window.contains_interval(needed):
        raise FaithfulnessError(
            f"convolution on {J} needs the measure on {needed}, "
            f"but its window is {mu.window}")
    return needed


def convolution_value(f: PiecewiseLinearFn, mu: DiscreteMeasure,
                      x: RationalLike) -> Fraction:
    """Exact value of (f * mu)(x) = sum of f(x - position) * mass."""
    x = rational(x)
    point = Interval.closed(x, x)
    _check_faithful(f, mu, point)
    lo = x - f.breakpoints[-1]
    hi = x - f.breakpoints[0]
    total = Fraction(0)
    for a in mu.atoms:
        if lo <= a.position <= hi:
            total += a.mass * f.eval(x - a.position)
    return total


def convolve(f: PiecewiseLinearFn, mu: DiscreteMeasure, J: Interval) -> PiecewiseLinearFn:
    """(f * mu) on the interval J as an exact window function.

    Faithfulness is enforced: the measure window must cover everything the
    convolution can see from J.  The result's breakpoints are the atom
    positions plus breakpoints of f, clipped to J.
    """
    needed = _check_faithful(f, mu, J)
    atoms = restrict(mu, needed).atoms
    changes = f.slope_changes()
    events: dict[Fraction, Fraction] = {}
    for a in atoms:
        for b, ds in changes:
            pos = a.position + b
            events[pos] = events.get(pos, Fraction(0)) + a.mass * ds

    inner = sorted(x for x in events if J.lo < x < J.hi)
    bps = [J.lo] + inner + ([J.hi] if J.hi > J.lo else [])
    value = sum((a.mass * f.eval(J.lo - a.position) for a in atoms), Fraction(0))
    slope = sum((ds for x, ds in events.items() if x <= J.lo), Fraction(0))
    values = [value]
    for i in range(1, len(bps)):
        if i >= 2:
            slope += events[bps[i - 1]]
        value += slope * (bps[i] - bps[i - 1])
        values.append(value)
    return PiecewiseLinearFn(tuple(bps), tuple(values), zero_outside=False)


# ---------------------------------------------------------------------------
# Exact suprema and almost-period defects
# ---------------------------------------------------------------------------

def sup_abs_diff(g1: PiecewiseLinearFn, g2: PiecewiseLinearFn,
                 J: Interval) -> tuple[Fraction, Fraction]:
    """Exact sup of |g1 - g2| over J with its (leftmost) witness point.

    The difference is piecewise linear, so the supremum is attained at a
    breakpoint of the merged breakpoint set or at an endpoint of J.
    """
    for g in (g1, g2):
        if not g.defined_on(J):
            raise FaithfulnessError(f"function with span {g.span} is not defined on {J}")
    candidates = {J.lo, J.hi}
    for g in (g1, g2):
        candidates.update(b for b in g.breakpoints if J.lo < b < J.hi)
    best = Fraction(-1)
    witness = J.lo
    for x in sorted(candidates):
        d = abs(g1.eval(x) - g2.eval(x))
        if d > best:
            best = d
            witness = x
    return best, witness


def sup_abs(g: PiecewiseLinearFn, J: Interval) -> tuple[Fraction, Fraction]:
    """Exact sup of |g| over J with its leftmost witness."""
    if not g.defined_on(J):
        raise FaithfulnessError(f"function with span {g.span} is not defined on {J}")
    candidates = {J.lo, J.hi}
    candidates.update(b for b in g.breakpoints if J.lo < b < J.hi)
    best = Fraction(-1)
    witness = J.lo
    for x in sorted(candidates):
        d = abs(g.eval(x))
        if d > best:
            best = d
            witness = x
    return best, witness


MeasureSource = Union[DiscreteMeasure, Callable[[Interval], DiscreteMeasure]]


def _measure_on(source: MeasureSource, region: Interval) -> DiscreteMeasure:
    if isinstance(source, DiscreteMeasure):
        return source
    return source(region)


def almost_period_defect(f: PiecewiseLinearFn, source: MeasureSource,
                         tau: RationalLike, J: Interval) -> tuple[Fraction, Fraction]:
    """Exact sup over x in J of |(f * mu)(x + tau) - (f * mu)(x)|.

    `source` is either a measure whose window already covers both J and
    J + tau (padded by the support of f), or a callable that produces the
    measure on a requested interval.  Returns (defect, witness x).
    """
    tau = rational(tau)
    pad_lo, pad_hi = f.breakpoints[0], f.breakpoints[-1]
    base_region = Interval.closed(J.lo - pad_hi, J.hi - pad_lo)
    far_region = base_region.translate(tau)
    g_base = convolve(f, _measure_on(source, base_region), J)
    g_far = convolve(f, _measure_on(source, far_region), J.translate(tau))
    return sup_abs_diff(g_far.translate(-tau), g_base, J)


@dataclass(frozen=True)
class DefectRow:
    tau: Fraction
    defect: Fraction
    witness: Fraction


@dataclass(frozen=True)
class AlmostPeriodCertificate:
    """Finite-window almost-period defect table for candidate shifts p*3**s.

    `density_gap` is the spacing of the candidate set: every interval of
    that length contains a candidate shift, which is what makes the
    candidates relatively dense.
    """

    scale_exponent: int
    epsilon: Fraction
    window: Interval
    tau_range: Fraction
    density_gap: Fraction
    rows: tuple[DefectRow, ...]
    max_defect: Fraction
    all_within: bool

    def __bool__(self) -> bool:
        return self.all_within


def almost_period_certificate(f: PiecewiseLinearFn, epsilon: RationalLike,
                              tau_range: RationalLike, s: int,
                              source: MeasureSource,
                              J: Interval = Interval.closed(Fraction(-1, 2), Fraction(1, 2)),
                              ) -> AlmostPeriodCertificate:
    """Measure the defect at every candidate shift tau = p*3**s, |tau| <= range.

    Defects are exact; the certificate passes when all of them are strictly
    below epsilon on the window J.
    """
    if s < 1:
        raise ValueError(f"scale exponent must be >= 1, got {s}")
    epsilon = rational(epsilon)
    tau_range = rational(tau_range)
    step = Fraction(3 ** s)
    p_max = int(tau_range / step)
    rows = []
    worst = Fraction(0)
    for p in range(-p_max, p_max + 1):
        tau = p * step
        defect, witness = almost_period_defect(f, source, tau, J)
        rows.append(DefectRow(tau, defect, witness))
        worst = max(worst, defect)
    return AlmostPeriodCertificate(
        scale_exponent=s,
        epsilon=epsilon,
        window=J,
        tau_range=tau_range,
        density_gap=step,
        rows=tuple(rows),
        max_defect=worst,
        all_within=worst < epsilon,
    )
