"""Point-set matching, lump decomposition, and the smoothed-difference harness.

Two discrete measures "come close" when their supports admit a bijection
whose position gaps and mass gaps vanish outside growing compact sets.
This module exhibits such bijections on finite windows (minimum total
position displacement, deterministic tie-breaks), decomposes supports into
lumps, and runs the product harness: the product over bump scales of the
smoothed difference is provably large at a disagreement point and provably
small far away once the matching hypothesis holds.  Everything is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .measures import (
    Atom,
    DiscreteMeasure,
    Interval,
    RationalLike,
    combine,
    rational,
    restrict,
    sliding_count_sup,
)
from .piecewise import PiecewiseLinearFn, bump, convolution_value, convolve, sup_abs


class HarnessConfigError(ValueError):
    """Harness parameters violate the geometric side conditions."""


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchedPair:
    left: Atom
    right: Atom

    @property
    def position_gap(self) -> Fraction:
        return self.left.position - self.right.position

    @property
    def mass_gap(self) -> Fraction:
        return self.left.mass - self.right.mass


@dataclass(frozen=True)
class WindowProfile:
    """Closeness of the matching over pairs escaping one window."""

    window: Interval
    pairs_outside: int
    max_abs_position_gap: Fraction
    max_abs_mass_gap: Fraction
    unmatched_outside: int


@dataclass(frozen=True)
class MatchReport:
    window: Interval
    pairs: tuple[MatchedPair, ...]
    unmatched_left: tuple[Atom, ...]
    unmatched_right: tuple[Atom, ...]
    profiles: tuple[WindowProfile, ...]
    profile_decreasing: bool
    coincide_on_window: bool


def _align_equal(a: Sequence[Atom], b: Sequence[Atom]) -> list[tuple[Atom, Atom]]:
    # For equal counts the order-preserving pairing minimizes the total
    # |position gap|: any crossing pair can be uncrossed without increasing
    # the cost of the convex distance.
    return list(zip(a, b))


def _align_partial(short: Sequence[Atom], long: Sequence[Atom]) -> tuple[list[tuple[Atom, Atom]], list[Atom]]:
    """Order-preserving min-cost matching of all of `short` into `long`."""
    m, n = len(short), len(long)
    inf = None
    cost = [[inf] * (n + 1) for _ in range(m + 1)]
    for j in range(n + 1):
        cost[0][j] = Fraction(0)
    for i in range(1, m + 1):
        for j in range(i, n + 1):
            pay = cost[i - 1][j - 1] + abs(short[i - 1].position - long[j - 1].position)
            skip = cost[i][j - 1]
            cost[i][j] = pay if (skip is None or pay <= skip) else skip
    pairs: list[tuple[Atom, Atom]] = []
    used = [False] * n
    i, j = m, n
    while i > 0:
        if j > i and cost[i][j] == cost[i][j - 1]:
            j -= 1
        else:
            pairs.append((short[i - 1], long[j - 1]))
            used[j - 1] = True
            i -= 1
            j -= 1
    pairs.reverse()
    leftovers = [long[k] for k in range(n) if not used[k]]
    return pairs, leftovers


def match_close(mu: DiscreteMeasure, nu: DiscreteMeasure,
                nested_windows: Sequence[Interval]) -> MatchReport:
    """Match the supports on the outermost window and profile the closeness.

    The bijection minimizes total |position gap| (for equal atom counts the
    sorted order pairing; unequal counts degrade to a partial matching of
    the smaller support with the leftovers reported).  Profiles list, per
    nested window, the exact sup of |position gap| and |mass gap| over pairs
    with either endpoint outside the window.
    """
    if not nested_windows:
        raise ValueError("need at least one window")
    for inner, outer in zip(nested_windows, nested_windows[1:]):
        if not outer.contains_interval(inner):
            raise ValueError(f"windows are not nested: {inner} is not inside {outer}")
    outermost = nested_windows[-1]
    a = restrict(mu, outermost).atoms
    b = restrict(nu, outermost).atoms

    unmatched_left: list[Atom] = []
    unmatched_right: list[Atom] = []
    if len(a) == len(b):
        raw = _align_equal(a, b)
    elif len(a) < len(b):
        raw, unmatched_right = _align_partial(a, b)
    else:
        swapped, unmatched_left = _align_partial(b, a)
        raw = [(x, y) for y, x in swapped]
    pairs = tuple(MatchedPair(x, y) for x, y in raw)

    profiles = []
    for K in nested_windows:
        outside = [p for p in pairs
                   if not (K.contains(p.left.position) and K.contains(p.right.position))]
        stray = sum(1 for at in (*unmatched_left, *unmatched_right)
                    if not K.contains(at.position))
        profiles.append(WindowProfile(
            window=K,
            pairs_outside=len(outside),
            max_abs_position_gap=max((abs(p.position_gap) for p in outside), default=Fraction(0)),
            max_abs_mass_gap=max((abs(p.mass_gap) for p in outside), default=Fraction(0)),
            unmatched_outside=stray,
        ))
    decreasing = all(
        nxt.max_abs_position_gap <= cur.max_abs_position_gap
        and nxt.max_abs_mass_gap <= cur.max_abs_mass_gap
        for cur, nxt in zip(profiles, profiles[1:])
    )
    coincide = (not unmatched_left and not unmatched_right
                and all(p.position_gap == 0 and p.mass_gap == 0 for p in pairs))
    return MatchReport(
        window=outermost,
        pairs=pairs,
        unmatched_left=tuple(unmatched_left),
        unmatched_right=tuple(unmatched_right),
        profiles=tuple(profiles),
        profile_decreasing=decreasing,
        coincide_on_window=coincide,
    )


def sparsity_bound(mu: DiscreteMeasure, nu: DiscreteMeasure, u: RationalLike) -> int:
    """Strict bound N: every open interval of radius u holds < N support
    points of either measure (computed exactly on the given windows)."""
    u = rational(u)
    count_mu, _ = sliding_count_sup(mu, u)
    count_nu, _ = sliding_count_sup(nu, u)
    return 1 + max(count_mu, count_nu)


# ---------------------------------------------------------------------------
# Lumps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lump:
    """A maximal chain of support points with consecutive gaps below the
    linking distance.  `pairwise_close` records whether the lump really sits
    inside one translate of the open neighborhood (diameter < link)."""

    left_positions: tuple[Fraction, ...]
    right_positions: tuple[Fraction, ...]
    lo: Fraction
    hi: Fraction
    left_mass: Fraction
    right_mass: Fraction

    @property
    def diameter(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mass_gap(self) -> Fraction:
        return abs(self.left_mass - self.right_mass)


@dataclass(frozen=True)
class LumpDecomposition:
    link: Fraction
    count_radius: Fraction
    lumps: tuple[Lump, ...]
    max_lumps_per_neighborhood: int
    count_witness: Fraction
    all_pairwise_close: bool


def lump_decompose(mu: DiscreteMeasure, nu: DiscreteMeasure, v: RationalLike,
                   u: RationalLike | None = None) -> LumpDecomposition:
    """Single-linkage decomposition of both supports with linking distance v.

    Points exactly v apart are NOT linked (the closeness condition uses the
    open neighborhood, so ties split).  Also reports the exact sliding sup
    of the number of lumps meeting an open interval of radius `u`
    (default v).
    """
    v = rational(v)
    if v <= 0:
        raise ValueError("linking distance must be positive")
    radius = v if u is None else rational(u)
    if radius <= 0:
        raise ValueError("count radius must be positive")
    tagged = sorted(
        [(a.position, 0, a.mass) for a in mu.atoms]
        + [(a.position, 1, a.mass) for a in nu.atoms]
    )
    groups: list[list[tuple[Fraction, int, Fraction]]] = []
    for item in tagged:
        if groups and item[0] - groups[-1][-1][0] < v:
            groups[-1].append(item)
        else:
            groups.append([item])
    lumps = []
    for g in groups:
        lumps.append(Lump(
            left_positions=tuple(p for p, side, _ in g if side == 0),
            right_positions=tuple(p for p, side, _ in g if side == 1),
            lo=g[0][0],
            hi=g[-1][0],
            left_mass=sum((m for _, side, m in g if side == 0), Fraction(0)),
            right_mass=sum((m for _, side, m in g if side == 1), Fraction(0)),
        ))

    # Sliding sup of lumps meeting (x - radius, x + radius): sweep the open
    # cover intervals (lo - radius, hi + radius); at equal positions an end
    # is processed before a start, since open intervals do not share their
    # boundary point.
    events = sorted(
        [(lump.lo - radius, 1) for lump in lumps]
        + [(lump.hi + radius, -1) for lump in lumps],
        key=lambda e: (e[0], e[1]),
    )
    best, cur = 0, 0
    witness = lumps[0].lo if lumps else Fraction(0)
    for idx, (pos, delta) in enumerate(events):
        cur += delta
        nxt = events[idx + 1][0] if idx + 1 < len(events) else pos + 1
        if cur > best and nxt > pos:
            best = cur
            witness = (pos + nxt) / 2
    return LumpDecomposition(
        link=v,
        count_radius=radius,
        lumps=tuple(lumps),
        max_lumps_per_neighborhood=best,
        count_witness=witness,
        all_pairwise_close=all(lump.diameter < v for lump in lumps),
    )


# ---------------------------------------------------------------------------
# Product harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarnessConfig:
    """Geometry of the product harness.

    v is the bump half width, n the number of bump factors, epsilon the mass
    tolerance of the matching hypothesis, `compact` the region outside which
    closeness is assumed, and u the separation radius.  The widest bump must
    fit inside the separation neighborhood: (3n+2) v <= u.
    """

    v: Fraction
    n: int
    epsilon: Fraction
    compact: Interval
    u: Fraction

    def __post_init__(self):
        object.__setattr__(self, "v", rational(self.v))
        object.__setattr__(self, "epsilon", rational(self.epsilon))
        object.__setattr__(self, "u", rational(self.u))
        if self.n < 1:
            raise HarnessConfigError(f"need at least one factor, got n={self.n}")
        if self.v <= 0:
            raise HarnessConfigError(f"bump half width must be positive, got {self.v}")
        if self.u <= 0:
            raise HarnessConfigError(f"separation radius must be positive, got {self.u}")
        if (3 * self.n + 2) * self.v > self.u:
            raise HarnessConfigError(
                f"(3n+2)v = {(3 * self.n + 2) * self.v} exceeds the separation radius u = {self.u}")

    def bumps(self) -> list[PiecewiseLinearFn]:
        return [bump(self.v, j) for j in range(1, self.n + 1)]


def disagreement_product(mu: DiscreteMeasure, nu: DiscreteMeasure,
                         cfg: HarnessConfig, x: RationalLike) -> Fraction:
    """Product over j = 1..n of the smoothed difference ((mu-nu) * bump_j)(x)."""
    x = rational(x)
    diff = combine(1, mu, -1, nu)
    value = Fraction(1)
    for phi in cfg.bumps():
        value *= convolution_value(phi, diff, x)
    return value


@dataclass(frozen=True)
class OriginIdentityCheck:
    value: Fraction
    expected: Fraction
    holds: bool
    degenerate: bool

    def __bool__(self) -> bool:
        return self.holds


def origin_product_identity(mu: DiscreteMeasure, nu: DiscreteMeasure,
                            cfg: HarnessConfig) -> OriginIdentityCheck:
    """Check that the product at 0 equals (mu(0) - nu(0))**n exactly.

    Requires the origin to be the only support point of either measure in
    the open separation neighborhood of radius (3n+2)v; an intruding atom is
    an error.  A zero mass difference makes the identity trivially true and
    is flagged degenerate.
    """
    sep = (3 * cfg.n + 2) * cfg.v
    hood = Interval.open(-sep, sep)
    for m in (mu, nu):
        for a in m.atoms:
            if a.position != 0 and hood.contains(a.position):
                raise HarnessConfigError(
                    f"atom at {a.position} intrudes into the separation neighborhood {hood}")
    difference = mu.mass_at(0) - nu.mass_at(0)
    expected = difference ** cfg.n
    value = disagreement_product(mu, nu, cfg, 0)
    return OriginIdentityCheck(value, expected, value == expected, difference == 0)


@dataclass(frozen=True)
class FarFieldSample:
    point: Fraction
    product: Fraction
    bound: Fraction
    holds: bool


@dataclass(frozen=True)
class FarFieldReport:
    """Exact check of |product(b)| < n * epsilon * C**(n-1) at far samples.

    C is the exact sup of the smoothed differences over the examined window
    (the hull of the compact and the samples), which is the uniform bound
    the inequality needs where it is evaluated.
    """

    examined: Interval
    c_bound: Fraction
    n: int
    epsilon: Fraction
    samples: tuple[FarFieldSample, ...]
    hypothesis_ok: bool
    hypothesis_note: str
    all_hold: bool

    def __bool__(self) -> bool:
        return self.all_hold


def far_field_check(mu: DiscreteMeasure, nu: DiscreteMeasure, cfg: HarnessConfig,
                    sample_points: Sequence[RationalLike],
                    match_report: MatchReport | None = None) -> FarFieldReport:
    """Validate the far-field smallness of the product at the given samples.

    Each sample must lie outside the compact enlarged by the separation
    radius.  The matching hypothesis (position gaps within v, mass gaps
    below epsilon for every pair escaping the compact) is verified on the
    supplied or freshly computed match report before the inequality is
    asserted.
    """
    samples = [rational(b) for b in sample_points]
    if not samples:
        raise ValueError("need at least one sample point")
    k = cfg.compact
    for b in samples:
        if k.lo - cfg.u < b < k.hi + cfg.u:
            raise ValueError(f"sample {b} lies inside the enlarged compact "
                             f"({k.lo - cfg.u}, {k.hi + cfg.u})")
    examined = Interval.closed(min(k.lo, min(samples)), max(k.hi, max(samples)))

    common = mu.window.intersect(nu.window)
    if common is None or not common.contains_interval(k):
        raise ValueError("the compact must lie inside the common measure window")
    if match_report is None:
        match_report = match_close(mu, nu, [k, common])
    note = "position gaps within v and mass gaps below epsilon outside the compact"
    ok = True
    for p in match_report.pairs:
        if k.contains(p.left.position) and k.contains(p.right.position):
            continue
        if abs(p.position_gap) > cfg.v or abs(p.mass_gap) >= cfg.epsilon:
            ok = False
            note = (f"pair ({p.left.position}, {p.right.position}) escapes the compact "
                    f"with position gap {p.position_gap} and mass gap {p.mass_gap}")
            break
    if ok:
        for at in (*match_report.unmatched_left, *match_report.unmatched_right):
            if not k.contains(at.position):
                ok = False
                note = f"unmatched atom at {at.position} outside the compact"
                break

    diff = combine(1, mu, -1, nu)
    factors = [convolve(phi, diff, examined) for phi in cfg.bumps()]
    c_bound = max(sup_abs(g, examined)[0] for g in factors)
    rhs = cfg.n * cfg.epsilon * c_bound ** (cfg.n - 1)
    rows = []
    for b in samples:
        product = Fraction(1)
        for g in factors:
            product *= g.eval(b)
        rows.append(FarFieldSample(b, product, rhs, abs(product) < rhs))
    return FarFieldReport(
        examined=examined,
        c_bound=c_bound,
        n=cfg.n,
        epsilon=cfg.epsilon,
        samples=tuple(rows),
        hypothesis_ok=ok,
        hypothesis_note=note,
        all_hold=ok and all(r.holds for r in rows),
    )
