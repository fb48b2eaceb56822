"""Exact algebra of finite discrete measures on the real line.

Every scalar (position, mass, interval endpoint) is a `fractions.Fraction`,
so all operations here are exact: rerunning a pipeline reproduces results
bit for bit.  A measure is a finite, sorted, duplicate-free atom list
together with a *window*, the closed or open interval on which the list is
a faithful description of the (possibly much larger) underlying measure.
Operations that would need atoms outside the window fail loudly instead of
truncating silently.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

RationalLike = Union[Fraction, int, str]


class WindowError(ValueError):
    """An operation needed data outside a measure's faithfulness window."""


def rational(x: RationalLike) -> Fraction:
    """Coerce an int, Fraction, or exact fraction string like '3/16' to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Interval:
    """Rational interval with explicit openness per endpoint."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", rational(self.lo))
        object.__setattr__(self, "hi", rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self}")

    @staticmethod
    def closed(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(rational(lo), rational(hi))

    @staticmethod
    def open(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(rational(lo), rational(hi), True, True)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_empty(self) -> bool:
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def contains(self, x: RationalLike) -> bool:
        x = rational(x)
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and self.lo_open:
            return False
        if x == self.hi and self.hi_open:
            return False
        return True

    def contains_interval(self, other: "Interval") -> bool:
        """Set containment, honoring openness on both sides."""
        if other.is_empty:
            return True
        if other.lo < self.lo or (other.lo == self.lo and self.lo_open and not other.lo_open):
            return False
        if other.hi > self.hi or (other.hi == self.hi and self.hi_open and not other.hi_open):
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval | None":
        """Intersection as a set; None when the sets are disjoint."""
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        if lo > hi:
            return None
        out = Interval(lo, hi, lo_open, hi_open)
        return None if out.is_empty else out

    def translate(self, t: RationalLike) -> "Interval":
        t = rational(t)
        return Interval(self.lo + t, self.hi + t, self.lo_open, self.hi_open)

    def widen(self, delta: RationalLike) -> "Interval":
        """Enlarge by delta on each side, keeping openness flags."""
        delta = rational(delta)
        return Interval(self.lo - delta, self.hi + delta, self.lo_open, self.hi_open)

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi)

    def hull(self, other: "Interval") -> "Interval":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return Interval(lo, hi)

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


# ---------------------------------------------------------------------------
# Atoms and measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Atom:
    """A point mass: (position, mass), mass nonzero after canonicalization."""

    position: Fraction
    mass: Fraction

    def __post_init__(self):
        if not isinstance(self.position, Fraction):
            object.__setattr__(self, "position", rational(self.position))
        if not isinstance(self.mass, Fraction):
            object.__setattr__(self, "mass", rational(self.mass))


@dataclass(frozen=True)
class DiscreteMeasure:
    """Canonical finite atom list, strictly increasing by position, plus window.

    Construct through :func:`make_measure`; the constructor itself trusts its
    input.  Equality is structural: same atoms and same window.
    """

    atoms: tuple[Atom, ...]
    window: Interval

    def __len__(self) -> int:
        return len(self.atoms)

    def positions(self) -> list[Fraction]:
        return [a.position for a in self.atoms]

    @property
    def total_mass(self) -> Fraction:
        return sum((a.mass for a in self.atoms), Fraction(0))

    @property
    def total_variation(self) -> Fraction:
        return sum((abs(a.mass) for a in self.atoms), Fraction(0))

    def mass_at(self, x: RationalLike) -> Fraction:
        x = rational(x)
        i = bisect_left(self.atoms, x, key=lambda a: a.position)
        if i < len(self.atoms) and self.atoms[i].position == x:
            return self.atoms[i].mass
        return Fraction(0)

    def min_gap(self) -> Fraction | None:
        """Smallest distance between consecutive atoms; None below 2 atoms."""
        if len(self.atoms) < 2:
            return None
        return min(b.position - a.position for a, b in zip(self.atoms, self.atoms[1:]))

    def __str__(self) -> str:
        return f"DiscreteMeasure({len(self.atoms)} atoms on {self.window})"


def make_measure(pairs: Iterable[tuple[RationalLike, RationalLike]],
                 window: Interval) -> DiscreteMeasure:
    """Canonicalize (position, mass) pairs into a measure on `window`.

    Duplicate positions merge by summing masses, zero masses are dropped,
    atoms are sorted.  A position outside the window is a `WindowError`
    naming the offending atom.
    """
    items = [(rational(p), rational(m)) for p, m in pairs]
    for p, m in items:
        if not window.contains(p):
            raise WindowError(f"atom at {p} (mass {m}) lies outside window {window}")
    items.sort(key=lambda pm: pm[0])
    atoms: list[Atom] = []
    for p, m in items:
        if atoms and atoms[-1].position == p:
            merged = atoms[-1].mass + m
            if merged == 0:
                atoms.pop()
            else:
                atoms[-1] = Atom(p, merged)
        elif m != 0:
            atoms.append(Atom(p, m))
    return DiscreteMeasure(tuple(atoms), window)


def shift(mu: DiscreteMeasure, t: RationalLike) -> DiscreteMeasure:
    """Translate every atom and the window by t; masses unchanged."""
    t = rational(t)
    if t == 0:
        return mu
    atoms = tuple(Atom(a.position + t, a.mass) for a in mu.atoms)
    return DiscreteMeasure(atoms, mu.window.translate(t))


def averaging_radius(k: int) -> Fraction:
    """Shift radius 2**-((k+1)**2) of the k-th averaging operator."""
    if k < 1:
        raise ValueError(f"averaging radius needs k >= 1, got {k}")
    return Fraction(1, 2 ** ((k + 1) ** 2))


def averaging_operator(mu: DiscreteMeasure, k: int) -> DiscreteMeasure:
    """Average mu over 2k symmetric shifts of step radius/k.

    The operator replaces each atom by 2k copies at distances j*radius/k
    (j = 1..k, both signs), each carrying 1/(2k) of the mass.  Total mass is
    preserved exactly; the window widens by the radius on each side.
    """
    if k < 1:
        raise ValueError(f"averaging operator needs k >= 1, got {k}")
    radius = averaging_radius(k)
    weight = Fraction(1, 2 * k)
    offsets = [radius * j / k for j in range(-k, k + 1) if j != 0]
    pairs = [(a.position + off, a.mass * weight) for a in mu.atoms for off in offsets]
    return make_measure(pairs, mu.window.widen(radius))


def combine(c1: RationalLike, mu: DiscreteMeasure,
            c2: RationalLike, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Exact linear combination c1*mu + c2*nu on the common window.

    The result window is the intersection of the operand windows; atoms
    outside it are no longer certified and are dropped.  Disjoint windows
    raise `WindowError`.
    """
    c1, c2 = rational(c1), rational(c2)
    window = mu.window.intersect(nu.window)
    if window is None:
        raise WindowError(f"windows {mu.window} and {nu.window} do not overlap")
    pairs = [(a.position, c1 * a.mass) for a in mu.atoms if window.contains(a.position)]
    pairs += [(a.position, c2 * a.mass) for a in nu.atoms if window.contains(a.position)]
    return make_measure(pairs, window)


def restrict(mu: DiscreteMeasure, J: Interval) -> DiscreteMeasure:
    """Atoms of mu inside J (honoring openness); the result window is J.

    J must sit inside mu's window: faithfulness cannot be certified outside.
    """
    if not mu.window.contains_interval(J):
        raise WindowError(f"cannot restrict to {J}: outside window {mu.window}")
    lo = bisect_left(mu.atoms, J.lo, key=lambda a: a.position)
    hi = bisect_right(mu.atoms, J.hi, key=lambda a: a.position)
    atoms = [a for a in mu.atoms[lo:hi] if J.contains(a.position)]
    return DiscreteMeasure(tuple(atoms), J)


def variation_on(mu: DiscreteMeasure, J: Interval) -> Fraction:
    """Sum of |mass| over atoms in J; J must be inside the window."""
    return restrict(mu, J).total_variation


def sliding_variation_sup(mu: DiscreteMeasure, L: RationalLike) -> tuple[Fraction, Fraction]:
    """Exact sup over t of the variation on the closed window [t, t+L].

    The objective is piecewise constant in t and its sup is attained with an
    atom at the left endpoint, so scanning atom-anchored placements is exact.
    Returns (value, witness t).
    """
    L = rational(L)
    if L <= 0:
        raise ValueError(f"window length must be positive, got {L}")
    if not mu.atoms:
        return Fraction(0), mu.window.lo
    prefix = [Fraction(0)]
    for a in mu.atoms:
        prefix.append(prefix[-1] + abs(a.mass))
    positions = mu.positions()
    best = Fraction(0)
    witness = positions[0]
    j = 0
    for i, p in enumerate(positions):
        if j < i:
            j = i
        while j + 1 < len(positions) and positions[j + 1] <= p + L:
            j += 1
        value = prefix[j + 1] - prefix[i]
        if value > best:
            best = value
            witness = p
    return best, witness


def sliding_count_sup(mu: DiscreteMeasure, u: RationalLike) -> tuple[int, Fraction]:
    """Exact max number of atoms in any open interval (x-u, x+u).

    Returns (count, witness center x).  The witness is the center of the
    leftmost atom block realizing the max.
    """
    u = rational(u)
    if u <= 0:
        raise ValueError(f"neighborhood radius must be positive, got {u}")
    if not mu.atoms:
        return 0, mu.window.lo
    positions = mu.positions()
    width = 2 * u
    best = 0
    witness = positions[0]
    j = 0
    for i, p in enumerate(positions):
        if j < i:
            j = i
        while j + 1 < len(positions) and positions[j + 1] - p < width:
            j += 1
        count = j - i + 1
        if count > best:
            best = count
            witness = (p + positions[j]) / 2
    return best, witness
