"""Independent oracles and scenario builders shared across the test suite.

Everything here deliberately avoids the library's own fast paths: counts go
through quadratic scans, matchings through permutation enumeration, and
convolution values through literal pointwise sums, so that agreement is an
actual cross-check.
"""

from fractions import Fraction
from itertools import permutations

from apmeasure import DiscreteMeasure, Interval, make_measure


def brute_count_sup(mu: DiscreteMeasure, u: Fraction) -> int:
    """Max atoms in an open interval of length 2u via full pair scan."""
    positions = mu.positions()
    best = 0
    for i, p in enumerate(positions):
        count = sum(1 for q in positions if p <= q < p + 2 * u)
        best = max(best, count)
    return best


def brute_variation_sup(mu: DiscreteMeasure, L: Fraction) -> Fraction:
    """Max variation on closed [t, t+L] over atom-anchored t via full scan."""
    best = Fraction(0)
    for a in mu.atoms:
        t = a.position
        value = sum((abs(b.mass) for b in mu.atoms if t <= b.position <= t + L), Fraction(0))
        best = max(best, value)
    return best


def brute_min_matching_cost(a_positions, b_positions) -> Fraction:
    """Minimum total |position difference| over all bijections (n <= 7)."""
    assert len(a_positions) == len(b_positions) <= 7
    best = None
    for perm in permutations(range(len(b_positions))):
        cost = sum(abs(a_positions[i] - b_positions[j]) for i, j in enumerate(perm))
        if best is None or cost < best:
            best = cost
    return best


def pointwise_convolution(f, mu: DiscreteMeasure, x: Fraction) -> Fraction:
    """Literal sum of f(x - position) * mass over every atom."""
    return sum((a.mass * f.eval(x - a.position) for a in mu.atoms), Fraction(0))


def grid_max_abs_diff(g1, g2, J: Interval, steps: int = 200) -> Fraction:
    """Lower bound for sup |g1 - g2| on J from a uniform rational grid."""
    best = Fraction(0)
    for i in range(steps + 1):
        x = J.lo + (J.hi - J.lo) * i / steps
        best = max(best, abs(g1.eval(x) - g2.eval(x)))
    return best


def indicator_overlap_bump(v: Fraction, j: int, x: Fraction) -> Fraction:
    """Normalized overlap |[x-v, x+v] cap [-3jv, 3jv]| / (2v).

    The defining form of the trapezoid bump, evaluated directly from
    interval overlap lengths.
    """
    lo = max(x - v, -3 * j * v)
    hi = min(x + v, 3 * j * v)
    return max(Fraction(0), hi - lo) / (2 * v)


def integer_comb(n_lo: int, n_hi: int, mass=Fraction(1),
                 pad=Fraction(1, 2)) -> DiscreteMeasure:
    """Unit masses at the integers n_lo..n_hi."""
    return make_measure([(Fraction(n), mass) for n in range(n_lo, n_hi + 1)],
                        Interval.closed(n_lo - pad, n_hi + pad))


def perturbed_comb(n_lo: int, n_hi: int, pad=Fraction(1, 2)) -> DiscreteMeasure:
    """Integer comb with each point n nudged right by 1/(8(|n|+1))."""
    return make_measure(
        [(n + Fraction(1, 8 * (abs(n) + 1)), Fraction(1)) for n in range(n_lo, n_hi + 1)],
        Interval.closed(n_lo - pad, n_hi + pad))
