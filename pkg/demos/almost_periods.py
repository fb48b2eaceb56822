"""Measure almost-period defects of the constructed measure, exactly.

Convolving the measure with a narrow triangle gives a continuous function;
shifting by multiples of 3**s changes that function by provably little,
because each lattice cell's contents are an averaged copy of another
cell's.  Every defect below is an exact rational supremum over a window,
not a sample estimate.

Run:  python demos/almost_periods.py
"""

from fractions import Fraction as F

from apmeasure import (
    Interval,
    almost_period_certificate,
    almost_period_defect,
    convolution_value,
    limit_window,
    radius_series_tail_bound,
    triangle_test_function,
)

f = triangle_test_function()
J = Interval.closed(F(-1, 2), F(1, 2))

print("the smoothed measure at 0 and at 3 differ by exactly 9/1024:")
v0 = convolution_value(f, limit_window(Interval.closed(-1, 1)), 0)
v3 = convolution_value(f, limit_window(Interval.closed(2, 4)), 3)
print(f"  (f*mu)(0) = {v0}")
print(f"  (f*mu)(3) = {v3}")
print(f"  difference {abs(v3 - v0)}")

print("\ndefect of a few small shifts over the window", J)
for tau in (0, 1, 3, 9):
    defect, witness = almost_period_defect(f, limit_window, tau, J)
    print(f"  tau = {tau}: defect {defect} (witnessed at x = {witness})")

print("\ncertificate for the candidate shifts tau = 9p, |tau| <= 81:")
cert = almost_period_certificate(f, F(1, 10), 81, 2, limit_window)
for row in cert.rows:
    print(f"  tau = {str(row.tau):>4}: defect {row.defect}")
print(f"  max defect {cert.max_defect} < epsilon {cert.epsilon}: {cert.all_within}")
print(f"  candidate spacing (relative density gap): {cert.density_gap}")

bound = f.max_abs_slope() * radius_series_tail_bound(3)
print(f"\nrigorous a-priori bound Lip(f) * tail(3) = {bound}")
print(f"measured max defect {cert.max_defect} stays below it: {cert.max_defect <= bound}")
