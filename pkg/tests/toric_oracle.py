"""Brute-force cross-checks built on a code path separate from the package.

The enumerator walks horizontal scanlines and clips each against every
half-plane; the divisor is accumulated section by section as exact
fractions.  Nothing here touches the package's vertex or averaging code,
so exact agreement is evidence, not tautology.
"""

from fractions import Fraction
from math import ceil, floor, gcd


def scanline_points(ineqs, k):
    """Integer points of kP for P = {<u,v> >= -lam}, by y-row clipping.

    Assumes the polytope sits inside |x|, |y| <= 2 k lam_max n_max + 2,
    which holds for every corpus polytope (small integer data).
    """
    lam_max = max(abs(o) for _, o in ineqs)
    n_max = max(max(abs(v[0]), abs(v[1])) for v, _ in ineqs)
    bound = 2 * k * (ceil(lam_max) + 1) * n_max + 2
    pts = []
    for y in range(-bound, bound + 1):
        lo, hi = Fraction(-bound), Fraction(bound)
        dead = False
        for (a, b), o in ineqs:
            rhs = -k * Fraction(o) - b * y
            if a > 0:
                lo = max(lo, Fraction(rhs, a))
            elif a < 0:
                hi = min(hi, Fraction(rhs, a))
            elif rhs > 0:
                dead = True
                break
        if dead:
            continue
        pts.extend((x, y) for x in range(ceil(lo), floor(hi) + 1))
    return pts


def monomial_basis_divisor(ineqs, k):
    """(N_k, coefficients) of the averaged divisor, summed per section."""
    pts = scanline_points(ineqs, k)
    n = len(pts)
    coeffs = [Fraction(0)] * len(ineqs)
    for u in pts:
        for i, ((a, b), o) in enumerate(ineqs):
            order = a * u[0] + b * u[1] + k * Fraction(o)
            coeffs[i] += order / Fraction(k * n)
    return n, coeffs


def min_reciprocal(coeffs):
    return min(1 / c for c in coeffs if c > 0)


def pick_count(vertices, k):
    """Area + boundary/2 + 1 for the dilation kP, which must be integral."""
    v = [(k * x, k * y) for x, y in vertices]
    assert all(x.denominator == 1 and y.denominator == 1 for x, y in v)
    v = [(int(x), int(y)) for x, y in v]
    double_area = sum(
        v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1]
        for i in range(len(v))
    )
    boundary = sum(
        gcd(abs(v[(i + 1) % len(v)][0] - v[i][0]), abs(v[(i + 1) % len(v)][1] - v[i][1]))
        for i in range(len(v))
    )
    return Fraction(double_area, 2) + Fraction(boundary, 2) + 1
