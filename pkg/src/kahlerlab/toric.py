"""Smooth projective toric surfaces: fans, moment polytopes, delta estimators.

A surface is given by the counterclockwise list of primitive ray generators
of its fan.  Everything downstream is exact: intersection numbers from the
adjacency ruleset, polytopes with rational vertices, lattice-point sums for
the k-basis-type coefficients, and barycenters for the limit estimator.
No floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, floor, gcd
from typing import Mapping, Sequence, Tuple

from .errors import (
    EmptyPolytope,
    NoSections,
    NotComplete,
    NotNef,
    NotSmooth,
    WrongArity,
)
from .intersect import IntersectionData, rat_str

Ray = Tuple[int, int]


def _det(a: Ray, b: Ray) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _dot(u, v) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


@dataclass(frozen=True)
class ToricSurfaceFan:
    """Counterclockwise primitive rays of a smooth complete fan in Z^2."""

    rays: Tuple[Ray, ...]

    def __post_init__(self):
        rays = tuple((int(x), int(y)) for x, y in self.rays)
        object.__setattr__(self, "rays", rays)
        if len(rays) < 3:
            raise NotComplete("a complete fan needs at least 3 rays")
        if len(set(rays)) != len(rays):
            raise NotComplete("rays must be pairwise distinct")
        for v in rays:
            if gcd(v[0], v[1]) != 1:
                raise NotSmooth("ray %r is not primitive" % (v,))
        for v, w in zip(rays, rays[1:] + rays[:1]):
            d = _det(v, w)
            if d <= 0:
                raise NotComplete(
                    "rays %r, %r are not counterclockwise-adjacent" % (v, w)
                )
            if d != 1:
                raise NotSmooth("cone spanned by %r, %r has index %d" % (v, w, d))
        # det(v_{i-1}, v_{i+1}) = -D_i^2, and sum D_i^2 = 12 - 3m exactly when
        # the ray sequence winds once around the origin.
        m = len(rays)
        winding = sum(
            _det(rays[i - 1], rays[(i + 1) % m]) for i in range(m)
        )
        if winding != 3 * m - 12:
            raise NotComplete("ray sequence does not wind exactly once")

    @property
    def m(self) -> int:
        return len(self.rays)

    def self_intersection(self, i: int) -> int:
        """D_i^2 from the smoothness relation v_{i-1} + v_{i+1} = -D_i^2 v_i."""
        m = self.m
        return -_det(self.rays[(i - 1) % m], self.rays[(i + 1) % m])


# -- intersection data --------------------------------------------------------


def _ample_offsets(fan: ToricSurfaceFan) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Integral support numbers of an ample divisor, plus its facet lengths.

    For each i write -v_i in the (unique) cone containing it; summing the
    resulting nonnegative relations gives strictly positive integers t with
    sum t_i v_i = 0.  Walking edge vectors t_i * (v_i rotated clockwise)
    closes up into a convex polygon whose facet i has inward normal v_i;
    its support numbers are the offsets of an ample divisor with
    A . D_i = t_i.
    """
    rays = fan.rays
    m = fan.m
    t = [0] * m
    for i, v in enumerate(rays):
        w = (-v[0], -v[1])
        t[i] += 1
        for j in range(m):
            a, b = rays[j], rays[(j + 1) % m]
            # w = p*a + q*b with p = det(w, b), q = det(a, w) in a unimodular cone
            p, q = _det(w, b), _det(a, w)
            if p >= 0 and q >= 0:
                t[j] += p
                t[(j + 1) % m] += q
                break
        else:
            raise NotComplete("no cone contains %r" % (w,))
    assert sum(t[i] * rays[i][0] for i in range(m)) == 0
    assert sum(t[i] * rays[i][1] for i in range(m)) == 0
    # vertices of the polygon, starting anywhere; facet i runs p_i -> p_{i+1}
    pts = [(0, 0)]
    for i in range(m - 1):
        x, y = pts[-1]
        vx, vy = rays[i]
        pts.append((x + t[i] * vy, y - t[i] * vx))
    offsets = tuple(-_dot(pts[i], rays[i]) for i in range(m))
    return offsets, tuple(t)


def build_intersection_data(fan: ToricSurfaceFan) -> IntersectionData:
    """Exact intersection form on the ray divisor classes.

    Basis: D1..Dm in ray order, K = -sum D_i, and one ample class A
    constructed from an integral polygon with inward normals the rays.
    Adjacent rays meet once, disjoint rays not at all, and D_i^2 comes from
    the smoothness relation.  c2 is the ray count.
    """
    m = fan.m
    labels = tuple("D%d" % (i + 1) for i in range(m)) + ("K", "A")
    sq = [fan.self_intersection(i) for i in range(m)]
    offsets, lengths = _ample_offsets(fan)

    def dd(i: int, j: int) -> int:
        if i == j:
            return sq[i]
        if (j - i) % m == 1 or (i - j) % m == 1:
            return 1
        return 0

    def pair_row(i: int):
        # row of the form against D_i: entries for every basis label
        kd = -(sq[i] + 2)
        ad = offsets[(i - 1) % m] + sq[i] * offsets[i] + offsets[(i + 1) % m]
        assert ad == lengths[i] and ad > 0
        return [dd(i, j) for j in range(m)] + [kd, ad]

    rows = [pair_row(i) for i in range(m)]
    krow = [-(sq[j] + 2) for j in range(m)] + [12 - m, -sum(lengths)]
    arow = [rows[j][m + 1] for j in range(m)] + [
        -sum(lengths),
        sum(offsets[j] * lengths[j] for j in range(m)),
    ]
    table = rows + [krow, arow]
    form = {}
    for i, la in enumerate(labels):
        for j in range(i, len(labels)):
            form[tuple(sorted((la, labels[j])))] = Fraction(table[i][j])
    ample = frozenset(
        {"A"}
        | {
            "D%d" % (i + 1)
            for i in range(m)
            if all(dd(i, j) > 0 for j in range(m))
        }
    )
    return IntersectionData(2, labels, "K", ample, form, {(): Fraction(m)})


# -- moment polytopes ---------------------------------------------------------


@dataclass(frozen=True)
class Polytope:
    """Rational polygon {u : <u, v_i> >= -lambda_i} with derived vertices.

    Inequalities keep the fan's ray order so facet i talks about divisor D_i.
    Vertices are counterclockwise.  Construct through polytope() so the
    derived data is trusted.
    """

    inequalities: Tuple[Tuple[Ray, Fraction], ...]
    vertices: Tuple[Tuple[Fraction, Fraction], ...]


def polytope(fan: ToricSurfaceFan, offsets: Sequence) -> Polytope:
    """Moment polytope of sum lambda_i D_i; raises unless the class is nef.

    EmptyPolytope when no point satisfies every inequality; NotNef when the
    polytope is nonempty but some offset is not attained, i.e. the stored
    lambda_i exceeds the true support number and the class meets the
    corresponding curve negatively.
    """
    rays = fan.rays
    lam = [Fraction(o) for o in offsets]
    if len(lam) != fan.m:
        raise WrongArity("need one offset per ray")
    ineqs = tuple((v, o) for v, o in zip(rays, lam))

    def inside(u) -> bool:
        return all(_dot(u, v) >= -o for v, o in ineqs)

    cand = set()
    m = fan.m
    for i in range(m):
        for j in range(i + 1, m):
            vi, vj = rays[i], rays[j]
            d = _det(vi, vj)
            if d == 0:
                continue
            # solve <u, v_i> = -lam_i, <u, v_j> = -lam_j
            x = (-lam[i] * vj[1] + lam[j] * vi[1]) / d
            y = (-lam[j] * vi[0] + lam[i] * vj[0]) / d
            if inside((x, y)):
                cand.add((x, y))
    if not cand:
        raise EmptyPolytope("no vertex satisfies every inequality")
    verts = _ccw(cand)
    for v, o in ineqs:
        if all(_dot(u, v) != -o for u in verts):
            raise NotNef(
                "offset for ray %r is never attained; the class is not nef" % (v,)
            )
    return Polytope(ineqs, verts)


def _ccw(points) -> Tuple[Tuple[Fraction, Fraction], ...]:
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)

    def half(p):
        # 0 for the upper half-turn (angle in [0, pi)), 1 for the lower
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def cmp(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return -1 if hp < hq else 1
        cross = (p[0] - cx) * (q[1] - cy) - (p[1] - cy) * (q[0] - cx)
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    return tuple(sorted(points, key=cmp_to_key(cmp)))


def anticanonical_polytope(fan: ToricSurfaceFan) -> Polytope:
    """P = {u : <u, v_i> >= -1}, the moment polytope of -K when nef."""
    return polytope(fan, [1] * fan.m)


def area(poly: Polytope) -> Fraction:
    v = poly.vertices
    s = sum(
        v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1]
        for i in range(len(v))
    )
    return Fraction(s, 2)


def barycenter(poly: Polytope) -> Tuple[Fraction, Fraction]:
    """Exact centroid via the signed triangle decomposition from the origin."""
    a = area(poly)
    if a == 0:
        raise EmptyPolytope("polytope is not full-dimensional")
    v = poly.vertices
    cx = cy = Fraction(0)
    for i in range(len(v)):
        p, q = v[i], v[(i + 1) % len(v)]
        cross = p[0] * q[1] - q[0] * p[1]
        cx += (p[0] + q[0]) * cross
        cy += (p[1] + q[1]) * cross
    return cx / (6 * a), cy / (6 * a)


def lattice_points(poly: Polytope, k: int = 1):
    """All u in kP with integer coordinates, in row-major order."""
    if k < 1:
        raise NoSections("level k must be a positive integer")
    xs = [k * p[0] for p in poly.vertices]
    ys = [k * p[1] for p in poly.vertices]
    out = []
    for yy in range(ceil(min(ys)), floor(max(ys)) + 1):
        for xx in range(ceil(min(xs)), floor(max(xs)) + 1):
            if all(_dot((xx, yy), v) >= -k * o for v, o in poly.inequalities):
                out.append((xx, yy))
    return out


# -- delta and alpha estimators -----------------------------------------------


@dataclass(frozen=True)
class DeltaEstimate:
    """Torus-invariant level-k estimate: section count, coefficients, invariants."""

    k: int
    N_k: int
    coefficients: Tuple[Fraction, ...]
    delta_k: Fraction
    alpha_k: Fraction


def basis_type_coefficients(poly: Polytope, k: int):
    """(N_k, per-facet a_i) of the torus-invariant k-basis-type divisor.

    a_i = (1/(k N_k)) sum over lattice points u of kP of (<u, v_i> + k lambda_i):
    each section s_u vanishes on D_i to that order, and the basis-type divisor
    averages the section divisors.
    """
    pts = lattice_points(poly, k)
    if not pts:
        raise NoSections("kP contains no lattice point at k = %d" % k)
    nk = len(pts)
    coeffs = []
    for v, o in poly.inequalities:
        s = sum(_dot(u, v) for u in pts) + nk * k * o
        coeffs.append(s / Fraction(k * nk))
    return nk, tuple(coeffs)


def delta_k(poly: Polytope, k: int) -> Fraction:
    """min_i 1/a_i: the log canonical threshold of the k-basis-type divisor.

    A torus-invariant pair is log canonical exactly when every boundary
    coefficient is <= 1, so the threshold of sum a_i D_i is the smallest
    reciprocal coefficient.  Facets carrying no vanishing impose nothing.
    """
    _, coeffs = basis_type_coefficients(poly, k)
    positive = [a for a in coeffs if a > 0]
    if not positive:
        raise NoSections("basis-type divisor vanishes; threshold is unbounded")
    return min(1 / a for a in positive)


def delta_limit(poly: Polytope) -> Fraction:
    """min_i 1/(lambda_i + <b, v_i>) at the exact barycenter b of P.

    The level-k coefficients average <u, v_i> + k lambda_i over kP, and the
    average of u/k tends to the barycenter, so this is the k -> infinity
    value of delta_k.
    """
    b = barycenter(poly)
    vals = [o + _dot(b, v) for v, o in poly.inequalities]
    return min(1 / a for a in vals if a > 0)


def alpha_k(poly: Polytope, k: int) -> Fraction:
    """Worst single-section threshold at level k, a lower bound for alpha.

    For each lattice point u of kP the section s_u has divisor
    (1/k) sum (<u, v_i> + k lambda_i) D_i; its threshold is the smallest
    k/(coefficient) over facets the section actually meets.
    """
    pts = lattice_points(poly, k)
    if not pts:
        raise NoSections("kP contains no lattice point at k = %d" % k)
    best = None
    for u in pts:
        for v, o in poly.inequalities:
            c = _dot(u, v) + k * o
            if c > 0:
                t = Fraction(k) / c
                if best is None or t < best:
                    best = t
    if best is None:
        raise NoSections("every section divisor vanishes; alpha is unbounded")
    return best


def delta_estimate(poly: Polytope, k: int) -> DeltaEstimate:
    nk, coeffs = basis_type_coefficients(poly, k)
    positive = [a for a in coeffs if a > 0]
    if not positive:
        raise NoSections("basis-type divisor vanishes; threshold is unbounded")
    return DeltaEstimate(k, nk, coeffs, min(1 / a for a in positive), alpha_k(poly, k))


def check_bj_bounds(alpha: Fraction, delta: Fraction, n: int, ample: bool) -> bool:
    """delta >= alpha, alpha >= delta/(n+1), and alpha >= n*delta/(n+1) if ample.

    Returns whether every applicable inequality holds.  Fed a torus-invariant
    single-section estimate rather than the true alpha, the ample form can
    report False; callers decide which form applies.
    """
    alpha, delta = Fraction(alpha), Fraction(delta)
    if alpha < 0 or delta < 0:
        raise ValueError("alpha and delta must be nonnegative")
    ok = delta >= alpha and alpha >= Fraction(delta, n + 1)
    if ample:
        ok = ok and alpha >= Fraction(n * delta, n + 1)
    return ok


def same_divisor_class(fan: ToricSurfaceFan, a: Sequence, b: Sequence) -> bool:
    """Whether sum a_i D_i ~ sum b_i D_i modulo the relations sum <e, v_i> D_i.

    Linear equivalence on a toric surface is generated by the two character
    relations, so the difference must be i -> <m, v_i> for a single rational m.
    """
    rays = fan.rays
    if len(a) != fan.m or len(b) != fan.m:
        raise WrongArity("need one coefficient per ray")
    d = [Fraction(x) - Fraction(y) for x, y in zip(a, b)]
    v0, v1 = rays[0], rays[1]
    det = _det(v0, v1)
    mx = (d[0] * v1[1] - d[1] * v0[1]) / det
    my = (d[1] * v0[0] - d[0] * v1[0]) / det
    return all(_dot((mx, my), v) == di for v, di in zip(rays, d))


# -- JSON interface -----------------------------------------------------------


def fan_from_dict(doc: Mapping) -> ToricSurfaceFan:
    return ToricSurfaceFan(tuple((int(x), int(y)) for x, y in doc["rays"]))


def fan_to_dict(fan: ToricSurfaceFan) -> dict:
    return {"rays": [list(v) for v in fan.rays]}


def delta_report_dict(poly: Polytope, k: int) -> dict:
    est = delta_estimate(poly, k)
    return {
        "k": est.k,
        "N_k": est.N_k,
        "coefficients": [rat_str(a) for a in est.coefficients],
        "delta_k": rat_str(est.delta_k),
        "alpha_k": rat_str(est.alpha_k),
        "delta_limit": rat_str(delta_limit(poly)),
    }
