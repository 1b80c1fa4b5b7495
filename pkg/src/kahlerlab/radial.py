"""Radial calculus for U(n)-invariant Kahler geometry on projective space.

Conventions, fixed once for every numeric module:

  * t = log|z|^2 on the dense chart; a closed invariant (1,1)-form is
    i ddbar of a radial potential G(t) and is stored with its derivative
    arrays and its two asymptotic slopes G'(-inf), G'(+inf).
  * Slopes encode cohomology: slope pair (0, s) represents 2*pi*s*c1(O(1)).
    The metric class 2*pi*c1(-K) + eps*c1(A) on P^n therefore has
    b = (n+1) + eps/(2*pi) and total volume V = (2*pi)^n b^n.
  * A wedge product of closed invariant forms pushes forward to the line as
    (2*pi)^n d/dt[prod_i (G_i')^{k_i}] dt, a total derivative.  Quadrature
    is composite Simpson on [-T, T] plus tail masses taken exactly from the
    slope limits, with the bounded integrand frozen at its end values.
  * Ric means the complex Ricci form -i ddbar log det g, so [Ric] is
    2*pi*c1(-K) and the radial Ricci potential is
    r = n t - log u'' - (n-1) log u'.  Scalar curvature is the trace
    R = Tr_omega Ric; the Fubini-Study model of slope b has R = n(n+1)/b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ClassMismatch, NotKahler

TAU = 2.0 * math.pi

# a smooth potential on P^n flattens like e^{-T} at the chart ends; this
# tolerance separates that decay from genuine slope (class) drift
SLOPE_TOL = 1.0e-3
VOLUME_TOL = 1.0e-8


def class_slope(n: int, eps: float) -> float:
    """b with [omega] = 2*pi*c1(-K) + eps*c1(A), A the hyperplane class."""
    return (n + 1) + eps / TAU


def class_volume(n: int, eps: float) -> float:
    return TAU**n * class_slope(n, eps) ** n


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on [-T, T] with an even number of Simpson subintervals."""

    T: float = 12.0
    nodes: int = 2048

    def __post_init__(self):
        if self.nodes % 2 != 0 or self.nodes < 8:
            raise ValueError("nodes must be even and >= 8")
        if self.T <= 0:
            raise ValueError("T must be positive")

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(-self.T, self.T, self.nodes + 1)

    @property
    def h(self) -> float:
        return 2.0 * self.T / self.nodes

    @cached_property
    def simpson(self) -> np.ndarray:
        w = np.full(self.nodes + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * (self.h / 3.0)


# -- finite differences -------------------------------------------------------


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple, m: int) -> tuple:
    """Weights for the m-th derivative at 0 from nodes at the given offsets.

    Fornberg's recursion; exact for polynomials of degree < len(offsets).
    """
    x = [float(o) for o in offsets]
    k = len(x)
    c = [[0.0] * (m + 1) for _ in range(k)]
    c[0][0] = 1.0
    c1, c4 = 1.0, x[0]
    for i in range(1, k):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for s in range(mn, 0, -1):
                c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return tuple(row[m] for row in c)


_CENTERED_WIDTH = {1: 5, 2: 5, 3: 7, 4: 9}


def fd_derivative(values: np.ndarray, h: float, m: int) -> np.ndarray:
    """m-th derivative of grid values, fourth-order accurate everywhere.

    Centered stencils inside, one-sided (m+4)-point stencils at the edges:
    ghost nodes by symmetry were rejected because the potentials here are
    not symmetric functions of t.

    Stencils are applied to differences from the expansion node.  Since the
    weights of any derivative stencil annihilate constants this changes
    nothing in exact arithmetic, but it keeps relative accuracy when the
    values sit on a large flat offset, as potentials do in the chart tails;
    log densities divide the result by e^{-T}-small quantities there and
    would amplify plain ulp-of-the-offset noise beyond repair.
    """
    w = _CENTERED_WIDTH[m]
    half = w // 2
    cw = np.array(fd_weights(tuple(range(-half, half + 1)), m)) / h**m
    n = len(values)
    out = np.zeros(n, dtype=float)
    mid = slice(half, n - half)
    for k in range(-half, half + 1):
        if k == 0:
            continue
        out[mid] += cw[k + half] * (values[half + k : n - half + k] - values[mid])
    edge = m + 4
    for i in range(half):
        lw = np.array(fd_weights(tuple(o - i for o in range(edge)), m)) / h**m
        out[i] = lw @ (values[:edge] - values[i])
        rw = np.array(fd_weights(tuple(i - o for o in range(edge)), m)) / h**m
        out[-1 - i] = rw @ (values[-edge:][::-1] - values[-1 - i])
    return out


# -- closed invariant forms ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class RadialForm:
    """i ddbar G for a radial potential G, with derivatives and slopes.

    d3/d4 may be None for forms that never enter curvature formulas.
    """

    grid: Grid
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray | None
    d4: np.ndarray | None
    slope_minus: float
    slope_plus: float

    def __add__(self, other: "RadialForm") -> "RadialForm":
        if self.grid != other.grid:
            raise ClassMismatch("forms live on different grids")

        def both(a, b):
            return None if a is None or b is None else a + b

        return RadialForm(
            self.grid,
            self.value + other.value,
            self.d1 + other.d1,
            self.d2 + other.d2,
            both(self.d3, other.d3),
            both(self.d4, other.d4),
            self.slope_minus + other.slope_minus,
            self.slope_plus + other.slope_plus,
        )

    def __rmul__(self, c: float) -> "RadialForm":
        c = float(c)

        def scale(a):
            return None if a is None else c * a

        return RadialForm(
            self.grid,
            c * self.value,
            c * self.d1,
            c * self.d2,
            scale(self.d3),
            scale(self.d4),
            c * self.slope_minus,
            c * self.slope_plus,
        )

    def __neg__(self) -> "RadialForm":
        return (-1.0) * self

    def __sub__(self, other: "RadialForm") -> "RadialForm":
        return self + (-other)


def form_from_values(grid: Grid, values, slope_minus: float, slope_plus: float) -> RadialForm:
    v = np.asarray(values, dtype=float)
    if v.shape != (grid.nodes + 1,):
        raise ClassMismatch("potential values do not match the grid")
    h = grid.h
    return RadialForm(
        grid,
        v,
        fd_derivative(v, h, 1),
        fd_derivative(v, h, 2),
        fd_derivative(v, h, 3),
        fd_derivative(v, h, 4),
        slope_minus,
        slope_plus,
    )


def fs_form(grid: Grid, scale: float, center: float = 0.0) -> RadialForm:
    """scale * i ddbar log(1+e^{t-center}): the Fubini-Study form of slope
    scale, pulled back under the automorphism t -> t - center.

    The sigmoid factors are evaluated in the log domain: they decay to
    1e-11 at the chart ends, and downstream log-densities need them with
    full relative (not absolute) accuracy.
    """
    t = grid.points - center
    lse = np.logaddexp(0.0, t)
    sp = np.exp(t - lse)
    sm = np.exp(-lse)
    prod = sp * sm
    return RadialForm(
        grid,
        scale * lse,
        scale * sp,
        scale * prod,
        scale * prod * (sm - sp),
        scale * prod * ((sm - sp) ** 2 - 2.0 * prod),
        0.0,
        float(scale),
    )


def zero_form(grid: Grid) -> RadialForm:
    z = np.zeros(grid.nodes + 1)
    return RadialForm(grid, z, z, z, z, z, 0.0, 0.0)


# -- profiles -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KahlerProfile:
    """Potential phi relative to the Fubini-Study base of its class.

    The metric is omega_0 + i ddbar phi with omega_0 the slope-b model,
    b = (n+1) + eps/(2*pi).  phi must flatten at both chart ends.
    """

    n: int
    eps: float
    grid: Grid
    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=float))
        if self.phi.shape != (self.grid.nodes + 1,):
            raise ClassMismatch("phi values do not match the grid")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")

    def with_phi(self, phi) -> "KahlerProfile":
        return KahlerProfile(self.n, self.eps, self.grid, phi)


def base_form(profile: KahlerProfile) -> RadialForm:
    return fs_form(profile.grid, class_slope(profile.n, profile.eps))


def metric_form(profile: KahlerProfile) -> RadialForm:
    """omega_0 + i ddbar phi, validated: Kahler, right class, right volume."""
    pert = form_from_values(profile.grid, profile.phi, 0.0, 0.0)
    if abs(pert.d1[0]) > SLOPE_TOL or abs(pert.d1[-1]) > SLOPE_TOL:
        raise ClassMismatch("phi does not flatten at the chart ends")
    u = base_form(profile) + pert
    require_kahler(u)
    vol = wedge_integral(profile.n, [(u, profile.n)])
    V = class_volume(profile.n, profile.eps)
    if abs(vol - V) > VOLUME_TOL * V:
        raise ClassMismatch(
            "quadrature volume %.12g deviates from class volume %.12g" % (vol, V)
        )
    return u


def require_kahler(u: RadialForm) -> None:
    if np.min(u.d1) <= 0 or np.min(u.d2) <= 0:
        raise NotKahler("metric eigenvalues must be positive on the whole grid")


# -- quadrature ---------------------------------------------------------------


def wedge_density(forms_powers) -> np.ndarray:
    """d/dt of prod (G_i')^{k_i}, the line density of the wedge product
    divided by (2*pi)^n."""
    total = None
    for j, (fj, kj) in enumerate(forms_powers):
        if kj == 0:
            continue
        term = kj * fj.d2
        for i, (fi, ki) in enumerate(forms_powers):
            p = ki - 1 if i == j else ki
            if p > 0:
                term = term * fi.d1**p
        total = term if total is None else total + term
    if total is None:
        raise ValueError("empty wedge product")
    return total


def wedge_integral(n: int, forms_powers, f=None) -> float:
    """integral of f against the wedge product of closed invariant forms.

    forms_powers: [(RadialForm, power), ...] with powers summing to n.
    f: grid values of a bounded function, or None for the total mass.
    The [T, inf) and (-inf, -T] masses are exact from the slope limits,
    with f frozen at its boundary values there.
    """
    if sum(k for _, k in forms_powers) != n:
        raise ValueError("powers must sum to the dimension")
    grid = forms_powers[0][0].grid
    dens = wedge_density(forms_powers)

    def prod_at(idx) -> float:
        p = 1.0
        for fj, kj in forms_powers:
            p *= fj.d1[idx] ** kj
        return p

    def prod_limit(side: str) -> float:
        p = 1.0
        for fj, kj in forms_powers:
            s = fj.slope_plus if side == "plus" else fj.slope_minus
            p *= float(s) ** kj if kj else 1.0
        return p

    if f is None:
        f0 = f1 = 1.0
        interior = float(grid.simpson @ dens)
    else:
        f = np.asarray(f, dtype=float)
        f0, f1 = float(f[0]), float(f[-1])
        interior = float(grid.simpson @ (f * dens))
    tail_plus = f1 * (prod_limit("plus") - prod_at(-1))
    tail_minus = f0 * (prod_at(0) - prod_limit("minus"))
    return TAU**n * (interior + tail_plus + tail_minus)


# -- curvature scalars --------------------------------------------------------


def ricci_form(u: RadialForm, n: int) -> RadialForm:
    """-i ddbar log det g for the metric i ddbar u: potential
    r = n t - log u'' - (n-1) log u'.  Slopes are (0, n+1) for any metric
    in a class 2*pi*c1(-K) + eps*c1(A): the class of Ric is 2*pi*c1(-K).
    """
    require_kahler(u)
    if u.d3 is None or u.d4 is None:
        raise NotKahler("metric form lacks third and fourth derivatives")
    t = u.grid.points
    r = n * t - np.log(u.d2) - (n - 1) * np.log(u.d1)
    q3, q1 = u.d3 / u.d2, u.d2 / u.d1
    r1 = n - q3 - (n - 1) * q1
    r2 = -(u.d4 / u.d2 - q3**2) - (n - 1) * (u.d3 / u.d1 - q1**2)
    return RadialForm(u.grid, r, r1, r2, None, None, 0.0, float(n + 1))


def trace(sigma: RadialForm, u: RadialForm, n: int) -> np.ndarray:
    """Tr_omega sigma = sigma''/u'' + (n-1) sigma'/u' on the grid."""
    return sigma.d2 / u.d2 + (n - 1) * sigma.d1 / u.d1


def scalar_curvature(u: RadialForm, n: int) -> np.ndarray:
    return trace(ricci_form(u, n), u, n)
