"""Energy functionals on radial Kahler potentials.

All functionals live on KahlerProfile: phi relative to the Fubini-Study
base of the class 2*pi*c1(-K) + eps*c1(A).  The Monge-Ampere energy is
normalized so that (dE)_phi u = V^{-1} int u omega_phi^n holds; with that
contract E carries the coefficient 1/((n+1)V), and differential_check is
the arbiter.  Numerical constants c_gamma are computed by quadrature of
gamma wedge omega_0^{n-1} against the class volume, which agrees with the
slope arithmetic to quadrature precision and keeps one code path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ClassMismatch, NotKahler
from .radial import (
    Grid,
    KahlerProfile,
    RadialForm,
    base_form,
    class_slope,
    class_volume,
    form_from_values,
    metric_form,
    require_kahler,
    ricci_form,
    trace,
    scalar_curvature,
    wedge_density,
    wedge_integral,
    SLOPE_TOL,
)

ENTROPY_CLAMP = 1.0e-300


@dataclass(frozen=True)
class EnergyReport:
    """Every §-style functional at one potential; M appears twice:
    through the entropy/Chen expansion and through Ent + n*J_mod(-Ric)."""

    E: float
    E_gamma: float
    E_Ric: float
    I: float
    J: float
    J_mod: float
    Ent: float
    M: float
    M_cross: float
    M_theta: float
    Rhat: float


def _pair(profile: KahlerProfile, omega0: RadialForm | None):
    """Validated (omega_0, omega_phi) for the profile's class."""
    if omega0 is None:
        u0 = base_form(profile)
        u = metric_form(profile)
        return u0, u
    b = class_slope(profile.n, profile.eps)
    if abs(omega0.slope_minus) > 1e-9 or abs(omega0.slope_plus - b) > 1e-9 * max(1.0, b):
        raise ClassMismatch("reference form is not in the profile's class")
    require_kahler(omega0)
    pert = form_from_values(profile.grid, profile.phi, 0.0, 0.0)
    if abs(pert.d1[0]) > SLOPE_TOL or abs(pert.d1[-1]) > SLOPE_TOL:
        raise ClassMismatch("phi does not flatten at the chart ends")
    u = omega0 + pert
    require_kahler(u)
    V = class_volume(profile.n, profile.eps)
    vol = wedge_integral(profile.n, [(u, profile.n)])
    if abs(vol - V) > 1e-8 * V:
        raise ClassMismatch("quadrature volume deviates from the class volume")
    return omega0, u


def c_gamma(n: int, gamma: RadialForm, u0: RadialForm) -> float:
    """V^{-1} [gamma].[omega]^{n-1}, the J-equation constant."""
    V = wedge_integral(n, [(u0, n)])
    return wedge_integral(n, [(gamma, 1), (u0, n - 1)]) / V


def monge_ampere_energy(profile: KahlerProfile, omega0: RadialForm | None = None) -> float:
    u0, u = _pair(profile, omega0)
    return _energy(profile.n, profile.phi, u0, u, class_volume(profile.n, profile.eps))


def _energy(n, phi, u0, u, V) -> float:
    total = sum(
        wedge_integral(n, [(u0, i), (u, n - i)], phi) for i in range(n + 1)
    )
    return total / ((n + 1) * V)


def _twisted_energy(n, phi, gamma, u0, u, V) -> float:
    total = sum(
        wedge_integral(n, [(gamma, 1), (u0, i - 1), (u, n - i)], phi)
        for i in range(1, n + 1)
    )
    return total / (n * V)


def _entropy(n, u0, u, V) -> float:
    d_phi = wedge_density([(u, n)])
    d_0 = wedge_density([(u0, n)])
    f = np.log(np.maximum(d_phi, ENTROPY_CLAMP)) - np.log(np.maximum(d_0, ENTROPY_CLAMP))
    return wedge_integral(n, [(u, n)], f) / V


def energy_report(
    profile: KahlerProfile,
    gamma: RadialForm | None = None,
    theta: RadialForm | None = None,
    omega0: RadialForm | None = None,
) -> EnergyReport:
    """All functionals at phi; gamma defaults to omega_0, theta to zero."""
    n = profile.n
    u0, u = _pair(profile, omega0)
    V = class_volume(n, profile.eps)
    phi = profile.phi
    if gamma is None:
        gamma = u0

    E = _energy(n, phi, u0, u, V)
    E_gamma = _twisted_energy(n, phi, gamma, u0, u, V)
    ric0 = ricci_form(u0, n)
    E_Ric = _twisted_energy(n, phi, ric0, u0, u, V)
    mass0 = wedge_integral(n, [(u0, n)], phi) / V
    mass_phi = wedge_integral(n, [(u, n)], phi) / V
    I = mass0 - mass_phi
    J = mass0 - E
    c_g = c_gamma(n, gamma, u0)
    J_mod = E_gamma - c_g * E
    Ent = _entropy(n, u0, u, V)
    c_ric = c_gamma(n, ric0, u0)
    Rhat = n * (n + 1) / class_slope(n, profile.eps)
    M = Ent - n * E_Ric + Rhat * E
    M_cross = Ent + n * (-E_Ric + c_ric * E)
    if theta is None:
        M_theta = M
    else:
        E_theta = _twisted_energy(n, phi, theta, u0, u, V)
        c_t = c_gamma(n, theta, u0)
        # Ent - n E_{Ric-theta} + n c_{Ric-theta} E, the scale-invariant form
        M_theta = Ent - n * (E_Ric - E_theta) + n * (c_ric - c_t) * E
    return EnergyReport(E, E_gamma, E_Ric, I, J, J_mod, Ent, M, M_cross, M_theta, Rhat)


def differential_check(
    profile: KahlerProfile,
    direction,
    tag: str,
    gamma: RadialForm | None = None,
    step: float = 1.0e-3,
):
    """(analytic, central finite difference) for dF_phi applied to direction.

    tag in {"E", "E_gamma", "M"}.  The caller drives step -> 0 and asserts
    second-order agreement.
    """
    n = profile.n
    V = class_volume(n, profile.eps)
    u0, u = _pair(profile, None)
    v = np.asarray(direction, dtype=float)
    if gamma is None:
        gamma = u0

    if tag == "E":
        analytic = wedge_integral(n, [(u, n)], v) / V
    elif tag == "E_gamma":
        analytic = wedge_integral(n, [(gamma, 1), (u, n - 1)], v) / V
    elif tag == "M":
        R = scalar_curvature(u, n)
        Rhat = n * (n + 1) / class_slope(n, profile.eps)
        analytic = -wedge_integral(n, [(u, n)], v * (R - Rhat)) / V
    else:
        raise ValueError("unknown functional tag %r" % (tag,))

    def value(p):
        rep = energy_report(p, gamma=gamma)
        return {"E": rep.E, "E_gamma": rep.E_gamma, "M": rep.M}[tag]

    plus = value(profile.with_phi(profile.phi + step * v))
    minus = value(profile.with_phi(profile.phi - step * v))
    return analytic, (plus - minus) / (2.0 * step)


def j_equation_residual(profile: KahlerProfile, gamma: RadialForm) -> float:
    """sup over the grid of |Tr_omega gamma - n c_gamma|."""
    n = profile.n
    u0, u = _pair(profile, None)
    c_g = c_gamma(n, gamma, u0)
    return float(np.max(np.abs(trace(gamma, u, n) - n * c_g)))


def random_profile(
    n: int,
    eps: float,
    grid: Grid,
    seed: int,
    bumps: int = 3,
    amplitude: float = 0.25,
) -> KahlerProfile:
    """Random Gaussian-bump potential, resampled until honestly Kahler.

    Bump centers stay in [-3, 3] and widths in [0.6, 1.5] so the tails die
    far faster than the metric eigenvalues at the chart ends.
    """
    rng = np.random.default_rng(seed)
    t = grid.points
    amp = amplitude
    for _ in range(60):
        phi = np.zeros_like(t)
        for _ in range(bumps):
            a = rng.uniform(-amp, amp)
            c = rng.uniform(-3.0, 3.0)
            w = rng.uniform(0.6, 1.5)
            phi += a * np.exp(-((t - c) ** 2) / (2.0 * w * w))
        p = KahlerProfile(n, eps, grid, phi)
        try:
            metric_form(p)
            return p
        except (NotKahler, ClassMismatch):
            amp *= 0.5
    raise RuntimeError("could not sample a Kahler profile")


# -- serialization ------------------------------------------------------------


def profile_to_csv(profile: KahlerProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "phi"])
        for t, v in zip(profile.grid.points, profile.phi):
            w.writerow([repr(float(t)), repr(float(v))])


def profile_from_csv(path, n: int, eps: float) -> KahlerProfile:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [s.strip() for s in rows[0]] != ["t", "phi"]:
        raise ClassMismatch("profile CSV must carry the header t,phi")
    t = np.array([float(r[0]) for r in rows[1:]])
    phi = np.array([float(r[1]) for r in rows[1:]])
    if len(t) < 9 or len(t) % 2 == 0:
        raise ClassMismatch("profile grid must have an odd number of nodes")
    T = -t[0]
    grid = Grid(T=T, nodes=len(t) - 1)
    if not np.allclose(t, grid.points, rtol=0, atol=1e-9 * max(1.0, T)):
        raise ClassMismatch("profile grid is not uniform on [-T, T]")
    return KahlerProfile(n, eps, grid, phi)


def report_to_dict(report: EnergyReport) -> dict:
    return {k: repr(float(v)) for k, v in vars(report).items()}
