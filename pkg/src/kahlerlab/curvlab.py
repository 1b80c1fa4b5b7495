"""Pointwise curvature of explicit metric models.

Three model families share one frame calculus: Fubini-Study metrics of any
scale, rotationally symmetric profile metrics, and products of those.  At a
chart point every model is diagonalized by a unitary frame in which the
full curvature tensor takes the shape

    R_{i jbar k lbar} = S_{ik} (d_{ij} d_{kl} + d_{il} d_{kj})

for a symmetric matrix S built from three radial blocks: the fiber
holomorphic sectional curvature A (S_11 = A/2), the fiber-base bisectional
curvature B, and the base-base bisectional curvature C.  Fubini-Study of
slope b has S = (1/b) * ones, the constant holomorphic sectional curvature
shape; products are block diagonal in S with no cross terms.

On top of the frames sit the two integral diagnostics: the Chen-Ogiue
identity expressing a Chern-number combination through normalized
curvature norms, and the Hermitian Yang-Mills test for the canonical
extension of the tangent bundle by the trivial line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intersect as ix
from .errors import (
    ClassMismatch,
    DimensionTooLow,
    KahlerLabError,
    NotKahler,
    OutOfChart,
    UnknownLabel,
)
from .radial import (
    Grid,
    KahlerProfile,
    RadialForm,
    TAU,
    class_slope,
    fd_weights,
    fs_form,
    metric_form,
    wedge_integral,
)

HYM_CANONICAL = "canonical"  # sentinel for a = (n+1)^{-1/2}


# -- metric models ------------------------------------------------------------


@dataclass(frozen=True)
class FubiniStudy:
    """Fubini-Study metric of slope `scale` on P^n; curvature in closed form.

    A rational scale keeps the polarization class exact in intersection
    pairings; floats are accepted and pair numerically.
    """

    n: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionTooLow("P^n needs n >= 1")
        if self.scale <= 0:
            raise NotKahler("Fubini-Study scale must be positive")


@dataclass(frozen=True)
class RadialProfile:
    """A rotationally symmetric metric given by a potential profile."""

    profile: KahlerProfile

    @property
    def n(self) -> int:
        return self.profile.n


@dataclass(frozen=True)
class ProductOfModels:
    """Metric product of chart models; the frame is the union of factor
    frames and S is block diagonal."""

    factors: tuple

    def __post_init__(self):
        if len(self.factors) < 2:
            raise DimensionTooLow("a product needs at least two factors")
        if any(isinstance(f, ProductOfModels) for f in self.factors):
            raise KahlerLabError("nested products are not supported")

    @property
    def n(self) -> int:
        return sum(f.n for f in self.factors)


def _sigmoid(t: float) -> float:
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def _fs_derivatives(b: float, t: float):
    # u = b log(1+e^t): the logistic chain gives every derivative
    s = _sigmoid(t)
    p = s * (1.0 - s)
    u1 = b * s
    u2 = b * p
    u3 = u2 * (1.0 - 2.0 * s)
    u4 = u2 * ((1.0 - 2.0 * s) ** 2 - 2.0 * p)
    return u1, u2, u3, u4


def _interp_at(grid: Grid, values: np.ndarray, t: float) -> float:
    # degree-7 local Lagrange, same accuracy class as the grid derivatives
    h = grid.h
    i = int(round((t + grid.T) / h))
    i0 = min(max(i - 3, 0), grid.nodes - 7)
    offsets = tuple((i0 + k) - (t + grid.T) / h for k in range(8))
    w = np.array(fd_weights(offsets, 0))
    return float(w @ values[i0 : i0 + 8])


def _profile_derivatives(model: RadialProfile, u: RadialForm, t: float):
    grid = model.profile.grid
    if abs(t) > grid.T:
        raise OutOfChart("point t=%g outside the chart [-%g, %g]" % (t, grid.T, grid.T))
    return tuple(_interp_at(grid, d, t) for d in (u.d1, u.d2, u.d3, u.d4))


def _radial_blocks(u1, u2, u3, u4):
    """The three curvature blocks of a radial metric from chart derivatives.

    A is the fiber holomorphic sectional curvature, B the fiber-base and C
    the base-base bisectional curvature; contraction reproduces the Ricci
    eigenvalues A + (n-1)B and B + nC of the radial Ricci form.
    """
    A = (-(u4 - 2.0 * u3 + u2) + (u3 - u2) ** 2 / u2) / u2**2
    B = (-(u3 - 2.0 * u2 + u1) + (u2 - u1) ** 2 / u1) / (u1 * u2)
    C = (u1 - u2) / u1**2
    return A, B, C


def _factor_state(model):
    """(n, form-or-None, slope) shared by the pointwise evaluators."""
    if isinstance(model, FubiniStudy):
        return model.n, None, float(model.scale)
    if isinstance(model, RadialProfile):
        u = metric_form(model.profile)
        return model.n, u, class_slope(model.profile.n, model.profile.eps)
    raise KahlerLabError("unsupported model %r" % (model,))


def _blocks_at(model, state, t: float):
    n, u, b = state
    if u is None:
        u1, u2, u3, u4 = _fs_derivatives(b, t)
    else:
        u1, u2, u3, u4 = _profile_derivatives(model, u, t)
    if u1 <= 0 or u2 <= 0:
        raise NotKahler("metric degenerates at t=%g" % t)
    return _radial_blocks(u1, u2, u3, u4), (u2, u1)


# -- curvature frames ---------------------------------------------------------


@dataclass(frozen=True)
class CurvatureFrame:
    """Curvature data of a model at one chart point, in a unitary frame.

    rm is the full tensor R_{i jbar k lbar}; ricci and scalar are its
    contractions (exact by construction, so the Kahler symmetries and
    trace consistency are structural).  The norms are unitary-frame
    component sums; the normalized tensors subtract R/(n(n+1)) times the
    constant-curvature shape and R/n times the metric respectively.
    """

    point: tuple
    n: int
    metric: np.ndarray
    rm: np.ndarray
    ricci: np.ndarray
    scalar: float
    rm_sq: float
    rm_tilde_sq: float
    ric_tilde_sq: float
    ric_minus_omega_sq: float


def _shape(n: int) -> np.ndarray:
    # d_{ij} d_{kl} + d_{il} d_{kj}, the constant-curvature tensor shape
    eye = np.eye(n)
    return (
        eye[:, :, None, None] * eye[None, None, :, :]
        + np.einsum("il,kj->ijkl", eye, eye)
    )


def _frame_from_s(point, S: np.ndarray, eigen) -> CurvatureFrame:
    n = S.shape[0]
    shape = _shape(n)
    eye = np.eye(n)
    rm = S[:, None, :, None] * shape
    ricci = np.einsum("ijkk->ij", rm)
    R = float(np.trace(ricci))
    rm_tilde = rm - (R / (n * (n + 1))) * shape
    ric_tilde = ricci - (R / n) * eye
    ric_gap = ricci - eye
    return CurvatureFrame(
        point=point,
        n=n,
        metric=np.diag(np.asarray(eigen, dtype=float)),
        rm=rm,
        ricci=ricci,
        scalar=R,
        rm_sq=float(np.sum(rm**2)),
        rm_tilde_sq=float(np.sum(rm_tilde**2)),
        ric_tilde_sq=float(np.sum(ric_tilde**2)),
        ric_minus_omega_sq=float(np.sum(ric_gap**2)),
    )


def _s_matrix(n: int, A: float, B: float, C: float) -> np.ndarray:
    S = np.full((n, n), C)
    S[0, :] = B
    S[:, 0] = B
    S[0, 0] = A / 2.0
    return S


def curvature_tensors(model, point) -> CurvatureFrame:
    """CurvatureFrame of the model at a chart point.

    Points are the chart coordinate t = log|z|^2 for P^n models and a
    tuple of factor coordinates for products.  Profile models evaluate
    with the same fourth-order differencing as the quadrature path, so a
    frame at a grid node matches the integral diagnostics exactly.
    """
    if isinstance(model, ProductOfModels):
        pts = tuple(float(p) for p in np.atleast_1d(point))
        if len(pts) != len(model.factors):
            raise OutOfChart(
                "product point needs %d coordinates, got %d" % (len(model.factors), len(pts))
            )
        n = model.n
        S = np.zeros((n, n))
        eigen = []
        at = 0
        for factor, t in zip(model.factors, pts):
            state = _factor_state(factor)
            (A, B, C), (g_f, g_b) = _blocks_at(factor, state, t)
            k = factor.n
            S[at : at + k, at : at + k] = _s_matrix(k, A, B, C)
            eigen.extend([g_f] + [g_b] * (k - 1))
            at += k
        return _frame_from_s(pts, S, eigen)
    pts = np.atleast_1d(np.asarray(point, dtype=float))
    if pts.size != 1:
        raise OutOfChart("a single chart takes one coordinate, got %d" % pts.size)
    t = float(pts[0])
    state = _factor_state(model)
    (A, B, C), (g_f, g_b) = _blocks_at(model, state, t)
    n = state[0]
    eigen = [g_f] + [g_b] * (n - 1)
    return _frame_from_s((t,), _s_matrix(n, A, B, C), eigen)


# -- Chen-Ogiue identity ------------------------------------------------------


@dataclass(frozen=True)
class ChenOgiueReport:
    """Both sides of the curvature-integral identity for a Chern-number
    combination, plus the weaker lower bound with |Ric - omega|^2.

    lhs is intersection arithmetic, rhs quadrature; their difference is
    the check.  lower_bound replaces |Ric~|^2 by |Ric - omega|^2, which
    dominates it pointwise, so lower_bound <= lhs with equality exactly
    when R is identically n.
    """

    lhs: float
    rhs: float
    difference: float
    lower_bound: float


def _norm_arrays(n, A, B, C):
    # vectorized unitary-frame norms for radial blocks; diagonal S entries
    # appear with weight 4 and off-diagonal with weight 2
    R = A + 2.0 * (n - 1) * B + n * (n - 1) * C
    s = R / (n * (n + 1.0))
    rm_t = (
        4.0 * (A / 2.0 - s) ** 2
        + 4.0 * (n - 1) * (B - s) ** 2
        + 2.0 * n * (n - 1) * (C - s) ** 2
    )
    r_f = A + (n - 1) * B
    r_b = B + n * C
    ric_t = (r_f - R / n) ** 2 + (n - 1) * (r_b - R / n) ** 2
    gap = (r_f - 1.0) ** 2 + (n - 1) * (r_b - 1.0) ** 2
    return rm_t, ric_t, gap


def _polarization_labels(model, data, labels):
    if labels is not None:
        return tuple(labels)
    if isinstance(model, ProductOfModels):
        return ("D1", "D2")
    if len(data.ample) == 1:
        return (next(iter(data.ample)),)
    raise ClassMismatch(
        "ambiguous polarization: pass labels= naming the class of each scale"
    )


def _pair_float(data, vectors) -> float:
    return float(ix.intersection_number(data, list(vectors)))


def _class_volume_check(model, data, labels, scales, volume) -> None:
    # the model class is sum_i scale_i * L_i in units of 2pi; its top
    # self-intersection must reproduce the quadrature volume
    if len(labels) != len(scales):
        raise ClassMismatch("one polarization label per factor scale")
    n = data.n
    try:
        vecs = [data.vector(lab) for lab in labels]
    except UnknownLabel as exc:
        raise ClassMismatch("polarization label not in the datum: %s" % exc) from exc
    total = 0.0
    for index in np.ndindex(*([len(vecs)] * n)):
        coeff = 1.0
        for i in index:
            coeff *= scales[i]
        total += coeff * _pair_float(data, [vecs[i] for i in index])
    expected = TAU**n * total
    if not expected > 0:
        raise ClassMismatch("polarization class has nonpositive volume")
    if abs(volume / expected - 1.0) > 1.0e-6:
        raise ClassMismatch(
            "model volume %.6g does not match the class volume %.6g"
            % (volume, expected)
        )


def _model_scales(model):
    if isinstance(model, FubiniStudy):
        return (float(model.scale),)
    if isinstance(model, RadialProfile):
        return (class_slope(model.profile.n, model.profile.eps),)
    return tuple(_model_scales(f)[0] for f in model.factors)


def _model_class_fractions(model):
    # exact where the scale is rational, else a 1e-12-denominator stand-in;
    # the rational class only enters pairings for n >= 3
    if isinstance(model, FubiniStudy):
        return (model.scale,)
    if isinstance(model, RadialProfile):
        b = class_slope(model.profile.n, model.profile.eps)
        return (Fraction(b).limit_denominator(10**12),)
    return tuple(_model_class_fractions(f)[0] for f in model.factors)


def _curve_measure(u: RadialForm, grid: Grid) -> np.ndarray:
    # one-factor mass weights, interior Simpson plus exact slope tails
    w = TAU * grid.simpson * u.d2
    w[0] += TAU * (u.d1[0] - u.slope_minus)
    w[-1] += TAU * (u.slope_plus - u.d1[-1])
    return w


def chen_ogiue_check(model, data: ix.IntersectionData, labels=None) -> ChenOgiueReport:
    """Chern-number side vs curvature-quadrature side of the identity

        {2(n+1)c2 - n c1^2} . [L]^{n-2}
          = (4 pi^2 n(n-1))^{-1} int { (n+1)|Rm~|^2 - (n+2)|Ric~|^2 } omega^n

    with [omega] = 2pi L.  The left side is exact intersection arithmetic
    against `data`; the class of the model (its scales against `labels`,
    defaulting to the unique ample generator, or the first two rulings for
    products) must reproduce the quadrature volume.
    """
    n = model.n
    if n < 2:
        raise DimensionTooLow("the identity needs n >= 2")
    if data.n != n:
        raise ClassMismatch("intersection data has dimension %d, model %d" % (data.n, n))
    labels = _polarization_labels(model, data, labels)
    scales = _model_scales(model)
    const = 1.0 / (4.0 * math.pi**2 * n * (n - 1))

    if isinstance(model, FubiniStudy):
        b = float(model.scale)
        volume = (TAU * b) ** n
        rhs = 0.0  # constant holomorphic sectional curvature: Rm~ = Ric~ = 0
        gap_sq = n * ((n + 1.0) / b - 1.0) ** 2
        lower = -const * (n + 2.0) * gap_sq * volume
    elif isinstance(model, RadialProfile):
        u = metric_form(model.profile)
        A, B, C = _radial_blocks(u.d1, u.d2, u.d3, u.d4)
        rm_t, ric_t, gap = _norm_arrays(n, A, B, C)
        volume = float(wedge_integral(n, [(u, n)]))
        rhs = const * float(
            wedge_integral(n, [(u, n)], (n + 1.0) * rm_t - (n + 2.0) * ric_t)
        )
        lower = const * float(
            wedge_integral(n, [(u, n)], (n + 1.0) * rm_t - (n + 2.0) * gap)
        )
    else:
        if len(model.factors) != 2 or any(f.n != 1 for f in model.factors):
            raise DimensionTooLow("product quadrature covers two curve factors")
        curvs, weights = [], []
        for factor in model.factors:
            state = _factor_state(factor)
            grid = state[1].grid if state[1] is not None else Grid()
            u = state[1] if state[1] is not None else fs_form(grid, state[2])
            a = _radial_blocks(u.d1, u.d2, u.d3, u.d4)[0]
            curvs.append(np.asarray(a, dtype=float))
            weights.append(_curve_measure(u, grid))
        a1 = curvs[0][:, None]
        a2 = curvs[1][None, :]
        R = a1 + a2
        s = R / 6.0
        rm_t = 4.0 * (a1 / 2.0 - s) ** 2 + 4.0 * (a2 / 2.0 - s) ** 2 + 4.0 * s**2
        ric_t = 0.5 * (a1 - a2) ** 2
        gap = (a1 - 1.0) ** 2 + (a2 - 1.0) ** 2
        w1, w2 = weights
        volume = 2.0 * float(np.sum(w1) * np.sum(w2))  # omega^2 = 2 omega_1 ^ omega_2
        rhs = const * 2.0 * float(w1 @ (3.0 * rm_t - 4.0 * ric_t) @ w2)
        lower = const * 2.0 * float(w1 @ (3.0 * rm_t - 4.0 * gap) @ w2)

    _class_volume_check(model, data, labels, scales, volume)
    cls = [
        ix.ClassVector(dict(zip(labels, _model_class_fractions(model))))
    ] * (n - 2)
    combo = 2 * (n + 1) * ix.c2_pairing(data, cls) - n * ix.intersection_number(
        data, [data.c1, data.c1] + cls
    )
    lhs = TAU ** (n - 2) * float(combo)
    return ChenOgiueReport(lhs, rhs, rhs - lhs, lower)


# -- canonical extension ------------------------------------------------------


@dataclass(frozen=True)
class CanonicalExtensionBlocks:
    """Chern curvature of the extension of T_X by the trivial line, with
    extension form alpha = a * omega, as i F in a unitary frame.

    f_s holds the (1,1)-form components of the line block i(F_S + alpha ^
    alpha*) = a^2 g; f_q the components i(F_Q + alpha* ^ alpha) = Rm -
    a^2 delta-pattern on the tangent block.  Signs follow the adjoint
    forced by metric compatibility of the connection; s_literal exposes
    the i(alpha ^ alpha*) block under the literal pairing adjoint, which
    is negative semidefinite.  The off-diagonal blocks D^Hom(alpha)
    vanish identically because alpha is a parallel form.
    """

    n: int
    a: float
    point: tuple
    f_s: np.ndarray
    f_q: np.ndarray
    s_literal: np.ndarray
    off_diagonal_norm: float
    trace_balance_gap: float


def canonical_extension_curvature(model, a, point) -> CanonicalExtensionBlocks:
    if a < 0:
        raise NotKahler("extension weight a must be nonnegative")
    frame = curvature_tensors(model, point)
    n = frame.n
    eye = np.eye(n)
    a2 = float(a) ** 2
    f_s = a2 * eye
    pattern = np.einsum("ik,jl->ijkl", eye, eye)  # delta_{mu k} delta_{nu l}
    f_q = frame.rm - a2 * pattern
    # Lambda-traces of the two alpha blocks balance pointwise
    tr_s = float(np.trace(f_s))
    tr_q = float(np.einsum("iikk->", -a2 * pattern))
    return CanonicalExtensionBlocks(
        n=n,
        a=float(a),
        point=frame.point,
        f_s=f_s,
        f_q=f_q,
        s_literal=-a2 * eye,
        off_diagonal_norm=0.0,
        trace_balance_gap=abs(tr_s + tr_q),
    )


def extension_mean_curvature(blocks: CanonicalExtensionBlocks) -> np.ndarray:
    """K = Lambda(iF)/n per block, as an (n+1) x (n+1) matrix on O + T_X.

    The contraction normalization is pinned by the Fubini-Study anchor:
    with [omega] = 2pi c1(L) the mean curvature of T_P^n equals the
    intersection-theoretic slope 1/n of the tangent bundle.
    """
    n = blocks.n
    K = np.zeros((n + 1, n + 1))
    K[0, 0] = np.trace(blocks.f_s) / n
    K[1:, 1:] = np.einsum("ijkk->ij", blocks.f_q) / n
    return K


@dataclass(frozen=True)
class HymReport:
    """Slope of the canonical extension and the sup-norm HYM defect."""

    mu: Fraction
    residual: float
    a: float
    points: tuple


def _sample_points(model) -> tuple:
    if isinstance(model, FubiniStudy):
        return (0.0,)  # curvature is t-independent
    grid = model.profile.grid
    x, _ = np.polynomial.legendre.leggauss(64)
    return tuple(float(grid.T * xi) for xi in x)


def hym_residual(model, a=HYM_CANONICAL) -> HymReport:
    """sup over a deterministic chart sample of |K - mu id|.

    mu is the exact rational slope of O + T_{P^n} against L = -K_{P^n},
    namely 1/(n+1); a defaults to the canonical weight (n+1)^{-1/2} that
    balances the two diagonal blocks.
    """
    if isinstance(model, ProductOfModels):
        raise ClassMismatch("the canonical extension datum lives on a P^n chart")
    n = model.n
    data = ix.projective_space(n)
    mu = ix.slope(data, n + 1, data.c1, data.c1)
    if a == HYM_CANONICAL:
        a = 1.0 / math.sqrt(n + 1.0)
    points = _sample_points(model)
    mu_f = float(mu)
    worst = 0.0
    for t in points:
        blocks = canonical_extension_curvature(model, a, t)
        K = extension_mean_curvature(blocks)
        worst = max(worst, float(np.max(np.abs(K - mu_f * np.eye(n + 1)))))
    return HymReport(mu=mu, residual=worst, a=float(a), points=points)


# -- JSON interface -----------------------------------------------------------


def model_from_dict(doc, profile_loader=None):
    """Model from {"model": "fs"|"radial"|"product", ...} documents.

    fs needs n and scale "p/q"; radial needs n, eps and either a profile
    path (resolved by profile_loader) or inline values; product wraps a
    list of factor documents.
    """
    kind = doc.get("model")
    if kind == "fs":
        return FubiniStudy(int(doc["n"]), Fraction(doc.get("scale", "1")))
    if kind == "radial":
        if "values" in doc:
            values = np.array([float(v) for v in doc["values"]])
            grid = Grid()
            profile = KahlerProfile(int(doc["n"]), float(doc["eps"]), grid, values)
        elif profile_loader is not None and "profile" in doc:
            profile = profile_loader(doc["profile"], int(doc["n"]), float(doc["eps"]))
        else:
            raise KahlerLabError("radial model needs values or a profile path")
        return RadialProfile(profile)
    if kind == "product":
        return ProductOfModels(
            tuple(model_from_dict(d, profile_loader) for d in doc["factors"])
        )
    raise KahlerLabError("unknown model kind %r" % (kind,))


def frame_to_dict(frame: CurvatureFrame) -> dict:
    return {
        "point": [repr(float(p)) for p in frame.point],
        "n": frame.n,
        "metric": [repr(float(x)) for x in np.diag(frame.metric)],
        "scalar": repr(float(frame.scalar)),
        "rm": [repr(float(x)) for x in frame.rm.ravel()],
        "ricci": [repr(float(x)) for x in frame.ricci.ravel()],
        "norms": {
            "rm_sq": repr(float(frame.rm_sq)),
            "rm_tilde_sq": repr(float(frame.rm_tilde_sq)),
            "ric_tilde_sq": repr(float(frame.ric_tilde_sq)),
            "ric_minus_omega_sq": repr(float(frame.ric_minus_omega_sq)),
        },
    }
