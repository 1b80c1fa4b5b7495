"""Exact rational intersection arithmetic on labelled cohomology data.

Conventions
-----------
* A variety is known to this module only through its ``IntersectionData``:
  a basis of line-bundle class labels, the full symmetric degree-n form,
  and (for n >= 2) the degree-(n-2) pairings against c2(X).
* One basis label is the canonical class K; c1(X) is the vector -K.
* Ampleness and nefness are caller-asserted flags carried by the data;
  nothing here certifies positivity beyond form(A,...,A) > 0.
* Everything is Fraction arithmetic.  Pairings against Kahler classes
  carry powers of the formal symbol 2*pi (see ``exactpi``); no floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Mapping, Sequence

from .errors import (
    BadRank,
    DegenerateClass,
    DegeneratePolarization,
    DimensionTooLow,
    InconsistentPairing,
    MissingPairing,
    NotAmple,
    NotAnticanonical,
    UnknownLabel,
    WrongArity,
)
from .exactpi import PiScalar

Monomial = tuple  # sorted tuple of labels


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.replace(" ", ""))
    return Fraction(x)


@dataclass(frozen=True)
class ClassVector:
    """Rational coefficient vector over the basis labels of a datum.

    Immutable; zero coefficients are dropped on construction.
    """

    coefficients: Mapping[str, Fraction]

    def __post_init__(self):
        clean = {k: _frac(v) for k, v in self.coefficients.items() if _frac(v) != 0}
        object.__setattr__(self, "coefficients", clean)

    def items(self):
        return self.coefficients.items()

    def labels(self):
        return self.coefficients.keys()

    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: "ClassVector") -> "ClassVector":
        out = dict(self.coefficients)
        for k, v in other.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ClassVector(out)

    def __neg__(self) -> "ClassVector":
        return ClassVector({k: -v for k, v in self.items()})

    def __sub__(self, other: "ClassVector") -> "ClassVector":
        return self + (-other)

    def scale(self, c) -> "ClassVector":
        c = _frac(c)
        return ClassVector({k: c * v for k, v in self.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassVector) and dict(self.items()) == dict(other.items())

    def __hash__(self):
        return hash(frozenset(self.items()))


@dataclass(frozen=True)
class IntersectionData:
    """Symmetric degree-n intersection tensor plus c2 pairings on a label basis."""

    n: int
    basis: tuple
    canonical: str
    ample: frozenset
    form: Mapping[Monomial, Fraction]
    c2: Mapping[Monomial, Fraction] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DimensionTooLow("complex dimension must be >= 1, got %r" % self.n)
        basis = tuple(self.basis)
        object.__setattr__(self, "basis", basis)
        if self.canonical not in basis:
            raise UnknownLabel("canonical label %r not in basis" % self.canonical)
        amp = frozenset(self.ample)
        if not amp:
            raise NotAmple("at least one basis label must be flagged ample")
        if not amp <= set(basis):
            raise UnknownLabel("ample flags outside basis: %r" % (amp - set(basis),))
        object.__setattr__(self, "ample", amp)
        object.__setattr__(self, "form", self._canonical_map(self.form, self.n))
        if self.n >= 2:
            if self.c2 is None:
                raise MissingPairing("c2_pairing required when n >= 2")
            object.__setattr__(self, "c2", self._canonical_map(self.c2, self.n - 2))
        for a in amp:
            if self.form[(a,) * self.n] <= 0:
                raise NotAmple("form(%s^%d) must be positive" % (a, self.n))

    def _canonical_map(self, raw, degree):
        out = {}
        for mono, val in raw.items():
            mono = tuple(sorted(mono))
            if len(mono) != degree:
                raise WrongArity(
                    "monomial %r has degree %d, expected %d" % (mono, len(mono), degree)
                )
            for lab in mono:
                if lab not in self.basis:
                    raise UnknownLabel("monomial label %r not in basis" % lab)
            val = _frac(val)
            if mono in out and out[mono] != val:
                raise InconsistentPairing(
                    "monomial %r given twice with values %s and %s" % (mono, out[mono], val)
                )
            out[mono] = val
        expected = comb(len(self.basis) + degree - 1, degree) if degree >= 0 else 0
        if len(out) != expected:
            missing = expected - len(out)
            raise MissingPairing(
                "degree-%d pairing incomplete: %d monomial(s) missing" % (degree, missing)
            )
        return out

    # -- basic vectors --------------------------------------------------------

    def vector(self, label: str, coeff=1) -> ClassVector:
        if label not in self.basis:
            raise UnknownLabel("label %r not in basis" % label)
        return ClassVector({label: _frac(coeff)})

    @property
    def canonical_class(self) -> ClassVector:
        return self.vector(self.canonical)

    @property
    def c1(self) -> ClassVector:
        """c1(X) = -K as a coefficient vector."""
        return self.vector(self.canonical, -1)

    def ample_classes(self):
        return [self.vector(a) for a in sorted(self.ample)]

    def is_ample_flagged(self, A: ClassVector) -> bool:
        # Positive combinations of ample-flagged labels stay ample.
        if A.is_zero():
            return False
        return all(lab in self.ample and c > 0 for lab, c in A.items())


@dataclass(frozen=True)
class SubvarietyDatum:
    """Restricted intersection numbers of a p-dimensional subvariety."""

    p: int
    pairing: Mapping[Monomial, Fraction]
    name: str = "V"

    def __post_init__(self):
        clean = {}
        for mono, val in self.pairing.items():
            mono = tuple(sorted(mono))
            if len(mono) != self.p:
                raise WrongArity(
                    "subvariety monomial %r has degree %d, expected %d"
                    % (mono, len(mono), self.p)
                )
            val = _frac(val)
            if mono in clean and clean[mono] != val:
                raise InconsistentPairing("monomial %r duplicated on %s" % (mono, self.name))
            clean[mono] = val
        object.__setattr__(self, "pairing", clean)


# -- multilinear evaluation ---------------------------------------------------


def _expand(pairing: Mapping, degree: int, classes: Sequence[ClassVector]) -> Fraction:
    if len(classes) != degree:
        raise WrongArity("expected %d classes, got %d" % (degree, len(classes)))
    total = Fraction(0)
    supports = [list(c.items()) for c in classes]
    if any(not s for s in supports):
        return total
    for combo in product(*supports):
        key = tuple(sorted(lab for lab, _ in combo))
        if key not in pairing:
            raise MissingPairing("no pairing for monomial %r" % (key,))
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        total += coeff * pairing[key]
    return total


def intersection_number(data: IntersectionData, classes: Sequence[ClassVector]) -> Fraction:
    """Multilinear extension of the degree-n form to class vectors."""
    for cv in classes:
        for lab in cv.labels():
            if lab not in data.basis:
                raise UnknownLabel("label %r not in basis" % lab)
    return _expand(data.form, data.n, classes)


def c2_pairing(data: IntersectionData, classes: Sequence[ClassVector]) -> Fraction:
    """c2(X) paired against n-2 class vectors."""
    if data.n < 2:
        raise DimensionTooLow("c2 pairing needs n >= 2")
    for cv in classes:
        for lab in cv.labels():
            if lab not in data.basis:
                raise UnknownLabel("label %r not in basis" % lab)
    return _expand(data.c2, data.n - 2, classes)


def power(cls: ClassVector, k: int) -> list:
    return [cls] * k


# -- cohomological quantities -------------------------------------------------


def my_quantity(data: IntersectionData) -> Fraction:
    """{2(n+1) c2 - n c1^2} . c1^{n-2}, exact."""
    if data.n < 2:
        raise DimensionTooLow("Miyaoka-Yau quantity needs n >= 2")
    c1 = data.c1
    n = data.n
    return 2 * (n + 1) * c2_pairing(data, power(c1, n - 2)) - n * intersection_number(
        data, power(c1, n)
    )


def numerical_dimension(data: IntersectionData, L: ClassVector, A: ClassVector) -> int:
    """Largest k with L^k . A^{n-k} != 0 (0 when all k >= 1 vanish)."""
    if not data.is_ample_flagged(A):
        raise NotAmple("A must be a positive combination of ample-flagged labels")
    for k in range(data.n, 0, -1):
        if intersection_number(data, power(L, k) + power(A, data.n - k)) != 0:
            return k
    return 0


def average_scalar_curvature(data: IntersectionData, L: ClassVector) -> Fraction:
    """Rhat = -n K.L^{n-1} / L^n."""
    vol = intersection_number(data, power(L, data.n))
    if vol == 0:
        raise DegeneratePolarization("L^n = 0")
    K = data.canonical_class
    return -data.n * _expand(data.form, data.n, [K] + power(L, data.n - 1)) / vol


def key_lemma_ratio(data: IntersectionData, L: ClassVector, A: ClassVector, eps) -> PiScalar:
    """2*pi*n * c1(L).[w_eps]^{n-1} / [w_eps]^n with [w_eps] = 2*pi*L + eps*A.

    Exact in the formal symbol 2*pi; converges to numerical_dimension(L, A)
    as eps -> 0.
    """
    eps = _frac(eps)
    if eps <= 0:
        raise DegenerateClass("eps must be positive")
    n = data.n

    def pairing_poly(extra: list, m: int) -> PiScalar:
        # (2*pi*L + eps*A)^m paired with the classes in `extra`; polynomial in tau.
        total = PiScalar()
        for j in range(m + 1):
            num = intersection_number(data, extra + power(L, j) + power(A, m - j))
            coeff = comb(m, j) * eps ** (m - j) * num
            total = total + PiScalar.tau_power(j, coeff)
        return total

    den = pairing_poly([], n)
    if den.is_zero():
        raise DegenerateClass("[2*pi*L + eps*A]^n vanishes identically")
    num = pairing_poly([L], n - 1) * PiScalar.tau_power(1, n)
    return num / den


def calabi_limit(data: IntersectionData, L: ClassVector, A: ClassVector) -> PiScalar:
    """((nu^2 - 2 nu + n) - n(n-1)) (2*pi)^n c1^n; zero for every nef input.

    Either nu = n (and the scalar factor vanishes) or c1^n = 0.
    """
    if L != data.c1:
        raise NotAnticanonical("L must equal -K coefficientwise")
    nu = numerical_dimension(data, L, A)
    scalar = (nu * nu - 2 * nu + data.n) - data.n * (data.n - 1)
    top = intersection_number(data, power(data.c1, data.n))
    return PiScalar.tau_power(data.n, scalar * top)


# -- slopes and stability -----------------------------------------------------


def slope(data: IntersectionData, rank: int, c1S: ClassVector, L: ClassVector) -> Fraction:
    """mu(S) = c1(S).L^{n-1} / (rank . L^n)."""
    if rank < 1:
        raise BadRank("rank must be a positive integer, got %r" % rank)
    vol = intersection_number(data, power(L, data.n))
    if vol == 0:
        raise DegeneratePolarization("L^n = 0")
    return _expand(data.form, data.n, [c1S] + power(L, data.n - 1)) / (rank * vol)


@dataclass(frozen=True)
class SlopeVerdict:
    rank: int
    mu_sub: Fraction
    mu_total: Fraction
    semistable: bool  # mu(S) <= mu(E)


@dataclass(frozen=True)
class SemistabilityReport:
    mu_total: Fraction
    verdicts: tuple
    all_pass: bool


def semistability_report(
    data: IntersectionData,
    rankE: int,
    c1E: ClassVector,
    subobjects: Sequence,
    L: ClassVector,
) -> SemistabilityReport:
    """Slope check of (rank, c1) subobject pairs against E; not exhaustive."""
    if rankE < 1:
        raise BadRank("rank E must be positive")
    muE = slope(data, rankE, c1E, L)
    verdicts = []
    for rank, c1S in subobjects:
        if not 1 <= rank <= rankE:
            raise BadRank("subobject rank %r outside [1, %d]" % (rank, rankE))
        mu = slope(data, rank, c1S, L)
        verdicts.append(SlopeVerdict(rank, mu, muE, mu <= muE))
    return SemistabilityReport(muE, tuple(verdicts), all(v.semistable for v in verdicts))


# -- Nakai-Moishezon type properness inequality -------------------------------


def subvariety_pairing(V: SubvarietyDatum, classes: Sequence[ClassVector]) -> Fraction:
    """Multilinear extension of the restricted pairing on V."""
    return _expand(V.pairing, V.p, classes)


@dataclass(frozen=True)
class NMVerdict:
    name: str
    p: int
    lhs: Fraction
    rhs: Fraction
    ok: bool


def nm_check(
    data: IntersectionData,
    L: ClassVector,
    gamma: ClassVector,
    subvarieties: Sequence[SubvarietyDatum],
    delta,
) -> list:
    """Test int_V (n c_gamma L - p gamma) L^{p-1} >= delta (n-p) int_V L^p.

    c_gamma = gamma.L^{n-1} / L^n as in the J-functional normalization.
    """
    delta = _frac(delta)
    if delta < 0:
        raise DegenerateClass("delta must be nonnegative")
    vol = intersection_number(data, power(L, data.n))
    if vol == 0:
        raise DegeneratePolarization("L^n = 0")
    c_gamma = _expand(data.form, data.n, [gamma] + power(L, data.n - 1)) / vol
    out = []
    for V in subvarieties:
        test_class = L.scale(data.n * c_gamma) - gamma.scale(V.p)
        lhs = subvariety_pairing(V, [test_class] + power(L, V.p - 1))
        rhs = delta * (data.n - V.p) * subvariety_pairing(V, power(L, V.p))
        out.append(NMVerdict(V.name, V.p, lhs, rhs, lhs >= rhs))
    return out


def epsilon_prime(alpha_prime, eps, n: int) -> Fraction:
    """eps' = ((n+1)/n * alpha' - 1)^{-1} eps; needs alpha' > n/(n+1)."""
    alpha_prime, eps = _frac(alpha_prime), _frac(eps)
    denom = Fraction(n + 1, n) * alpha_prime - 1
    if denom <= 0:
        raise DegenerateClass("alpha' must exceed n/(n+1) for the rearrangement")
    return eps / denom


def properness_class(data: IntersectionData, alpha_prime, L: ClassVector) -> ClassVector:
    """(n+1)/n * alpha' * L + K; ample when alpha' > n/(n+1) and L = -K + eps A."""
    alpha_prime = _frac(alpha_prime)
    return L.scale(Fraction(data.n + 1, data.n) * alpha_prime) + data.canonical_class


# -- stock data ---------------------------------------------------------------


def projective_space(n: int) -> IntersectionData:
    """IntersectionData of P^n on the basis {H, K} with K = -(n+1)H, H^n = 1."""
    if n < 1:
        raise DimensionTooLow("P^n needs n >= 1")
    form = {}
    for a in range(n + 1):
        mono = tuple(sorted(("K",) * a + ("H",) * (n - a)))
        form[mono] = Fraction((-(n + 1)) ** a)
    c2 = None
    if n >= 2:
        c2 = {}
        e2 = comb(n + 1, 2)  # c2(P^n) = binom(n+1, 2) H^2
        for a in range(n - 1):
            mono = tuple(sorted(("K",) * a + ("H",) * (n - 2 - a)))
            c2[mono] = Fraction(e2 * (-(n + 1)) ** a)
    return IntersectionData(n, ("H", "K"), "K", frozenset({"H"}), form, c2)


# -- JSON interface -----------------------------------------------------------


def rat_str(q: Fraction) -> str:
    return "%d/%d" % (q.numerator, q.denominator) if q.denominator != 1 else str(q.numerator)


def data_from_dict(doc: Mapping) -> IntersectionData:
    """Build IntersectionData from the documented JSON layout.

    Monomials may come in any order; duplicates must agree after sorting
    (InconsistentPairing otherwise).
    """
    n = int(doc["n"])
    basis, canonical, ample = [], None, set()
    for entry in doc["basis"]:
        label = entry["label"]
        basis.append(label)
        if entry.get("canonical"):
            if canonical is not None:
                raise InconsistentPairing("two labels flagged canonical")
            canonical = label
        if entry.get("ample"):
            ample.add(label)
    if canonical is None:
        raise MissingPairing("no label flagged canonical")

    def collect(entries, degree):
        out = {}
        for e in entries:
            mono = tuple(sorted(e["monomial"]))
            val = _frac(e["value"])
            if mono in out and out[mono] != val:
                raise InconsistentPairing(
                    "monomial %r listed twice with conflicting values" % (mono,)
                )
            out[mono] = val
        return out

    form = collect(doc["form"], n)
    c2 = collect(doc.get("c2", []), n - 2) if n >= 2 else None
    return IntersectionData(n, tuple(basis), canonical, frozenset(ample), form, c2)


def data_to_dict(data: IntersectionData) -> dict:
    doc = {
        "n": data.n,
        "basis": [
            {"label": b, "ample": b in data.ample, "canonical": b == data.canonical}
            for b in data.basis
        ],
        "form": [
            {"monomial": list(m), "value": rat_str(v)}
            for m, v in sorted(data.form.items())
        ],
    }
    if data.n >= 2:
        doc["c2"] = [
            {"monomial": list(m), "value": rat_str(v)}
            for m, v in sorted(data.c2.items())
        ]
    return doc
