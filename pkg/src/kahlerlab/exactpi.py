"""Exact scalars of the form p(2*pi)/q(2*pi) with rational polynomial parts.

Class pairings against Kahler forms carry powers of 2*pi.  To keep those
pairings exact we treat tau := 2*pi as a formal transcendental symbol:
values are ratios of polynomials in tau with Fraction coefficients.  Since
tau is transcendental a nonzero polynomial never vanishes at tau, so
equality is decidable coefficientwise and order is decidable by evaluating
on a rational enclosure of 2*pi (interval arithmetic, 70 guard digits).
"""

from __future__ import annotations

import math
from fractions import Fraction

# 75 digits; plenty for sign determination of the small-degree polynomials
# that class arithmetic produces.
_PI_75 = 314159265358979323846264338327950288419716939937510582097494459230781640628
_PI_LO = Fraction(_PI_75, 10**74)
_PI_HI = Fraction(_PI_75 + 1, 10**74)
TAU_LO = 2 * _PI_LO
TAU_HI = 2 * _PI_HI

_Poly = tuple  # coefficients (Fraction, ...) by ascending power of tau


def _trim(c) -> _Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: _Poly, b: _Poly) -> _Poly:
    n = max(len(a), len(b))
    return _trim(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def _pneg(a: _Poly) -> _Poly:
    return tuple(-x for x in a)


def _pmul(a: _Poly, b: _Poly) -> _Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _pdivmod(a: _Poly, b: _Poly):
    # Euclidean division in Q[tau]; b != 0.
    r = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(r) >= len(b) and any(r):
        if r[-1] == 0:
            r.pop()
            continue
        shift = len(r) - len(b)
        coef = r[-1] / b[-1]
        q[shift] = coef
        for i, y in enumerate(b):
            r[shift + i] -= coef * y
        r.pop()
    return _trim(q), _trim(r)


def _pgcd(a: _Poly, b: _Poly) -> _Poly:
    while b:
        _, rem = _pdivmod(a, b)
        a, b = b, rem
    if not a:
        return ()
    return tuple(x / a[-1] for x in a)  # monic


def _interval_eval(p: _Poly):
    """Enclosure of p(tau) over [TAU_LO, TAU_HI] by interval Horner."""
    lo, hi = Fraction(0), Fraction(0)
    for c in reversed(p):
        cands = (lo * TAU_LO, lo * TAU_HI, hi * TAU_LO, hi * TAU_HI)
        lo, hi = min(cands) + c, max(cands) + c
    return lo, hi


def _psign(p: _Poly) -> int:
    if not p:
        return 0
    lo, hi = _interval_eval(p)
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    raise ArithmeticError(
        "interval of width 1e-74 around 2*pi does not separate %r from 0" % (p,)
    )


class PiScalar:
    """Immutable exact ratio of polynomials in the formal symbol 2*pi."""

    __slots__ = ("num", "den")

    def __init__(self, num=(), den=(Fraction(1),)):
        num = _trim(Fraction(x) for x in num)
        den = _trim(Fraction(x) for x in den)
        if not den:
            raise ZeroDivisionError("PiScalar with zero denominator")
        g = _pgcd(num, den)
        if len(g) > 1:
            num, _ = _pdivmod(num, g)
            den, _ = _pdivmod(den, g)
        if den and den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("PiScalar is immutable")

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_rational(q) -> "PiScalar":
        return PiScalar((Fraction(q),))

    @staticmethod
    def tau_power(k: int, coeff=1) -> "PiScalar":
        """coeff * (2*pi)^k."""
        return PiScalar((0,) * k + (Fraction(coeff),))

    # -- queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_rational(self) -> bool:
        return len(self.num) <= 1 and len(self.den) <= 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("PiScalar %r is not rational" % (self,))
        if not self.num:
            return Fraction(0)
        return self.num[0] / self.den[0]

    def sign(self) -> int:
        return _psign(self.num) * _psign(self.den)

    def __float__(self) -> float:
        tau = 2.0 * math.pi
        num = sum(float(c) * tau**i for i, c in enumerate(self.num))
        den = sum(float(c) * tau**i for i, c in enumerate(self.den))
        return num / den

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "PiScalar":
        if isinstance(x, PiScalar):
            return x
        return PiScalar.from_rational(x)

    def __add__(self, other):
        o = self._coerce(other)
        return PiScalar(
            _padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
            _pmul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return PiScalar(_pneg(self.num), self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        return PiScalar(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("PiScalar division by zero")
        return PiScalar(_pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    # -- order ----------------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        return (self - o).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def __repr__(self):
        def fmt(p):
            if not p:
                return "0"
            terms = []
            for i, c in enumerate(p):
                if c == 0:
                    continue
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append("%s*tau" % c)
                else:
                    terms.append("%s*tau^%d" % (c, i))
            return " + ".join(terms)

        if self.den == (Fraction(1),):
            return "PiScalar(%s)" % fmt(self.num)
        return "PiScalar((%s)/(%s))" % (fmt(self.num), fmt(self.den))


TAU = PiScalar.tau_power(1)
ZERO = PiScalar()
ONE = PiScalar.from_rational(1)
