"""Outward-rounded real intervals and rectangular complex boxes.

Endpoints are binary64 floats.  Every arithmetic result is widened by one
unit in the last place (``math.nextafter``) in each direction instead of
switching the FPU rounding mode, so the containment property survives the
round-to-nearest arithmetic Python performs.

Transcendental functions are evaluated with mpmath's interval context at a
higher working precision and then rounded outward to binary64, which keeps
the enclosures rigorous without trusting the platform libm.

An endpoint may become infinite after an overflow.  Such an interval is
still a valid enclosure, but :attr:`RInterval.overflowed` reports it and the
certifier refuses to draw a verdict from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import round_ceiling, round_floor, to_float

from .errors import (
    BranchCutViolation,
    DivisionByIntervalContainingZero,
    DomainViolation,
)

Real = Union[int, float]

_INF = math.inf
_MAX = 1.7976931348623157e308

# Private context so callers' global mpmath precision is left untouched.
# mpmath changes working precision internally, so one context per process.
_iv = MPIntervalContext()
_iv.prec = 96


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _clean_lo(x: float) -> float:
    # nan only arises from inf-inf or 0*inf; the safe answer is unbounded.
    return -_INF if x != x else x


def _clean_hi(x: float) -> float:
    return _INF if x != x else x


def _mul_endpoint(x: float, y: float) -> float:
    p = x * y
    # 0 * inf: the true operand is finite, so the product really is 0.
    return 0.0 if p != p else p


@dataclass(frozen=True)
class RInterval:
    """Closed interval ``[lo, hi]`` of real numbers."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if lo != lo or hi != hi:
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # construction -------------------------------------------------------
    @classmethod
    def point(cls, x: Real) -> "RInterval":
        """Degenerate interval at a float (exact, no padding)."""
        return cls(x, x)

    @classmethod
    def hull_of(cls, *xs: Real) -> "RInterval":
        return cls(min(xs), max(xs))

    # properties ---------------------------------------------------------
    @property
    def mid(self) -> float:
        if self.overflowed:
            return 0.0 if self.lo == -self.hi else (self.lo + self.hi)
        return self.lo + 0.5 * (self.hi - self.lo)

    @property
    def width(self) -> float:
        return _up(self.hi - self.lo)

    @property
    def rad(self) -> float:
        return _up(0.5 * (self.hi - self.lo))

    @property
    def mag(self) -> float:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        """Smallest absolute value in the interval."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    @property
    def overflowed(self) -> bool:
        """True when an endpoint is infinite (sticky overflow marker)."""
        return math.isinf(self.lo) or math.isinf(self.hi)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    # set relations -------------------------------------------------------
    def __contains__(self, x) -> bool:
        if isinstance(x, RInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def interior_contains(self, other: "RInterval") -> bool:
        """True iff ``other`` lies strictly inside this interval."""
        return self.lo < other.lo and other.hi < self.hi

    def intersects(self, other: "RInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "RInterval") -> "RInterval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return RInterval(lo, hi) if lo <= hi else None

    def hull(self, other: "RInterval") -> "RInterval":
        return RInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    # arithmetic ----------------------------------------------------------
    def __neg__(self) -> "RInterval":
        return RInterval(-self.hi, -self.lo)

    def __pos__(self) -> "RInterval":
        return self

    def __add__(self, other) -> "RInterval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return RInterval(
            _clean_lo(_down(self.lo + o.lo)), _clean_hi(_up(self.hi + o.hi))
        )

    __radd__ = __add__

    def __sub__(self, other) -> "RInterval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return RInterval(
            _clean_lo(_down(self.lo - o.hi)), _clean_hi(_up(self.hi - o.lo))
        )

    def __rsub__(self, other) -> "RInterval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other) -> "RInterval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        s = (
            _mul_endpoint(self.lo, o.lo),
            _mul_endpoint(self.lo, o.hi),
            _mul_endpoint(self.hi, o.lo),
            _mul_endpoint(self.hi, o.hi),
        )
        return RInterval(_down(min(s)), _up(max(s)))

    __rmul__ = __mul__

    def reciprocal(self) -> "RInterval":
        if self.contains_zero():
            raise DivisionByIntervalContainingZero(f"1/{self}")
        return RInterval(_down(1.0 / self.hi), _up(1.0 / self.lo))

    def __truediv__(self, other) -> "RInterval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.contains_zero():
            raise DivisionByIntervalContainingZero(f"{self}/{o}")
        s = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return RInterval(_clean_lo(_down(min(s))), _clean_hi(_up(max(s))))

    def __rtruediv__(self, other) -> "RInterval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def sqr(self) -> "RInterval":
        """Square without the dependency overestimate of ``x * x``."""
        a, b = _mul_endpoint(self.lo, self.lo), _mul_endpoint(self.hi, self.hi)
        if self.contains_zero():
            return RInterval(0.0, _up(max(a, b)))
        return RInterval(_down(min(a, b)), _up(max(a, b)))

    def __abs__(self) -> "RInterval":
        return RInterval(self.mig, self.mag)

    def __repr__(self):
        return f"RInterval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return f"[{self.lo:.17g}, {self.hi:.17g}]"


def _coerce(x) -> RInterval:
    if isinstance(x, RInterval):
        return x
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        f = float(x)
        if isinstance(x, int) and int(f) != x:
            # large ints are not exact in binary64
            return RInterval(_down(f), _up(f))
        return RInterval(f, f)
    return NotImplemented


def outward_pad(x: Real, eps: Real = 0.0) -> RInterval:
    """Interval ``[x - eps, x + eps]`` widened by one more ulp on each side."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x = float(x)
    return RInterval(_down(_down(x - eps)), _up(_up(x + eps)))


# transcendental functions ------------------------------------------------

def _from_iv(v) -> RInterval:
    a, b = v._mpi_
    lo = to_float(a, rnd=round_floor)
    hi = to_float(b, rnd=round_ceiling)
    if lo == _INF:
        lo = _MAX
    if hi == -_INF:
        hi = -_MAX
    return RInterval(lo, hi)


from_mpi = _from_iv  # for modules running their own high-precision context


def _to_iv(x: RInterval):
    return _iv.mpf([x.lo, x.hi])


def _pi() -> RInterval:
    return _from_iv(_iv.pi)


PI = _pi()
TWO_PI = 2 * PI


def sqrt(x: RInterval) -> RInterval:
    x = _coerce(x)
    if x.lo < 0.0:
        raise DomainViolation(f"sqrt of {x}")
    return _from_iv(_iv.sqrt(_to_iv(x)))


def exp(x: RInterval) -> RInterval:
    x = _coerce(x)
    return _from_iv(_iv.exp(_to_iv(x)))


def log(x: RInterval) -> RInterval:
    x = _coerce(x)
    if not x.lo > 0.0:
        raise DomainViolation(f"log of {x}")
    return _from_iv(_iv.log(_to_iv(x)))


def cos(x: RInterval) -> RInterval:
    x = _coerce(x)
    if x.overflowed:
        return RInterval(-1.0, 1.0)
    return _from_iv(_iv.cos(_to_iv(x)))


def cosh(x: RInterval) -> RInterval:
    x = _coerce(x)

    def at(t: float) -> RInterval:
        e = _iv.exp(_iv.mpf(t))
        return _from_iv((e + 1 / e) / 2)

    a, b = at(x.lo), at(x.hi)
    if x.contains_zero():
        return RInterval(1.0, max(a.hi, b.hi))
    return a.hull(b)


def atan2(y: RInterval, x: RInterval) -> RInterval:
    """Range of the principal argument over the box ``x + iy``.

    The box must not meet the nonpositive real axis; there the argument
    jumps by 2*pi.  For a box avoiding that ray the extremes are attained at
    corners, since the box is convex and the origin lies outside it.
    """
    y, x = _coerce(y), _coerce(x)
    if x.lo <= 0.0 and y.contains_zero():
        raise BranchCutViolation(f"atan2 over box {x} + i{y} meets the branch cut")
    corners = [
        _from_iv(_iv.atan2(_iv.mpf(cy), _iv.mpf(cx)))
        for cx in (x.lo, x.hi)
        for cy in (y.lo, y.hi)
    ]
    return RInterval(min(c.lo for c in corners), max(c.hi for c in corners))


_ELEMENTARY = {
    "sqrt": sqrt,
    "exp": exp,
    "log": log,
    "atan2": atan2,
    "cos": cos,
    "cosh": cosh,
}


def r_elem(fn: str, *args: RInterval) -> RInterval:
    """Dispatch an elementary function by name (``"sqrt"``, ``"log"``, ...)."""
    try:
        f = _ELEMENTARY[fn]
    except KeyError:
        raise ValueError(f"unknown elementary function {fn!r}") from None
    return f(*args)


# complex boxes -------------------------------------------------------------

@dataclass(frozen=True)
class CBox:
    """Rectangle ``re + i*im`` in the complex plane."""

    re: RInterval
    im: RInterval

    @classmethod
    def from_complex(cls, z: complex, eps: float = 0.0) -> "CBox":
        z = complex(z)
        if eps == 0.0:
            return cls(RInterval.point(z.real), RInterval.point(z.imag))
        return cls(outward_pad(z.real, eps), outward_pad(z.imag, eps))

    @classmethod
    def coerce(cls, z) -> "CBox":
        if isinstance(z, CBox):
            return z
        if isinstance(z, RInterval):
            return cls(z, RInterval.point(0.0))
        if isinstance(z, (int, float, complex)):
            z = complex(z)
            return cls(_coerce(z.real), _coerce(z.imag))
        return NotImplemented

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def __contains__(self, z) -> bool:
        if isinstance(z, CBox):
            return z.re in self.re and z.im in self.im
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def meets_branch_cut(self) -> bool:
        return self.re.lo <= 0.0 and self.im.contains_zero()

    def __neg__(self) -> "CBox":
        return CBox(-self.re, -self.im)

    def conj(self) -> "CBox":
        return CBox(self.re, -self.im)

    def __add__(self, other) -> "CBox":
        o = CBox.coerce(other)
        if o is NotImplemented:
            return o
        return CBox(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "CBox":
        o = CBox.coerce(other)
        if o is NotImplemented:
            return o
        return CBox(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "CBox":
        o = CBox.coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other) -> "CBox":
        o = CBox.coerce(other)
        if o is NotImplemented:
            return o
        return CBox(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def abs2(self) -> RInterval:
        """Enclosure of ``|z|^2``."""
        return self.re.sqr() + self.im.sqr()

    def __truediv__(self, other) -> "CBox":
        o = CBox.coerce(other)
        if o is NotImplemented:
            return o
        d = o.abs2()
        if d.contains_zero():
            raise DivisionByIntervalContainingZero(f"division by box {o}")
        n = self * o.conj()
        return CBox(n.re / d, n.im / d)

    def __rtruediv__(self, other) -> "CBox":
        o = CBox.coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __repr__(self):
        return f"CBox({self.re!r}, {self.im!r})"

    def __str__(self):
        return f"{self.re} + i{self.im}"


def c_log(z: CBox) -> CBox:
    """Principal logarithm of a box that avoids the nonpositive real axis."""
    if z.meets_branch_cut():
        raise BranchCutViolation(f"Log of box {z} meets the nonpositive real axis")
    # |z|^2 > 0 is implied by avoiding the cut
    modulus = _iv.log(_to_iv(z.abs2())) / 2
    return CBox(_from_iv(modulus), atan2(z.im, z.re))
