"""Tetrahedron shapes for Dehn fillings of the figure-eight knot complement.

Two ideal tetrahedra with shapes ``z1``, ``z2`` (positive imaginary part).
The certified system is the first edge equation

    G = 2 Log z1 + Log(1/(1-z1)) + Log z2 + 2 Log(1-1/z2) - 2 pi i = 0

together with the Dehn filling equation ``D = p u + q v - 2 pi i = 0`` where
``u = Log(z1 (1-z2))`` and ``v = 2 Log(-(1-z2)^2 / z2)``.  The second edge
equation is implied by the first and is only re-checked afterwards.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from mpmath.ctx_iv import MPIntervalContext
from mpmath.ctx_mp import MPContext

from .errors import BranchCutViolation, NotVerified, ShapeFileError
from .interval import TWO_PI, CBox, RInterval, c_log, from_mpi, outward_pad
from .linalg import IMatrix, IVector

DEFAULT_EPS = 1e-15
EXCEPTIONAL = frozenset({(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1)})
OMEGA = complex(0.5, math.sqrt(3) / 2)

_hp = MPIntervalContext()
_hp.prec = 128
_HPF = type(_hp.mpf(0))


@dataclass(frozen=True, order=True)
class DehnSlope:
    p: int
    q: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not isinstance(self.q, int):
            raise TypeError("slope coordinates must be integers")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"({self.p},{self.q}) is not a primitive slope")

    @property
    def ratio(self) -> float:
        """``-q/p``, the value the slope of a rigid filling must avoid."""
        return -self.q / self.p

    def __str__(self):
        return f"({self.p},{self.q})"


def is_exceptional(slope: DehnSlope) -> bool:
    return (abs(slope.p), abs(slope.q)) in EXCEPTIONAL


@dataclass(frozen=True)
class ShapeCertificate:
    slope: DehnSlope
    z1: CBox
    z2: CBox
    verified: bool


# residuals on boxes -----------------------------------------------------------------

def _two_pi_i() -> CBox:
    return CBox(RInterval.point(0.0), TWO_PI)


def gluing_residual(z1: CBox, z2: CBox) -> CBox:
    return (2 * c_log(z1) + c_log(1 / (1 - z1)) + c_log(z2)
            + 2 * c_log(1 - 1 / z2) - _two_pi_i())


def second_gluing_residual(z1: CBox, z2: CBox) -> CBox:
    return (c_log(1 / (1 - z1)) + 2 * c_log(1 - 1 / z1) + c_log(z2)
            + 2 * c_log(1 / (1 - z2)) - _two_pi_i())


def complex_lengths(z1: CBox, z2: CBox) -> tuple[CBox, CBox]:
    one_minus = 1 - z2
    u = c_log(z1 * one_minus)
    v = 2 * c_log(-(one_minus * one_minus) / z2)
    return u, v


def dehn_residual(slope: DehnSlope, z1: CBox, z2: CBox) -> CBox:
    u, v = complex_lengths(z1, z2)
    return slope.p * u + slope.q * v - _two_pi_i()


# Krawczyk -------------------------------------------------------------------------

class _C:
    """Complex number with high-precision interval parts (centre evaluation only)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = re if isinstance(re, _HPF) else _hp.mpf(re)
        self.im = im if isinstance(im, _HPF) else _hp.mpf(im)

    def __add__(self, o):
        o = _as_c(o)
        return _C(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _as_c(o)
        return _C(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _as_c(o) - self

    def __neg__(self):
        return _C(-self.re, -self.im)

    def __mul__(self, o):
        o = _as_c(o)
        return _C(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _as_c(o)
        d = o.re * o.re + o.im * o.im
        return _C((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return _as_c(o) / self

    def log(self):
        if self.re.a <= 0 and self.im.a <= 0 <= self.im.b:
            raise BranchCutViolation("Log argument meets the nonpositive real axis")
        return _C(_hp.log(self.re * self.re + self.im * self.im) / 2, _hp.atan2(self.im, self.re))


def _as_c(x):
    if isinstance(x, _C):
        return x
    x = complex(x)
    return _C(x.real, x.imag)


def _hp_system(slope: DehnSlope, z1: complex, z2: complex):
    """``(G, D)`` at an exact point, enclosed at 128 bits then rounded outward."""
    a, b = _C(z1.real, z1.imag), _C(z2.real, z2.imag)
    two_pi_i = _C(0, 2 * _hp.pi)
    g = 2 * a.log() + (1 / (1 - a)).log() + b.log() + 2 * (1 - 1 / b).log() - two_pi_i
    om = 1 - b
    u = (a * om).log()
    v = 2 * (-(om * om) / b).log()
    d = slope.p * u + slope.q * v - two_pi_i
    return [from_mpi(t) for t in (g.re, g.im, d.re, d.im)]


def _complex_jacobian_blocks(slope: DehnSlope, z1, z2):
    """Complex partials (dG/dz1, dG/dz2, dD/dz1, dD/dz2); works for boxes or floats."""
    g1 = 2 / z1 + 1 / (1 - z1)
    g2 = 1 / z2 + 2 / (z2 * (z2 - 1))
    du1, du2 = 1 / z1, -1 / (1 - z2)
    dv2 = 2 * (2 / (z2 - 1) - 1 / z2)
    return g1, g2, slope.p * du1, slope.p * du2 + slope.q * dv2


def _real_jacobian(blocks):
    # holomorphic h with h' = alpha + i beta: rows (Re h, Im h), cols (x, y) = [[a, -b], [b, a]]
    g1, g2, d1, d2 = blocks
    rows = []
    for h1, h2 in ((g1, g2), (d1, d2)):
        rows.append([h1.re, -h1.im, h2.re, -h2.im])
        rows.append([h1.im, h1.re, h2.im, h2.re])
    return rows


def real_jacobian(slope: DehnSlope, z1: CBox, z2: CBox) -> IMatrix:
    return IMatrix.from_intervals(_real_jacobian(_complex_jacobian_blocks(slope, z1, z2)))


def krawczyk(slope: DehnSlope, z1: complex, z2: complex, eps: float):
    """One Krawczyk step on the box of radius ``eps`` around ``(z1, z2)``.

    Returns ``(box, image)`` as IVectors over ``(Re z1, Im z1, Re z2, Im z2)``.
    """
    center = np.array([z1.real, z1.imag, z2.real, z2.imag])
    box = IVector.from_intervals([outward_pad(t, eps) for t in center])
    bz1 = CBox(box[0], box[1])
    bz2 = CBox(box[2], box[3])
    jac = real_jacobian(slope, bz1, bz2)
    r = np.linalg.inv(jac.mid)
    f_mid = IVector.from_intervals(_hp_system(slope, z1, z2))
    contraction = IMatrix.identity(4) - r @ jac
    image = IVector(center) - r @ f_mid + contraction @ (box - IVector(center))
    return box, image


def certify_shapes(slope: DehnSlope, approx: tuple[complex, complex],
                   eps: float = DEFAULT_EPS) -> ShapeCertificate:
    """Prove that the ``eps``-box around ``approx`` holds a unique solution of (G, D).

    Raises NotVerified when the Krawczyk image does not land in the
    interior of the box.
    """
    z1, z2 = (complex(z) for z in approx)
    if not (z1.imag > 0 and z2.imag > 0):
        raise NotVerified(f"{slope}: approximate shapes must have positive imaginary parts")
    if not eps > 0:
        raise ValueError("eps must be positive")
    box, image = krawczyk(slope, z1, z2, eps)
    if not box.interior_contains(image):
        raise NotVerified(f"{slope}: Krawczyk image not inside the eps={eps:g} box")
    if box[1].lo <= 0 or box[3].lo <= 0:
        raise NotVerified(f"{slope}: shape box reaches the real axis")
    bz1, bz2 = CBox(box[0], box[1]), CBox(box[2], box[3])
    # implied equations, re-checked rather than trusted
    for name, res in (("first gluing", gluing_residual(bz1, bz2)),
                      ("second gluing", second_gluing_residual(bz1, bz2)),
                      ("Dehn", dehn_residual(slope, bz1, bz2))):
        if not res.contains_zero():
            raise NotVerified(f"{slope}: {name} residual {res} excludes 0")
    return ShapeCertificate(slope, bz1, bz2, True)


# floating-point oracle ----------------------------------------------------------------

def _float_system(slope, z1, z2, t=1.0):
    L = cmath.log
    g = 2 * L(z1) + L(1 / (1 - z1)) + L(z2) + 2 * L(1 - 1 / z2) - 2j * math.pi
    u = L(z1 * (1 - z2))
    v = 2 * L(-(1 - z2) ** 2 / z2)
    return np.array([g, slope.p * u + slope.q * v - t * 2j * math.pi])


def _float_jac(slope, z1, z2):
    g1, g2, d1, d2 = _complex_jacobian_blocks(slope, z1, z2)
    return np.array([[g1, g2], [d1, d2]])


def _newton(slope, z, t, steps=30, tol=1e-15):
    for _ in range(steps):
        f = _float_system(slope, z[0], z[1], t)
        dz = np.linalg.solve(_float_jac(slope, z[0], z[1]), f)
        z = z - dz
        if np.max(np.abs(dz)) < tol:
            break
    return z


def _polish(slope, z1: complex, z2: complex, digits: int = 40) -> tuple[complex, complex]:
    ctx = MPContext()
    ctx.dps = digits
    two_pi_i = 2j * ctx.pi

    def f(a, b):
        g = 2 * ctx.log(a) + ctx.log(1 / (1 - a)) + ctx.log(b) + 2 * ctx.log(1 - 1 / b) - two_pi_i
        u = ctx.log(a * (1 - b))
        v = 2 * ctx.log(-(1 - b) ** 2 / b)
        return [g, slope.p * u + slope.q * v - two_pi_i]

    root = ctx.findroot(f, (ctx.mpc(z1), ctx.mpc(z2)))
    return complex(root[0]), complex(root[1])


def approximate_shapes(slope: DehnSlope, steps: int = 64) -> tuple[complex, complex]:
    """Untrusted shape approximation by continuation from the complete structure.

    Follows ``D = t * 2 pi i`` for ``t`` from 0 to 1 starting at
    ``z1 = z2 = omega``, then polishes the end point in extended precision
    and rounds to the nearest doubles.
    """
    z = np.array([OMEGA, OMEGA])
    for t in np.linspace(0.0, 1.0, steps + 1)[1:]:
        z = _newton(slope, z, t)
    return _polish(slope, complex(z[0]), complex(z[1]))


# shape files ---------------------------------------------------------------------------

def parse_shape_line(line: str, path="<string>", lineno: int = 1):
    fields = line.split()
    if len(fields) != 6:
        raise ShapeFileError(path, lineno, f"expected 6 fields, got {len(fields)}")
    try:
        p, q = int(fields[0]), int(fields[1])
        vals = [float(v) for v in fields[2:]]
    except ValueError as exc:
        raise ShapeFileError(path, lineno, str(exc)) from None
    if not all(math.isfinite(v) for v in vals):
        raise ShapeFileError(path, lineno, "non-finite shape value")
    try:
        slope = DehnSlope(p, q)
    except ValueError as exc:
        raise ShapeFileError(path, lineno, str(exc)) from None
    return slope, (complex(vals[0], vals[1]), complex(vals[2], vals[3]))


def load_shapes(path) -> list[tuple[DehnSlope, tuple[complex, complex]]]:
    """Records ``p q z1x z1y z2x z2y`` from a text file; ``#`` starts a comment line."""
    path = Path(path)
    out = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            out.append(parse_shape_line(s, str(path), lineno))
    return out


def format_shape_line(slope: DehnSlope, shapes: tuple[complex, complex]) -> str:
    z1, z2 = shapes
    return f"{slope.p} {slope.q} {z1.real!r} {z1.imag!r} {z2.real!r} {z2.imag!r}"
