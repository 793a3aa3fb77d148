"""Interval matrices and vectors, regularity tests and verified linear solves.

Entries are stored as two float arrays ``lo`` and ``hi``.  Products are
computed entrywise with the four-corner rule, each product rounded outward
by one ulp, and dot-product sums are widened by a standard a-priori bound on
floating-point summation error, so the result encloses every point product.
"""
from __future__ import annotations

import numpy as np

from .errors import SingularEnclosure, VerificationFailed
from .interval import RInterval

_U = 2.0**-53  # unit roundoff
_TINY = 2.0**-1074


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _nan_to(x, fill):
    return np.where(np.isnan(x), fill, x)


def _prod(alo, ahi, blo, bhi):
    """Entrywise interval product of broadcastable arrays, outward rounded."""
    with np.errstate(invalid="ignore", over="ignore"):
        c = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    c = np.where(np.isnan(c), 0.0, c)  # 0*inf with a finite true operand
    return _down(c.min(axis=0)), _up(c.max(axis=0))


def _sum_down(x, axis):
    n = x.shape[axis]
    with np.errstate(invalid="ignore", over="ignore"):
        s = x.sum(axis=axis)
        bound = (2 * n * _U) * np.abs(x).sum(axis=axis)
        r = _down(s - bound)
    return _nan_to(r, -np.inf)


def _sum_up(x, axis):
    n = x.shape[axis]
    with np.errstate(invalid="ignore", over="ignore"):
        s = x.sum(axis=axis)
        bound = (2 * n * _U) * np.abs(x).sum(axis=axis)
        r = _up(s + bound)
    return _nan_to(r, np.inf)


class _IArray:
    """Shared storage and elementwise arithmetic for IMatrix and IVector."""

    ndim = None
    __array_ufunc__ = None  # make numpy defer to our reflected operators

    def __init__(self, lo, hi=None):
        lo = np.array(lo, dtype=float)
        hi = lo.copy() if hi is None else np.array(hi, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError("lo and hi shapes differ")
        if lo.ndim != self.ndim:
            raise ValueError(f"{type(self).__name__} needs a {self.ndim}-d array")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise ValueError("NaN endpoint")
        if (lo > hi).any():
            raise ValueError("empty interval entry")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    # construction ---------------------------------------------------------
    @classmethod
    def point(cls, a):
        return cls(a)

    @classmethod
    def from_intervals(cls, entries):
        arr = np.array(entries, dtype=object)
        lo = np.vectorize(lambda x: x.lo, otypes=[float])(arr)
        hi = np.vectorize(lambda x: x.hi, otypes=[float])(arr)
        return cls(lo, hi)

    @classmethod
    def zeros(cls, *shape):
        return cls(np.zeros(shape))

    def _new(self, lo, hi):
        # slices can change dimensionality, so dispatch on ndim
        if lo.ndim == 2:
            return IMatrix(lo, hi)
        if lo.ndim == 1:
            return IVector(lo, hi)
        return RInterval(float(lo), float(hi))

    # properties -------------------------------------------------------------
    @property
    def shape(self):
        return self.lo.shape

    @property
    def mid(self) -> np.ndarray:
        with np.errstate(invalid="ignore", over="ignore"):
            m = self.lo + 0.5 * (self.hi - self.lo)
        return np.where(np.isfinite(m), m, 0.0)

    @property
    def rad(self) -> np.ndarray:
        return _up(0.5 * (self.hi - self.lo))

    @property
    def width(self) -> np.ndarray:
        return _up(self.hi - self.lo)

    @property
    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    @property
    def overflowed(self) -> bool:
        return bool(np.isinf(self.lo).any() or np.isinf(self.hi).any())

    def __getitem__(self, idx):
        return self._new(self.lo[idx], self.hi[idx])

    def __len__(self):
        return self.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def entries(self):
        """Nested Python lists of RInterval."""
        it = np.nditer([self.lo, self.hi])
        flat = [RInterval(float(a), float(b)) for a, b in it]
        return np.array(flat, dtype=object).reshape(self.shape).tolist()

    # set relations ------------------------------------------------------------
    def contains(self, a) -> bool:
        """True iff the point array ``a`` (or interval array) lies inside."""
        if isinstance(a, _IArray):
            return bool(((self.lo <= a.lo) & (a.hi <= self.hi)).all())
        a = np.asarray(a, dtype=float)
        return bool(((self.lo <= a) & (a <= self.hi)).all())

    def contains_zero(self) -> bool:
        return self.contains(np.zeros(self.shape))

    def interior_contains(self, other) -> bool:
        return bool(((self.lo < other.lo) & (other.hi < self.hi)).all())

    def intersects(self, other) -> bool:
        return bool(((self.lo <= other.hi) & (other.lo <= self.hi)).all())

    def intersect(self, other):
        lo, hi = np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi)
        if (lo > hi).any():
            return None
        return self._new(lo, hi)

    def hull(self, other):
        return self._new(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def inflate(self, rel: float, absolute: float = 0.0):
        """Epsilon-inflation: widen each entry by ``rel`` of its width plus ``absolute``."""
        r = self.rad * rel + absolute
        return self._new(_down(self.lo - r), _up(self.hi + r))

    # elementwise arithmetic ---------------------------------------------------
    @staticmethod
    def _operand(x):
        if isinstance(x, _IArray):
            return x.lo, x.hi
        if isinstance(x, RInterval):
            return np.float64(x.lo), np.float64(x.hi)
        if isinstance(x, (int, float, np.ndarray, np.floating)):
            a = np.asarray(x, dtype=float)
            return a, a
        return None

    def __neg__(self):
        return self._new(-self.hi, -self.lo)

    def __add__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        with np.errstate(invalid="ignore", over="ignore"):
            lo, hi = _down(self.lo + o[0]), _up(self.hi + o[1])
        return self._new(_nan_to(lo, -np.inf), _nan_to(hi, np.inf))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._operand(other)
        if o is None:
            return NotImplemented
        with np.errstate(invalid="ignore", over="ignore"):
            lo, hi = _down(self.lo - o[1]), _up(self.hi - o[0])
        return self._new(_nan_to(lo, -np.inf), _nan_to(hi, np.inf))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Elementwise (or scalar) product; use ``@`` for matrix products."""
        o = self._operand(other)
        if o is None:
            return NotImplemented
        return self._new(*_prod(self.lo, self.hi, o[0], o[1]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _IArray):
            return NotImplemented
        o = other if isinstance(other, RInterval) else RInterval.point(float(other))
        return self * o.reciprocal()

    def __matmul__(self, other):
        if not isinstance(other, _IArray):
            other = IMatrix(np.asarray(other, dtype=float)) if np.ndim(other) == 2 \
                else IVector(np.asarray(other, dtype=float))
        return _matmul(self, other)

    def __rmatmul__(self, other):
        a = np.asarray(other, dtype=float)
        left = IMatrix(a) if a.ndim == 2 else IVector(a)
        return _matmul(left, self)

    def __eq__(self, other):
        if not isinstance(other, _IArray):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))

    __hash__ = None


class IMatrix(_IArray):
    """Dense ``rows x cols`` matrix of intervals."""

    ndim = 2

    @classmethod
    def identity(cls, n: int) -> "IMatrix":
        return cls(np.eye(n))

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def T(self) -> "IMatrix":
        return IMatrix(self.lo.T, self.hi.T)

    def __repr__(self):
        return f"IMatrix(shape={self.shape}, max_width={self.width.max():.3g})"


class IVector(_IArray):
    """Vector of intervals."""

    ndim = 1

    def __repr__(self):
        return f"IVector(len={len(self)}, max_width={self.width.max():.3g})"


def _matmul(a: _IArray, b: _IArray):
    alo, ahi = a.lo, a.hi
    blo, bhi = b.lo, b.hi
    if alo.ndim == 1:
        alo, ahi = alo[None, :], ahi[None, :]
    vec_rhs = blo.ndim == 1
    if vec_rhs:
        blo, bhi = blo[:, None], bhi[:, None]
    if alo.shape[1] != blo.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    # (n, k, 1) x (1, k, m) -> (n, k, m), then sum over k
    plo, phi = _prod(alo[:, :, None], ahi[:, :, None], blo[None, :, :], bhi[None, :, :])
    lo, hi = _sum_down(plo, 1), _sum_up(phi, 1)
    if vec_rhs:
        lo, hi = lo[:, 0], hi[:, 0]
    if a.lo.ndim == 1:
        lo, hi = lo[0], hi[0]
    if lo.ndim == 0:
        return RInterval(float(lo), float(hi))
    return IVector(lo, hi) if lo.ndim == 1 else IMatrix(lo, hi)


def bmatmul(alo, ahi, blo, bhi):
    """Batched interval matrix product on raw endpoint arrays.

    Shapes ``(..., n, k)`` and ``(..., k, m)`` broadcast over the leading
    axes; returns ``(lo, hi)`` of shape ``(..., n, m)``.
    """
    plo, phi = _prod(alo[..., :, :, None], ahi[..., :, :, None],
                     blo[..., None, :, :], bhi[..., None, :, :])
    return _sum_down(plo, -2), _sum_up(phi, -2)


def badd(alo, ahi, blo, bhi):
    with np.errstate(invalid="ignore", over="ignore"):
        return _nan_to(_down(alo + blo), -np.inf), _nan_to(_up(ahi + bhi), np.inf)


def bsub(alo, ahi, blo, bhi):
    return badd(alo, ahi, -bhi, -blo)


# small determinants ---------------------------------------------------------

def _det3(m):
    """Interval determinant of 3x3 blocks; ``m`` is a (lo, hi) pair of (..., 3, 3)."""
    lo, hi = m

    def e(i, j):
        return lo[..., i, j], hi[..., i, j]

    def mul(x, y):
        return _prod(x[0], x[1], y[0], y[1])

    def sub(x, y):
        return _down(x[0] - y[1]), _up(x[1] - y[0])

    def add(x, y):
        return _down(x[0] + y[0]), _up(x[1] + y[1])

    c0 = sub(mul(e(1, 1), e(2, 2)), mul(e(1, 2), e(2, 1)))
    c1 = sub(mul(e(1, 0), e(2, 2)), mul(e(1, 2), e(2, 0)))
    c2 = sub(mul(e(1, 0), e(2, 1)), mul(e(1, 1), e(2, 0)))
    return add(sub(mul(e(0, 0), c0), mul(e(0, 1), c1)), mul(e(0, 2), c2))


_MINOR_ROWS = np.array([[r for r in range(4) if r != i] for i in range(4)])


def _cofactors4(a: IMatrix):
    rows = _MINOR_ROWS[:, None, :, None]
    cols = _MINOR_ROWS[None, :, None, :]
    lo = a.lo[rows, cols]  # (4, 4, 3, 3): minor (i, j)
    hi = a.hi[rows, cols]
    mlo, mhi = _det3((lo, hi))
    sign = (-1.0) ** np.add.outer(np.arange(4), np.arange(4))
    clo = np.where(sign > 0, mlo, -mhi)
    chi = np.where(sign > 0, mhi, -mlo)
    return IMatrix(clo, chi)


def det4(a: IMatrix) -> RInterval:
    """Cofactor-expansion determinant enclosure of a 4x4 interval matrix."""
    if a.shape != (4, 4):
        raise ValueError("det4 needs a 4x4 matrix")
    c = _cofactors4(a)
    return a[0] @ c[0]


def imat_inv4(a: IMatrix) -> IMatrix:
    """Enclosure of the inverse of every point matrix in a 4x4 interval matrix.

    Computed as adjugate / determinant, so for entries that are rational
    functions of some parameters the result stays a rational interval
    expression in the same parameters.
    """
    if a.shape != (4, 4):
        raise ValueError("imat_inv4 needs a 4x4 matrix")
    c = _cofactors4(a)
    d = a[0] @ c[0]
    if d.contains_zero():
        raise SingularEnclosure(f"determinant enclosure {d} contains 0")
    return c.T / d


# regularity and linear systems ------------------------------------------------

def _approx_inverse(a: IMatrix):
    try:
        r = np.linalg.inv(a.mid)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(r).all():
        return None
    return r


def _inf_norm_upper(m: IMatrix) -> float:
    """Upper bound on the infinity norm of every point matrix in ``m``."""
    return float(_sum_up(m.mag, 1).max())


def is_regular(a: IMatrix) -> bool:
    """Sufficient test that every point matrix in ``a`` is non-singular.

    With ``R`` a floating-point inverse of the midpoint, ``||I - R A|| < 1``
    (infinity norm, bounded rigorously) implies ``R A`` and hence every
    ``A`` in the enclosure is invertible.  ``False`` means "not verified".
    """
    n, m = a.shape
    if n != m:
        raise ValueError("is_regular needs a square matrix")
    if a.overflowed:
        return False
    r = _approx_inverse(a)
    if r is None:
        return False
    residual = IMatrix.identity(n) - r @ a
    return _inf_norm_upper(residual) < 1.0


INFLATION_REL = 1e-3
INFLATION_ABS = 1e-20
MAX_ITERATIONS = 50


def verified_solve(a: IMatrix, b: IVector) -> IVector:
    """Enclosure of ``{A^-1 b : A in a, b in b}`` (the united solution set).

    Krawczyk iteration ``X <- R b + (I - R A) X`` written for the error
    ``X - x0`` around a floating-point solution ``x0``, which gives much
    narrower boxes than iterating on ``X`` itself.  Iterates are
    epsilon-inflated; success is declared once an iterate maps strictly into
    the interior of its inflation, which proves every ``A`` is non-singular
    and every solution lies in the returned box.
    """
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"bad shapes {a.shape}, {b.shape}")
    if a.overflowed or b.overflowed:
        raise VerificationFailed("overflowed input")
    r = _approx_inverse(a)
    if r is None:
        raise VerificationFailed("midpoint matrix is numerically singular")
    contraction = IMatrix.identity(n) - r @ a
    if _inf_norm_upper(contraction) >= 1.0:
        raise VerificationFailed("preconditioned matrix is not contracting")
    x0 = r @ b.mid
    x0 = x0 + r @ (b.mid - a.mid @ x0)  # one step of iterative refinement
    z = r @ (b - a @ IVector(x0))
    e = z
    for _ in range(MAX_ITERATIONS):
        y = e.inflate(INFLATION_REL, INFLATION_ABS)
        k = z + contraction @ y
        if y.interior_contains(k):
            for _ in range(2):
                k2 = (z + contraction @ k).intersect(k)
                if k2 is None:
                    break
                k = k2
            return IVector(x0) + k
        e = k
    raise VerificationFailed("Krawczyk iteration did not contract")


def midpoint_det(a: IMatrix) -> float:
    """Floating-point determinant of the midpoint matrix (diagnostic only)."""
    return float(np.linalg.det(a.mid))
