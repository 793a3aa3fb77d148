"""Holonomy of the figure-eight knot complement in PSO(3,1) and its adjoint action.

The two generators ``x`` and ``y`` are 4x4 matrices whose entries are
polynomials in the real and imaginary parts of the tetrahedron shapes.  They
are kept unnormalized: both are Lorentz similitudes (``g^T J g = lambda J``)
for every value of the parameters, so inverses are ``J g^T J / lambda`` and
the adjoint action does not see the scale at all.

Coordinates on the 9-dimensional module of traceless J-symmetric matrices
(``J = diag(1, 1, 1, -1)``) are taken relative to a fixed integer basis.

Two ways of enclosing adjoint matrices live here.  ``adjoint_rep`` and
``eval_word`` are plain interval evaluation, fine for short words.  The
``Holonomy`` class uses a mean-value form instead: the value at the centre
of the shape box is computed exactly (float midpoints are dyadic rationals
and every entry is a polynomial in them, so Python integers suffice) and
the variation over the box is bounded by interval enclosures of the partial
derivatives times the box radius.  For 10-letter words this is several
orders of magnitude tighter than naive interval products.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence, Union

import numpy as np

from .interval import CBox, RInterval
from .linalg import IMatrix, IVector, badd, bmatmul, det4, imat_inv4

J = np.diag([1.0, 1.0, 1.0, -1.0])
_JSIGN = np.outer(np.diag(J), np.diag(J)).astype(int)  # (J M^T J)_ij = sign_ij M_ji


def _basis():
    v = [np.zeros((4, 4), dtype=int) for _ in range(9)]
    v[0][0, 0], v[0][3, 3] = 1, -1
    v[1][1, 1], v[1][3, 3] = 1, -1
    v[2][2, 2], v[2][3, 3] = 1, -1
    v[3][0, 1] = v[3][1, 0] = 1
    v[4][0, 2] = v[4][2, 0] = 1
    v[5][0, 3], v[5][3, 0] = -1, 1
    v[6][1, 2] = v[6][2, 1] = 1
    v[7][1, 3], v[7][3, 1] = -1, 1
    v[8][2, 3], v[8][3, 2] = -1, 1
    for m in v:
        m.flags.writeable = False
    return tuple(v)


V_BASIS = _basis()


def _extraction_table():
    # Row k is the functional on flattened 4x4 matrices giving the k-th
    # coordinate of the J-symmetric traceless part (M + J M^T J)/2 - tr(M)/4.
    # Exact on the module; elsewhere it is the Killing-orthogonal projection,
    # which commutes with conjugation.
    t = np.zeros((9, 16))

    def at(i, j):
        return 4 * i + j

    for k in range(3):
        t[k, at(k, k)] += 1.0
        for d in range(4):
            t[k, at(d, d)] -= 0.25
    for k, (i, j) in {3: (0, 1), 4: (0, 2), 6: (1, 2)}.items():
        t[k, at(i, j)] += 0.5
        t[k, at(j, i)] += 0.5
    for k, (i, j) in {5: (3, 0), 7: (3, 1), 8: (3, 2)}.items():
        t[k, at(i, j)] += 0.5
        t[k, at(j, i)] -= 0.5
    t.flags.writeable = False
    return t


EXTRACTION = _extraction_table()
# 4 * EXTRACTION as sparse integer rows: [(flat index, coefficient), ...]
_EXTRACTION4 = [[(t, int(4 * cf)) for t, cf in enumerate(row) if cf] for row in EXTRACTION]
_EMBEDDING = np.array([m.ravel() for m in V_BASIS], dtype=float).T  # 16 x 9
_BASIS_STACK = np.array(V_BASIS, dtype=float)  # (9, 4, 4)
_BASIS_OBJ = [v.astype(object) for v in V_BASIS]


def v_embed(c) -> IMatrix:
    """4x4 matrix ``sum_k c_k v_k``."""
    if not isinstance(c, IVector):
        c = IVector(np.asarray(c, dtype=float))
    flat = _EMBEDDING @ c
    return IMatrix(flat.lo.reshape(4, 4), flat.hi.reshape(4, 4))


def v_coords(m, residual: bool = False):
    """Coordinates of a 4x4 (interval) matrix relative to the basis.

    With ``residual=True`` also returns ``m - v_embed(coords)``, which
    encloses zero whenever ``m`` may lie in the module.
    """
    if not isinstance(m, IMatrix):
        m = IMatrix(np.asarray(m, dtype=float))
    flat = IVector(m.lo.ravel(), m.hi.ravel())
    c = EXTRACTION @ flat
    if residual:
        return c, m - v_embed(c)
    return c


# generators ----------------------------------------------------------------------

def generator_entries(a, b, c, d):
    """Entries of ``x`` and ``y`` as polynomials in ``z1 = a+bi``, ``z2 = c+di``.

    Works for any scalar type with ring operations (floats, Fractions,
    RIntervals, jets).  Returns ``(X rows, Y rows, N)`` with
    ``N = |z1 (1 - z2)|^2``; the similitude factors are ``64 N`` for ``x``
    and ``4 N`` for ``y``.
    """
    re_w = a - a * c + b * d
    im_w = b - b * c - a * d
    n = re_w * re_w + im_w * im_w
    m = c * c + d * d
    e = a * c + b * d - a * m
    f = b * c - a * d - b * m
    x = [
        [8 * re_w, 8 * im_w, -4 * re_w, -4 * re_w],
        [-8 * im_w, 8 * re_w, 4 * im_w, 4 * im_w],
        [4, 0, 3 + 4 * n, -5 + 4 * n],
        [-4, 0, -3 + 4 * n, 5 + 4 * n],
    ]
    y = [
        [2 * re_w, -2 * im_w, 4 * e, -4 * e],
        [2 * im_w, 2 * re_w, 4 * f, -4 * f],
        [-4 * c, 4 * d, 1 - 4 * m + n, 1 + 4 * m - n],
        [-4 * c, 4 * d, 1 - 4 * m - n, 1 + 4 * m + n],
    ]
    return x, y, n


LETTER_SCALE = {"x": 64, "y": 4}


@dataclass(frozen=True)
class HolonomyPair:
    """Interval enclosures of the (unnormalized) PSO(3,1) generators."""

    X: IMatrix
    Y: IMatrix
    N: RInterval

    @cached_property
    def X_inv(self) -> IMatrix:
        return similitude_inverse(self.X, LETTER_SCALE["x"] * self.N)

    @cached_property
    def Y_inv(self) -> IMatrix:
        return similitude_inverse(self.Y, LETTER_SCALE["y"] * self.N)

    def generators(self) -> dict:
        return {"x": self.X, "X": self.X_inv, "y": self.Y, "Y": self.Y_inv}

    def word_scale(self, word: "Word") -> RInterval:
        """``lambda`` with ``g^T J g = lambda J`` for the product ``g`` of ``word``."""
        lam = RInterval.point(1.0)
        for letter in normalize_word(word):
            s = LETTER_SCALE[letter.lower()] * self.N
            lam = lam * s if letter.islower() else lam / s
        return lam


def similitude_inverse(g: IMatrix, lam: RInterval) -> IMatrix:
    return IMatrix(J) @ g.T @ IMatrix(J) / lam


def _lift(v):
    return v if isinstance(v, RInterval) else RInterval.point(float(v))


def _round_out(q: Fraction) -> RInterval:
    f = float(q)  # correctly rounded
    lo = f if Fraction(f) <= q else math.nextafter(f, -math.inf)
    hi = f if Fraction(f) >= q else math.nextafter(f, math.inf)
    return RInterval(lo, hi)


def pso31_generators(z1: CBox, z2: CBox) -> HolonomyPair:
    """Interval generators at shape boxes ``z1``, ``z2``.

    Each entry is its exact value at the box centre plus
    ``sum_j |d entry / d theta_j| r_j`` with the gradient enclosed over the
    box; plain interval evaluation loses about a decimal digit to the
    repeated shape parameters.
    """
    params = ShapeParameters.from_boxes(z1, z2)
    exact = generator_entries(*(Fraction(v) for v in params.center))
    zero, one = RInterval.point(0.0), RInterval.point(1.0)
    jets = [_Jet(iv, tuple(one if k == j else zero for k in range(4)))
            for j, iv in enumerate(params.intervals())]
    spread = generator_entries(*jets)

    def enclose(value, jet):
        iv = _round_out(Fraction(value))
        if not isinstance(jet, _Jet) or not any(params.radius):
            return iv
        err = zero
        for g, r in zip(jet.grad, params.radius):
            err = err + abs(g).hi * r
        return iv + RInterval(-err.hi, err.hi)

    x, y = (IMatrix.from_intervals([[enclose(v, j) for v, j in zip(er, jr)]
                                    for er, jr in zip(ex, jx)])
            for ex, jx in zip(exact[:2], spread[:2]))
    return HolonomyPair(x, y, enclose(exact[2], spread[2]))


def lorentz_residual(g: IMatrix) -> IMatrix:
    """``g^T J g - (g^T J g)_11 J``; encloses 0 for a Lorentz similitude."""
    gram = g.T @ (J @ g)
    return gram - IMatrix(J) * gram[0, 0]


def psl2_generators(z1: complex, z2: complex):
    """Floating-point PSL(2,C) matrices of ``x`` and ``y`` (not certified)."""
    s = cmath.sqrt(z1 * (1 - z2))
    x = np.array([[1 / s, -1 / s], [0, s]], dtype=complex)
    y = np.array([[s, 0], [-z2 / s, 1 / s]], dtype=complex)
    return x, y


# words ----------------------------------------------------------------------------

Word = Union[str, Iterable[str]]

_TOKENS = {"x": "x", "y": "y", "X": "X", "Y": "Y",
           "x^-1": "X", "y^-1": "Y", "x-1": "X", "y-1": "Y"}


def normalize_word(word: Word) -> str:
    """Letters ``x, y`` with capitals for inverses, e.g. ``"xYXy"`` for x y^-1 x^-1 y.

    Dot-separated tokens such as ``"x.y^-1"`` are accepted too.
    """
    if isinstance(word, str):
        letters = word.replace(" ", "").replace("*", "")
        if set(letters) <= set("xyXY"):
            return letters
        word = letters.split(".")
    out = []
    for tok in word:
        try:
            out.append(_TOKENS[tok])
        except KeyError:
            raise ValueError(f"bad word token {tok!r}") from None
    return "".join(out)


def invert_word(word: Word) -> str:
    return normalize_word(word)[::-1].swapcase()


def free_reduce(word: Word) -> str:
    out: list[str] = []
    for letter in normalize_word(word):
        if out and out[-1] == letter.swapcase():
            out.pop()
        else:
            out.append(letter)
    return "".join(out)


def eval_word(word: Word, rep) -> IMatrix:
    """Left-to-right product of generator matrices; the empty word is the identity."""
    word = normalize_word(word)
    gens = rep.generators()
    if not word:
        return IMatrix.identity(gens["x"].shape[0])
    result = gens[word[0]]
    for letter in word[1:]:
        result = result @ gens[letter]
    return result


# naive adjoint ------------------------------------------------------------------

def adjoint_rep(g: IMatrix, g_inv: IMatrix | None = None) -> IMatrix:
    """9x9 matrix of ``v -> g v g^-1`` in basis coordinates (column j is v_j)."""
    if g_inv is None:
        g_inv = imat_inv4(g)
    cols = [v_coords(g @ (V_BASIS[j] @ g_inv)) for j in range(9)]
    lo = np.stack([c.lo for c in cols], axis=1)
    hi = np.stack([c.hi for c in cols], axis=1)
    return IMatrix(lo, hi)


@dataclass(frozen=True)
class AdjointPair:
    """Plain interval Ad of the four generator letters."""

    AdX: IMatrix
    AdY: IMatrix
    AdX_inv: IMatrix
    AdY_inv: IMatrix

    @classmethod
    def from_holonomy(cls, hol: HolonomyPair) -> "AdjointPair":
        gens = hol.generators()
        return cls(*(adjoint_rep(gens[s], gens[s.swapcase()]) for s in "xyXY"))

    def generators(self) -> dict:
        return {"x": self.AdX, "X": self.AdX_inv, "y": self.AdY, "Y": self.AdY_inv}


def adjoint_trace_formula(u: complex) -> float:
    """Trace of Ad(x) from its nine eigenvalues, given the complex length ``u``."""
    c, t = u.real, u.imag
    return float(1 + np.exp(2 * c) + np.exp(-2 * c)
                 + 2 * (np.exp(c) + np.exp(-c)) * np.cos(t) + 2 * np.cos(2 * t))


def determinant(g: IMatrix) -> RInterval:
    return det4(g)


# mean-value enclosures ------------------------------------------------------------

class _Jet:
    """Value and gradient (w.r.t. the four shape coordinates) over a box."""

    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = val
        self.grad = grad

    def _wrap(self, other):
        if isinstance(other, _Jet):
            return other
        zero = RInterval.point(0.0)
        return _Jet(_lift(other), (zero,) * len(self.grad))

    def __add__(self, other):
        o = self._wrap(other)
        return _Jet(self.val + o.val, tuple(g + h for g, h in zip(self.grad, o.grad)))

    __radd__ = __add__

    def __neg__(self):
        return _Jet(-self.val, tuple(-g for g in self.grad))

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return _Jet(self.val * other, tuple(g * other for g in self.grad))
        o = self._wrap(other)
        return _Jet(self.val * o.val,
                    tuple(g * o.val + self.val * h for g, h in zip(self.grad, o.grad)))

    __rmul__ = __mul__


def _integer_matrix(rows) -> np.ndarray:
    """Integer multiple of a rational matrix (clearing a common denominator)."""
    fr = [[Fraction(v) for v in r] for r in rows]
    den = lcm(*(v.denominator for r in fr for v in r))
    m = np.empty((4, 4), dtype=object)
    for i, r in enumerate(fr):
        for j, v in enumerate(r):
            m[i, j] = v.numerator * (den // v.denominator)
    return m


def _jsym(m):
    """``J m^T J`` for an integer object array."""
    return m.T * _JSIGN


def _jsym_bounds(lo, hi):
    lo_t, hi_t = np.swapaxes(lo, -1, -2), np.swapaxes(hi, -1, -2)
    pos = _JSIGN > 0
    return np.where(pos, lo_t, -hi_t), np.where(pos, hi_t, -lo_t)


@dataclass(frozen=True)
class ShapeParameters:
    """Box of the four real shape coordinates ``(Re z1, Im z1, Re z2, Im z2)``."""

    center: tuple
    radius: tuple

    @classmethod
    def from_boxes(cls, z1: CBox, z2: CBox) -> "ShapeParameters":
        center, radius = [], []
        for iv in (z1.re, z1.im, z2.re, z2.im):
            c = iv.mid
            r = max(c - iv.lo, iv.hi - c)
            center.append(c)
            radius.append(float(np.nextafter(r, np.inf)) if r > 0 else 0.0)
        return cls(tuple(center), tuple(radius))

    def intervals(self) -> list[RInterval]:
        out = []
        for c, r in zip(self.center, self.radius):
            if r == 0.0:
                out.append(RInterval.point(c))
            else:
                out.append(RInterval(float(np.nextafter(c - r, -np.inf)),
                                     float(np.nextafter(c + r, np.inf))))
        return out


class Holonomy:
    """Tight enclosures of Ad(word) at a box of shapes.

    ``ad(word)`` encloses ``Ad(g)`` (9x9) for ``g`` the product of
    generators along ``word``, for every shape in the box.  The centre
    value is exact up to one final rounding per entry and the box enters
    only through ``sum_j |d Ad / d theta_j| r_j``.
    """

    def __init__(self, z1: CBox, z2: CBox):
        self.z1, self.z2 = z1, z2
        self.params = ShapeParameters.from_boxes(z1, z2)
        self._cache: dict[str, IMatrix] = {}
        self._exact = self._exact_letters()
        self._jets, self._n_box = self._jet_letters()

    def _exact_letters(self):
        x, y, _ = generator_entries(*(Fraction(v) for v in self.params.center))
        out = {}
        for name, rows in (("x", x), ("y", y)):
            m = _integer_matrix(rows)
            out[name] = m
            out[name.upper()] = _jsym(m)  # the inverse up to a positive scalar
        return out

    def _jet_letters(self):
        zero, one = RInterval.point(0.0), RInterval.point(1.0)
        jets = [_Jet(iv, tuple(one if k == j else zero for k in range(4)))
                for j, iv in enumerate(self.params.intervals())]
        x, y, n = generator_entries(*jets)
        out = {}
        for name, rows in (("x", x), ("y", y)):
            lo = np.empty((5, 4, 4))
            hi = np.empty((5, 4, 4))
            for i, r in enumerate(rows):
                for j, v in enumerate(r):
                    if isinstance(v, _Jet):
                        parts = (v.val, *v.grad)
                    else:
                        parts = (_lift(v),) + (zero,) * 4
                    for k, p in enumerate(parts):
                        lo[k, i, j], hi[k, i, j] = p.lo, p.hi
            out[name] = (lo, hi)
            out[name.upper()] = _jsym_bounds(lo, hi)
        return out, n.val

    @cached_property
    def pair(self) -> HolonomyPair:
        return pso31_generators(self.z1, self.z2)

    def _exact_word(self, word: str):
        g = np.identity(4, dtype=int).astype(object)
        for letter in word:
            g = g.dot(self._exact[letter])
        return g

    def _jet_word(self, word: str):
        lo = np.zeros((5, 4, 4))
        lo[0] = np.eye(4)
        hi = lo.copy()
        for letter in word:
            llo, lhi = self._jets[letter]
            plo, phi = bmatmul(lo, hi, llo[0], lhi[0])  # P L and dP L
            qlo, qhi = bmatmul(lo[0], hi[0], llo[1:], lhi[1:])  # P dL
            slo, shi = badd(plo[1:], phi[1:], qlo, qhi)
            lo = np.concatenate([plo[:1], slo])
            hi = np.concatenate([phi[:1], shi])
        return lo, hi

    def _center_ad(self, word: str):
        g = self._exact_word(word)
        h = _jsym(g)
        # g^T J g = lam J, and g^-1 = h / lam
        lam = g[0, 0] ** 2 + g[1, 0] ** 2 + g[2, 0] ** 2 - g[3, 0] ** 2
        den = 4 * lam
        lo = np.empty((9, 9))
        hi = np.empty((9, 9))
        for k, v in enumerate(_BASIS_OBJ):
            p = g.dot(v).dot(h).ravel()
            for i, row in enumerate(_EXTRACTION4):
                q = sum(cf * p[t] for t, cf in row) / den  # correctly rounded
                lo[i, k] = np.nextafter(q, -np.inf)
                hi[i, k] = np.nextafter(q, np.inf)
        return lo, hi

    def _derivative_bound(self, word: str) -> np.ndarray:
        """Entrywise bound on ``sum_j |d Ad / d theta_j| r_j`` over the box."""
        glo, ghi = self._jet_word(word)
        lam = RInterval.point(1.0)
        for letter in word:
            lam = lam * (LETTER_SCALE[letter.lower()] * self._n_box)
        ilo, ihi = _jsym_bounds(glo[0], ghi[0])
        inv = IMatrix(ilo, ihi) / lam
        # d(G v G^-1) = [xi, G v G^-1] with xi = dG G^-1; scalar parts of xi cancel
        xlo, xhi = bmatmul(glo[1:], ghi[1:], inv.lo, inv.hi)
        alo, ahi = bmatmul(glo[0], ghi[0], _BASIS_STACK, _BASIS_STACK)
        alo, ahi = bmatmul(alo, ahi, inv.lo, inv.hi)
        l1, h1 = bmatmul(xlo[:, None], xhi[:, None], alo[None], ahi[None])
        l2, h2 = bmatmul(alo[None], ahi[None], xlo[:, None], xhi[:, None])
        dlo, dhi = badd(l1, h1, -h2, -l2)  # (4, 9, 4, 4)
        clo, chi = bmatmul(dlo.reshape(4, 9, 16), dhi.reshape(4, 9, 16),
                           EXTRACTION.T, EXTRACTION.T)
        mag = np.maximum(np.abs(clo), np.abs(chi)).transpose(0, 2, 1)
        r = np.array(self.params.radius)[:, None, None]
        with np.errstate(over="ignore", invalid="ignore"):
            bound = np.nextafter((mag * r).sum(axis=0) * (1 + 2.0**-48), np.inf)
        return np.where(np.isnan(bound), np.inf, bound)

    def ad(self, word: Word) -> IMatrix:
        """Enclosure of Ad of the product along ``word`` over the shape box."""
        word = normalize_word(word)
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        if not word:
            res = IMatrix.identity(9)
        else:
            lo, hi = self._center_ad(word)
            if any(self.params.radius):
                e = self._derivative_bound(word)
                lo, hi = badd(lo, hi, -e, e)
            res = IMatrix(lo, hi)
        self._cache[word] = res
        return res

    def ad_sum(self, terms: Sequence[tuple[int, str]]) -> IMatrix:
        """``sum sign * Ad(word)`` over ``(sign, word)`` pairs."""
        total = IMatrix.zeros(9, 9)
        for sign, word in terms:
            m = self.ad(word)
            total = total + m if sign > 0 else total - m
        return total

    def generators(self) -> dict:
        return {s: self.ad(s) for s in "xXyY"}

    @property
    def AdX(self) -> IMatrix:
        return self.ad("x")

    @property
    def AdY(self) -> IMatrix:
        return self.ad("y")
