"""Fox calculus and the twisted cohomology computation behind the slope test.

Group words use ``x, y`` and capitals for inverses.  With the presentation
``<x, y | a x a^-1 y^-1>``, ``a = x y^-1 x^-1 y``, a cocycle ``z`` is fixed by
``z(x)`` and ``z(y)`` subject to ``dw/dx z(x) + dw/dy z(y) = 0``.  The
boundary torus is generated by ``x`` and the longitude ``l = b^-1 a^-1 b a``
with ``b = x y^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (FixedSpaceNotOneDimensional, Inconclusive, RankCheckFailed,
                     VerificationFailed)
from .holonomy import Holonomy, eval_word, free_reduce, invert_word, normalize_word
from .interval import RInterval
from .linalg import IMatrix, IVector, is_regular, verified_solve
from .shapes import DehnSlope

WORD_A = "xYXy"
WORD_B = "xY"
WORD_W = WORD_A + "x" + invert_word(WORD_A) + "Y"  # a x a^-1 y^-1
WORD_L_FREE = invert_word(WORD_B) + invert_word(WORD_A) + WORD_B + WORD_A
WORD_L = free_reduce(WORD_L_FREE)  # yXYxxYXy

# closed forms in the group ring, as (sign, word) terms
DWDY_CLOSED = ((-1, "xY"), (-1, "yxYX"), (-1, ""), (1, "yxY"), (1, "xYX"))
DLDX_CLOSED = ((-1, "yX"), (1, "yXY"), (1, "yXYx"), (-1, "yXYxxYX"))
DLDY_CLOSED = ((1, ""), (-1, "yXY"), (-1, "yXYxxY"), (1, "yXYxxYX"))

DISCARDED_COORDINATE = 3  # the 4th coordinate of a_u vanishes identically


def fox_terms(word, gen: str) -> list[tuple[int, str]]:
    """Structural Fox derivative of ``word`` by ``gen`` as signed prefix words.

    ``d(uv) = du + u dv``, ``dg/dg = 1``, ``d(g^-1)/dg = -g^-1``.
    """
    if gen not in ("x", "y"):
        raise ValueError(f"generator must be 'x' or 'y', not {gen!r}")
    word = normalize_word(word)
    terms = []
    for i, letter in enumerate(word):
        if letter == gen:
            terms.append((1, word[:i]))
        elif letter == gen.upper():
            terms.append((-1, word[: i + 1]))
    return terms


def _ad(rep, word: str) -> IMatrix:
    if isinstance(rep, Holonomy):
        return rep.ad(word)
    return eval_word(word, rep)


def group_ring_eval(terms: Sequence[tuple[int, str]], rep) -> IMatrix:
    """Image of ``sum sign * word`` under the adjoint representation."""
    if isinstance(rep, Holonomy):
        return rep.ad_sum(terms)
    n = rep.generators()["x"].shape[0]
    total = IMatrix.zeros(n, n)
    for sign, word in terms:
        m = _ad(rep, word)
        total = total + m if sign > 0 else total - m
    return total


def fox_derivative(word, gen: str, rep) -> IMatrix:
    """Adjoint image of the Fox derivative; ``rep`` is a Holonomy or AdjointPair."""
    return group_ring_eval(fox_terms(word, gen), rep)


@dataclass(frozen=True)
class CohomologyFrame:
    slope: DehnSlope
    AdX: IMatrix
    AdY: IMatrix
    AdX_inv: IMatrix
    AdY_inv: IMatrix
    AdL: IMatrix
    dwdx: IMatrix
    dwdy: IMatrix
    dldx: IMatrix
    dldy: IMatrix
    a_u: Optional[IVector] = None
    m: Optional[IVector] = None
    zul: Optional[IVector] = None


def build_frame(slope: DehnSlope, hol: Holonomy) -> CohomologyFrame:
    """Adjoint matrices and Fox derivatives at certified shapes; no solves yet."""
    return CohomologyFrame(
        slope=slope,
        AdX=hol.ad("x"), AdY=hol.ad("y"),
        AdX_inv=hol.ad("X"), AdY_inv=hol.ad("Y"),
        AdL=hol.ad(WORD_L),
        dwdx=fox_derivative(WORD_W, "x", hol),
        dwdy=group_ring_eval(DWDY_CLOSED, hol),
        dldx=group_ring_eval(DLDX_CLOSED, hol),
        dldy=group_ring_eval(DLDY_CLOSED, hol),
    )


def _pad(v8: IVector, last: float) -> IVector:
    return IVector(np.append(v8.lo, last), np.append(v8.hi, last))


def fixed_vector_au(AdX: IMatrix, AdL: IMatrix) -> IVector:
    """The vector fixed by the boundary torus, normalized to ``a_9 = 1``."""
    n = AdX.shape[0]
    k = IMatrix.identity(n) - AdX
    a8 = verified_solve(k[:8, :8], -k[:8, 8])
    a = _pad(a8, 1.0)
    if not (k @ a).contains_zero():
        raise FixedSpaceNotOneDimensional("(I - Ad x) a_u does not enclose 0")
    if not ((IMatrix.identity(n) - AdL) @ a).contains_zero():
        raise FixedSpaceNotOneDimensional("a_u is not fixed by the longitude")
    return a


def cocycle_normal_form(frame: CohomologyFrame) -> IVector:
    """``z(y) = m`` with ``m_9 = -1`` solving the cocycle condition for ``z(x) = a_u``."""
    if frame.a_u is None:
        raise ValueError("frame has no a_u")
    block = frame.dwdy[:8, :8]
    if not is_regular(block):
        raise RankCheckFailed(f"{frame.slope}: leading 8x8 block of dw/dy not proven regular")
    rhs = -(frame.dwdx @ frame.a_u)[:8] + frame.dwdy[:8, 8]
    m = _pad(verified_solve(block, rhs), -1.0)
    if not cocycle_residual(frame.dwdx, frame.dwdy, frame.a_u, m).contains_zero():
        raise VerificationFailed(f"{frame.slope}: cocycle residual excludes 0")
    return m


def cocycle_residual(dwdx, dwdy, zx: IVector, zy: IVector) -> IVector:
    return dwdx @ zx + dwdy @ zy


def boundary_value_zul(frame: CohomologyFrame) -> IVector:
    return frame.dldx @ frame.a_u + frame.dldy @ frame.m


def slope_enclosure(a_u: IVector, zul: IVector) -> RInterval:
    """Intersection of the usable quotients ``a_u[i] / z_u(l)[i]``.

    The 4th coordinate is skipped; quotients whose denominator or value
    contains 0 are dropped.
    """
    result = None
    for i in range(len(a_u)):
        if i == DISCARDED_COORDINATE:
            continue
        den = zul[i]
        if den.contains_zero() or np.isinf(den.lo) or np.isinf(den.hi):
            continue
        q = a_u[i] / den
        if q.contains_zero() or q.overflowed:
            continue
        if result is None:
            result = q
            continue
        nxt = result.intersect(q)
        if nxt is None:
            # every quotient encloses the same number, so this is a bug
            raise AssertionError(f"empty slope intersection: {result} vs {q}")
        result = nxt
    if result is None:
        raise Inconclusive("no coordinate gives a usable slope quotient")
    return result


def solve_frame(frame: CohomologyFrame) -> CohomologyFrame:
    """Run the full chain a_u -> m -> z_u(l); raises on any failed verification."""
    a_u = fixed_vector_au(frame.AdX, frame.AdL)
    if not a_u[DISCARDED_COORDINATE].contains_zero():
        raise VerificationFailed(f"{frame.slope}: 4th coordinate of a_u excludes 0")
    frame = replace(frame, a_u=a_u)
    frame = replace(frame, m=cocycle_normal_form(frame))
    return replace(frame, zul=boundary_value_zul(frame))


def evaluate_cocycle(word, f_x: IVector, f_y: IVector, rep) -> IVector:
    """Crossed homomorphism ``f(uv) = f(u) + Ad(u) f(v)`` on ``word``.

    ``f(g^-1) = -Ad(g)^-1 f(g)``.
    """
    word = normalize_word(word)
    f_x = f_x if isinstance(f_x, IVector) else IVector(np.asarray(f_x, dtype=float))
    f_y = f_y if isinstance(f_y, IVector) else IVector(np.asarray(f_y, dtype=float))
    base = {"x": f_x, "y": f_y}
    total = IVector.zeros(len(f_x))
    for i, letter in enumerate(word):
        if letter.islower():
            step = _ad(rep, word[:i]) @ base[letter]
        else:
            step = -(_ad(rep, word[: i + 1]) @ base[letter.lower()])
        total = total + step
    return total

