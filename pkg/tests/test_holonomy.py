import cmath
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fig8rigidity.fox import WORD_L, WORD_W
from fig8rigidity.holonomy import (EXTRACTION, J, V_BASIS, AdjointPair, Holonomy, adjoint_rep,
                                   determinant, eval_word, free_reduce, generator_entries,
                                   invert_word, lorentz_residual, normalize_word,
                                   psl2_generators, pso31_generators, v_coords, v_embed)
from fig8rigidity.interval import CBox, RInterval, cos, exp
from fig8rigidity.linalg import IMatrix, midpoint_det
from fig8rigidity.shapes import OMEGA, complex_lengths

from conftest import REFERENCE_23, PCOHOM_FY

shape = st.complex_numbers(min_magnitude=0.2, max_magnitude=3).filter(lambda z: z.imag > 0.05)


def test_basis_is_traceless_and_j_symmetric():
    Ji = np.diag([1, 1, 1, -1])
    for v in V_BASIS:
        assert v.dtype.kind == "i"
        assert np.trace(v) == 0
        assert np.array_equal(v.T @ Ji, Ji @ v)


def test_extraction_inverts_embedding():
    emb = np.array([v.ravel() for v in V_BASIS], dtype=float).T
    assert np.array_equal(EXTRACTION @ emb, np.eye(9))


def test_v_coords_examples():
    c = v_coords(V_BASIS[4])
    assert c.contains(np.eye(9)[4])
    assert v_coords(np.zeros((4, 4))).contains(np.zeros(9))
    m = v_embed(np.arange(9.0))
    assert v_coords(m).contains(np.arange(9.0))


def test_pcohom_lies_in_module():
    # the cocycle value f(y) is traceless and J-symmetric, so nothing is projected away
    coords, residual = v_coords(PCOHOM_FY, residual=True)
    assert residual.contains_zero()
    assert np.all(np.isfinite(coords.mid))


@pytest.fixture(scope="module")
def pair23():
    eps = 1e-15
    return pso31_generators(CBox.from_complex(REFERENCE_23[0], eps), CBox.from_complex(REFERENCE_23[1], eps))


def test_lorentz_similitude_23(pair23):
    for g in (pair23.X, pair23.Y):
        assert lorentz_residual(g).contains_zero()
        assert not determinant(g).contains_zero()


def test_similitude_inverse(pair23):
    assert (pair23.X @ pair23.X_inv).contains(np.eye(4))
    assert (pair23.Y_inv @ pair23.Y).contains(np.eye(4))
    assert eval_word("xX", pair23).contains(np.eye(4))


@settings(max_examples=40)
@given(shape, shape)
def test_x_has_constant_zero_entry(z1, z2):
    pair = pso31_generators(CBox.from_complex(z1, 1e-12), CBox.from_complex(z2, 1e-12))
    assert pair.X[2, 1].contains_zero()
    assert lorentz_residual(pair.X).contains_zero()
    assert lorentz_residual(pair.Y).contains_zero()


@settings(max_examples=40)
@given(shape, shape)
def test_similitude_factors_exact(z1, z2):
    a, b, c, d = (Fraction(t) for t in (z1.real, z1.imag, z2.real, z2.imag))
    x, y, n = generator_entries(a, b, c, d)
    Jf = [1, 1, 1, -1]
    for g, lam in ((x, 64 * n), (y, 4 * n)):
        for i in range(4):
            for j in range(4):
                s = sum(g[k][i] * Jf[k] * g[k][j] for k in range(4))
                assert s == (lam * Jf[i] if i == j else 0)


def test_psl2_oracle():
    x, _ = psl2_generators(OMEGA, OMEGA)
    assert abs(abs(np.trace(x)) - 2) < 1e-12
    x, _ = psl2_generators(*REFERENCE_23)
    assert abs(abs(np.trace(x)) - 2) > 1e-3
    assert abs(cmath.log(OMEGA * (1 - OMEGA))) < 1e-15


def test_adjoint_identity_and_scale():
    assert adjoint_rep(IMatrix.identity(4)).contains(np.eye(9))
    assert adjoint_rep(IMatrix(2 * np.eye(4))).contains(np.eye(9))


@settings(max_examples=20)
@given(shape, shape, st.sampled_from([0.5, 3.0, 1024.0]))
def test_adjoint_scale_invariance(z1, z2, s):
    pair = pso31_generators(CBox.from_complex(z1), CBox.from_complex(z2))
    a = adjoint_rep(pair.X)
    b = adjoint_rep(pair.X * s)
    assert a.intersects(b)
    assert np.allclose(a.mid, b.mid, atol=1e-9 * max(1.0, np.abs(a.mid).max()))


def test_trace_identity_23(hol23, cert23):
    u, _ = complex_lengths(cert23.z1, cert23.z2)
    c, t = u.re, u.im
    two = RInterval.point(2.0)
    formula = (1 + exp(two * c) + exp(-two * c) + two * (exp(c) + exp(-c)) * cos(t)
               + two * cos(two * t))
    tr = sum((hol23.AdX[i, i] for i in range(1, 9)), hol23.AdX[0, 0])
    assert tr.intersects(formula)
    # floating-point view of the same identity
    assert abs(tr.mid - float(np.trace(hol23.AdX.mid))) < 1e-9


def test_relator_and_longitude(hol23):
    assert hol23.ad(WORD_W).contains(np.eye(9))
    adl, adx = hol23.ad(WORD_L), hol23.AdX
    assert (adl @ adx - adx @ adl).contains_zero()


def test_naive_relator(cert23):
    pair = AdjointPair.from_holonomy(pso31_generators(cert23.z1, cert23.z2))
    assert eval_word(WORD_W, pair).contains(np.eye(9))


def test_centered_inside_naive(hol23, cert23):
    pair = AdjointPair.from_holonomy(pso31_generators(cert23.z1, cert23.z2))
    for word in ("x", "Y", "xYXy", WORD_L):
        tight, naive = hol23.ad(word), eval_word(word, pair)
        assert tight.intersects(naive)
        assert tight.width.max() <= naive.width.max()


def test_midpoint_determinants(hol23):
    for word in ("x", "y", "X", WORD_L):
        assert abs(midpoint_det(hol23.ad(word)) - 1) < 1e-9


def _mp_ad(word, point):
    """Ad(word) at one shape point, in 40-digit floating point."""
    with mpmath.workdps(40):
        a, b, c, d = (mpmath.mpf(t) for t in point)
        x, y, _ = generator_entries(a, b, c, d)
        gens = {"x": mpmath.matrix(x), "y": mpmath.matrix(y)}
        gens["X"], gens["Y"] = gens["x"] ** -1, gens["y"] ** -1
        g = mpmath.eye(4)
        for letter in word:
            g = g * gens[letter]
        gi = g ** -1
        cols = []
        for v in V_BASIS:
            m = g * mpmath.matrix(v.tolist()) * gi
            flat = [m[i, j] for i in range(4) for j in range(4)]
            cols.append([float(sum(EXTRACTION[k, t] * flat[t] for t in range(16)))
                         for k in range(9)])
    return np.array(cols).T


@pytest.mark.parametrize("word", ["x", "y", "X", "xYXy", "yXYxxYXy"])
def test_mean_value_enclosure_contains_sampled_points(word):
    rng = np.random.default_rng(11)
    eps = 1e-6  # wide box so the derivative term matters
    z1, z2 = CBox.from_complex(REFERENCE_23[0], eps), CBox.from_complex(REFERENCE_23[1], eps)
    enc = Holonomy(z1, z2).ad(word)
    boxes = [z1.re, z1.im, z2.re, z2.im]
    for k in range(6):
        if k < 2:
            point = [iv.lo if k == 0 else iv.hi for iv in boxes]  # corners
        else:
            point = [iv.lo + (iv.hi - iv.lo) * rng.random() for iv in boxes]
        assert enc.contains(_mp_ad(word, point))


def test_words():
    assert normalize_word("x.y^-1.x^-1.y") == "xYXy"
    assert invert_word("xYXy") == "YxyX"
    assert free_reduce("yXYxyXxYxYXy") == "yXYxxYXy"
    with pytest.raises(ValueError):
        normalize_word("x.z")
    assert eval_word("", AdjointPair(*[IMatrix.identity(9)] * 4)).contains(np.eye(9))
    assert np.array_equal(J, np.diag([1.0, 1.0, 1.0, -1.0]))
