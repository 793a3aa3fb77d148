"""Acceptance criteria 1-10.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.  The full range-60 sweep runs by default
(about two minutes per pass on one core); set ``FIG8_QUICK=1`` to skip it
during development.
"""
import math
import os
import random
import time
from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from fig8rigidity import cli
from fig8rigidity.certify import rigcheck, run_pipeline, sweep_slopes
from fig8rigidity.errors import (BranchCutViolation, DivisionByIntervalContainingZero,
                                 DomainViolation)
from fig8rigidity.fox import (DLDX_CLOSED, DLDY_CLOSED, DWDY_CLOSED, WORD_A, WORD_B, WORD_L,
                              WORD_L_FREE, WORD_W, evaluate_cocycle, fox_derivative,
                              group_ring_eval)
from fig8rigidity.holonomy import Holonomy, pso31_generators, v_coords
from fig8rigidity.interval import CBox, RInterval, atan2, c_log, log, sqrt
from fig8rigidity.linalg import IMatrix, IVector
from fig8rigidity.shapes import (DehnSlope, OMEGA, approximate_shapes, certify_shapes,
                                 dehn_residual, gluing_residual, second_gluing_residual)

from conftest import (REFERENCE_23, PCOHOM_FA, PCOHOM_FB, PCOHOM_FL, PCOHOM_FY, SQ3)

QUICK = os.environ.get("FIG8_QUICK") == "1"

SLOPE_BOUND_23 = RInterval(-0.09119676025684, -0.09119675985908)

A_U_23 = [-0.35148464890331, -0.35148464890331, -0.64851535109669, 0.0,
          0.83367747699778, -0.83367747699778, 0.08916928929422, -0.08916928929422, 1.0]

Z_U_L_23 = [
    (3.85413503155950, 3.85413549646991),
    (3.85413501053848, 3.85413551749158),
    (7.11116655098591, 7.11116658200069),
    (-0.00000024435903, 0.00000024435797),
    (-9.14152522655167, -9.14152510260290),
    (9.14152481827732, 9.14152551087727),
    (-0.97776823755712, -0.97776810468840),
    (0.97776780689252, 0.97776853535285),
    (-10.96530191882957, -10.96530174218687),
]

PARABOLIC_X = np.array([[8, 0, -4, -4], [0, 8, 0, 0], [4, 0, 7, -1], [-4, 0, 1, 9]], dtype=float)
PARABOLIC_Y = np.array([
    [2, 0, 2, -2],
    [0, 2, -2 * SQ3, 2 * SQ3],
    [-2, 2 * SQ3, -2, 4],
    [-2, 2 * SQ3, -4, 6],
])
# which parabolic y entries are the irrational 2*sqrt(3)
_IRRATIONAL_Y = np.abs(np.abs(PARABOLIC_Y) - 2 * SQ3) < 1e-12


def _omega_box():
    # sqrt(3)/2 is not a double: take the one-ulp box around it, decided exactly
    h = math.sqrt(3.0) / 2
    if Fraction(h) ** 2 < Fraction(3, 4):
        im = RInterval(h, math.nextafter(h, math.inf))
    else:
        im = RInterval(math.nextafter(h, -math.inf), h)
    return CBox(RInterval.point(0.5), im)


@pytest.mark.criterion(1, "(2,3) golden run")
def test_golden_23():
    start = time.perf_counter()
    slope = DehnSlope(2, 3)
    record = rigcheck(slope, certify_shapes(slope, REFERENCE_23, 1e-15))
    elapsed = time.perf_counter() - start
    print(f"(2,3) rigcheck {elapsed:.3f}s, s_u = {record.s_u}")
    assert record.b1 and record.b2
    assert record.s_u.intersects(SLOPE_BOUND_23)
    assert record.s_u.width <= 1e-8
    assert not record.s_u.contains_zero()
    assert -1.5 not in record.s_u
    assert elapsed <= 1.0


@pytest.mark.criterion(2, "(2,3) a_u")
def test_au_23(run23):
    a_u = run23[1].a_u
    assert np.max(np.abs(a_u.mid - np.array(A_U_23))) < 1e-12
    assert a_u[3].contains_zero()
    assert a_u[8].lo == a_u[8].hi == 1.0


@pytest.mark.criterion(3, "(2,3) z_u(l)")
def test_zul_23(run23):
    zul = run23[1].zul
    for i, (lo, hi) in enumerate(Z_U_L_23):
        assert zul[i].intersects(RInterval(lo, hi)), i
    assert abs(zul[0].mid - 0.5 * (Z_U_L_23[0][0] + Z_U_L_23[0][1])) < 1e-6
    assert zul[3].contains_zero()


@pytest.mark.criterion(4, "parabolic exactness of the PSO(3,1) generators")
def test_parabolic_generators():
    z = _omega_box()
    pair = pso31_generators(z, z)
    assert _omega_box().im.width < 2.3e-16
    for got, want in ((pair.X, PARABOLIC_X), (pair.Y, PARABOLIC_Y)):
        assert got.contains(want)
        assert np.all(got.width < 1e-14)
    # integer entries round to the integer itself, not merely nearby
    assert np.array_equal(np.round(pair.X.mid), PARABOLIC_X)
    assert np.array_equal(np.round(pair.Y.mid)[~_IRRATIONAL_Y], PARABOLIC_Y[~_IRRATIONAL_Y])
    assert np.all(pair.Y.width[_IRRATIONAL_Y] < 1e-14)
    # the constant entries of x are degenerate and exact
    assert np.array_equal(pair.X.lo[2:, :2], PARABOLIC_X[2:, :2])
    assert np.array_equal(pair.X.hi[2:, :2], PARABOLIC_X[2:, :2])


@pytest.mark.criterion(5, "parabolic cocycle fixtures")
def test_parabolic_cocycle():
    z = CBox.from_complex(OMEGA)
    hol = Holonomy(z, z)
    fy = v_coords(PCOHOM_FY)
    zero = np.zeros(9)
    for word, fixture in ((WORD_A, PCOHOM_FA), (WORD_B, PCOHOM_FB),
                          (WORD_L, PCOHOM_FL), (WORD_L_FREE, PCOHOM_FL)):
        got = evaluate_cocycle(word, zero, fy, hol)
        want = v_coords(fixture).mid
        assert np.max(np.abs(got.mid - want)) < 1e-10, word
    residual = fox_derivative(WORD_W, "x", hol) @ IVector(zero) + fox_derivative(WORD_W, "y", hol) @ fy
    assert residual.contains_zero()
    assert (group_ring_eval(DWDY_CLOSED, hol) @ fy).contains_zero()


@pytest.mark.criterion(6, "structural Fox derivatives vs closed forms")
def test_fox_structural_vs_closed(range10):
    picked = range10[:: max(1, len(range10) // 10)][:10]
    assert len(picked) == 10
    for slope, cert, _, _ in picked:
        hol = Holonomy(cert.z1, cert.z2)
        pairs = [
            (fox_derivative(WORD_W, "y", hol), group_ring_eval(DWDY_CLOSED, hol)),
            (fox_derivative(WORD_L_FREE, "x", hol), group_ring_eval(DLDX_CLOSED, hol)),
            (fox_derivative(WORD_L_FREE, "y", hol), group_ring_eval(DLDY_CLOSED, hol)),
        ]
        for structural, closed in pairs:
            assert structural.intersects(closed), slope
            assert np.max(np.abs(structural.mid - closed.mid)) < 1e-10, slope


def _identities(slope, cert):
    record, frame = run_pipeline(slope, cert)
    if not record.b2:
        return record, False
    hol = Holonomy(cert.z1, cert.z2)
    eye = IMatrix.identity(9)
    a_u = frame.a_u
    ok = (hol.ad(WORD_W).contains(np.eye(9))
          and (frame.dwdy @ ((eye - frame.AdY) @ a_u)).contains_zero()
          and ((eye - frame.AdX) @ a_u).contains_zero()
          and ((eye - frame.AdL) @ a_u).contains_zero())
    return record, ok


@pytest.fixture(scope="module")
def range60_rerun():
    """Single-slope rigcheck plus identity checks for every pair up to 60."""
    if QUICK:
        pytest.skip("FIG8_QUICK=1")
    out = {}
    for s in sweep_slopes(60):
        cert = certify_shapes(s, approximate_shapes(s))
        out[s] = _identities(s, cert)
    return out


@pytest.mark.criterion(7, "relator and kernel identities on certified slopes")
def test_identities_range10(range10):
    for slope, cert, _, _ in range10:
        record, ok = _identities(slope, cert)
        assert record.b2 and ok, slope


@pytest.mark.criterion(7, "relator and kernel identities on certified slopes")
def test_identities_range60(range60_rerun):
    bad = [s for s, (rec, ok) in range60_rerun.items() if rec.b2 and not ok]
    assert not bad


def _read_records(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "# p q b1 b2 ratio s_lo s_hi"
    return [ln.split("\t") for ln in lines[1:]]


@pytest.mark.criterion(8, "desk-scale sweep, range 10")
def test_sweep_range10(tmp_path):
    expected = [(p, q) for p in range(1, 11) for q in range(1, 11)
                if gcd(p, q) == 1 and (p, q) not in {(1, 1), (2, 1), (3, 1), (4, 1)}]
    out = tmp_path / "r10.txt"
    start = time.perf_counter()
    rc = cli.main(["--range", "10", "--jobs", "0", "--out", str(out)])
    elapsed = time.perf_counter() - start
    rows = _read_records(out)
    print(f"range 10: {len(rows)} records in {elapsed:.2f}s")
    assert rc == 0
    assert [(int(r[0]), int(r[1])) for r in rows] == expected
    assert all(r[3] == "1" for r in rows)
    assert elapsed <= 10.0


@pytest.mark.criterion(8, "full sweep, range 60")
def test_sweep_range60(tmp_path, range60_rerun):
    out = tmp_path / "r60.txt"
    start = time.perf_counter()
    rc = cli.main(["--range", "60", "--jobs", "0", "--out", str(out)])
    elapsed = time.perf_counter() - start
    rows = _read_records(out)
    print(f"range 60: {len(rows)} records in {elapsed:.1f}s on {os.cpu_count()} cpu(s)")
    assert len(rows) == 2199
    assert all(r[3] == "1" for r in rows)
    assert rc == 0
    assert elapsed <= 30 * 60
    # a sweep verdict is never better than the single-pair rerun
    for r in rows:
        rec, _ = range60_rerun[DehnSlope(int(r[0]), int(r[1]))]
        assert rec.b2 or r[3] == "0"


def _exact(x):
    return Fraction(x)


def _sample(iv, rng):
    return iv.lo + (iv.hi - iv.lo) * rng.random()


def _random_interval(rng):
    kind = rng.random()
    if kind < 0.1:
        x = rng.uniform(-10, 10)
        return RInterval(x, x)
    scale = 10.0 ** rng.randint(-8, 6)
    a, b = rng.uniform(-1, 1) * scale, rng.uniform(-1, 1) * scale
    return RInterval(min(a, b), max(a, b))


_OPS = [
    (lambda a, b: a + b, lambda x, y: x + y),
    (lambda a, b: a - b, lambda x, y: x - y),
    (lambda a, b: a * b, lambda x, y: x * y),
    (lambda a, b: a / b, lambda x, y: x / y),
]


@pytest.mark.criterion(9, "interval property suite")
def test_interval_properties_randomized():
    rng = random.Random(20240611)
    containment = monotone = 0
    while containment < 100_000:
        a, b = _random_interval(rng), _random_interval(rng)
        for op, exact in _OPS:
            if op is _OPS[3][0] and b.contains_zero():
                continue
            r = op(a, b)
            x, y = _sample(a, rng), _sample(b, rng)
            v = exact(_exact(x), _exact(y))
            assert _exact(r.lo) <= v <= _exact(r.hi)
            containment += 1
            # widen both operands and check the result only grows
            wa = RInterval(a.lo - abs(a.lo) * 0.5 - 1e-3, a.hi + 0.25)
            wb = RInterval(b.lo - 0.125, b.hi + abs(b.hi) * 0.5)
            if op is _OPS[3][0] and wb.contains_zero():
                continue
            assert r in op(wa, wb)
            monotone += 1
    print(f"{containment} containment and {monotone} monotonicity checks")
    assert containment + monotone >= 100_000


@pytest.mark.criterion(9, "interval property suite")
def test_interval_errors():
    with pytest.raises(DivisionByIntervalContainingZero):
        1 / RInterval(-1.0, 1.0)
    with pytest.raises(DivisionByIntervalContainingZero):
        RInterval(1.0, 2.0) / RInterval(0.0, 3.0)
    with pytest.raises(DivisionByIntervalContainingZero):
        CBox.from_complex(1 + 1j) / CBox(RInterval(-1.0, 1.0), RInterval(-1.0, 1.0))
    with pytest.raises(BranchCutViolation):
        c_log(CBox(RInterval(-2.0, -1.0), RInterval(-0.5, 0.5)))
    with pytest.raises(BranchCutViolation):
        c_log(CBox.from_complex(-1.0))
    with pytest.raises(BranchCutViolation):
        atan2(RInterval(-1e-300, 1e-300), RInterval(-1.0, 0.0))
    with pytest.raises(DomainViolation):
        log(RInterval(0.0, 1.0))
    with pytest.raises(DomainViolation):
        sqrt(RInterval(-1e-20, 1.0))


@pytest.mark.criterion(10, "shape certification")
@pytest.mark.parametrize("eps", [1e-15, 1e-13])
def test_krawczyk_23(eps):
    cert = certify_shapes(DehnSlope(2, 3), REFERENCE_23, eps)
    assert cert.verified
    assert cert.z1.re.width <= 2 * eps + 1e-15


@pytest.mark.criterion(10, "shape certification")
def test_residuals_range10(range10):
    for slope, cert, record, _ in range10:
        assert cert.verified and record.b2
        assert gluing_residual(cert.z1, cert.z2).contains_zero(), slope
        assert second_gluing_residual(cert.z1, cert.z2).contains_zero(), slope
        assert dehn_residual(slope, cert.z1, cert.z2).contains_zero(), slope
        assert cert.z1.im.lo > 0 and cert.z2.im.lo > 0
