import numpy as np
import pytest

from fig8rigidity.certify import run_pipeline, sweep_slopes
from fig8rigidity.holonomy import Holonomy
from fig8rigidity.shapes import DehnSlope, approximate_shapes, certify_shapes

# certified (2,3) shapes as printed, 15 decimals each
REFERENCE_23 = (complex(0.567343784636165, 0.442016550101567),
            complex(0.322271789512312, 0.449431980686431))

SQ3 = np.sqrt(3.0)

# 4x4 cocycle fixtures at the complete structure: f(x) = 0 and f(y) below
PCOHOM_FY = np.array([
    [14, -31 * SQ3, -57, 81],
    [-31 * SQ3, 144, 91 * SQ3, -115 * SQ3],
    [-57, 91 * SQ3, 181, -260],
    [-81, 115 * SQ3, 260, -339],
])
PCOHOM_FA = np.array([
    [40, 20 * SQ3, -297 / 2, 307 / 2],
    [20 * SQ3, 0, -51 * SQ3, 63 * SQ3],
    [-297 / 2, -51 * SQ3, 638, -670],
    [-307 / 2, -63 * SQ3, 670, -678],
])
PCOHOM_FB = np.array([
    [-88, -24 * SQ3, 285 / 4, -475 / 4],
    [-24 * SQ3, 0, 35 * SQ3 / 4, -21 * SQ3 / 4],
    [285 / 4, 35 * SQ3 / 4, -137 / 4, 231 / 4],
    [475 / 4, 21 * SQ3 / 4, -231 / 4, 489 / 4],
])
PCOHOM_FL = np.array([
    [-40, 0, 0, 0],
    [0, 120, -80 * SQ3, -80 * SQ3],
    [0, -80 * SQ3, 151, 191],
    [0, 80 * SQ3, -191, -231],
])


@pytest.fixture(scope="session")
def slope23():
    return DehnSlope(2, 3)


@pytest.fixture(scope="session")
def cert23(slope23):
    return certify_shapes(slope23, REFERENCE_23, 1e-15)


@pytest.fixture(scope="session")
def hol23(cert23):
    return Holonomy(cert23.z1, cert23.z2)


@pytest.fixture(scope="session")
def run23(slope23, cert23):
    return run_pipeline(slope23, cert23)


@pytest.fixture(scope="session")
def range10():
    """Certified shapes, record and frame for every slope of the range-10 sweep."""
    out = []
    for s in sweep_slopes(10):
        cert = certify_shapes(s, approximate_shapes(s))
        rec, frame = run_pipeline(s, cert)
        out.append((s, cert, rec, frame))
    return out


# acceptance summary: one line per criterion in the terminal report

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    ok = rep.passed if rep.when == "call" else not rep.failed
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
