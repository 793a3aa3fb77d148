"""Per-slope rigidity check and the batch sweep over Dehn filling slopes.

A record carries two verdicts: ``b1`` says the leading 8x8 block of dw/dy was
proven regular (so dw/dy has rank 8), ``b2`` says additionally that the
slope enclosure excludes both 0 and ``-q/p``.  ``b2`` true certifies that the
filled manifold is infinitesimally projectively rigid; anything else only
means "not certified".
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from math import gcd
from pathlib import Path
from typing import Iterable, Optional

from .errors import CertificationError, Inconclusive, RankCheckFailed
from .fox import CohomologyFrame, build_frame, slope_enclosure, solve_frame
from .holonomy import Holonomy
from .interval import RInterval
from .linalg import is_regular
from .shapes import (DEFAULT_EPS, DehnSlope, ShapeCertificate, approximate_shapes,
                     certify_shapes, is_exceptional, load_shapes)

log = logging.getLogger(__name__)

CERTIFIED = "certified"
NOT_CERTIFIED = "not_certified"
INCONCLUSIVE = "inconclusive"

HEADER = "# p q b1 b2 ratio s_lo s_hi"


@dataclass(frozen=True)
class RigidityRecord:
    slope: DehnSlope
    b1: bool
    b2: bool
    ratio: float
    s_u: Optional[RInterval]
    status: str
    reason: str = ""

    def __post_init__(self):
        if self.b2 and not (self.b1 and self.s_u is not None):
            raise ValueError("b2 requires b1 and a slope enclosure")


def _record(slope, b1, s_u, reason="", status=None):
    ratio = slope.ratio
    if s_u is None:
        if status is None:
            status = NOT_CERTIFIED if not b1 else INCONCLUSIVE
        return RigidityRecord(slope, b1, False, ratio, None, status, reason)
    b2 = b1 and not s_u.contains_zero() and ratio not in s_u
    if not b2 and not reason:
        reason = "slope enclosure contains 0" if s_u.contains_zero() else "slope enclosure contains -q/p"
    return RigidityRecord(slope, b1, b2, ratio, s_u, CERTIFIED if b2 else NOT_CERTIFIED, reason)


def run_pipeline(slope: DehnSlope, shapes: ShapeCertificate):
    """``(record, frame)``; the frame is whatever was computed before any failure."""
    if is_exceptional(slope):
        raise ValueError(f"{slope} is an exceptional slope")
    if slope.p < 1 or slope.q < 1:
        raise ValueError(f"{slope}: only p, q >= 1 are handled")
    if not shapes.verified or shapes.slope != slope:
        raise ValueError(f"{slope}: shapes are not certified for this slope")
    frame: Optional[CohomologyFrame] = None
    try:
        frame = build_frame(slope, Holonomy(shapes.z1, shapes.z2))
        if any(m.overflowed for m in (frame.dwdx, frame.dwdy, frame.dldx, frame.dldy)):
            return _record(slope, False, None, "overflow in adjoint matrices", INCONCLUSIVE), frame
        b1 = is_regular(frame.dwdy[:8, :8])
        if not b1:
            return _record(slope, False, None, "rank check failed"), frame
        frame = solve_frame(frame)
        s_u = slope_enclosure(frame.a_u, frame.zul)
    except RankCheckFailed as exc:
        return _record(slope, False, None, str(exc)), frame
    except (Inconclusive, CertificationError) as exc:
        return _record(slope, True, None, f"{type(exc).__name__}: {exc}"), frame
    return _record(slope, True, s_u), frame


def rigcheck(slope: DehnSlope, shapes: ShapeCertificate) -> RigidityRecord:
    return run_pipeline(slope, shapes)[0]


# output ---------------------------------------------------------------------------------

_DOWN = Context(prec=17, rounding=ROUND_FLOOR)
_UP = Context(prec=17, rounding=ROUND_CEILING)


def _decimal(x: float, ctx: Context) -> str:
    return format(ctx.plus(Decimal(x)), "g")


def format_record(r: RigidityRecord) -> str:
    """Tab-separated ``p q b1 b2 ratio s_lo s_hi``; endpoints rounded outward."""
    fields = [str(r.slope.p), str(r.slope.q), str(int(r.b1)), str(int(r.b2)),
              format(r.ratio, ".17g")]
    if r.s_u is None:
        fields.append("INCONCLUSIVE")
    else:
        fields += [_decimal(r.s_u.lo, _DOWN), _decimal(r.s_u.hi, _UP)]
    return "\t".join(fields)


# sweep --------------------------------------------------------------------------------

def sweep_slopes(max_n: int) -> list[DehnSlope]:
    """Coprime non-exceptional ``(p, q)`` with ``1 <= p, q <= max_n``, lexicographic."""
    return [DehnSlope(p, q) for p in range(1, max_n + 1) for q in range(1, max_n + 1)
            if gcd(p, q) == 1 and not is_exceptional(DehnSlope(p, q))]


def process_slope(slope: DehnSlope, approx=None, eps: float = DEFAULT_EPS) -> RigidityRecord:
    """Shapes (given or from the oracle), Krawczyk, then rigcheck; never raises."""
    try:
        if approx is None:
            approx = approximate_shapes(slope)
        cert = certify_shapes(slope, approx, eps)
    except CertificationError as exc:
        return _record(slope, False, None, f"shapes: {exc}", INCONCLUSIVE)
    except Exception as exc:  # oracle failures (e.g. no convergence) are not fatal
        return _record(slope, False, None, f"shapes: {exc!r}", INCONCLUSIVE)
    return rigcheck(slope, cert)


def _work(args):
    p, q, approx, eps = args
    return process_slope(DehnSlope(p, q), approx, eps)


def certify_slopes(slopes: Iterable[DehnSlope], shapes: Optional[dict] = None,
                   eps: float = DEFAULT_EPS, jobs: int = 1) -> list[RigidityRecord]:
    """Records for ``slopes`` in lexicographic order, computed on ``jobs`` processes.

    With a ``shapes`` mapping, slopes missing from it are reported
    inconclusive instead of falling back to the oracle.
    """
    slopes = sorted(slopes)
    records = []
    work = []
    for s in slopes:
        if shapes is not None and s not in shapes:
            records.append(_record(s, False, None, "no shapes for slope", INCONCLUSIVE))
        else:
            work.append((s.p, s.q, None if shapes is None else shapes[s], eps))
    if jobs <= 1 or len(work) <= 1:
        records.extend(map(_work, work))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records.extend(pool.map(_work, work, chunksize=max(1, len(work) // (8 * jobs))))
    records.sort(key=lambda r: r.slope)
    return records


def summarize(records: Iterable[RigidityRecord]) -> dict:
    counts = {CERTIFIED: 0, NOT_CERTIFIED: 0, INCONCLUSIVE: 0}
    for r in records:
        counts[r.status] += 1
    return counts


def write_records(records: Iterable[RigidityRecord], fh) -> None:
    fh.write(HEADER + "\n")
    for r in records:
        fh.write(format_record(r) + "\n")


def sweep(max_n: int, shapes_source=None, jobs: int = 1, out_path=None,
          eps: float = DEFAULT_EPS) -> dict:
    """Certify every slope up to ``max_n``; write the results file if asked."""
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    shapes = None
    if shapes_source is not None:
        shapes = dict(load_shapes(shapes_source)) if not isinstance(shapes_source, dict) \
            else shapes_source
    records = certify_slopes(sweep_slopes(max_n), shapes, eps, jobs)
    if out_path is not None:
        with Path(out_path).open("w") as fh:
            write_records(records, fh)
    counts = summarize(records)
    log.info("sweep up to %d: %s", max_n, counts)
    return {"records": records, **counts}
