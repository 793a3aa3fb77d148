"""Verified-numerics certification of infinitesimal projective rigidity for
Dehn fillings of the figure-eight knot complement."""
from .certify import RigidityRecord, format_record, rigcheck, run_pipeline, sweep
from .errors import (BranchCutViolation, CertificationError, DivisionByIntervalContainingZero,
                     DomainViolation, FixedSpaceNotOneDimensional, Inconclusive, NotVerified,
                     RankCheckFailed, ShapeFileError, SingularEnclosure, VerificationFailed)
from .fox import CohomologyFrame, evaluate_cocycle, fox_derivative, slope_enclosure
from .holonomy import Holonomy, adjoint_rep, pso31_generators, v_coords, v_embed
from .interval import CBox, RInterval, c_log, outward_pad
from .linalg import IMatrix, IVector, imat_inv4, is_regular, verified_solve
from .shapes import DehnSlope, ShapeCertificate, approximate_shapes, certify_shapes, load_shapes

__version__ = "0.1.0"
