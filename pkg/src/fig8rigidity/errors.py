"""Exception hierarchy shared by the certification modules."""


class CertificationError(ArithmeticError):
    """Base class for every failure raised by this package."""


class DivisionByIntervalContainingZero(CertificationError, ZeroDivisionError):
    pass


class DomainViolation(CertificationError, ValueError):
    """An interval argument touches a singularity or leaves a function's domain."""


class BranchCutViolation(DomainViolation):
    """A complex box meets the nonpositive real axis, where Log is discontinuous."""


class SingularEnclosure(CertificationError):
    """The determinant enclosure of an interval matrix contains zero."""


class VerificationFailed(CertificationError):
    """A contraction-based verification did not succeed."""


class NotVerified(VerificationFailed):
    """Krawczyk's test failed to map the shape box into its interior."""


class RankCheckFailed(CertificationError):
    """The leading 8x8 block of dw/dy could not be proven regular."""


class FixedSpaceNotOneDimensional(CertificationError):
    """The computed fixed vector is not fixed by the whole boundary torus."""


class Inconclusive(CertificationError):
    """The slope enclosure could not be formed from the available quotients."""


class ShapeFileError(ValueError):
    """A shape file line could not be parsed."""

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")
