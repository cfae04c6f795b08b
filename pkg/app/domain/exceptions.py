class LabError(Exception):
    """Base class for every error raised by the lab."""


class NotSkewSymmetric(LabError):
    """Raised when a structure matrix B^(s) is not skew-symmetric."""

    def __init__(self, s: int, i: int, j: int):
        self.s, self.i, self.j = s, i, j
        super().__init__(f"B^({s}) is not skew-symmetric at entry ({i}, {j})")


class LinearlyDependent(LabError):
    """Raised when the structure matrices are linearly dependent."""


class DimensionOutOfRange(LabError):
    """Raised when (m, n) violate m >= 2 or 1 <= n <= m(m-1)/2."""


class BadParams(LabError):
    """Raised when builtin-group parameters or a numeric setting are invalid."""


class DimensionMismatch(LabError):
    """Raised when an array does not have the shape the group or grid expects."""


class NonFinitePoint(LabError):
    """Raised when a point carries NaN or Inf entries."""


class NonpositiveLambda(LabError):
    """Raised when a dilation factor is not strictly positive."""


class IndexOutOfRange(LabError):
    """Raised when a horizontal index is outside the allowed range."""


class SingularMatrix(LabError):
    """Raised when a coordinate-change matrix is singular."""


class OutOfDomain(LabError):
    """Raised when a point lies outside the closed box of a field."""


class DegeneratePair(LabError):
    """Raised when two points with zero shift carry different field values."""


class EmptyTranslatedDomain(LabError):
    """Raised when a translated graph has no representable domain box left."""


class GridTooCoarse(LabError):
    """Raised when an axis has too few lattice points for a finite difference."""


class SupportNotContained(LabError):
    """Raised when a test function's support leaves the field domain."""


class VanishingX1f(LabError):
    """Raised when X_1 f vanishes at a level-set point."""


class ImmediateExit(LabError):
    """Raised when a characteristic starts on the boundary and leaves at once."""


class NonConvergent(LabError):
    """Raised when the extremal-solution ε sequence does not settle."""

    def __init__(self, gap: float, tolerance: float):
        self.gap, self.tolerance = gap, tolerance
        super().__init__(f"Cauchy gap {gap:.3e} above tolerance {tolerance:.1e}")


class NoReferenceComponent(LabError):
    """Raised when no vertical component is coupled to φ for the given j."""


class CurveNotOnUnitInterval(LabError):
    """Raised when a curve passed to the order map does not cover [0, 1]."""


class SettingViolated(LabError):
    """Raised when a direction j has more than one coupled vertical component."""


class NonMonotoneFamily(LabError):
    """Raised when curves of an ordered family cross beyond tolerance."""


class EmptyLabelDomain(LabError):
    """Raised when no family curve stays inside the closed box."""


class KernelTooWide(LabError):
    """Raised when the mollifier support exceeds the label-domain margin."""


class InversionFailure(LabError):
    """Raised when a mollified map is not strictly increasing in the label."""


class ConfigError(LabError):
    """Raised when a scenario or spec file is missing, malformed or inconsistent."""


class ReportNotFound(LabError):
    """Raised when an archived report id does not exist."""
