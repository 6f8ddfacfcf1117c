"""Exception types shared across the lab modules."""


class ModlabError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDomainError(ModlabError):
    """Rasterization produced no occupied cells."""


class DegenerateContinuumError(ModlabError):
    """A continuum has zero diameter."""


class OverlapError(ModlabError):
    """Two continua that must be disjoint touch each other."""


class NotContainedError(ModlabError):
    """A compact set has cells outside its supposed domain."""


class NoCurveError(ModlabError):
    """The sink set is unreachable from the source set."""


class BadRadiiError(ModlabError):
    """Annulus radii violate 0 < r_inner < r_outer."""


class NotAnnulusTargetError(ModlabError):
    """Minorization target family is not of annulus kind."""


class UnknownDistortionError(ModlabError):
    """No closed-form distortion constant is known for this mapping."""


class OutOfImageGridError(ModlabError):
    """A pushed-forward curve leaves the rasterized image region."""


class InadmissibleEtaError(ModlabError):
    """Radial test density integrates to less than one."""


class DeltaUnreachableError(ModlabError):
    """Image polyline never reaches the required separation; class condition violated."""


class ClassViolationError(ModlabError):
    """Mapping does not keep the compact's image far enough from the image boundary."""


class EmptyKError(ModlabError):
    """The compact test set contains no cells."""


class InsufficientSamplesError(ModlabError):
    """A separation-ratio bucket received fewer pairs than required."""


class ZeroDenominatorError(ModlabError):
    """In-domain modulus vanished for a continua pair (non-QED evidence)."""


class NoDeclaredLimitError(ModlabError):
    """Mapping sequence has no declared limit to compare against."""


class MemberFailureError(ModlabError):
    """A sequence member fails its own lower bound, invalidating the experiment."""


class ConfigError(ModlabError):
    """Experiment configuration is malformed or out of range."""
