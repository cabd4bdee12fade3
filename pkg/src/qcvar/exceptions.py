"""Exception and warning types raised across the package."""


class QcvarError(Exception):
    """Base class for all qcvar-specific errors."""


class NumericalError(QcvarError):
    """A numerical routine (eigensolver, linear solve, ...) failed."""


class RootSeparationError(NumericalError):
    """The q-th and (q+1)-th characteristic roots are too close to split.

    The typical cause is a complex-conjugate pair straddling positions
    q and q+1 of the modulus ordering, which makes the requested
    invariant subspace ill defined.
    """


class NormalizationError(NumericalError):
    """The trailing q-by-q block of the near-unit basis is singular.

    The [A; I] normalisation then fails; reordering the series so that
    the last q components load on the near-unit directions usually
    resolves this.
    """


class ClassificationError(QcvarError):
    """A characteristic root lies in neither the near-unit nor the stable region."""


class ConstructionError(QcvarError):
    """A coefficient construction exhausted its retry budget."""


class SingularDesignError(QcvarError):
    """The regressor moment matrix of a least-squares fit is rank deficient."""


class DomainError(QcvarError, ValueError):
    """A parameter lies outside its admissible domain."""


class TableCoverageError(QcvarError):
    """A critical-value lookup fell outside the tabulated grid."""


class BoundaryWarning(UserWarning):
    """A characteristic root sits on a region boundary within tolerance."""


class ConditionWarning(UserWarning):
    """A computed quantity is close to numerically ill conditioned."""
