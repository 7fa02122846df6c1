"""Exception types raised across the package.

Every error derives from :class:`WTError` so callers (the CLI in particular)
can turn numerical failures into structured report entries.
"""


class WTError(Exception):
    """Base class for all library errors."""

    code = "error"


class SpecError(WTError, ValueError):
    """Input document failed validation; ``pointer`` is a JSON pointer."""

    code = "spec_error"

    def __init__(self, message, pointer=""):
        super().__init__(message)
        self.pointer = pointer


class DimensionMismatch(WTError, ValueError):
    code = "dimension_mismatch"


class KindMismatch(WTError, ValueError):
    code = "kind_mismatch"


class NotHermitianPSD(WTError, ValueError):
    code = "not_hermitian_psd"


class NormalizationError(WTError, ValueError):
    code = "normalization_error"


class TailUnbounded(WTError):
    code = "tail_unbounded"


class QuadratureBudgetExceeded(WTError):
    code = "quadrature_budget_exceeded"


class PoleHit(WTError):
    code = "pole_hit"


class RealAxisEvaluation(WTError):
    code = "real_axis_evaluation"


class ExtrapolationDiverged(WTError):
    code = "extrapolation_diverged"


class PeriodicityPreconditionFailed(WTError):
    code = "periodicity_precondition_failed"


class SingularBracket(WTError):
    code = "singular_bracket"


class InconsistentPeriod(WTError):
    code = "inconsistent_period"


class RankDeficiency(WTError):
    code = "rank_deficiency"


class LatticeIncompatible(WTError):
    code = "lattice_incompatible"


class WindowExceeded(WTError):
    code = "window_exceeded"


class CommutationPreconditionFailed(WTError):
    code = "commutation_precondition_failed"


class SampleClosureViolated(WTError):
    code = "sample_closure_violated"


class ConjugateSymmetryViolated(WTError):
    code = "conjugate_symmetry_violated"


class LowerHalfPlane(WTError):
    code = "lower_half_plane"


class SingularResolvent(WTError):
    code = "singular_resolvent"


class SingularDenominator(WTError):
    code = "singular_denominator"
