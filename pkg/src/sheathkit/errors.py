"""Exception hierarchy shared across the package.

Solver refusals (no-solution classifications, out-of-range wall data) are
kept distinct from input-validation rejections so the CLI can map them to
different exit codes.
"""


class SheathError(Exception):
    """Base class for all package errors."""

    code = "ERROR"


class ValidationError(SheathError):
    """Bad or inconsistent input data."""

    code = "VALIDATION"


class DomainError(ValidationError):
    code = "DOMAIN"


class RejectAlphaOne(ValidationError):
    code = "REJECT_ALPHA_ONE"


class RejectVelocityBalance(ValidationError):
    """Mass/velocity constraints of the two-beam boundary family fail."""

    code = "REJECT_VELOCITY1"


class RejectEps(ValidationError):
    code = "REJECT_EPS"


class NeutralityViolation(ValidationError):
    code = "NEUTRALITY_VIOLATION"


class NoSolution(SheathError):
    """The boundary value problem provably has no monotone solution."""

    code = "NO_SOLUTION"


class NoSolutionCriterion(NoSolution):
    code = "NO_SOLUTION_CRITERION"


class NoSolutionEmptyB(NoSolution):
    code = "NO_SOLUTION_EMPTY_B"


class PhiBOutOfRange(NoSolution):
    code = "PHI_B_OUT_OF_RANGE"


class NotApplicable(SheathError):
    code = "NOT_APPLICABLE"


class InsufficientDecay(SheathError):
    code = "INSUFFICIENT_DECAY"


class BohmViolated(ValidationError):
    code = "BOHM_VIOLATED"


class NoRoot(SheathError):
    code = "NO_ROOT"


class RejectGeneralReduction(ValidationError):
    """Wall-potential reduction is only defined for an absorbing wall."""

    code = "REJECT_GENERAL_REDUCTION"
