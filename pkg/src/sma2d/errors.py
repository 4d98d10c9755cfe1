"""Exception types shared across the package."""


class InadmissibleDeformationError(ValueError):
    """A deformation gradient with det F <= 0 was passed to an energy routine.

    The stored energy is +infinity outside the orientation-preserving set, so
    callers (line searches in particular) must treat this as a rejection, not
    as a large finite value.
    """


class NonSubmodularProblemError(ValueError):
    """A phase problem carried a negative interface weight.

    Exact binary minimization by minimum cut requires nonnegative
    disagreement costs.
    """


class ConfigError(ValueError):
    """A run configuration failed validation; the message names the field."""


class ContractViolationError(RuntimeError):
    """An internal monotonicity or minimality contract was broken.

    Raised when the per-step alternating sweep increases the incremental
    objective beyond tolerance; indicates a solver bug rather than bad input.
    """
