"""Exception hierarchy shared by all modules."""


class QfiError(Exception):
    """Base class for every error raised by ``ecs_qfi``."""


class NotPhysical(QfiError, ValueError):
    """A density matrix violates positivity or unit trace."""


class DegenerateSpectrum(QfiError, ArithmeticError):
    """Both eigenvalues of a 2x2 density matrix coincide."""


class BasisCollapse(QfiError, ValueError):
    """The two basis kets are (numerically) parallel, ``|p| -> 1``."""


class DimensionMismatch(QfiError, ValueError):
    pass


class NotNormalized(QfiError, ValueError):
    pass


class NonHermitianInput(QfiError, ValueError):
    pass


class StepTooSmall(QfiError, ValueError):
    """Finite-difference step is below the floating-point noise floor."""


class ZeroInformation(QfiError, ValueError):
    """Cramer-Rao bound requested for a non-positive Fisher information."""


class TruncationTooLossy(QfiError, ValueError):
    """Fock truncation discards more probability than allowed."""


class DimensionCap(QfiError, MemoryError):
    """Requested Fock space exceeds the configured dimension cap."""


class DegenerateLimit(QfiError, ValueError):
    """Input amplitude is zero, so the ECS carries no phase information."""


class FullLoss(QfiError, ValueError):
    """Transmission is zero; every photon is lost."""
