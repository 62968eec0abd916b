"""Exception hierarchy shared by the jcjbeam modules."""


class JcjBeamError(Exception):
    """Base class for all jcjbeam-specific errors."""


class HermitianViolationError(JcjBeamError):
    """Input matrix violates the conjugate-symmetry invariant."""


class ConvergenceError(JcjBeamError):
    """An iterative routine hit its iteration cap before converging."""


class ConfigError(JcjBeamError):
    """Experiment configuration is invalid; message names the bad keys."""


class SeparationError(JcjBeamError):
    """Terminal angular-separation requirement could not be met by resampling."""


class RankDeficientError(JcjBeamError):
    """Channel matrix is (numerically) row-rank deficient; no right inverse."""


class DimensionExceededError(JcjBeamError):
    """More streams than transmit antennas; channel inversion cannot work."""


class DegenerateSolutionError(JcjBeamError):
    """SDP solution has no positive leading eigenvalue to extract."""


class AllEtaInfeasibleError(JcjBeamError):
    """No value in the eta sweep produced a solvable problem."""

    def __init__(self, statuses):
        self.statuses = list(statuses)
        super().__init__(
            "no eta value yielded an optimal solve: "
            + ", ".join(f"eta={e}: {s}" for e, s in self.statuses)
        )


class SolverStatusError(JcjBeamError):
    """An SDP solve finished with a non-optimal status."""

    def __init__(self, status, message=""):
        self.status = status
        super().__init__(message or f"solver finished with status {status}")
