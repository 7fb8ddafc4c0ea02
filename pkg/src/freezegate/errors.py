"""Exception types shared across the library."""


class ConfigError(ValueError):
    """Invalid parameter or configuration value."""


class NoRootInBracket(RuntimeError):
    """The signed effective detuning never changes sign on the scan grid."""

    def __init__(self, message: str, grid_min: float | None = None):
        super().__init__(message)
        self.grid_min = grid_min


class StepTooCoarse(RuntimeError):
    """Halving the propagation step moved the result beyond tolerance."""

    def __init__(self, message: str, change: float):
        super().__init__(message)
        self.change = change


class BranchNotFound(KeyError):
    """Requested quasienergy branch label is not present in the spectrum."""


class BranchTrackingAmbiguous(RuntimeError):
    """Eigenvector-overlap continuation could not be resolved uniquely."""

    def __init__(self, message: str, grid_index: int):
        super().__init__(message)
        self.grid_index = grid_index
