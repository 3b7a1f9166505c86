"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Malformed matrix, shape mismatch or out-of-range argument."""


class RankDeficiencyError(InvalidInputError):
    """A requested subspace dimension exceeds the numerical rank."""


class DegenerateStateError(RuntimeError):
    """The solver reached a state with no usable residual signal.

    Usually means the convergence threshold is set too tight.
    """


class NoSignalError(RuntimeError):
    """Every singular value of a noisy MMV matrix sits below the noise floor."""


class ConfigError(ValueError):
    """Bad run configuration (unknown key, malformed file, bad value)."""
