"""Exception types mapped onto the CLI exit-code contract."""


class TwoPhotonError(Exception):
    """Base class for package-specific failures."""


class ConfigurationError(TwoPhotonError):
    """Invalid geometry, timing, or run configuration (CLI exit code 2)."""


class NumericalError(TwoPhotonError):
    """An integrator or numerical routine failed (CLI exit code 3)."""
