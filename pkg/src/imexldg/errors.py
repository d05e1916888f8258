"""Exception hierarchy."""


class ImexLdgError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(ImexLdgError, ValueError):
    """Invalid mesh, degree, material or experiment configuration."""


class UnsupportedDegreeError(ConfigurationError):
    """Polynomial degree outside the supported range 0..9."""


class DomainError(ImexLdgError, ValueError):
    """A stability parameter (e.g. mu) lies outside its admissible range."""


class TheoryInapplicableError(ImexLdgError, ValueError):
    """The mu-stability theory needs omega > 1/2."""


class NumericalError(ImexLdgError, ArithmeticError):
    """Non-finite values or a failed linear solve during time stepping."""
