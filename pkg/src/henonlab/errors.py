"""Exception and warning types shared across the package."""


class HenonLabError(Exception):
    """Base class for all package-specific errors."""


class Overflow(HenonLabError, ArithmeticError):
    """A plain double-precision evaluation passed the overflow ceiling."""


class MaxDepthExceeded(HenonLabError):
    """Orbit neither escaped nor certifiably stayed inside the bidisk."""


class NoConvergence(HenonLabError):
    """An iterative solve ran out of iterations or diverged."""


class SingularJacobian(HenonLabError):
    """Newton system is numerically singular (suspected multiple root)."""


class DegreeOverflow(HenonLabError):
    """Symbolic composition requested beyond the supported degree."""


class OracleDegenerate(HenonLabError):
    """Algebraic oracle hit a degenerate parameter configuration."""


class DegenerateOrbit(HenonLabError):
    """Orbit residual too large to be treated as a verified cycle."""


class NearDefective(HenonLabError):
    """Eigenvalue gap too small for stable eigenvector extraction."""


class EmptySelection(HenonLabError):
    """A selector matched no records."""


class OrbitEscaped(HenonLabError):
    """Forward orbit left the filtration ball before the horizon."""

    def __init__(self, message: str, escaped_at: int | None = None):
        super().__init__(message)
        self.escaped_at = escaped_at


class ConfigError(HenonLabError, ValueError):
    """Invalid configuration or input file (CLI exit code 2)."""


class NonCertifying(HenonLabError):
    """Run finished but does not certify its target claim (CLI exit code 3)."""


class RootDeficitWarning(UserWarning):
    """Root finder returned fewer roots than the algebraic count."""


class SeedBudgetWarning(UserWarning):
    """Census seed budget below the expected point count."""
