"""Exception hierarchy shared by all modules."""


class LiePoissonError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(LiePoissonError):
    """Vector or tensor shape does not match the algebra dimension."""


class AntisymmetryViolation(LiePoissonError):
    """Structure constants are not antisymmetric in the lower indices."""


class JacobiViolation(LiePoissonError):
    """Structure constants fail the Jacobi identity."""

    def __init__(self, defect, tolerance):
        self.defect = float(defect)
        self.tolerance = float(tolerance)
        super().__init__(
            f"Jacobi identity fails: max defect {self.defect:.3e} > {self.tolerance:.3e}"
        )


class SingularKillingForm(LiePoissonError):
    """Killing form is singular; the quadratic Casimir is undefined."""


class NoMatrixBasis(LiePoissonError):
    """Operation requires a matrix basis but the algebra carries none."""


class BasisGramSingular(LiePoissonError):
    """Projection onto the matrix basis failed (singular Gram matrix)."""


class InvalidGroupElement(LiePoissonError):
    """Matrix fails the group membership test."""


class NonFiniteValue(LiePoissonError):
    """A field evaluation or derived quantity is not finite."""


class UnresolvableFrameField(LiePoissonError):
    """A bivector frame-field name cannot be resolved on the target space."""


class OffOrbit(LiePoissonError):
    """Point does not lie on the requested coadjoint-orbit level set."""


class WeylWallSingularity(LiePoissonError):
    """Cartan-reduced bracket evaluated on (or too close to) a Weyl-chamber wall."""


class UnsupportedAlgebra(LiePoissonError):
    """No tabulated root-system data for this algebra."""


class NotAbelian(LiePoissonError):
    """Operation is only defined for abelian algebras."""


class EmptyTrajectory(LiePoissonError):
    """Trajectory contains no samples."""


class ExpressionParseError(LiePoissonError):
    """A coordinate expression could not be parsed."""


class ConfigParseError(LiePoissonError):
    """Run configuration is missing, malformed, or inconsistent."""
