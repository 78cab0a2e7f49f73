"""Custom exceptions for the geometry optimization simulator."""


class GeometryOptimizationError(Exception):
    """Base exception for simulator errors."""
    category = 'validation'


class InvalidParameterError(GeometryOptimizationError):
    """Raised when a parameter is outside its allowed range."""
    def __init__(self, name, value=None, requirement=None, message=None):
        self.name = name
        self.value = value
        if message:
            super().__init__(message)
        elif requirement is not None:
            super().__init__(f"Invalid {name}: {value!r}. {name} must be {requirement}.")
        else:
            super().__init__(f"Invalid {name}: {value!r}.")


class BoundsError(GeometryOptimizationError):
    """Raised when an index lies outside its register."""
    def __init__(self, what, index, size):
        self.what = what
        self.index = index
        self.size = size
        super().__init__(f"{what} index {index!r} out of range [0, {size}).")


class CapacityError(GeometryOptimizationError):
    """Raised when an array would exceed the configured amplitude cap."""
    category = 'capacity'

    def __init__(self, required, cap, what='amplitude array'):
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what} needs {required} amplitudes, above the cap of {cap}."
        )


class SingularInputError(GeometryOptimizationError):
    """Raised when a potential is evaluated at a singular argument."""
    category = 'numerical'

    def __init__(self, message):
        super().__init__(message)


class SingularPotentialError(GeometryOptimizationError):
    """Raised when a bare Coulomb term meets a zero distance on the grid."""
    category = 'numerical'

    def __init__(self, term):
        self.term = term
        super().__init__(
            f"Bare Coulomb {term} interaction is singular at coincident grid points. "
            f"Use a soft_coulomb potential instead."
        )


class NonHermitianError(GeometryOptimizationError):
    """Raised when a matrix handed to the eigensolver is not Hermitian."""
    def __init__(self, deviation):
        self.deviation = deviation
        super().__init__(f"Matrix is not Hermitian: max|H - H^dagger| = {deviation:.3e}.")


class NumericalCollapseError(GeometryOptimizationError):
    """Raised when an imaginary-time step drives the norm to underflow."""
    category = 'numerical'

    def __init__(self, raw_norm, dtau, energy_shift):
        self.raw_norm = raw_norm
        self.dtau = dtau
        self.energy_shift = energy_shift
        super().__init__(
            f"Imaginary-time step collapsed (raw norm {raw_norm:.3e} at dtau={dtau}, "
            f"E_shift={energy_shift}). Use a smaller dtau or a larger energy shift."
        )


class SingularityError(GeometryOptimizationError):
    """Raised when the regularized VITE linear system cannot be solved."""
    category = 'numerical'

    def __init__(self, lambda_reg, reason):
        self.lambda_reg = lambda_reg
        super().__init__(
            f"VITE update failed with lambda_reg={lambda_reg}: {reason}. "
            f"Increase lambda_reg."
        )


class ResolutionError(GeometryOptimizationError):
    """Raised when a reference state vanishes on the grid."""
    category = 'numerical'

    def __init__(self, geometry, kind):
        self.geometry = geometry
        super().__init__(
            f"Reference state '{kind}' has zero norm on the grid at geometry {geometry}. "
            f"Increase the grid resolution or the width."
        )


class UnsupportedRelationError(GeometryOptimizationError):
    """Raised when the round-robin e-n schedule gets more nuclei than electrons."""
    def __init__(self, n_electrons, n_nuclei):
        self.n_electrons = n_electrons
        self.n_nuclei = n_nuclei
        super().__init__(
            f"Round-robin e-n scheduling needs n_e >= n_nucl, got n_e={n_electrons}, "
            f"n_nucl={n_nuclei}."
        )


class ConfigValidationError(GeometryOptimizationError):
    """Raised when an experiment config fails schema validation."""
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "Invalid configuration:\n" + "\n".join(f"  {v}" for v in self.violations)
        )
