"""Exception types raised across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where a quantity is defined."""


class ContractError(ValueError):
    """Inputs have incompatible shapes or violate a structural precondition."""


class PureModeError(DomainError):
    """A symplectic eigenvalue is too close to 1 for the thermal exponent to exist."""


class DegenerateSpectrumError(ArithmeticError):
    """A matrix function was requested on a numerically non-diagonalizable matrix.

    Adding a small jitter to the generating parameters usually resolves it.
    """


class SingularBlockError(ArithmeticError):
    """The annihilation block of a quadratic-operator representation is singular."""


class DivergentEstimatorError(ArithmeticError):
    """The parity estimator has zero slope at the requested phase."""


class TruncationError(RuntimeError):
    """A Fock-space computation lost more probability than allowed to truncation."""

    def __init__(self, deficit, limit):
        self.deficit = deficit
        self.limit = limit
        super().__init__(
            f"truncation deficit {deficit:.3e} exceeds the allowed {limit:.1e}; "
            "increase the cutoff"
        )
