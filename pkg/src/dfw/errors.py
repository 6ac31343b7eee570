"""Error types shared across the package."""


class DegenerateTopologyError(RuntimeError):
    """A graph sequence cannot satisfy its connectivity contract within budget."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within its iteration budget."""

    def __init__(self, iterations: int, message: str | None = None):
        self.iterations = iterations
        super().__init__(message or f"power iteration did not converge in {iterations} iterations")


class NonFiniteValueError(RuntimeError):
    """A solver stage produced NaN or infinity; names the node and stage."""
