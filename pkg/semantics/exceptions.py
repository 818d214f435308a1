from linalg.exceptions import QuantumVerificationError


class InvalidOptions(QuantumVerificationError, ValueError):
    pass


class TruncationNotConverged(QuantumVerificationError):
    """A loop still held probability mass when the iteration cap was reached."""

    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"loop did not converge after {iterations} iterations "
                         f"(residual in-loop mass {residual:.3e})")


class ZeroTraceState(QuantumVerificationError, ValueError):
    pass
