from linalg.exceptions import QuantumVerificationError


class FixpointNotConverged(QuantumVerificationError):
    """Kleene iteration for a loop predicate hit its cap."""

    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"loop fixpoint did not converge after {iterations} iterations "
                         f"(last step moved by {residual:.3e})")


class OutlineShapeError(QuantumVerificationError, ValueError):
    def __init__(self, step, message):
        self.step = step
        self.message = message
        super().__init__(f"step {step}: {message}" if step is not None else message)


class UnknownVariable(QuantumVerificationError, KeyError):
    def __str__(self):
        return self.args[0]


class AssertionFormatError(QuantumVerificationError, ValueError):
    pass
