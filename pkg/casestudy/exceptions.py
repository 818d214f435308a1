from linalg.exceptions import QuantumVerificationError


class InvalidOracle(QuantumVerificationError, ValueError):
    pass
