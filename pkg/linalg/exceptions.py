class QuantumVerificationError(Exception):
    """Root of every error raised by the toolkit."""


class DimensionMismatch(QuantumVerificationError, ValueError):
    pass


class NotSquare(DimensionMismatch):
    pass


class NotHermitian(QuantumVerificationError, ValueError):
    pass


class InvalidState(QuantumVerificationError, ValueError):
    pass


class InvalidPredicate(QuantumVerificationError, ValueError):
    pass


class InvalidKrausMap(QuantumVerificationError, ValueError):
    pass


class MatrixFormatError(QuantumVerificationError, ValueError):
    pass
