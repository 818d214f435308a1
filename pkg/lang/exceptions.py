from dataclasses import dataclass

from linalg.exceptions import QuantumVerificationError


class LangError(QuantumVerificationError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class LexicalError(LangError):
    pass


class ParseError(LangError):
    pass


class DuplicateDeclaration(LangError):
    pass


class UnknownGate(LangError):
    pass


class UnknownMeasurement(LangError):
    pass


class TableError(QuantumVerificationError, ValueError):
    """A gate or measurement failed validation when loaded."""


@dataclass(frozen=True)
class TypeIssue:
    kind: str
    message: str
    line: int | None = None
    column: int | None = None

    def __str__(self):
        where = f"line {self.line}, column {self.column}: " if self.line is not None else ""
        return f"{where}{self.kind}: {self.message}"


class TypeCheckError(QuantumVerificationError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(issue) for issue in self.issues))

    def kinds(self):
        return [issue.kind for issue in self.issues]
