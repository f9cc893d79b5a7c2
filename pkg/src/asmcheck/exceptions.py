

# AsmSyntaxError, TranslationError, EvaluationError, AssertionViolation, BoundExhausted, BirSyntaxError

class AsmCheckError(Exception):
    """Base error; carries an optional source position."""

    def __init__(self, message: str, line: int = None, column: int = None, filename: str = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.filename = filename

    def with_filename(self, filename: str) -> "AsmCheckError":
        if self.filename is None:
            self.filename = filename
        return self

    def __str__(self) -> str:
        if self.line is None:
            prefix = f"{self.filename}: " if self.filename else ""
            return f"{prefix}{self.message}"
        return f"{self.filename or '<input>'}:{self.line}:{self.column}: {self.message}"


class AsmSyntaxError(AsmCheckError):
    pass

class TranslationError(AsmCheckError):
    pass

class BirSyntaxError(AsmCheckError):
    pass

class EvaluationError(AsmCheckError):
    pass

class AssertionViolation(EvaluationError):
    pass

class BoundExhausted(AsmCheckError):
    pass
