"""Exception hierarchy shared by every reportcert module."""

from __future__ import annotations


class ReportCertError(Exception):
    """Base class for all library errors."""


class EmptySentence(ReportCertError, ValueError):
    pass


class ParseError(ReportCertError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionMismatch(ParseError):
    pass


class NoEmbeddableTokens(ReportCertError, ValueError):
    pass


class MissingSentenceVector(ReportCertError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing sentence vector"


class ZeroNormVector(ReportCertError, ValueError):
    pass


class InfeasibleInstance(ReportCertError, ValueError):
    pass


class EmptyMass(ReportCertError, ValueError):
    pass


class DegenerateSamples(ReportCertError, ValueError):
    pass


class StackFormatError(ReportCertError, ValueError):
    """Malformed reconstruction stack file."""


class BadMagic(StackFormatError):
    pass


class ShapeMismatch(StackFormatError):
    pass


class LengthMismatch(ReportCertError, ValueError):
    pass


class EmptyCorpus(ReportCertError, ValueError):
    pass


class DegenerateSeries(ReportCertError, ValueError):
    def __init__(self, message: str, column: str | None = None):
        self.column = column
        super().__init__(message)
