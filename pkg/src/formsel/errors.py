"""Exception hierarchy.

``DataError`` subclasses signal bad inputs (CLI exit code 2); everything else
deriving from ``FormselError`` is a runtime failure (exit code 3).
"""


class FormselError(Exception):
    pass


class DataError(FormselError, ValueError):
    pass


class PositionOutOfField(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class WrongPlayerCount(ParseError):
    pass


class EmptyInput(DataError):
    pass


class MixedTeams(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class ZeroMass(DataError):
    pass


class InvalidMatrix(DataError):
    pass


class InvalidObservation(DataError):
    pass


class DomainError(DataError):
    pass


class NotUnimodal(DataError):
    pass


class InsufficientDraws(DataError):
    pass


class InfeasibleBin(DataError):
    pass


class SchemaError(DataError):
    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class EmptyDb(DataError):
    pass


class UnknownArm(FormselError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MissingEnvironment(FormselError):
    pass


class SolverError(FormselError):
    pass
