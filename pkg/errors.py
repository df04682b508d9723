from typing import List, Optional


class EngineError(Exception):
    """Base class for every error raised by the reasoning engine"""


class PositionedError(EngineError):
    """Error tied to a location in a theory source"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class TheorySyntaxError(PositionedError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 expected: Optional[List[str]] = None):
        self.expected = sorted(expected or [])
        if self.expected:
            message = f"{message} (expected one of: {', '.join(self.expected)})"
        super().__init__(message, line, column)


class ArityError(PositionedError):
    pass


class UndeclaredRelationError(PositionedError):
    pass


class DuplicateRelationError(PositionedError):
    pass


class FragmentError(EngineError):
    """Input lies outside the fragment an operation requires"""


class NormalizationLimitError(EngineError):
    pass


class UnboundVariableError(EngineError):
    pass


class DiagramError(EngineError):
    pass


class InvalidHomomorphismError(DiagramError):
    pass


class ChaseError(EngineError):
    pass


class WitnessError(ChaseError):
    pass


class LiftError(ChaseError):
    pass


class BoundExceededError(EngineError):
    pass


class UnknownRelationError(EngineError):
    pass


class StructureError(EngineError):
    pass
