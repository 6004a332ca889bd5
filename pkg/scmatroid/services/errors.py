from dataclasses import dataclass
from typing import Optional, Sequence


class ScMatroidError(Exception):
    """Base class for every error raised by the toolkit."""


class SpaceMismatchError(ScMatroidError):
    pass


class PoleError(ScMatroidError):
    pass


class SymbolicZeroDivisionError(ScMatroidError):
    pass


@dataclass(frozen=True)
class SourcePosition:
    file: Optional[str]
    field: Optional[str]
    line: int
    column: int

    def __str__(self) -> str:
        where = self.file or "<expr>"
        if self.field:
            where = f"{where}:{self.field}"
        return f"{where}:{self.line}:{self.column}"


class ExprError(ScMatroidError):
    def __init__(self, message: str, position: SourcePosition):
        super().__init__(f"{position}: {message}")
        self.message = message
        self.position = position


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: SourcePosition, expected: Sequence[str] = ()):
        if expected:
            message = f"{message} (expected one of: {', '.join(sorted(expected))})"
        super().__init__(message, position)
        self.expected = frozenset(expected)


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, position: SourcePosition):
        super().__init__(f"unknown identifier {name!r}", position)
        self.name = name


class ZeroDivisorError(ExprError):
    pass


class DimensionError(ScMatroidError):
    pass


class PencilError(ScMatroidError):
    pass


class UnknownLabelError(ScMatroidError):
    pass


class GroundSetMismatchError(ScMatroidError):
    pass


class LimitExceededError(ScMatroidError):
    def __init__(self, message: str, limit_name: str, limit: int):
        super().__init__(message)
        self.limit_name = limit_name
        self.limit = limit


class PartitionError(ScMatroidError):
    pass


class ShapeMismatchError(ScMatroidError):
    pass


class SystemFileError(ScMatroidError):
    def __init__(self, message: str, path: Optional[str] = None, field: Optional[str] = None):
        where = ":".join(p for p in (path, field) if p)
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.field = field
