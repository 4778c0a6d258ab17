"""
异常层级
========

所有模块抛出的业务异常都继承自 ``KeDialError``。

- ``ValidationError`` 及其子类表示输入/校验问题，CLI 以退出码 2 结束
- 其它异常视为内部错误，CLI 以退出码 1 结束
"""

from __future__ import annotations


class KeDialError(Exception):
    """Base class of every ke-dial error."""


class ValidationError(KeDialError):
    """Input file, record or argument failed validation."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class NotFound(ValidationError):
    """Unknown node, relation, attribute or seed."""


class QuerySyntaxError(ValidationError):
    """Query text could not be parsed. ``offset`` is a UTF-8 byte offset."""

    def __init__(self, message: str, offset: int = 0):
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")


class QueryTypeError(ValidationError):
    """A numeric comparison met a non-numeric value, or units differ."""


class AggregateError(ValidationError):
    """Aggregate over an empty list or over mixed units."""


class EmptyCorpus(ValidationError):
    """An operation that needs at least one dialogue/response got none."""


class AlignmentError(ValidationError):
    """Predicted and gold sequences do not line up."""


class AmbiguousEntity(KeDialError):
    """A surface string resolves to several attributes and no row disambiguates it."""

    def __init__(self, surface: str, candidates: list[str]):
        self.surface = surface
        self.candidates = sorted(candidates)
        super().__init__(f"ambiguous entity {surface!r}: candidates {self.candidates}")


class IncompleteAssignment(KeDialError):
    """Relex assignment misses a group or an attribute used by the template."""


class NoQuery(KeDialError):
    """Fewer than two graph entities matched; no pattern can be induced."""
