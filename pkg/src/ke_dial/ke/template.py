"""
模板与绑定字典
==============

占位符语法：``[<attr>_<group>]``

- 表格 KB：attr 为属性名，group 为实例编号（同一行的所有提及共享编号）
- 图 KB：attr 固定为 ``node``，group 为槽位编号（``[node_3]`` 对应槽位 n3）

BindingMap 记录 (attr, group) -> 原始表面串，用于回填时恢复大小写风格。
"""

from __future__ import annotations

import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

from ke_dial.domain.dialogue import Turn
from ke_dial.domain.errors import ValidationError

PLACEHOLDER = re.compile(r"\[([A-Za-z_]+)_([0-9]+)\]")
_KEY = re.compile(r"([A-Za-z_]+)_([0-9]+)")

PlaceholderKey = tuple[str, int]


def placeholder(attr: str, group: int) -> str:
    return f"[{attr}_{group}]"


def placeholders(text: str) -> list[PlaceholderKey]:
    return [(m.group(1), int(m.group(2))) for m in PLACEHOLDER.finditer(text)]


def parse_key(key: str) -> PlaceholderKey:
    m = _KEY.fullmatch(key)
    if m is None:
        raise ValidationError(f"malformed binding key {key!r}")
    return m.group(1), int(m.group(2))


@dataclass
class BindingMap:
    """(attr, group) -> surface dictionary."""

    entries: dict[PlaceholderKey, str] = field(default_factory=dict)

    def add(self, attr: str, group: int, surface: str) -> None:
        self.entries.setdefault((attr, group), surface)

    def surface(self, attr: str, group: int) -> str | None:
        return self.entries.get((attr, group))

    def __contains__(self, key: object) -> bool:
        return key in self.entries

    def __iter__(self) -> Iterator[PlaceholderKey]:
        return iter(sorted(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict[str, str]:
        return {f"{a}_{g}": s for (a, g), s in sorted(self.entries.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> BindingMap:
        return cls({parse_key(k): v for k, v in data.items()})


@dataclass(frozen=True)
class Template:
    id: str
    turns: tuple[Turn, ...]
    query: str
    binding: BindingMap = field(default_factory=BindingMap, compare=False)

    @property
    def keys(self) -> list[PlaceholderKey]:
        """Placeholder keys in order of first appearance."""
        seen: dict[PlaceholderKey, None] = {}
        for turn in self.turns:
            for key in placeholders(turn.text):
                seen.setdefault(key)
        return list(seen)

    @property
    def groups(self) -> set[int]:
        return {g for _, g in self.keys}

    def attributes_of(self, group: int) -> list[str]:
        return [a for a, g in self.keys if g == group]
