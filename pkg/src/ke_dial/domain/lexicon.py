"""
实体词表
========

EntityLexicon 把表面字符串映射到属性名（表格 KB）或节点标签（图 KB）。

- 图 KB：条目为节点名，标签固定为 ``node``；默认最短 5 个字符、区分大小写
- 表格 KB：条目为所有取值，标签为第一个出现该值的属性；默认不区分大小写
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from ke_dial.domain.graph import GraphKB
from ke_dial.domain.table import TableKB

NODE_TAG = "node"


@dataclass(frozen=True)
class EntityLexicon:
    entries: Mapping[str, str]
    min_length: int = 0
    case_sensitive: bool = True

    def __post_init__(self) -> None:
        kept = {s: tag for s, tag in self.entries.items() if s and len(s) >= self.min_length}
        object.__setattr__(self, "entries", kept)
        # 归一化键 -> 规范表面串；不区分大小写时同键只保留字典序最小者
        index: dict[str, str] = {}
        for surface in sorted(kept):
            index.setdefault(self.key(surface), surface)
        object.__setattr__(self, "_index", index)

    def key(self, surface: str) -> str:
        return surface if self.case_sensitive else surface.lower()

    def lookup(self, surface: str) -> str | None:
        """Canonical entry for a surface string, or None."""
        return self._index.get(self.key(surface))

    def tag(self, surface: str) -> str | None:
        canonical = self.lookup(surface)
        return None if canonical is None else self.entries[canonical]

    @property
    def lengths(self) -> list[int]:
        return sorted({len(k) for k in self._index}, reverse=True)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    # -------------------------------------------------------------------------
    # 构造
    # -------------------------------------------------------------------------

    @classmethod
    def from_graph(cls, g: GraphKB, min_length: int = 5, case_sensitive: bool = True) -> EntityLexicon:
        return cls({n: NODE_TAG for n in g.nodes}, min_length, case_sensitive)

    @classmethod
    def from_table(cls, kb: TableKB, min_length: int = 1, case_sensitive: bool = False) -> EntityLexicon:
        entries: dict[str, str] = {}
        for row in kb.rows:
            for attribute, value in zip(kb.attributes, row):
                entries.setdefault(value, attribute)
        return cls(entries, min_length, case_sensitive)
