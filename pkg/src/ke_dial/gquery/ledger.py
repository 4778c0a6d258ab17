"""
递减因子 Z 账本
===============

每个节点的 Z 初始化为其度数（入度 + 出度），节点每被一次绑定使用就减 1，
降到 0 后不再参与带 Z 守卫的模式匹配。
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from types import MappingProxyType

import pandas as pd

from ke_dial.domain.errors import NotFound
from ke_dial.domain.graph import GraphKB


@dataclass(frozen=True)
class ZLedger:
    z: Mapping[str, int]

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.z.values()):
            raise ValueError("Z values must be non-negative")
        object.__setattr__(self, "z", MappingProxyType(dict(self.z)))

    @classmethod
    def from_graph(cls, g: GraphKB) -> ZLedger:
        return cls({n: g.degree(n) for n in sorted(g.nodes)})

    def __getitem__(self, node: str) -> int:
        return self.z[node]

    def available(self, node: str) -> bool:
        return self.z.get(node, 0) > 0

    @property
    def total(self) -> int:
        return sum(self.z.values())

    @property
    def zero_count(self) -> int:
        return sum(1 for v in self.z.values() if v == 0)

    def histogram(self) -> pd.Series:
        """Number of nodes per Z value, indexed by Z ascending."""
        return pd.Series(list(self.z.values()), dtype="int64").value_counts().sort_index()


def consume_binding(z: ZLedger, binding: Mapping[str, str]) -> ZLedger:
    """
    每个被绑定的不同节点 Z 减 1（下限为 0），返回新账本

    Raises:
        NotFound: 绑定中的节点不在账本里
    """
    updated = dict(z.z)
    for node in set(binding.values()):
        if node not in updated:
            raise NotFound(f"node {node!r} missing from Z ledger")
        updated[node] = max(0, updated[node] - 1)
    return ZLedger(updated)
