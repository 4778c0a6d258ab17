"""
图知识库与邻居查询
==================

核心概念：
---------
1. GraphKB：节点集合、关系标签集合、有向三元组 (head, relation, tail)
2. neighbors(n, r)：沿 r 边正向一步可达的节点
3. neighbors_h(n, R, h)：沿 R 中任意标签的边正向走 1..h 步可达的节点

内部用 networkx.MultiDiGraph 存储，边的 key 即关系标签；节点和边按字典序插入，
因此邻接迭代顺序是确定的。反向关系必须显式物化为独立的标签。

使用示例：
---------
>>> g = GraphKB.from_triples([("a", "r", "b"), ("b", "r", "c")])
>>> sorted(neighbors_h(g, "a", {"r"}, 2))
['b', 'c']
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import networkx as nx

from ke_dial.domain.errors import NotFound, ValidationError

Triple = tuple[str, str, str]


@dataclass(frozen=True)
class GraphKB:
    nodes: frozenset[str]
    relations: frozenset[str]
    edges: frozenset[Triple]
    _graph: nx.MultiDiGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        nodes = frozenset(self.nodes)
        relations = frozenset(self.relations)
        edges = frozenset(tuple(e) for e in self.edges)
        for head, rel, tail in edges:
            if head not in nodes or tail not in nodes:
                raise ValidationError(f"edge ({head}, {rel}, {tail}) uses an unknown node")
            if rel not in relations:
                raise ValidationError(f"edge ({head}, {rel}, {tail}) uses an unknown relation")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "edges", edges)

        graph = nx.MultiDiGraph()
        graph.add_nodes_from(sorted(nodes))
        for head, rel, tail in sorted(edges):
            graph.add_edge(head, tail, key=rel)
        object.__setattr__(self, "_graph", nx.freeze(graph))

    @classmethod
    def from_triples(
        cls,
        triples: Iterable[Triple],
        nodes: Iterable[str] = (),
        relations: Iterable[str] = (),
    ) -> GraphKB:
        edges = {tuple(t) for t in triples}
        all_nodes = set(nodes) | {h for h, _, _ in edges} | {t for _, _, t in edges}
        all_relations = set(relations) | {r for _, r, _ in edges}
        return cls(frozenset(all_nodes), frozenset(all_relations), frozenset(edges))

    @property
    def graph(self) -> nx.MultiDiGraph:
        """Frozen networkx view; edge keys are relation labels."""
        return self._graph

    def require_node(self, n: str) -> None:
        if n not in self.nodes:
            raise NotFound(f"unknown node {n!r}")

    def require_relation(self, r: str) -> None:
        if r not in self.relations:
            raise NotFound(f"unknown relation {r!r}")

    def out_edges(self, n: str) -> list[tuple[str, str]]:
        """Sorted (relation, tail) pairs leaving n."""
        self.require_node(n)
        return sorted((k, v) for _, v, k in self._graph.out_edges(n, keys=True))

    def in_edges(self, n: str) -> list[tuple[str, str]]:
        """Sorted (relation, head) pairs entering n."""
        self.require_node(n)
        return sorted((k, u) for u, _, k in self._graph.in_edges(n, keys=True))

    def degree(self, n: str) -> int:
        """In-degree plus out-degree, parallel edges counted."""
        self.require_node(n)
        return self._graph.in_degree(n) + self._graph.out_degree(n)

    def has_edge(self, head: str, relation: str, tail: str) -> bool:
        return (head, relation, tail) in self.edges

    def undirected(self) -> nx.MultiGraph:
        return self._graph.to_undirected(as_view=True)

    def __len__(self) -> int:
        return len(self.nodes)


# =============================================================================
# 邻居查询
# =============================================================================


def neighbors(graph: GraphKB, n: str, r: str) -> set[str]:
    """N_r(n): tails of every (n, r, m) edge."""
    graph.require_node(n)
    graph.require_relation(r)
    return {v for _, v, k in graph.graph.out_edges(n, keys=True) if k == r}


def neighbors_h(graph: GraphKB, n: str, relations: Iterable[str], h: int) -> set[str]:
    """
    沿关系集合 R 正向 BFS，返回 1..h 步内可达的节点

    n 本身只在经由环回到自身时才包含在结果中。

    Args:
        graph: 图知识库
        n: 起点
        relations: 允许的关系标签集合
        h: 最大跳数（>= 1）
    """
    if h < 1:
        raise ValidationError(f"hop count must be >= 1, got {h}")
    graph.require_node(n)
    allowed = set(relations)
    for r in allowed:
        graph.require_relation(r)

    reached: set[str] = set()
    frontier = {n}
    for _ in range(h):
        nxt: set[str] = set()
        for u in frontier:
            nxt.update(v for _, v, k in graph.graph.out_edges(u, keys=True) if k in allowed)
        nxt -= reached
        if not nxt:
            break
        reached |= nxt
        frontier = nxt
    return reached
