"""
从对话归纳图查询
================

核心流程：
---------
1. 在所有轮次中做最长匹配，得到按首次提及排序的实体节点
2. 只保留最大的连通实体分量（无向意义下），其余实体记录为 dropped
3. 两两实体对按 (无向最短距离, 提及顺序) 处理：
   - 相邻的实体对直接加入连接它们的边
   - 不相邻且在当前并集中尚不连通的实体对，加入一条最短路径，路径上的中间节点成为额外槽位
4. 边保持图中的真实方向；同一对节点间的多条边取 (方向, 关系) 字典序最小者

槽位编号：实体按首次提及从 n1 开始，中间节点依发现顺序排在其后。
"""

from __future__ import annotations

import itertools
import logging
from typing import NamedTuple

import networkx as nx

from ke_dial.domain.dialogue import Dialogue
from ke_dial.domain.errors import NoQuery
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.gquery.matcher import SlotBinding
from ke_dial.gquery.parser import GraphQuery, PatternEdge
from ke_dial.ke.matcher import match_entities

logger = logging.getLogger(__name__)


class InducedQuery(NamedTuple):
    query: GraphQuery
    binding: SlotBinding
    partial: bool = False
    dropped: tuple[str, ...] = ()


def mentioned_nodes(d: Dialogue, g: GraphKB, lexicon: EntityLexicon) -> list[str]:
    """Graph nodes mentioned in the dialogue, first-mention order; API turns skipped."""
    seen: dict[str, None] = {}
    for turn in d.turns:
        if turn.is_api:
            continue
        for m in match_entities(turn.text, lexicon):
            if m.key in g.nodes:
                seen.setdefault(m.key)
    return list(seen)


def _edge_between(g: GraphKB, u: str, v: str) -> tuple[str, str, str]:
    graph = g.graph
    options = [(0, k, (u, k, v)) for k in graph.get_edge_data(u, v, default={})]
    options += [(1, k, (v, k, u)) for k in graph.get_edge_data(v, u, default={})]
    return min(options)[2]


def derive_query_from_dialogue(
    d: Dialogue, g: GraphKB, lexicon: EntityLexicon, z_guard: bool = True
) -> InducedQuery:
    """
    用实体间最短路径的并集构造 MATCH 模式

    Args:
        d: 对话
        g: 图知识库
        lexicon: 由节点名构造的词表（通常最短 5 字符、区分大小写）
        z_guard: 生成的查询是否带 WHERE Z > 0

    Raises:
        NoQuery: 可用实体少于两个
    """
    entities = mentioned_nodes(d, g, lexicon)
    if len(entities) < 2:
        raise NoQuery(f"dialogue {d.id!r} mentions {len(entities)} graph entities")

    undirected = g.undirected()
    order = {n: i for i, n in enumerate(entities)}

    # 最大连通分量；并列时取包含最早提及实体的分量
    components: list[list[str]] = []
    assigned: set[str] = set()
    for n in entities:
        if n in assigned:
            continue
        reach = nx.node_connected_component(undirected, n)
        members = [m for m in entities if m in reach]
        assigned.update(members)
        components.append(members)
    kept = max(components, key=lambda c: (len(c), -order[c[0]]))
    dropped = tuple(n for n in entities if n not in kept)
    if len(kept) < 2:
        raise NoQuery(f"dialogue {d.id!r}: no two mentioned entities are connected")
    if dropped:
        logger.warning(f"dialogue {d.id!r}: unreachable entities dropped from pattern: {dropped}")

    pairs = []
    for a, b in itertools.combinations(kept, 2):
        pairs.append((nx.shortest_path_length(undirected, a, b), order[a], order[b], a, b))
    pairs.sort()

    union = nx.Graph()
    union.add_nodes_from(kept)
    edges: list[tuple[str, str, str]] = []
    extra: list[str] = []

    def add_step(u: str, v: str) -> None:
        if union.has_edge(u, v):
            return
        union.add_edge(u, v)
        edges.append(_edge_between(g, u, v))

    for dist, _, _, a, b in pairs:
        if dist == 1:
            add_step(a, b)
            continue
        if nx.has_path(union, a, b):
            continue
        path = nx.shortest_path(undirected, a, b)
        for node in path[1:-1]:
            if node not in order and node not in extra:
                extra.append(node)
        for u, v in zip(path, path[1:]):
            union.add_node(v)
            add_step(u, v)

    slot_of = {n: f"n{i}" for i, n in enumerate(kept + extra, start=1)}
    pattern = tuple(PatternEdge(slot_of[h], r, slot_of[t]) for h, r, t in edges)
    slots = tuple(slot_of[n] for n in kept + extra)
    binding = {slot_of[n]: n for n in kept + extra}
    return InducedQuery(GraphQuery(pattern, slots, z_guard), binding, bool(dropped), dropped)
