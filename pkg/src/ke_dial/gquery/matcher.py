"""
图模式匹配
==========

按模式中槽位首次出现的顺序回溯搜索，节点按字典序尝试，因此结果顺序确定。
绑定是单射的（不同槽位绑定不同节点）。启用 Z 守卫时，所有被绑定的节点都必须 Z > 0。
"""

from __future__ import annotations

import logging
from collections.abc import Collection, Iterator, Mapping

from ke_dial.domain.graph import GraphKB
from ke_dial.gquery.ledger import ZLedger
from ke_dial.gquery.parser import GraphQuery, parse_graph_query

logger = logging.getLogger(__name__)

SlotBinding = dict[str, str]


def _candidates(
    slot: str, q: GraphQuery, g: GraphKB, binding: SlotBinding
) -> list[str] | None:
    """Nodes compatible with every pattern edge linking ``slot`` to an already-bound slot."""
    graph = g.graph
    pool: set[str] | None = None
    for e in q.pattern:
        if e.src == slot and e.dst in binding:
            found = {u for u, _, k in graph.in_edges(binding[e.dst], keys=True) if k == e.relation}
        elif e.dst == slot and e.src in binding:
            found = {v for _, v, k in graph.out_edges(binding[e.src], keys=True) if k == e.relation}
        else:
            continue
        pool = found if pool is None else pool & found
        if not pool:
            return []
    return None if pool is None else sorted(pool)


def _consistent(slot: str, node: str, q: GraphQuery, g: GraphKB, binding: SlotBinding) -> bool:
    for e in q.pattern:
        if e.src == slot and e.dst == slot:
            if not g.has_edge(node, e.relation, node):
                return False
    return True


def iter_bindings(
    q: GraphQuery,
    g: GraphKB,
    z: ZLedger | None = None,
    domains: Mapping[str, Collection[str]] | None = None,
) -> Iterator[SlotBinding]:
    """Lazily enumerate bindings; ``domains`` optionally restricts the nodes tried per slot."""
    for r in q.relations:
        g.require_relation(r)
    slots = q.slots
    guard = z is not None and q.z_guarded
    all_nodes = sorted(n for n in g.nodes if not guard or z.available(n))
    binding: SlotBinding = {}
    used: set[str] = set()

    def search(depth: int) -> Iterator[SlotBinding]:
        if depth == len(slots):
            yield dict(binding)
            return
        slot = slots[depth]
        pool = _candidates(slot, q, g, binding)
        allowed = None if domains is None else domains.get(slot)
        for node in all_nodes if pool is None else pool:
            if node in used or (guard and not z.available(node)):
                continue
            if allowed is not None and node not in allowed:
                continue
            if not _consistent(slot, node, q, g, binding):
                continue
            binding[slot] = node
            used.add(node)
            yield from search(depth + 1)
            del binding[slot]
            used.discard(node)

    yield from search(0)


def match_pattern(
    q: GraphQuery | str, g: GraphKB, z: ZLedger | None = None, limit: int | None = None
) -> list[SlotBinding]:
    """
    枚举模式在图上的绑定

    Args:
        q: 图查询（AST 或文本）
        g: 图知识库
        z: 可选 Z 账本；仅当查询带 Z 守卫时生效
        limit: 最多返回的绑定数，None 表示不限

    Returns:
        按确定顺序排列的绑定列表（可能为空）
    """
    if isinstance(q, str):
        q = parse_graph_query(q)
    out: list[SlotBinding] = []
    if limit is not None and limit <= 0:
        return out
    for b in iter_bindings(q, g, z):
        out.append(b)
        if limit is not None and len(out) >= limit:
            break
    return out
