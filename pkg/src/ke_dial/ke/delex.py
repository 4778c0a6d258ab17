"""
KE-DELEX：对话 -> 模板 + 绑定字典
=================================

表格 KB：
---------
1. 在每个非 API 轮次中做最长匹配（允许词内结尾，例如 "moderately" 中的 "moderate"）
2. 只处理查询有效选择列表 R 中的属性；取值不属于任何相关属性的实体跳过并告警
3. 一个取值对应多个属性时，用满足查询的行消歧；仍不唯一则抛出 AmbiguousEntity
4. 把提及聚类成 KB 实例：从最后一次提及倒序处理，提及优先并入同值的已有实例，
   否则并入最早创建且行集合相容的实例，否则新建实例。这样查询约束的取值绑定到最后一次
   提及，早先提及的其它取值（如用户改口前的菜系）各自成组
5. 实例按首次提及顺序从 0 编号，提及原地替换为 ``[attr_g]``

图 KB：
------
每个被绑定节点的提及替换为 ``[node_k]``，k 为其槽位编号。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.errors import AmbiguousEntity, ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import NODE_TAG, EntityLexicon
from ke_dial.domain.table import TableKB
from ke_dial.gquery.induce import mentioned_nodes
from ke_dial.gquery.matcher import SlotBinding, iter_bindings
from ke_dial.gquery.parser import GraphQuery, parse_graph_query, slot_number
from ke_dial.ke.matcher import EntityMatch, match_entities
from ke_dial.ke.template import PLACEHOLDER, BindingMap, Template, placeholder
from ke_dial.tquery.executor import execute_table_query, fold, validate
from ke_dial.tquery.parser import parse_table_query

logger = logging.getLogger(__name__)

_BINDING_SEARCH_LIMIT = 10_000


@dataclass
class DelexStats:
    """Counters collected across delex calls."""

    skipped_entities: int = 0
    delexed_entities: int = 0
    skipped_surfaces: list[str] = field(default_factory=list)


@dataclass
class _Mention:
    turn: int
    match: EntityMatch
    attr: str
    rows: frozenset[int]
    instance: int = -1


def _substitute(text: str, spans: list[tuple[int, int, str]]) -> str:
    for start, end, token in sorted(spans, reverse=True):
        text = text[:start] + token + text[end:]
    return text


def _blocked(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in PLACEHOLDER.finditer(text)]


# =============================================================================
# 表格 KB
# =============================================================================


def _value_index(kb: TableKB, attributes: tuple[str, ...]) -> dict[str, dict[str, frozenset[int]]]:
    index: dict[str, dict[str, set[int]]] = {a: {} for a in attributes}
    for a in attributes:
        col = kb.index(a)
        for i, row in enumerate(kb.rows):
            index[a].setdefault(fold(row[col]), set()).add(i)
    return {a: {v: frozenset(rows) for v, rows in vals.items()} for a, vals in index.items()}


def _resolve_attribute(
    surface: str,
    relevant: tuple[str, ...],
    index: dict[str, dict[str, frozenset[int]]],
    satisfying: set[int],
) -> str | None:
    key = fold(surface)
    candidates = [a for a in relevant if key in index[a]]
    if len(candidates) <= 1:
        return candidates[0] if candidates else None
    narrowed = [a for a in candidates if index[a][key] & satisfying]
    if len(narrowed) == 1:
        return narrowed[0]
    raise AmbiguousEntity(surface, candidates)


def _distance(a: _Mention, b: _Mention) -> tuple[int, int]:
    if a.turn != b.turn:
        return abs(a.turn - b.turn), 0
    return 0, max(0, b.match.start - a.match.end, a.match.start - b.match.end)


def _cluster(mentions: list[_Mention]) -> int:
    """
    Assign instance ids to mentions (reverse order); returns the instance count.

    A repeated attribute value joins the instance that last mentioned it. Otherwise the mention
    joins the nearest compatible instance, unless an earlier mention that cannot share that
    instance sits closer; then it opens a new instance for the earlier mention to join.
    """
    rows: list[set[int]] = []
    values: list[dict[str, str]] = []
    members: list[list[_Mention]] = []

    def compatible(i: int, m: _Mention) -> bool:
        seen = values[i].get(m.attr)
        return (seen is None or seen == fold(m.match.surface)) and bool(rows[i] & m.rows)

    for k in range(len(mentions) - 1, -1, -1):
        m = mentions[k]
        value = fold(m.match.surface)
        chosen = None
        for i in range(len(rows)):
            if values[i].get(m.attr) == value:
                chosen = i
                break
        if chosen is None:
            candidates = [
                i for i in range(len(rows)) if m.attr not in values[i] and rows[i] & m.rows
            ]
            if candidates:
                best = min(
                    candidates,
                    key=lambda i: (min(_distance(m, o) for o in members[i]), i),
                )
                reach = min(_distance(m, o) for o in members[best])
                rival = any(
                    e.attr != m.attr
                    and e.rows & m.rows
                    and _distance(m, e) < reach
                    and not compatible(best, e)
                    for e in mentions[:k]
                )
                if not rival:
                    chosen = best
        if chosen is None:
            rows.append(set(m.rows))
            values.append({})
            members.append([])
            chosen = len(rows) - 1
        else:
            rows[chosen] &= m.rows
        values[chosen][m.attr] = value
        members[chosen].append(m)
        m.instance = chosen
    return len(rows)


def _delex_table(
    d: Dialogue, q_text: str, kb: TableKB, lexicon: EntityLexicon, stats: DelexStats
) -> tuple[Template, BindingMap]:
    q = validate(parse_table_query(q_text), kb)
    relevant = q.effective_select
    satisfying = set(execute_table_query(q, kb).indices)
    index = _value_index(kb, relevant)

    mentions: list[_Mention] = []
    for ti, turn in enumerate(d.turns):
        if turn.speaker is Speaker.API:
            continue
        for m in match_entities(turn.text, lexicon, allow_suffix=True, blocked=_blocked(turn.text)):
            attr = _resolve_attribute(m.surface, relevant, index, satisfying)
            if attr is None:
                stats.skipped_entities += 1
                stats.skipped_surfaces.append(m.surface)
                logger.warning(f"dialogue {d.id!r}: {m.surface!r} matches no queried attribute")
                continue
            mentions.append(_Mention(ti, m, attr, index[attr][fold(m.surface)]))

    _cluster(mentions)
    first_seen: dict[int, int] = {}
    for m in mentions:
        first_seen.setdefault(m.instance, len(first_seen))

    binding = BindingMap()
    spans: dict[int, list[tuple[int, int, str]]] = {}
    for m in mentions:
        group = first_seen[m.instance]
        binding.add(m.attr, group, m.match.surface)
        spans.setdefault(m.turn, []).append((m.match.start, m.match.end, placeholder(m.attr, group)))
    stats.delexed_entities += len(mentions)

    turns = tuple(
        Turn(t.speaker, _substitute(t.text, spans[i])) if i in spans else t
        for i, t in enumerate(d.turns)
    )
    return Template(d.id, turns, q_text, binding), binding


# =============================================================================
# 图 KB
# =============================================================================


def infer_binding(d: Dialogue, q: GraphQuery, g: GraphKB, lexicon: EntityLexicon) -> SlotBinding:
    """
    为图查询找一个与对话提及最一致的绑定

    先把每个槽位限制在对话提及的节点中搜索；找不到时在前若干个绑定里取与提及重合最多的。
    """
    mentioned = set(mentioned_nodes(d, g, lexicon))
    strict = {slot: mentioned for slot in q.slots}
    for b in iter_bindings(q, g, domains=strict):
        return b

    best: SlotBinding | None = None
    best_overlap = -1
    for i, b in enumerate(iter_bindings(q, g)):
        if i >= _BINDING_SEARCH_LIMIT:
            break
        overlap = len(set(b.values()) & mentioned)
        if overlap > best_overlap:
            best, best_overlap = b, overlap
    if best is None:
        raise ValidationError(f"dialogue {d.id!r}: query {q.to_text()!r} has no binding in the graph")
    return best


def _delex_graph(
    d: Dialogue,
    q_text: str,
    g: GraphKB,
    lexicon: EntityLexicon,
    binding: SlotBinding | None,
    stats: DelexStats,
) -> tuple[Template, BindingMap]:
    q = parse_graph_query(q_text)
    if binding is None:
        binding = infer_binding(d, q, g, lexicon)
    slot_of = {node: slot_number(slot) for slot, node in binding.items() if slot in q.slots}

    result = BindingMap()
    turns = []
    for turn in d.turns:
        if turn.speaker is Speaker.API:
            turns.append(turn)
            continue
        spans = []
        for m in match_entities(turn.text, lexicon, blocked=_blocked(turn.text)):
            if m.key not in slot_of:
                stats.skipped_entities += 1
                stats.skipped_surfaces.append(m.surface)
                logger.debug(f"dialogue {d.id!r}: {m.surface!r} not bound by the query")
                continue
            k = slot_of[m.key]
            result.add(NODE_TAG, k, m.surface)
            spans.append((m.start, m.end, placeholder(NODE_TAG, k)))
            stats.delexed_entities += 1
        turns.append(Turn(turn.speaker, _substitute(turn.text, spans)) if spans else turn)
    return Template(d.id, tuple(turns), q_text, result), result


def delex(
    d: Dialogue,
    q: str,
    kb: TableKB | GraphKB,
    lexicon: EntityLexicon,
    binding: SlotBinding | None = None,
    stats: DelexStats | None = None,
) -> tuple[Template, BindingMap]:
    """
    把对话中与查询相关的实体替换为占位符

    Args:
        d: 源对话
        q: 查询文本（表格为 SQL 子集，图为 CYPHER 子集）
        kb: 表格或图知识库
        lexicon: 实体词表
        binding: 图查询的已知绑定（例如来自 derive_query_from_dialogue）
        stats: 可选计数器

    Returns:
        (Template, BindingMap)

    Raises:
        AmbiguousEntity: 表格取值对应多个属性且无法用查询结果消歧
    """
    stats = stats if stats is not None else DelexStats()
    if isinstance(kb, TableKB):
        return _delex_table(d, q, kb, lexicon, stats)
    return _delex_graph(d, q, kb, lexicon, binding, stats)
