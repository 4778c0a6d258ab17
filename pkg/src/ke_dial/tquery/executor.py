"""
表格查询执行器
==============

执行语义：
---------
1. 按 WHERE 约束（合取）过滤行
2. 有 GROUP BY 时按该属性分组（不区分大小写）；无 GROUP BY 但有 HAVING 时整体视为一组
3. HAVING a = AGG(a)：每组保留取值等于聚合结果的行（并列全部保留）
4. 投影到有效选择列表 R，保持 KB 行顺序，重复行保留

字符串相等比较先做空白归一化再忽略大小写；<、> 类比较按"数字 + 单位"解析，单位必须一致。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from ke_dial.domain.errors import QueryTypeError, ValidationError
from ke_dial.domain.table import TableKB
from ke_dial.tquery.aggregate import aggregate, parse_quantity
from ke_dial.tquery.parser import Constraint, Having, Op, TableQuery, parse_table_query

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResultSet:
    """Rows projected to ``attributes``; ``indices`` are the source KB row numbers."""

    attributes: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.rows)


def fold(value: str) -> str:
    return " ".join(value.split()).lower()


def validate(q: TableQuery, kb: TableKB) -> TableQuery:
    """
    校验查询并把属性名规范化为 KB 中的拼写

    Raises:
        ValidationError: 表名不匹配
        NotFound: 未知属性
    """
    if q.table.lower() != kb.name.lower():
        raise ValidationError(f"query targets table {q.table!r}, KB is {kb.name!r}")
    select = kb.attributes if q.select_all else tuple(kb.resolve(a) for a in q.select)
    if not select:
        raise ValidationError("empty select list")
    where = tuple(replace(c, attribute=kb.resolve(c.attribute)) for c in q.where)
    group_by = kb.resolve(q.group_by) if q.group_by is not None else None
    having = (
        Having(kb.resolve(q.having.attribute), q.having.aggregate, q.having.comparator)
        if q.having is not None
        else None
    )
    return TableQuery(select, kb.name, where, group_by, having)


def _compare(value: str, c: Constraint) -> bool:
    if c.op is Op.EQ:
        return fold(value) == fold(c.value)
    if c.op is Op.NEQ:
        return fold(value) != fold(c.value)

    left, left_unit = parse_quantity(value)
    right, right_unit = parse_quantity(c.value)
    if left_unit != right_unit:
        raise QueryTypeError(
            f"cannot compare {value!r} with {c.value!r}: units {left_unit!r} vs {right_unit!r}"
        )
    if c.op is Op.LT:
        return left < right
    if c.op is Op.GT:
        return left > right
    if c.op is Op.LEQ:
        return left <= right
    return left >= right


def _having_keep(kb: TableKB, indices: list[int], having: Having) -> list[int]:
    col = kb.index(having.attribute)
    values = [kb.rows[i][col] for i in indices]
    target, _ = parse_quantity(aggregate(values, having.aggregate))
    return [i for i, v in zip(indices, values) if parse_quantity(v)[0] == target]


def execute_table_query(q: TableQuery | str, kb: TableKB) -> ResultSet:
    """
    在表格 KB 上执行查询

    Args:
        q: 查询 AST 或查询文本
        kb: 目标表格

    Returns:
        ResultSet: 投影后的结果（KB 行顺序）
    """
    if isinstance(q, str):
        q = parse_table_query(q)
    q = validate(q, kb)

    checks = [(kb.index(c.attribute), c) for c in q.where]
    selected = [
        i for i, row in enumerate(kb.rows) if all(_compare(row[col], c) for col, c in checks)
    ]

    if q.having is not None and selected:
        groups: dict[str, list[int]] = {}
        if q.group_by is not None:
            gcol = kb.index(q.group_by)
            for i in selected:
                groups.setdefault(fold(kb.rows[i][gcol]), []).append(i)
        else:
            groups[""] = selected
        kept: list[int] = []
        for members in groups.values():
            kept.extend(_having_keep(kb, members, q.having))
        selected = sorted(kept)

    attributes = q.effective_select
    cols = [kb.index(a) for a in attributes]
    rows = tuple(tuple(kb.rows[i][c] for c in cols) for i in selected)
    if not rows:
        logger.debug(f"query returned no rows: {q.to_text()}")
    return ResultSet(attributes, rows, tuple(selected))
