"""
KE-RELEX：模板 + 赋值 -> 对话
=============================

assignment 把组号映射到"属性 -> 取值"：

- 表格：组号 -> KB 行（``kb.row_dict(i)``）
- 图：组号 k -> ``{"node": binding["n<k>"]}``，见 ``graph_assignment``

大小写策略：占位符在原对话中的表面串若全小写则取值转小写，若全大写则转大写，
否则原样插入 KB 中的拼写。没有绑定字典时默认转小写。API 轮次不做替换。
"""

from __future__ import annotations

from collections.abc import Mapping

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.errors import IncompleteAssignment
from ke_dial.domain.lexicon import NODE_TAG
from ke_dial.gquery.parser import slot_number
from ke_dial.ke.template import PLACEHOLDER, BindingMap, Template

Assignment = Mapping[int, Mapping[str, str]]


def case_style(surface: str | None) -> str:
    if surface is None:
        return "lower"
    if not any(ch.isalpha() for ch in surface):
        return "verbatim"
    if surface == surface.lower():
        return "lower"
    if surface == surface.upper():
        return "upper"
    return "verbatim"


def apply_case(value: str, style: str) -> str:
    if style == "lower":
        return value.lower()
    if style == "upper":
        return value.upper()
    return value


def graph_assignment(binding: Mapping[str, str]) -> dict[int, dict[str, str]]:
    """SlotBinding -> assignment keyed by slot number."""
    return {slot_number(slot): {NODE_TAG: node} for slot, node in binding.items()}


def binding_assignment(b: BindingMap) -> dict[int, dict[str, str]]:
    """Assignment that puts every original surface back in place."""
    out: dict[int, dict[str, str]] = {}
    for (attr, group), surface in b.entries.items():
        out.setdefault(group, {})[attr] = surface
    return out


def relex(
    t: Template,
    assignment: Assignment,
    b: BindingMap | None = None,
    dialogue_id: str | None = None,
) -> Dialogue:
    """
    用赋值填充模板中的所有占位符

    Raises:
        IncompleteAssignment: 赋值缺少模板用到的组或属性
    """
    b = b if b is not None else t.binding

    def fill(m) -> str:
        attr, group = m.group(1), int(m.group(2))
        values = assignment.get(group)
        if values is None:
            raise IncompleteAssignment(f"template {t.id!r}: no assignment for group {group}")
        if attr not in values:
            raise IncompleteAssignment(f"template {t.id!r}: group {group} lacks attribute {attr!r}")
        return apply_case(values[attr], case_style(b.surface(attr, group)))

    turns = [
        t_ if t_.speaker is Speaker.API else Turn(t_.speaker, PLACEHOLDER.sub(fill, t_.text))
        for t_ in t.turns
    ]
    return Dialogue(t.id if dialogue_id is None else dialogue_id, tuple(turns))
