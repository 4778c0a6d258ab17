"""
纯文本 Inform / Success 评分
===========================

- Inform：存在满足约束 C 的 KB 行，其名称属性值出现在系统回复拼接文本中
- Success：已 Inform，且同一行的所有请求属性值都出现在系统回复中
  （多个行都满足 Inform 时，任一行满足即可）

名称属性可配置（默认 name，SMD 使用 poi）。出现判断按词边界、不区分大小写。
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from ke_dial.domain.dialogue import Dialogue
from ke_dial.domain.errors import AlignmentError, EmptyCorpus
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB
from ke_dial.ke.matcher import match_entities
from ke_dial.tquery.executor import execute_table_query
from ke_dial.tquery.parser import Constraint, Op, TableQuery


@dataclass(frozen=True)
class Goal:
    constraints: Mapping[str, str] = field(default_factory=dict)
    requests: tuple[str, ...] = ()


def _mentions(text: str, value: str) -> bool:
    lexicon = EntityLexicon({value: "value"}, case_sensitive=False)
    return bool(match_entities(text, lexicon))


def score_dialogue(
    d: Dialogue, goal: Goal, kb: TableKB, name_attribute: str = "name"
) -> tuple[bool, bool]:
    """Inform and success flags for one dialogue."""
    name_attribute = kb.resolve(name_attribute)
    requests = [kb.resolve(a) for a in goal.requests]
    where = tuple(Constraint(kb.resolve(a), Op.EQ, v) for a, v in goal.constraints.items())
    matching = execute_table_query(TableQuery(kb.attributes, kb.name, where), kb).indices

    text = " ".join(t.text for t in d.system_turns())
    informed = success = False
    for i in matching:
        row = kb.row_dict(i)
        if not _mentions(text, row[name_attribute]):
            continue
        informed = True
        if all(_mentions(text, row[a]) for a in requests):
            success = True
            break
    return informed, success


def inform_success(
    dialogues: Sequence[Dialogue],
    goals: Sequence[Goal],
    kb: TableKB,
    name_attribute: str = "name",
) -> tuple[float, float]:
    """
    对话级 Inform / Success 率

    Raises:
        AlignmentError: 对话数与目标数不一致
        NotFound: 目标引用了未知属性
    """
    if len(dialogues) != len(goals):
        raise AlignmentError(f"{len(dialogues)} dialogues vs {len(goals)} goals")
    if not dialogues:
        raise EmptyCorpus("inform/success over no dialogues")
    flags = [score_dialogue(d, g, kb, name_attribute) for d, g in zip(dialogues, goals)]
    inform = sum(i for i, _ in flags) / len(flags)
    success = sum(s for _, s in flags) / len(flags)
    return inform, success
