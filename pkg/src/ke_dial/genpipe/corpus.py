"""
生成语料
========

GeneratedCorpus 保存生成的对话及每段对话的来源：
(模板 id, 结果序号, 组赋值)。表格模式的组赋值为 组号 -> KB 行号，
图模式为 组号 -> 节点名。
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import pandas as pd

from ke_dial.domain.dialogue import Dialogue
from ke_dial.domain.errors import ValidationError


@dataclass(frozen=True)
class Provenance:
    template: str
    result_index: int
    assignment: Mapping[str, int | str]

    def to_json(self) -> dict:
        return {
            "assignment": dict(sorted(self.assignment.items())),
            "result_index": self.result_index,
            "template": self.template,
        }


@dataclass
class GeneratedCorpus:
    dialogues: list[Dialogue] = field(default_factory=list)
    provenance: list[Provenance] = field(default_factory=list)
    # 单样本生成失败时记录原因（TABLE_PER_KB）
    error: str | None = None

    def __post_init__(self) -> None:
        if len(self.dialogues) != len(self.provenance):
            raise ValidationError("every generated dialogue needs a provenance record")
        ids = [d.id for d in self.dialogues]
        if len(set(ids)) != len(ids):
            raise ValidationError("generated dialogue ids are not unique")

    def append(self, dialogue: Dialogue, provenance: Provenance) -> None:
        self.dialogues.append(dialogue)
        self.provenance.append(provenance)

    def extend(self, other: GeneratedCorpus) -> None:
        for d, p in zip(other.dialogues, other.provenance):
            self.append(d, p)
        ids = [d.id for d in self.dialogues]
        if len(set(ids)) != len(ids):
            raise ValidationError("generated dialogue ids are not unique")

    def __len__(self) -> int:
        return len(self.dialogues)


def corpus_stats(corpus: GeneratedCorpus) -> dict:
    """
    语料统计：对话数、轮次数、系统回复数，以及每个模板生成的对话数
    """
    if not corpus.dialogues:
        return {"dialogues": 0, "turns": 0, "system_turns": 0, "per_template": {}}
    frame = pd.DataFrame(
        {
            "template": [p.template for p in corpus.provenance],
            "turns": [len(d.turns) for d in corpus.dialogues],
            "system_turns": [len(d.system_turns()) for d in corpus.dialogues],
        }
    )
    per_template = frame.groupby("template", sort=True).size()
    return {
        "dialogues": int(len(frame)),
        "turns": int(frame["turns"].sum()),
        "system_turns": int(frame["system_turns"].sum()),
        "per_template": {str(k): int(v) for k, v in per_template.items()},
    }
