"""
评测报告
========

把预测对话与标准对话按 id 对齐，计算请求的指标，并按 domain 字段给出分领域结果。

支持的指标名：
- f1：entity_f1（precision / recall / entity_f1）
- bleu：语料级 BLEU
- inform：inform / success（需要表格 KB 和 goals）
- graph2hop：graph_precision / graph_oov_precision（需要图 KB）
- babi：response_accuracy / dialogue_accuracy

对齐前先去掉 SYS-API / API 轮次，回复只取 SYS 轮次。
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import pandas as pd

from ke_dial.domain.dialogue import Dialogue, Speaker, strip_api_turns
from ke_dial.domain.errors import AlignmentError, ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB
from ke_dial.score.graph import graph_precision_2hop
from ke_dial.score.inform import Goal, inform_success
from ke_dial.score.metrics import babi_accuracy, bleu, entity_f1

logger = logging.getLogger(__name__)

METRICS = ("f1", "bleu", "inform", "graph2hop", "babi")


@dataclass
class ScoreReport:
    """评测结果；未请求的指标为 None"""

    bleu: float | None = None
    entity_f1: float | None = None
    precision: float | None = None
    recall: float | None = None
    inform: float | None = None
    success: float | None = None
    response_accuracy: float | None = None
    dialogue_accuracy: float | None = None
    graph_precision: float | None = None
    graph_oov_precision: float | None = None
    per_domain: dict[str, ScoreReport] = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = {k: v for k, v in asdict(self).items() if k != "per_domain" and v is not None}
        if self.per_domain:
            data["per_domain"] = {d: r.to_dict() for d, r in sorted(self.per_domain.items())}
        return data

    def to_frame(self) -> pd.DataFrame:
        """One row per domain (plus ``all``), one column per computed score."""
        rows = {"all": {k: v for k, v in self.to_dict().items() if k != "per_domain"}}
        rows.update({d: r.to_dict() for d, r in self.per_domain.items()})
        return pd.DataFrame.from_dict(rows, orient="index")


@dataclass
class ScoreInputs:
    """评测所需的可选资源"""

    lexicon: EntityLexicon | None = None
    table: TableKB | None = None
    graph: GraphKB | None = None
    goals: dict[str, Goal] | None = None
    train_entities: set[str] = field(default_factory=set)
    name_attribute: str = "name"


def align(pred: Sequence[Dialogue], gold: Sequence[Dialogue]) -> list[tuple[Dialogue, Dialogue]]:
    """Pair predicted and gold dialogues by id, in gold order."""
    by_id = {d.id: d for d in pred}
    missing = [d.id for d in gold if d.id not in by_id]
    if missing or len(pred) != len(gold):
        raise AlignmentError(
            f"{len(pred)} predicted vs {len(gold)} gold dialogues; missing ids {missing[:5]}"
        )
    pairs = []
    for g in gold:
        p = by_id[g.id]
        if len(p.system_turns()) != len(g.system_turns()):
            raise AlignmentError(
                f"dialogue {g.id!r}: {len(p.system_turns())} predicted vs "
                f"{len(g.system_turns())} gold responses"
            )
        pairs.append((p, g))
    return pairs


def _user_before_each_response(d: Dialogue) -> list[str]:
    out, last_user = [], ""
    for t in d.turns:
        if t.speaker is Speaker.USR:
            last_user = t.text
        elif t.speaker is Speaker.SYS:
            out.append(last_user)
    return out


def _score_pairs(
    pairs: list[tuple[Dialogue, Dialogue]], metrics: Sequence[str], inputs: ScoreInputs
) -> ScoreReport:
    pred = [t.text for p, _ in pairs for t in p.system_turns()]
    gold = [t.text for _, g in pairs for t in g.system_turns()]
    report = ScoreReport()

    for metric in metrics:
        if metric == "f1":
            if inputs.lexicon is None:
                raise ValidationError("metric 'f1' needs a KB to build the entity lexicon")
            report.precision, report.recall, report.entity_f1 = entity_f1(pred, gold, inputs.lexicon)
        elif metric == "bleu":
            report.bleu = bleu(pred, gold)
        elif metric == "inform":
            if inputs.table is None or inputs.goals is None:
                raise ValidationError("metric 'inform' needs a table KB and a goals file")
            missing = [g.id for _, g in pairs if g.id not in inputs.goals]
            if missing:
                raise AlignmentError(f"no goal for dialogues {missing[:5]}")
            report.inform, report.success = inform_success(
                [p for p, _ in pairs],
                [inputs.goals[g.id] for _, g in pairs],
                inputs.table,
                inputs.name_attribute,
            )
        elif metric == "graph2hop":
            if inputs.graph is None or inputs.lexicon is None:
                raise ValidationError("metric 'graph2hop' needs a graph KB")
            users = [u for _, g in pairs for u in _user_before_each_response(g)]
            report.graph_precision, report.graph_oov_precision = graph_precision_2hop(
                pred, users, inputs.graph, inputs.lexicon, inputs.train_entities
            )
        elif metric == "babi":
            boundaries = [len(g.system_turns()) for _, g in pairs]
            report.response_accuracy, report.dialogue_accuracy = babi_accuracy(pred, gold, boundaries)
        else:
            raise ValidationError(f"unknown metric {metric!r}; choose from {list(METRICS)}")
    return report


def score_corpus(
    pred: Sequence[Dialogue],
    gold: Sequence[Dialogue],
    metrics: Sequence[str],
    inputs: ScoreInputs | None = None,
) -> ScoreReport:
    """
    计算评测报告

    Args:
        pred: 预测对话（SYS 轮次为模型回复）
        gold: 标准对话
        metrics: 指标名列表
        inputs: KB、词表、goals 等可选资源

    Returns:
        ScoreReport，带 domain 字段时附分领域结果
    """
    inputs = inputs if inputs is not None else ScoreInputs()
    pairs = align([strip_api_turns(d) for d in pred], [strip_api_turns(d) for d in gold])
    report = _score_pairs(pairs, metrics, inputs)
    if report.bleu is not None:
        logger.info(f"BLEU x100 = {report.bleu * 100:.2f}")

    frame = pd.DataFrame({"domain": [g.domain for _, g in pairs]})
    if frame["domain"].notna().any():
        for domain, group in frame.dropna().groupby("domain", sort=True):
            subset = [pairs[i] for i in group.index]
            report.per_domain[str(domain)] = _score_pairs(subset, metrics, inputs)
    return report
