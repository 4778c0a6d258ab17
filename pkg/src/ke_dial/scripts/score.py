"""
评测生成的回复
==============

用法：
    ke-dial score --pred pred.jsonl --gold gold.jsonl --kb kb.json --goals goals.json \\
        --metrics f1,bleu,inform,babi

预测与标准对话按 id 对齐；SYS 轮次即回复。输出 ScoreReport JSON。
"""

from __future__ import annotations

import argparse
import logging

from ke_dial.config.settings import AppConfig, RunConfig
from ke_dial.data.io import load_dialogues, load_goals, load_kb
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB
from ke_dial.ke.matcher import match_entities
from ke_dial.score.report import ScoreInputs, score_corpus
from ke_dial.scripts.common import lexicon_for, split_list

logger = logging.getLogger(__name__)

HELP = "计算 F1 / BLEU / Inform / Success / 2-hop 精度 / bAbI 准确率"


def add_arguments(ap: argparse.ArgumentParser, common: argparse.ArgumentParser) -> None:
    ap.add_argument("--pred", required=True, help="预测对话 JSONL")
    ap.add_argument("--gold", required=True, help="标准对话 JSONL")
    ap.add_argument("--kb", default=None, help="表格 KB 或图 KB（f1/inform/graph2hop 需要）")
    ap.add_argument("--goals", default=None, help="对话 id -> 目标 的 JSON（inform 需要）")
    ap.add_argument("--train", default=None, help="训练语料 JSONL（graph2hop 的 OOV 判断）")
    ap.add_argument("--metrics", default=None, help="逗号分隔的指标名（默认取配置）")
    ap.add_argument("--name-attribute", default=None, help="Inform 使用的名称属性")


def input_args(args: argparse.Namespace) -> list[str]:
    return ["pred", "gold", "kb", "goals", "train"]


def _train_entities(path: str | None, lexicon: EntityLexicon | None) -> set[str]:
    if path is None or lexicon is None:
        return set()
    entities = set()
    for d in load_dialogues(path):
        for t in d.turns:
            entities.update(m.key for m in match_entities(t.text, lexicon))
    return entities


def run(args: argparse.Namespace, cfg: AppConfig, run_cfg: RunConfig) -> dict:
    metrics = split_list(args.metrics) or list(cfg.score.metrics)
    pred = load_dialogues(args.pred)
    gold = load_dialogues(args.gold)

    kb = load_kb(args.kb) if args.kb else None
    lexicon = lexicon_for(kb, cfg) if kb is not None else None
    inputs = ScoreInputs(
        lexicon=lexicon,
        table=kb if isinstance(kb, TableKB) else None,
        graph=kb if isinstance(kb, GraphKB) else None,
        goals=load_goals(args.goals) if args.goals else None,
        train_entities=_train_entities(args.train, lexicon),
        name_attribute=args.name_attribute or cfg.score.name_attribute,
    )
    report = score_corpus(pred, gold, metrics, inputs)
    return report.to_dict()


def main() -> None:
    from ke_dial.cli import run_command

    raise SystemExit(run_command("score"))


if __name__ == "__main__":
    main()
