"""
前缀树生成器的训练与评测
========================

用法：
    ke-dial memlm train --corpus base.jsonl ke.jsonl --out model.bin
    ke-dial memlm eval --model model.bin --test oov_test.jsonl [--kb kb.json]
"""

from __future__ import annotations

import argparse
import logging

from ke_dial.config.settings import AppConfig, RunConfig
from ke_dial.data.io import load_dialogues, load_kb
from ke_dial.memlm.store import load_model, save_model
from ke_dial.memlm.trie import evaluate, train
from ke_dial.scripts.common import lexicon_for

logger = logging.getLogger(__name__)

HELP = "训练 / 评测前缀树生成器"
NESTED = True


def add_arguments(ap: argparse.ArgumentParser, common: argparse.ArgumentParser) -> None:
    sub = ap.add_subparsers(dest="action", required=True)

    p = sub.add_parser("train", parents=[common], help="由对话语料构建前缀树")
    p.add_argument("--corpus", nargs="+", required=True, help="一个或多个对话 JSONL")
    p.add_argument("--out", required=True, help="输出模型文件")
    p.add_argument("--window", type=int, default=None, help="历史窗口（token）")
    p.add_argument("--max-length", type=int, default=None, help="生成长度上限")

    p = sub.add_parser("eval", parents=[common], help="在测试对话上计算准确率")
    p.add_argument("--model", required=True, help="模型文件")
    p.add_argument("--test", nargs="+", required=True, help="一个或多个测试对话 JSONL")
    p.add_argument("--kb", default=None, help="可选 KB，用于统计含实体回复的准确率")


def input_args(args: argparse.Namespace) -> list[str]:
    if args.action == "train":
        return ["corpus"]
    return ["model", "test", "kb"]


def run(args: argparse.Namespace, cfg: AppConfig, run_cfg: RunConfig) -> dict:
    if args.action == "train":
        dialogues = [d for path in args.corpus for d in load_dialogues(path)]
        m = train(
            dialogues,
            window=args.window or cfg.memlm.window,
            max_length=args.max_length or cfg.memlm.max_length,
        )
        save_model(m, args.out)
        return {
            "dialogues": len(dialogues),
            "nodes": len(m),
            "responses": len(m.responses),
            "window": m.window,
        }

    m = load_model(args.model)
    dialogues = [d for path in args.test for d in load_dialogues(path)]
    lexicon = lexicon_for(load_kb(args.kb), cfg) if args.kb else None
    result = evaluate(m, dialogues, lexicon)
    report = {
        "dialogue_acc": result.dialogue_acc,
        "response_acc": result.response_acc,
        "responses": result.n_responses,
    }
    if result.entity_acc is not None:
        report["entity_acc"] = result.entity_acc
    return report


def main() -> None:
    from ke_dial.cli import run_command

    raise SystemExit(run_command("memlm"))


if __name__ == "__main__":
    main()
