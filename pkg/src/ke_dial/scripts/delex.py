"""
KE-DELEX：从对话中抽取模板
==========================

用法：
    ke-dial delex --dialogues dev.jsonl --kb kb.json --queries queries.json --out templates.json

- 表格 KB：每段对话必须在 queries 文件中有对应的查询；缺失时跳过并告警（--strict 时报错）
- 图 KB：queries 文件可选；没有查询的对话用实体间最短路径自动构造 MATCH 模式
- --strip-api：抽取前去掉 SYS-API / API 轮次，模板里只留 USR / SYS 轮次

stdout 输出计数摘要：templates / skipped_entities / ambiguities / missing_queries。
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from ke_dial.config.settings import AppConfig, RunConfig
from ke_dial.data.io import load_dialogues, load_kb, load_queries, save_templates
from ke_dial.data.quality import DelexQualityReport, validate_dialogues
from ke_dial.domain.dialogue import strip_api_turns
from ke_dial.domain.errors import AmbiguousEntity, KeDialError, NoQuery, ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.gquery.induce import derive_query_from_dialogue
from ke_dial.ke.delex import DelexStats, delex
from ke_dial.ke.template import Template
from ke_dial.scripts.common import lexicon_for

logger = logging.getLogger(__name__)

HELP = "把对话去词汇化为模板"


def add_arguments(ap: argparse.ArgumentParser, common: argparse.ArgumentParser) -> None:
    ap.add_argument("--dialogues", required=True, help="对话 JSONL")
    ap.add_argument("--kb", required=True, help="表格 KB（.json/.csv）或图 KB（.tsv）")
    ap.add_argument("--queries", default=None, help="对话 id -> 查询 的 JSON")
    ap.add_argument("--out", required=True, help="输出模板 JSON")
    ap.add_argument("--strict", action="store_true", help="缺少查询时报错而不是跳过")
    ap.add_argument(
        "--strip-api", action="store_true", help="先去掉 SYS-API / API 轮次（CamRest 风格输入）"
    )


def input_args(args: argparse.Namespace) -> list[str]:
    return ["dialogues", "kb", "queries"]


def run(args: argparse.Namespace, cfg: AppConfig, run_cfg: RunConfig) -> dict:
    dialogues = load_dialogues(args.dialogues)
    if args.strip_api:
        dialogues = [strip_api_turns(d) for d in dialogues]
    kb = load_kb(args.kb)
    queries = load_queries(args.queries) if args.queries else {}
    lexicon = lexicon_for(kb, cfg)
    is_graph = isinstance(kb, GraphKB)

    if not is_graph:
        for issue in validate_dialogues(dialogues, queries):
            logger.warning(issue)

    stats = DelexStats()
    templates: list[Template] = []
    ambiguities = missing = 0

    for d in dialogues:
        q = queries.get(d.id)
        binding = None
        if q is None:
            if not is_graph:
                if args.strict:
                    raise ValidationError(f"no query for dialogue {d.id!r}", path=args.queries)
                logger.warning(f"dialogue {d.id!r}: no query, skipped")
                missing += 1
                continue
            try:
                induced = derive_query_from_dialogue(d, kb, lexicon)
            except NoQuery as e:
                logger.warning(str(e))
                missing += 1
                continue
            q, binding = induced.query.to_text(), induced.binding

        try:
            template, _ = delex(d, q, kb, lexicon, binding=binding, stats=stats)
        except AmbiguousEntity as e:
            logger.warning(f"dialogue {d.id!r}: {e}")
            ambiguities += 1
            continue
        except ValidationError as e:
            raise ValidationError(f"dialogue {d.id!r}: {e}", path=args.queries) from None
        except KeDialError as e:
            logger.warning(f"dialogue {d.id!r}: {e}")
            continue

        if not template.keys:
            logger.warning(f"dialogue {d.id!r}: no entity delexicalized, template dropped")
            continue
        templates.append(template)

    save_templates(templates, Path(args.out))
    report = DelexQualityReport(
        dialogues=len(dialogues),
        templates=len(templates),
        skipped_entities=stats.skipped_entities,
        ambiguities=ambiguities,
        missing_queries=missing,
    )
    logger.info(f"{report.templates} templates from {report.dialogues} dialogues -> {args.out}")
    return report.to_dict()


def main() -> None:
    from ke_dial.cli import run_command

    raise SystemExit(run_command("delex"))


if __name__ == "__main__":
    main()
