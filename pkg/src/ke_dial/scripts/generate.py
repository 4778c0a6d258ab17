"""
KE-RELEX：由模板和 KB 生成 KE 对话
=================================

三种模式（--mode，默认按 KB 文件自动选择）：
- TABLE_BATCH：整张表，每个模板执行查询，每个结果行生成一段对话
- TABLE_PER_KB：KB 文件是 {sample_id: 表} 的 JSON，每个样本单独生成，--out 为目录
- GRAPH_ITERATIVE：图 KB，迭代采样模板，同时输出 Z 账本历史 CSV

stdout 输出语料统计（每个模板生成的对话数等）。
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from ke_dial.config.settings import AppConfig, GenerationConfig, RunConfig
from ke_dial.data.io import is_per_kb_file, load_kb, load_table_kbs, load_templates, save_corpus
from ke_dial.data.quality import validate_templates
from ke_dial.domain.errors import ValidationError
from ke_dial.domain.graph import GraphKB
from ke_dial.genpipe.corpus import corpus_stats
from ke_dial.genpipe.graph import generate_graph_iterative, select_subgraph
from ke_dial.genpipe.table import generate_per_kb, generate_table
from ke_dial.ke.template import Template
from ke_dial.scripts.common import split_list

logger = logging.getLogger(__name__)

HELP = "由模板生成 KE 对话"
MODES = ("TABLE_BATCH", "TABLE_PER_KB", "GRAPH_ITERATIVE")


def add_arguments(ap: argparse.ArgumentParser, common: argparse.ArgumentParser) -> None:
    ap.add_argument("--templates", required=True, help="模板 JSON/JSONL")
    ap.add_argument("--kb", required=True, help="表格 KB、多样本 KB JSON 或图 KB TSV")
    ap.add_argument("--out", required=True, help="输出语料 JSONL（TABLE_PER_KB 时为目录）")
    ap.add_argument("--mode", choices=MODES, default=None, help="生成模式")
    ap.add_argument("--max-templates", type=int, default=None, help="只使用前 k 个模板")
    ap.add_argument("--result-cap", type=int, default=None, help="每个模板最多使用的结果行数")
    ap.add_argument("--iterations", type=int, default=None, help="图模式迭代轮数")
    ap.add_argument("--templates-per-iteration", type=int, default=None, help="图模式每轮采样数")
    ap.add_argument("--seeds", default=None, help="子图种子节点，逗号分隔（图模式）")
    ap.add_argument("--z-history", default=None, help="Z 账本历史 CSV（图模式）")


def input_args(args: argparse.Namespace) -> list[str]:
    return ["templates", "kb"]


def _mode(args: argparse.Namespace, cfg: AppConfig) -> str:
    if args.mode is not None:
        return args.mode
    if Path(args.kb).suffix.lower() == ".tsv":
        return "GRAPH_ITERATIVE"
    if is_per_kb_file(args.kb):
        return "TABLE_PER_KB"
    return cfg.generation.mode


def _generation_config(args: argparse.Namespace, cfg: AppConfig, mode: str, jobs: int):
    overrides = {
        "mode": mode,
        "seed": args.seed,
        "jobs": jobs,
        "result_cap": args.result_cap,
        "iterations": args.iterations,
        "templates_per_iteration": args.templates_per_iteration,
    }
    data = cfg.generation.model_dump()
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return GenerationConfig.model_validate(data)
    except PydanticValidationError as e:
        raise ValidationError(f"invalid generation options: {e.errors()[0]['msg']}") from None


def _graph_seeds(args: argparse.Namespace, templates: list[Template], g: GraphKB) -> list[str]:
    seeds = split_list(args.seeds)
    if seeds:
        return seeds
    return sorted({s for t in templates for s in t.binding.entries.values() if s in g.nodes})


def run(args: argparse.Namespace, cfg: AppConfig, run_cfg: RunConfig) -> dict:
    mode = _mode(args, cfg)
    gen_cfg = _generation_config(args, cfg, mode, run_cfg.jobs)
    templates = load_templates(args.templates)
    if args.max_templates is not None:
        templates = templates[: args.max_templates]
    out = Path(args.out)

    if mode == "TABLE_PER_KB":
        kbs = load_table_kbs(args.kb)
        corpora = generate_per_kb(templates, list(kbs.items()), gen_cfg)
        out.mkdir(parents=True, exist_ok=True)
        report: dict = {"mode": mode, "samples": {}}
        for sample_id, corpus in corpora.items():
            if corpus.error is not None:
                report["samples"][sample_id] = {"error": corpus.error}
                continue
            save_corpus(corpus, out / f"{sample_id}.jsonl")
            report["samples"][sample_id] = corpus_stats(corpus)
        counts = [s["dialogues"] for s in report["samples"].values() if "dialogues" in s]
        report["dialogues"] = sum(counts)
        report["average_per_sample"] = sum(counts) / len(counts) if counts else 0.0
        return report

    kb = load_kb(args.kb)
    if mode == "GRAPH_ITERATIVE":
        if not isinstance(kb, GraphKB):
            raise ValidationError("GRAPH_ITERATIVE needs a graph KB (.tsv)", path=args.kb)
        seeds = _graph_seeds(args, templates, kb)
        if seeds:
            kb = select_subgraph(kb, seeds, gen_cfg.subgraph_hop, gen_cfg.subgraph_max_edges)
            logger.info(f"subgraph: {len(kb.nodes)} nodes, {len(kb.edges)} edges")
        corpus, history = generate_graph_iterative(templates, kb, gen_cfg)
        save_corpus(corpus, out)
        z_path = Path(args.z_history) if args.z_history else out.with_suffix(".zhistory.csv")
        history.to_csv(z_path)
        report = {"mode": mode, **corpus_stats(corpus)}
        report["iterations"] = history.summary().to_dict(orient="records")
        return report

    if isinstance(kb, GraphKB):
        raise ValidationError(f"{mode} needs a table KB", path=args.kb)
    validate_templates(templates, kb)
    corpus = generate_table(templates, kb, gen_cfg)
    save_corpus(corpus, out)
    return {"mode": mode, **corpus_stats(corpus)}


def main() -> None:
    from ke_dial.cli import run_command

    raise SystemExit(run_command("generate"))


if __name__ == "__main__":
    main()
