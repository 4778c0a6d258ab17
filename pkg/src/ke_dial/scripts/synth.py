"""
生成合成语料
============

用法：
    ke-dial synth --out data/synth --rows 40 --templates 20 --oov-fraction 0.5

输出目录内容：
- kb.json：合成表格 KB
- templates.json：预置模板
- base.jsonl / test.jsonl / oov_test.jsonl：三份对话
- queries.json：base 对话 id -> 查询（可直接用于 delex）
- 指定 --graph-nodes 时另有 graph.tsv 和 graph_templates.json
"""

from __future__ import annotations

import argparse
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from ke_dial.config.settings import AppConfig, RunConfig, SyntheticSpec
from ke_dial.data.io import (
    save_dialogues,
    save_graph_kb,
    save_queries,
    save_table_kb,
    save_templates,
)
from ke_dial.domain.errors import ValidationError
from ke_dial.genpipe.synth import synth_corpus, synth_graph, synth_graph_templates

HELP = "生成自包含的合成 KB、模板和对话"


def add_arguments(ap: argparse.ArgumentParser, common: argparse.ArgumentParser) -> None:
    defaults = SyntheticSpec()
    ap.add_argument("--out", required=True, help="输出目录")
    ap.add_argument("--rows", type=int, default=defaults.n_rows, help="KB 行数")
    ap.add_argument("--attributes", type=int, default=defaults.n_attributes, help="属性数（2-8）")
    ap.add_argument("--templates", type=int, default=defaults.n_templates, help="模板数")
    ap.add_argument("--oov-fraction", type=float, default=defaults.oov_fraction, help="OOV 行比例")
    ap.add_argument("--graph-nodes", type=int, default=None, help="同时生成合成图的节点数")
    ap.add_argument("--graph-edges", type=int, default=None, help="合成图的边数（默认 4 倍节点数）")


def input_args(args: argparse.Namespace) -> list[str]:
    return []


def run(args: argparse.Namespace, cfg: AppConfig, run_cfg: RunConfig) -> dict:
    try:
        spec = SyntheticSpec(
            n_rows=args.rows,
            n_attributes=args.attributes,
            n_templates=args.templates,
            oov_fraction=args.oov_fraction,
            seed=args.seed,
        )
    except PydanticValidationError as e:
        raise ValidationError(f"invalid synthetic spec: {e.errors()[0]['msg']}") from None
    corpus = synth_corpus(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    save_table_kb(corpus.kb, out / "kb.json")
    save_templates(corpus.templates, out / "templates.json")
    save_dialogues(corpus.base, out / "base.jsonl")
    save_dialogues(corpus.test, out / "test.jsonl")
    save_dialogues(corpus.oov_test, out / "oov_test.jsonl")
    template_of = {t.id[len("tpl-") :]: t.query for t in corpus.templates}
    save_queries({d.id: template_of[d.id.split("-")[1]] for d in corpus.base}, out / "queries.json")

    report = {
        "base": len(corpus.base),
        "in_vocab_rows": len(corpus.in_vocab_rows),
        "oov_rows": len(corpus.oov_rows),
        "oov_test": len(corpus.oov_test),
        "templates": len(corpus.templates),
        "test": len(corpus.test),
    }
    if args.graph_nodes:
        edges = args.graph_edges if args.graph_edges is not None else 4 * args.graph_nodes
        g = synth_graph(args.graph_nodes, 4, edges, args.seed)
        save_graph_kb(g, out / "graph.tsv")
        save_templates(synth_graph_templates(g, spec.n_templates, args.seed), out / "graph_templates.json")
        report["graph_edges"] = len(g.edges)
        report["graph_nodes"] = len(g.nodes)
    return report


def main() -> None:
    from ke_dial.cli import run_command

    raise SystemExit(run_command("synth"))


if __name__ == "__main__":
    main()
